"""
Exception hierarchy shared by every package.

Treebank errors carry a source position so command-line tools can
print `file:line:column` diagnostics.
"""

from typing import Optional


class DresError(Exception):
    """Root of all toolkit errors"""


class TreebankError(DresError, ValueError):
    """Malformed treebank input"""

    def __init__(self, message: str, line: int = 0, column: int = 0, source: Optional[str] = None):
        super().__init__(message)
        self.message = message
        self.line = line
        self.column = column
        self.source = source

    def with_source(self, source: str) -> "TreebankError":
        self.source = source
        return self

    def __str__(self):
        where = f"{self.line}:{self.column}"
        if self.source:
            where = f"{self.source}:{where}"
        return f"{where}: {self.message}"


class UnbalancedParens(TreebankError):
    """A parenthesis without a partner"""


class EmptyTree(TreebankError):
    """A node with neither a terminal nor children"""


class TerminalWithChildren(TreebankError):
    """A preterminal that also holds subtrees or extra words"""


class UnlabeledNode(TreebankError):
    """An unlabeled node that is not a single-child wrapper"""


class EmptyInput(DresError, ValueError):
    """An operation received nothing to work on"""


class InvalidRate(DresError, ValueError):
    """A probability outside [0, 1]"""


class LengthMismatch(DresError, ValueError):
    """Parallel sequences disagree in length"""


class InsufficientExemplars(DresError, ValueError):
    """Fewer exemplar pairs than shots requested"""


class CorpusFormatError(DresError, ValueError):
    """A corpus record contradicts its own tree"""


class ConfigurationError(DresError, ValueError):
    """Bad configuration file or missing credential"""


class BackendError(DresError):
    """A model backend rejected a request"""


class TransientBackendError(BackendError):
    """A failure worth retrying (timeouts, rate limits, 5xx)"""


class BackendUnreachable(BackendError):
    """Retries exhausted"""


class CacheCorruption(DresError):
    """A cache entry that cannot be trusted"""
