"""
Content-addressed response cache.

One JSON document per request fingerprint, stored under
`<cache_dir>/<fp[:2]>/<fp>.json`. Entries are written to a temporary file
and renamed into place. Writers of one fingerprint are serialized through a
fixed pool of striped locks.
"""

import json
import os
import tempfile
import threading
from pathlib import Path
from typing import Optional, Union

from core import CacheCorruption

LOCK_STRIPES = 64


class ResponseCache:
    """Fingerprint -> raw reply store"""

    def __init__(self, cache_dir: Union[str, Path]):
        self.root = Path(cache_dir)
        self.root.mkdir(parents=True, exist_ok=True)
        self._locks = tuple(threading.Lock() for _ in range(LOCK_STRIPES))
        self._guard = threading.Lock()
        self.hits = 0
        self.misses = 0

    def path_for(self, fingerprint: str) -> Path:
        return self.root / fingerprint[:2] / f"{fingerprint}.json"

    def _lock(self, fingerprint: str) -> threading.Lock:
        return self._locks[hash(fingerprint) % len(self._locks)]

    def get(self, fingerprint: str) -> Optional[dict]:
        """
        Return the stored entry, or None on a miss.

        Raises CacheCorruption for unreadable entries or entries stored
        under another fingerprint.
        """
        path = self.path_for(fingerprint)
        with self._lock(fingerprint):
            if not path.exists():
                with self._guard:
                    self.misses += 1
                return None
            try:
                entry = json.loads(path.read_text(encoding="utf-8"))
            except (OSError, UnicodeDecodeError, json.JSONDecodeError) as error:
                raise CacheCorruption(f"Unreadable cache entry {path}: {error}") from error
        if not isinstance(entry, dict) or entry.get("fingerprint") != fingerprint or "raw_text" not in entry:
            raise CacheCorruption(f"Cache entry {path} does not belong to fingerprint {fingerprint}")
        with self._guard:
            self.hits += 1
        return entry

    def put(self, fingerprint: str, entry: dict) -> None:
        path = self.path_for(fingerprint)
        record = dict(entry, fingerprint=fingerprint)
        with self._lock(fingerprint):
            path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
            try:
                with os.fdopen(fd, "w", encoding="utf-8") as f:
                    json.dump(record, f, ensure_ascii=False, sort_keys=True)
                os.replace(tmp, path)
            except BaseException:
                if os.path.exists(tmp):
                    os.unlink(tmp)
                raise
