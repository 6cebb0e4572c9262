"""Shared pytest configuration and fixtures."""

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

import pytest

from extraction import synthesize_corpus


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: exhaustive sweeps (deselect with -m 'not slow')")


@pytest.fixture(scope="session")
def synth_corpus():
    """200 synthetic utterances in conversations of 10, seed 7"""
    return synthesize_corpus(200, seed=7)


@pytest.fixture
def golden_dir():
    return os.path.join(os.path.dirname(__file__), 'golden')
