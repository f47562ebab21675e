"""Session-wide fixtures.

The example bundles are expensive (the ladder reproductions dominate), so
they are computed once per session and shared between the harness tests
and the acceptance suite.
"""

import pytest

from fdbt import reproduce_example


class BundleCache:
    """Lazily computed reproduction bundles, one per example name."""

    def __init__(self):
        self._store = {}

    def get(self, name):
        if name not in self._store:
            self._store[name] = reproduce_example(name)
        return self._store[name]


@pytest.fixture(scope="session")
def bundles():
    return BundleCache()
