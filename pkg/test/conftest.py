"""Pytest configuration for test package."""

from collections import deque

import pytest

import catalog
from tree import TreeShape


@pytest.fixture
def binary():
    return TreeShape.regular(2)


@pytest.fixture
def ternary():
    return TreeShape.regular(3)


@pytest.fixture(scope="session")
def grig():
    """Parsed shipped Grigorchuk spec (systems cache their decisions, so share it)."""
    return catalog.grigorchuk()


@pytest.fixture(scope="session")
def G(grig):
    return grig.group("G")


@pytest.fixture(scope="session")
def gs3():
    return catalog.gupta_sidki(3)


def _closure(perms):
    """All products of the given image arrays, by breadth-first search."""
    perms = [tuple(p) for p in perms]
    identity = tuple(range(len(perms[0])))
    seen = {identity}
    queue = deque([identity])
    while queue:
        x = queue.popleft()
        for p in perms:
            # apply x first, then p
            y = tuple(p[i] for i in x)
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return seen


@pytest.fixture
def closure():
    """Brute-force group closure oracle for small permutation groups."""
    return _closure
