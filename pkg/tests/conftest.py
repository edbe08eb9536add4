import numpy as np
import pytest

from girthlab.graphs import build_cayley, build_cycle, build_lcf


def dense_M(g):
    """Walk matrix built entrywise from the adjacency lists (test oracle)."""
    M = np.zeros((g.n, g.n))
    for u in range(g.n):
        for w in g.adjacency[u]:
            M[u, w] += 1.0 / g.d
    return M


def dense_B(b):
    g = b.graph
    B = np.zeros((g.n, g.n))
    for u in range(g.n):
        for a, w in enumerate(g.adjacency[u]):
            B[u, w] += b.entries[u, a]
    return B


@pytest.fixture(scope="session")
def foster():
    return build_lcf("foster")


@pytest.fixture(scope="session")
def c200():
    return build_cycle(200)


@pytest.fixture(scope="session")
def cayley5():
    return build_cayley(5)
