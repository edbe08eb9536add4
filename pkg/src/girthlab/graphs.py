"""Finite vertex-transitive graphs: cycles, LCF cubic graphs and SL(2, p) Cayley graphs.

Every graph is stored as an ``(n, d)`` integer array of neighbor ids.  The
column index of a neighbor is its *slot*; slot order is fixed at construction
and is what the environment samplers index their row covariances by.
"""

from collections import deque
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import InvalidArgument, InvalidCode


@dataclass(frozen=True, eq=False)
class TransitiveGraph:
    """A d-regular, connected, vertex-transitive graph.

    Attributes
    ----------
    adjacency : ndarray of shape (n, d)
        ``adjacency[u, a]`` is the neighbor of ``u`` in slot ``a``.
    girth : int
        Length of the shortest cycle, computed by BFS at build time.
    family_tag : str
        One of ``"cycle"``, ``"lcf"``, ``"cayley"``.
    name : str
        Human readable label, e.g. ``"foster"`` or ``"C_200"``.
    """

    adjacency: np.ndarray
    girth: int
    family_tag: str
    name: str = ""
    params: dict = field(default_factory=dict)

    @property
    def n(self):
        return self.adjacency.shape[0]

    @property
    def d(self):
        return self.adjacency.shape[1]

    def neighbors(self, u):
        return self.adjacency[u]

    def info(self):
        return {"name": self.name, "family": self.family_tag,
                "n": int(self.n), "d": int(self.d), "girth": int(self.girth)}

    def __repr__(self):
        return (f"TransitiveGraph({self.name!r}, n={self.n}, d={self.d}, "
                f"girth={self.girth})")


@dataclass(frozen=True)
class LcfCode:
    jumps: tuple
    exponent: int
    declared_vertex_transitive: bool = False

    @property
    def n(self):
        return len(self.jumps) * self.exponent


# Standard LCF notations for symmetric cubic graphs.  All five are arc-transitive.
LCF_CATALOG = {
    "heawood": LcfCode((5, -5), 7, True),
    "pappus": LcfCode((5, 7, -7, 7, -7, -5), 3, True),
    "desargues": LcfCode((5, -5, 9, -9), 5, True),
    "tutte-coxeter": LcfCode((-13, -9, 7, -7, 9, 13), 5, True),
    "foster": LcfCode((17, -9, 37, -37, 9, -17), 15, True),
}

# girth values these codes are expected to produce; checked at build time
LCF_CATALOG_GIRTH = {"heawood": 6, "pappus": 6, "desargues": 6,
                     "tutte-coxeter": 8, "foster": 10}


def _freeze(adj):
    adj = np.ascontiguousarray(adj, dtype=np.int64)
    adj.setflags(write=False)
    return adj


def _check_regular_simple(adj):
    n, d = adj.shape
    if np.any(adj < 0) or np.any(adj >= n):
        raise InvalidArgument("neighbor id out of range")
    if np.any(adj == np.arange(n)[:, None]):
        raise InvalidArgument("self-loop")
    srt = np.sort(adj, axis=1)
    if d > 1 and np.any(srt[:, 1:] == srt[:, :-1]):
        raise InvalidArgument("repeated neighbor (multi-edge)")
    # symmetry: u lists v iff v lists u
    fwd = set(zip(np.repeat(np.arange(n), d).tolist(), adj.ravel().tolist()))
    for u, v in fwd:
        if (v, u) not in fwd:
            raise InvalidArgument(f"adjacency not symmetric at ({u}, {v})")


def _is_connected(adj):
    return len(bfs_distances(adj, 0)) == adj.shape[0]


def bfs_distances(g, v):
    """Distances from ``v`` to every reachable vertex, as a dict."""
    adj = g.adjacency if isinstance(g, TransitiveGraph) else g
    dist = {int(v): 0}
    queue = deque([int(v)])
    while queue:
        u = queue.popleft()
        du = dist[u] + 1
        for w in adj[u]:
            w = int(w)
            if w >= 0 and w not in dist:
                dist[w] = du
                queue.append(w)
    return dist


def ball(g, v, radius):
    """Sorted array of vertices within ``radius`` of ``v``."""
    dist = bfs_distances(g, v)
    return np.array(sorted(u for u, r in dist.items() if r <= radius))


def _girth_of(adj):
    n = adj.shape[0]
    rows = adj.tolist()
    best = np.inf
    for s in range(n):
        dist = {s: 0}
        parent = {s: -1}
        queue = deque([s])
        while queue:
            u = queue.popleft()
            du = dist[u]
            # no cycle shorter than best can be found past this depth
            if 2 * du + 1 >= best:
                break
            for w in rows[u]:
                if w not in dist:
                    dist[w] = du + 1
                    parent[w] = u
                    queue.append(w)
                elif w != parent[u]:
                    best = min(best, du + dist[w] + 1)
    if not np.isfinite(best):
        raise InvalidArgument("graph is acyclic")
    return int(best)


def girth(g):
    """Exact girth by breadth-first search from every vertex."""
    adj = g.adjacency if isinstance(g, TransitiveGraph) else np.asarray(g)
    return _girth_of(adj)


def _make(adj, family, name, params):
    adj = _freeze(adj)
    _check_regular_simple(adj)
    if not _is_connected(adj):
        raise InvalidArgument(f"{name} is not connected")
    return TransitiveGraph(adj, _girth_of(adj), family, name, dict(params))


def build_cycle(n):
    """The n-cycle; slot 0 is the predecessor and slot 1 the successor."""
    if int(n) != n or n < 3:
        raise InvalidArgument(f"cycle needs n >= 3, got {n}")
    n = int(n)
    u = np.arange(n)
    adj = np.stack([(u - 1) % n, (u + 1) % n], axis=1)
    return _make(adj, "cycle", f"C_{n}", {"n": n})


def build_lcf(code, name=None):
    """Cubic graph from LCF notation: Hamiltonian cycle plus one chord per vertex.

    Slots are (predecessor, successor, chord).
    """
    if isinstance(code, str):
        key = code.lower()
        if key not in LCF_CATALOG:
            raise InvalidArgument(f"unknown LCF catalog entry {code!r}; "
                                  f"known: {sorted(LCF_CATALOG)}")
        name = name or key
        code = LCF_CATALOG[key]
    jumps = tuple(int(j) for j in code.jumps)
    if not jumps or code.exponent < 1:
        raise InvalidCode("empty LCF code")
    n = len(jumps) * code.exponent
    if n < 4:
        raise InvalidCode("LCF graph needs at least 4 vertices")
    u = np.arange(n)
    chord = (u + np.array(jumps * code.exponent)) % n
    if np.any(chord == u):
        raise InvalidCode("LCF jump produces a self-loop")
    if np.any((chord == (u + 1) % n) | (chord == (u - 1) % n)):
        raise InvalidCode("LCF chord duplicates a cycle edge")
    if np.any(chord[chord] != u):
        raise InvalidCode("LCF chords collide (chord of target does not return)")
    adj = np.stack([(u - 1) % n, (u + 1) % n, chord], axis=1)
    name = name or "lcf[" + ",".join(map(str, jumps)) + f"]^{code.exponent}"
    params = {"jumps": list(jumps), "exponent": code.exponent,
              "declared_vertex_transitive": code.declared_vertex_transitive}
    g = _make(adj, "lcf", name, params)
    expected = LCF_CATALOG_GIRTH.get(name)
    if expected is not None and g.girth != expected:
        raise InvalidCode(f"{name}: girth {g.girth}, catalog says {expected}")
    return g


def _is_prime(p):
    return p >= 2 and all(p % q for q in range(2, int(p ** 0.5) + 1))


def _mat(m, p):
    arr = np.asarray(m, dtype=np.int64)
    if arr.size != 4:
        raise InvalidArgument(f"generator must be a 2x2 matrix, got {m!r}")
    arr = arr.reshape(2, 2) % p
    return tuple(int(x) for x in arr.ravel())


def _mul(x, y, p):
    a, b, c, d = x
    e, f, g, h = y
    return ((a * e + b * g) % p, (a * f + b * h) % p,
            (c * e + d * g) % p, (c * f + d * h) % p)


def _inv(x, p):
    a, b, c, d = x
    det = (a * d - b * c) % p
    if det == 0:
        raise InvalidArgument(f"generator {x} is not invertible mod {p}")
    di = pow(det, -1, p)
    return ((d * di) % p, (-b * di) % p, (-c * di) % p, (a * di) % p)


def standard_generators():
    """{A, A^-1, B, B^-1} with A = [[1, 2], [0, 1]] and B = [[1, 0], [2, 1]]."""
    return [[[1, 2], [0, 1]], [[1, -2], [0, 1]],
            [[1, 0], [2, 1]], [[1, 0], [-2, 1]]]


def build_cayley(p, generators=None):
    """Right Cayley graph of the subgroup of GL(2, Z_p) generated by ``generators``.

    Vertex 0 is the identity; slot ``a`` of vertex ``x`` is ``x * generators[a]``.
    Left multiplication acts by automorphisms, so the graph is vertex-transitive.
    """
    p = int(p)
    if not _is_prime(p):
        raise InvalidArgument(f"modulus {p} is not prime")
    if generators is None:
        generators = standard_generators()
    gens = [_mat(m, p) for m in generators]
    ident = (1, 0, 0, 1)
    invs = [_inv(x, p) for x in gens]
    if ident in gens:
        raise InvalidArgument("identity generator")
    if len(set(gens)) != len(gens):
        raise InvalidArgument("repeated generator")
    if set(invs) != set(gens):
        raise InvalidArgument("generator set is not closed under inverses")

    index = {ident: 0}
    elems = [ident]
    rows = []
    i = 0
    while i < len(elems):
        x = elems[i]
        row = []
        for s in gens:
            y = _mul(x, s, p)
            j = index.get(y)
            if j is None:
                j = len(elems)
                index[y] = j
                elems.append(y)
            row.append(j)
        rows.append(row)
        i += 1
    return _make(np.array(rows), "cayley", f"cayley_p{p}",
                 {"p": p, "generators": [list(x) for x in gens], "elements": elems})


def sl2_order(p):
    return p * (p * p - 1)


def apply_M(g, x):
    """Transition operator: ``(M x)_u = mean of x over the neighbors of u``.

    ``x`` may be a vector of length n or an (n, k) block of columns.
    """
    x = np.asarray(x)
    if x.shape[0] != g.n:
        raise InvalidArgument(f"vector has length {x.shape[0]}, graph has n={g.n}")
    return x[g.adjacency].sum(axis=1) / g.d


def walk_matrix_column(g, v, k):
    """Column ``M^k e_v``; supported on the radius-k ball around v."""
    if k < 0:
        raise InvalidArgument("k must be >= 0")
    x = np.zeros(g.n)
    x[v] = 1.0
    for _ in range(int(k)):
        x = apply_M(g, x)
    return x


def transition_matrix(g):
    """Sparse CSR transition matrix M (entries 1/d on edges)."""
    n, d = g.adjacency.shape
    rows = np.repeat(np.arange(n), d)
    return sp.csr_matrix((np.full(n * d, 1.0 / d), (rows, g.adjacency.ravel())),
                         shape=(n, n))


def is_bipartite(g):
    color = {0: 0}
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for w in g.adjacency[u]:
            w = int(w)
            if w not in color:
                color[w] = 1 - color[u]
                queue.append(w)
            elif color[w] == color[u]:
                return False
    return True
