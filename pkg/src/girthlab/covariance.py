"""The covariance form H_G and its coefficients alpha_ij.

    H_G(f, g) = 1/2 sum_ij i j alpha_ij [x^i]f [x^j]g,
    alpha_ij  = E sum_{v != o} Y_i(o, v) Y_j(o, v),
    Y_j(o, v) = sum_{j1 + j2 = j - 2} (B M^j1)_{o,v} (B M^j2)_{v,o}.

Rows o and v of B are independent, so each term factors into two second
moments that only involve the sampler's slot covariance C:

    E[(B M^k)_{o,v} (B M^l)_{o,v}] = sum_{a,b} C[a,b] M^k[adj[o,a], v] M^l[adj[o,b], v].

Everything here is deterministic; no sampling happens in this module.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgument

DEFAULT_CAP = 12


@dataclass(frozen=True, eq=False)
class AlphaTable:
    """alpha_ij for ``0 <= i, j <= cap`` plus per-entry tree-exactness flags."""

    values: np.ndarray
    exact: np.ndarray
    source: str
    sampler: str
    c1: float
    meta: dict = field(default_factory=dict)

    @property
    def cap(self):
        return self.values.shape[0] - 1

    def __getitem__(self, ij):
        return float(self.values[ij])

    def to_dict(self):
        return {"source": self.source, "sampler": self.sampler, "c1": self.c1,
                "cap": self.cap, "alpha": self.values.tolist(),
                "tree_exact": self.exact.tolist(), **self.meta}

    @classmethod
    def from_dict(cls, data):
        meta = {k: v for k, v in data.items()
                if k not in ("source", "sampler", "c1", "cap", "alpha", "tree_exact")}
        return cls(np.array(data["alpha"], float), np.array(data["tree_exact"], bool),
                   data["source"], data["sampler"], float(data["c1"]), meta)


def _powers_of_columns(adj, d, starts, kmax):
    """``out[k, s, :] = M^k e_{starts[s]}``; slot -1 in ``adj`` means no neighbor."""
    n = adj.shape[0]
    x = np.zeros((len(starts), n + 1))
    x[np.arange(len(starts)), starts] = 1.0
    out = [x[:, :n].copy()]
    for _ in range(kmax):
        # column n stays 0 and absorbs missing slots
        x[:, :n] = x[:, adj].sum(axis=2) / d
        out.append(x[:, :n].copy())
    return np.stack(out)


def _alpha_core(adj, d, C, o, cap):
    n = adj.shape[0]
    K = max(cap - 2, 0)
    nbrs = adj[o]
    if np.any(nbrs < 0):
        raise InvalidArgument("root must have a full set of neighbors")
    # R[k, a, v] = M^k[adj[o,a], v]   (M symmetric)
    R = _powers_of_columns(adj, d, nbrs, K)
    # c[k, v] = M^k[v, o];  Gc[k, a, v] = M^k[adj[v,a], o]
    c = _powers_of_columns(adj, d, np.array([o]), K)[:, 0, :]
    c_ext = np.concatenate([c, np.zeros((K + 1, 1))], axis=1)
    Gc = np.transpose(c_ext[:, adj], (0, 2, 1))
    E1 = np.einsum("ab,kav,lbv->klv", C, R, R)
    E2 = np.einsum("ab,kav,lbv->klv", C, Gc, Gc)
    E1[:, :, o] = 0.0
    m = K + 1
    # F[i1, j1, i2, j2] = sum_v E1[i1, j1, v] E2[i2, j2, v]
    F = (E1.reshape(m * m, n) @ E2.reshape(m * m, n).T).reshape(m, m, m, m)
    alpha = np.zeros((cap + 1, cap + 1))
    for i in range(2, cap + 1):
        for j in range(2, cap + 1):
            s = 0.0
            for i1 in range(i - 1):
                for j1 in range(j - 1):
                    s += F[i1, j1, i - 2 - i1, j - 2 - j1]
            alpha[i, j] = s
    return 0.5 * (alpha + alpha.T)


def _check_sampler(g, s):
    if s.d != g.d:
        raise InvalidArgument(f"sampler degree {s.d} != graph degree {g.d}")


def alpha_table(g, s, cap=DEFAULT_CAP, root=0):
    """All alpha_ij with ``i, j <= cap`` on a finite transitive graph."""
    _check_sampler(g, s)
    vals = _alpha_core(g.adjacency, g.d, np.asarray(s.row_cov), root, cap)
    i = np.arange(cap + 1)
    exact = (i[:, None] + i[None, :]) <= g.girth - 2
    return AlphaTable(vals, exact, g.name, s.label, s.c1,
                      {"n": g.n, "d": g.d, "girth": g.girth})


def alpha(g, s, i, j, root=0):
    if i < 0 or j < 0:
        raise InvalidArgument("indices must be >= 0")
    return alpha_table(g, s, max(i, j, 2), root)[i, j]


def truncated_tree(d, depth):
    """Padded adjacency of the depth-``depth`` ball in the d-regular tree.

    Vertex 0 is the root; slot 0 of every other vertex is its parent and
    missing children at the boundary are marked -1.
    """
    if d < 2 or int(d) != d:
        raise InvalidArgument("tree degree must be an integer >= 2")
    d = int(d)
    adj = [[-1] * d]
    frontier = [0]
    for level in range(depth):
        nxt = []
        for u in frontier:
            first = 0 if u == 0 else 1
            for a in range(first, d):
                w = len(adj)
                adj.append([u] + [-1] * (d - 1))
                adj[u][a] = w
                nxt.append(w)
        frontier = nxt
    return np.array(adj, dtype=np.int64)


def min_tree_depth(i, j):
    return math.ceil((i + j) / 2) + 1


def tree_alpha_table(d, s, cap, depth=None):
    """alpha_ij of the infinite d-regular tree for ``i, j <= cap``.

    Computed on a truncated tree deep enough that no walk counted by any entry
    can reach the boundary.
    """
    need = min_tree_depth(cap, cap)
    if depth is None:
        depth = need
    elif depth < need:
        raise InvalidArgument(f"depth {depth} too small for cap {cap}; need >= {need}")
    if s.d != d:
        raise InvalidArgument(f"sampler degree {s.d} != tree degree {d}")
    adj = truncated_tree(d, depth)
    vals = _alpha_core(adj, d, np.asarray(s.row_cov), 0, cap)
    return AlphaTable(vals, np.ones_like(vals, dtype=bool), f"tree_d{d}", s.label, s.c1,
                      {"d": d, "depth": depth})


def tree_alpha(d, s, i, j, depth=None):
    need = min_tree_depth(i, j)
    if depth is None:
        depth = need
    elif depth < need:
        raise InvalidArgument(f"depth {depth} too small for (i, j) = ({i}, {j}); "
                              f"need >= {need}")
    cap = max(i, j, 2)
    adj = truncated_tree(d, depth)
    if s.d != d:
        raise InvalidArgument(f"sampler degree {s.d} != tree degree {d}")
    return float(_alpha_core(adj, d, np.asarray(s.row_cov), 0, cap)[i, j])


def h_form(table, f, g):
    """``1/2 sum_ij i j alpha_ij [x^i]f [x^j]g``."""
    a, b = f.coeffs, g.coeffs
    deg = max(f.degree, g.degree)
    if deg > table.cap:
        raise InvalidArgument(f"degree {deg} exceeds alpha table cap {table.cap}")
    m = table.cap + 1
    fa = np.zeros(m, dtype=a.dtype)
    ga = np.zeros(m, dtype=b.dtype)
    fa[:min(a.size, m)] = a[:m]
    ga[:min(b.size, m)] = b[:m]
    k = np.arange(m)
    out = 0.5 * (fa * k) @ table.values @ (ga * k)
    return float(out.real) if np.isrealobj(out) or out.imag == 0 else complex(out)


def h_bound(table, f, g):
    """Upper bound ``c1^4 ||f||_* ||g||_*`` on ``|H(f, g)|``."""
    return table.c1 ** 4 * f.star_norm() * g.star_norm()
