"""Spectral functionals T_G(f) and the finite-epsilon quotient m_eps(f).

For a monomial,

    T_G(z^j) = n^{-1/2} (j/2) sum_{k1 + k2 = j - 2} Tr(B M^k1 B M^k2),

and T_G is extended linearly to power series.  Traces are computed exactly by
sweeping blocks of unit columns through sparse products, never by stochastic
trace estimation.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import InvalidArgument
from .graphs import transition_matrix

DEFAULT_BLOCK = 256


@dataclass(frozen=True, eq=False)
class PowerSeries:
    """Analytic test function ``sum_k coeffs[k] z^k``.

    ``radius`` is the declared radius of convergence of the full series and
    ``tail`` the star-norm of any coefficients dropped when it was truncated.
    """

    coeffs: np.ndarray
    radius: float = math.inf
    tail: float = 0.0

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs))
        if c.ndim != 1 or c.size == 0:
            raise InvalidArgument("coefficients must be a non-empty 1-d sequence")
        c = c.astype(complex if np.iscomplexobj(c) else float)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def monomial(cls, j, coef=1.0):
        c = np.zeros(j + 1)
        c[j] = coef
        return cls(c)

    @classmethod
    def from_callable(cls, coef, degree, radius, rtol=1e-17, max_terms=100_000):
        """Truncate ``sum coef(k) z^k`` at ``degree``, recording the tail star-norm."""
        coeffs = np.array([coef(k) for k in range(degree + 1)])
        tail, k, small = 0.0, degree + 1, 0
        while k < max_terms:
            term = abs(coef(k)) * k * k
            tail += term
            # stop after a run of negligible terms (geometric decay past the radius)
            small = small + 1 if term <= rtol * max(tail, 1e-300) else 0
            if small >= 8:
                break
            k += 1
        return cls(coeffs, radius, tail)

    @property
    def degree(self):
        nz = np.flatnonzero(self.coeffs)
        return int(nz[-1]) if nz.size else 0

    @property
    def is_real(self):
        return not np.iscomplexobj(self.coeffs) or not np.any(self.coeffs.imag)

    def star_norm(self):
        k = np.arange(self.coeffs.size)
        return float(np.sum(np.abs(self.coeffs) * k * k))

    def composed_with_square(self):
        """The series of ``f(z^2)``."""
        c = np.zeros(2 * self.coeffs.size - 1, dtype=self.coeffs.dtype)
        c[::2] = self.coeffs
        radius = math.sqrt(self.radius) if math.isfinite(self.radius) else math.inf
        return PowerSeries(c, radius, 4.0 * self.tail)

    def derivative(self):
        k = np.arange(1, self.coeffs.size)
        if k.size == 0:
            return PowerSeries([0.0])
        return PowerSeries(self.coeffs[1:] * k, self.radius)

    def __call__(self, x):
        return np.polynomial.polynomial.polyval(x, self.coeffs)

    def __add__(self, other):
        m = max(self.coeffs.size, other.coeffs.size)
        c = np.zeros(m, dtype=np.result_type(self.coeffs, other.coeffs))
        c[:self.coeffs.size] += self.coeffs
        c[:other.coeffs.size] += other.coeffs
        return PowerSeries(c, min(self.radius, other.radius), self.tail + other.tail)

    def __mul__(self, alpha):
        return PowerSeries(self.coeffs * alpha, self.radius, abs(alpha) * self.tail)

    __rmul__ = __mul__


def star_norm(f):
    return f.star_norm()


def _unit_block(n, cols):
    e = np.zeros((n, len(cols)))
    e[cols, np.arange(len(cols))] = 1.0
    return e


def _trace_part(x, cols):
    return x[cols, np.arange(len(cols))].sum()


def trace_products(g, b, kmax, block=DEFAULT_BLOCK):
    """Matrix ``P[k1, k2] = Tr(B M^k1 B M^k2)`` for ``0 <= k1, k2 <= kmax``.

    Uses ``e_v^T B M^k1 B M^k2 e_v = <M^k1 B^T e_v, B M^k2 e_v>`` (M is
    symmetric) on blocks of unit columns.
    """
    n = g.n
    M = transition_matrix(g)
    B = b.matrix()
    BT = B.T.tocsr()
    P = np.zeros((kmax + 1, kmax + 1))
    for start in range(0, n, block):
        cols = np.arange(start, min(start + block, n))
        w = _unit_block(n, cols)
        left = [BT @ w]
        right = [B @ w]
        for _ in range(kmax):
            left.append(M @ left[-1])
            w = M @ w
            right.append(B @ w)
        L = np.stack(left).reshape(kmax + 1, -1)
        R = np.stack(right).reshape(kmax + 1, -1)
        P += L @ R.T
    return P


def t_monomials(g, b, jmax, block=DEFAULT_BLOCK):
    """Array of ``T_G(z^j)`` for ``j = 0..jmax``."""
    out = np.zeros(jmax + 1)
    if jmax < 2:
        return out
    P = trace_products(g, b, jmax - 2, block)
    for j in range(2, jmax + 1):
        s = sum(P[k1, j - 2 - k1] for k1 in range(j - 1))
        out[j] = 0.5 * j * s / math.sqrt(g.n)
    return out


def t_monomial(g, b, j):
    if j < 0:
        raise InvalidArgument("monomial degree must be >= 0")
    return float(t_monomials(g, b, j)[j])


def t_function(g, b, f):
    """``sum_j a_j T_G(z^j)`` over the (finite) coefficients of ``f``."""
    deg = f.degree
    vals = t_monomials(g, b, deg)
    out = np.dot(f.coeffs[:deg + 1], vals)
    return float(out.real) if f.is_real else complex(out)


def tail_bound(b, f):
    """A-priori bound ``c1^2 sqrt(n) ||tail||_*`` on the truncation error of T_G(f)."""
    return b.c1 ** 2 * math.sqrt(b.graph.n) * f.tail


def t_bound(b, f):
    """Upper bound ``c1^2 sqrt(n) ||f||_*`` on ``|T_G(f)|``."""
    return b.c1 ** 2 * math.sqrt(b.graph.n) * f.star_norm()


def m_eps(g, b, f, eps, tol=1e-12, block=DEFAULT_BLOCK, return_terms=False):
    """``int f dm_eps = n^{-1/2} eps^-2 (Tr f(M + eps B) - Tr f(M))``.

    ``m_eps`` is the centered empirical eigenvalue measure scaled by
    ``sqrt(n) / eps^2``; the empirical measure carries mass 1/n per eigenvalue,
    hence the net ``n^{-1/2}``.

    The difference ``D_k = (A^k - M^k) E`` is carried directly through
    ``D_{k+1} = A D_k + eps B M^k E`` so the O(1) parts of the two traces never
    cancel in floating point.  Coefficients past the point where
    ``2 n sum_{k>K} |a_k|`` drops below ``tol`` are skipped.
    """
    if not 0 < eps < 1.0 / b.c1:
        raise InvalidArgument(f"eps must lie in (0, 1/c1) = (0, {1.0 / b.c1:g})")
    if not f.radius > 1:
        raise InvalidArgument("series radius must exceed 1")
    n = g.n
    a = f.coeffs
    suffix = np.cumsum(np.abs(a[::-1]))[::-1]  # suffix[k] = sum_{i >= k} |a_i|
    K = f.degree
    for k in range(1, a.size):
        if 2 * n * suffix[k] <= tol:
            K = k - 1
            break
    M = transition_matrix(g)
    B = b.matrix()
    A = (M + eps * B).tocsr()
    acc = np.zeros(1, dtype=a.dtype)
    for start in range(0, n, block):
        cols = np.arange(start, min(start + block, n))
        w = _unit_block(n, cols)
        diff = np.zeros_like(w)
        for k in range(K):
            diff = A @ diff + eps * (B @ w)
            w = M @ w
            acc += a[k + 1] * _trace_part(diff, cols)
    val = acc[0] / (math.sqrt(n) * eps ** 2)
    val = float(val.real) if f.is_real else complex(val)
    if return_terms:
        return val, K
    return val


def zero_entry_check(g, b, kmax, block=DEFAULT_BLOCK):
    """``max_{v, 0 <= k <= kmax} |(B M^k)_{v,v}|``."""
    n = g.n
    M = transition_matrix(g)
    adj = g.adjacency
    worst = 0.0
    for start in range(0, n, block):
        cols = np.arange(start, min(start + block, n))
        w = _unit_block(n, cols)
        local = np.arange(len(cols))[:, None]
        for k in range(kmax + 1):
            if k:
                w = M @ w
            # (B M^k)_{v,v} = sum_a B[v, a] (M^k)[adj[v, a], v]
            diag = (b.entries[cols] * w[adj[cols], local]).sum(axis=1)
            worst = max(worst, float(np.abs(diag).max()))
    return worst


def quadratic_forms(g, jmax):
    """Sparse symmetric Q_j with ``T_G(z^j) = vec(B)^T Q_j vec(B)``.

    ``vec(B)[u*d + a] = B[u, adjacency[u, a]]``.  Expanding the trace,

        Tr(B M^k1 B M^k2) = sum B[u,a] B[w,b] M^k1[adj[u,a], w] M^k2[adj[w,b], u].

    Returns a list indexed by j (entries for j < 2 are zero matrices).
    """
    n, d = g.adjacency.shape
    adj = g.adjacency
    M = transition_matrix(g)
    powers = [sp.identity(n, format="csr")]
    for _ in range(max(jmax - 2, 0)):
        powers.append((M @ powers[-1]).tocsr())
    gathered = [[P[adj[:, a], :].tocsr() for a in range(d)] for P in powers]
    out = []
    for j in range(jmax + 1):
        rows, cols, vals = [], [], []
        for k1 in range(max(j - 1, 0)):
            k2 = j - 2 - k1
            for a in range(d):
                X = gathered[k1][a]
                for bb in range(d):
                    K = X.multiply(gathered[k2][bb].T).tocoo()
                    rows.append(K.row * d + a)
                    cols.append(K.col * d + bb)
                    vals.append(K.data)
        if rows:
            scale = 0.5 * j / math.sqrt(n)
            Q = sp.coo_matrix((np.concatenate(vals) * scale,
                               (np.concatenate(rows), np.concatenate(cols))),
                              shape=(n * d, n * d)).tocsr()
            Q = ((Q + Q.T) * 0.5).tocsr()
        else:
            Q = sp.csr_matrix((n * d, n * d))
        out.append(Q)
    return out


def evaluate_quadratic(Q, entries):
    """Values of ``vec(B)^T Q vec(B)`` for a batch ``entries`` of shape (S, n, d)."""
    X = entries.reshape(entries.shape[0], -1).T
    return np.einsum("is,is->s", X, Q @ X)
