"""Random environments: bounded, zero-row-sum perturbations B of the walk.

Row ``u`` of B is stored as a length-d vector aligned with the neighbor slots
of ``u``.  Rows are independent and exchangeable, so the per-row covariance is
``C[a, a] = 1`` and ``C[a, b] = -1/(d-1)`` off the diagonal, for every sampler
shipped here.

Randomness is counter based: the uniform draw for ``(seed, vertex, slot)`` is a
pure hash of those three integers, so a perturbation does not depend on the
order in which rows are generated and can be filled in any order or in
parallel.
"""

import csv
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import InvalidArgument

KINDS = ("antisymmetric-pair", "antisymmetric-uniform", "balanced-signs",
         "permuted-vector")

ALIASES = {"antisym": "antisymmetric-pair", "antisym-uniform": "antisymmetric-uniform",
           "balanced": "balanced-signs", "permvec": "permuted-vector"}

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MASK64 = (1 << 64) - 1


def _splitmix64(x):
    x = np.asarray(x, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = x + _GOLDEN
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))


def derive_seed(master, index):
    """64-bit seed for sample ``index`` of a campaign keyed by ``master``."""
    m = _splitmix64(np.uint64(int(master) & _MASK64))
    with np.errstate(over="ignore"):
        out = _splitmix64(m ^ _splitmix64(np.asarray(index, dtype=np.uint64)))
    return out


def keyed_uniforms(seeds, n, m):
    """Uniforms in [0, 1) of shape ``(len(seeds), n, m)``.

    Entry ``[s, v, t]`` depends only on ``(seeds[s], v, t)``.
    """
    seeds = np.atleast_1d(np.asarray(seeds, dtype=np.uint64))
    v = np.arange(n, dtype=np.uint64)
    t = np.arange(m, dtype=np.uint64)
    with np.errstate(over="ignore"):
        row_key = _splitmix64(_splitmix64(seeds)[:, None] ^ (v[None, :] * _GOLDEN))
        bits = _splitmix64(row_key[:, :, None] + t[None, None, :] * np.uint64(0xD1B54A32D192ED03))
    return (bits >> np.uint64(11)).astype(np.float64) * 2.0 ** -53


@dataclass(frozen=True, eq=False)
class EnvironmentSampler:
    """Recipe for random rows of B.

    ``c1`` bounds every realizable entry by ``c1 / d`` and ``row_cov`` is the
    exact slot covariance ``E[B[u, a] B[u, b]]``.
    """

    kind: str
    d: int
    base_vector: np.ndarray
    c1: float
    row_cov: np.ndarray

    @property
    def label(self):
        if self.kind == "permuted-vector":
            return self.kind + "[" + ",".join(f"{x:.6g}" for x in self.base_vector) + "]"
        return self.kind


def default_base_vector(d):
    """Zero-sum vector with squared norm d: +-1 pairs, plus a 0 when d is odd."""
    m = d // 2
    base = np.concatenate([np.ones(m), np.zeros(d - 2 * m), -np.ones(m)])
    return base * np.sqrt(d / (2.0 * m))


def exchangeable_covariance(d):
    c = np.full((d, d), -1.0 / (d - 1))
    np.fill_diagonal(c, 1.0)
    return c


def make_sampler(kind, d, base_vector=None):
    kind = ALIASES.get(kind, kind)
    if kind not in KINDS:
        raise InvalidArgument(f"unknown sampler kind {kind!r}")
    d = int(d)
    if d < 2:
        raise InvalidArgument("degree must be at least 2")
    if kind == "antisymmetric-pair":
        if d != 2:
            raise InvalidArgument("antisymmetric-pair requires d = 2")
        base, c1 = np.array([1.0, -1.0]), 2.0
    elif kind == "antisymmetric-uniform":
        if d != 2:
            raise InvalidArgument("antisymmetric-uniform requires d = 2")
        # sigma uniform on [-sqrt 3, sqrt 3] has unit variance
        base, c1 = np.array([1.0, -1.0]), 2.0 * np.sqrt(3.0)
    elif kind == "balanced-signs":
        if d % 2:
            raise InvalidArgument("balanced-signs requires even d")
        base = np.concatenate([np.ones(d // 2), -np.ones(d // 2)])
        c1 = float(d)
    else:
        base = default_base_vector(d) if base_vector is None else np.asarray(base_vector, float)
        if base.shape != (d,):
            raise InvalidArgument(f"base vector must have length {d}")
        scale = max(1.0, float(np.abs(base).max()))
        if abs(base.sum()) > 1e-12 * d * scale:
            raise InvalidArgument("base vector must sum to zero")
        if abs(base @ base - d) > 1e-12 * d:
            raise InvalidArgument("base vector must have squared norm d")
        c1 = d * float(np.abs(base).max())
    base = base.copy()
    base.setflags(write=False)
    cov = exchangeable_covariance(d)
    cov.setflags(write=False)
    return EnvironmentSampler(kind, d, base, c1, cov)


def row_covariance(s):
    return s.row_cov


@dataclass(frozen=True, eq=False)
class Perturbation:
    """One realization of B; ``entries[u, a] = B[u, adjacency[u, a]]``."""

    graph: object
    entries: np.ndarray
    seed: int
    sampler: EnvironmentSampler

    @property
    def c1(self):
        return self.sampler.c1

    def matrix(self):
        """B as a sparse CSR matrix."""
        g = self.graph
        rows = np.repeat(np.arange(g.n), g.d)
        return sp.csr_matrix((self.entries.ravel(), (rows, g.adjacency.ravel())),
                             shape=(g.n, g.n))

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["vertex", "slot", "value"])
            for u, row in enumerate(self.entries):
                for a, val in enumerate(row):
                    w.writerow([u, a, repr(float(val))])


def sample_rows(s, n, seeds):
    """Rows for a batch of seeds: array of shape ``(len(seeds), n, d)``."""
    d = s.d
    if s.kind == "antisymmetric-pair":
        u = keyed_uniforms(seeds, n, 1)[..., 0]
        sigma = np.where(u < 0.5, 1.0, -1.0)
        return np.stack([sigma, -sigma], axis=-1)
    if s.kind == "antisymmetric-uniform":
        u = keyed_uniforms(seeds, n, 1)[..., 0]
        sigma = np.sqrt(3.0) * (2.0 * u - 1.0)
        return np.stack([sigma, -sigma], axis=-1)
    # uniformly random arrangement of the base vector: argsort of iid uniforms
    u = keyed_uniforms(seeds, n, d)
    perm = np.argsort(u, axis=-1, kind="stable")
    return s.base_vector[perm]


def sample(s, g, seed):
    """Draw one perturbation of ``g``; bit-identical for equal (s, g, seed)."""
    if s.d != g.d:
        raise InvalidArgument(f"sampler degree {s.d} != graph degree {g.d}")
    entries = sample_rows(s, g.n, [int(seed) & _MASK64])[0]
    entries.setflags(write=False)
    return Perturbation(g, entries, int(seed), s)
