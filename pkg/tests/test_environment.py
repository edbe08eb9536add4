import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import dense_B
from girthlab.environment import (derive_seed, keyed_uniforms, make_sampler,
                                  row_covariance, sample, sample_rows)
from girthlab.errors import InvalidArgument
from girthlab.graphs import build_cycle, build_lcf

SAMPLERS = [("antisym", 2, None), ("antisym-uniform", 2, None), ("balanced", 4, None),
            ("balanced", 6, None), ("permvec", 3, None), ("permvec", 4, None),
            ("permvec", 3, [1.0, math.sqrt(2) - 1, -math.sqrt(2)])]


def normalized(v):
    v = np.asarray(v, float)
    return v * math.sqrt(len(v) / (v @ v))


def enumerated_cov(base):
    rows = np.array(sorted(set(itertools.permutations(base))))
    return rows.T @ rows / len(rows)


def test_antisym_covariance():
    np.testing.assert_array_equal(row_covariance(make_sampler("antisym", 2)),
                                  [[1, -1], [-1, 1]])


def test_balanced_cov_matches_enumeration():
    C = row_covariance(make_sampler("balanced", 4))
    np.testing.assert_allclose(C, enumerated_cov([1, 1, -1, -1]), atol=1e-15)
    assert C[0, 1] == pytest.approx(-1 / 3)


def test_permvec_default_base():
    s = make_sampler("permvec", 3)
    np.testing.assert_allclose(s.base_vector, [math.sqrt(1.5), 0, -math.sqrt(1.5)])
    np.testing.assert_allclose(enumerated_cov(s.base_vector), s.row_cov, atol=1e-15)


@pytest.mark.parametrize("kind,d,base", SAMPLERS)
def test_sampler_invariants(kind, d, base):
    s = make_sampler(kind, d, None if base is None else normalized(base))
    C = s.row_cov
    np.testing.assert_allclose(np.diag(C), 1)
    np.testing.assert_allclose(C.sum(axis=1), 0, atol=1e-15)
    assert np.linalg.eigvalsh(C).min() > -1e-12
    rows = sample_rows(s, 1000, derive_seed(7, np.arange(100)))
    np.testing.assert_allclose(rows.sum(axis=-1), 0, atol=1e-12)
    assert d * np.abs(rows).max() <= s.c1 * (1 + 1e-15)


@pytest.mark.parametrize("kind,d,base", SAMPLERS)
def test_sampler_moments(kind, d, base):
    s = make_sampler(kind, d, None if base is None else normalized(base))
    N = 100_000
    rows = sample_rows(s, N, np.array([12345], dtype=np.uint64))[0]
    assert np.all(np.abs(rows.mean(axis=0)) < 4 * np.sqrt(rows.var(axis=0) / N) + 1e-15)
    for a in range(d):
        for b in range(d):
            prod = rows[:, a] * rows[:, b]
            se = prod.std() / math.sqrt(N)
            assert abs(prod.mean() - s.row_cov[a, b]) <= 5 * se + 1e-12
    # distinct rows are independent
    x, y = rows[:-1, 0], rows[1:, 0]
    r = np.corrcoef(x, y)[0, 1]
    assert abs(r) < 4 / math.sqrt(N)


def test_invalid_samplers():
    with pytest.raises(InvalidArgument):
        make_sampler("balanced", 3)
    with pytest.raises(InvalidArgument):
        make_sampler("antisym", 3)
    with pytest.raises(InvalidArgument):
        make_sampler("permvec", 3, [1, 1, 1])
    with pytest.raises(InvalidArgument):
        make_sampler("permvec", 3, [1, -1, 0])        # squared norm 2, not 3
    with pytest.raises(InvalidArgument):
        make_sampler("permvec", 3, [1, -1])
    with pytest.raises(InvalidArgument):
        make_sampler("gaussian", 3)


def test_cycle_antisymmetry_and_zero_rows():
    g = build_cycle(31)
    b = sample(make_sampler("antisym", 2), g, 5)
    np.testing.assert_array_equal(b.entries[:, 0], -b.entries[:, 1])
    B = dense_B(b)
    np.testing.assert_array_equal(B.sum(axis=1), 0)
    np.testing.assert_array_equal(np.diag(B), 0)
    np.testing.assert_array_equal(b.matrix().toarray(), B)


def test_degree_mismatch():
    with pytest.raises(InvalidArgument):
        sample(make_sampler("antisym", 2), build_lcf("heawood"), 0)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 64 - 1))
def test_sample_deterministic(seed):
    g = build_lcf("heawood")
    s = make_sampler("permvec", 3)
    a, b = sample(s, g, seed), sample(s, g, seed)
    assert a.entries.tobytes() == b.entries.tobytes()


def test_keyed_uniforms_order_independent():
    seeds = derive_seed(3, np.arange(6))
    whole = keyed_uniforms(seeds, 50, 3)
    # the same draws come back for a subset of seeds or a shorter prefix of vertices
    np.testing.assert_array_equal(keyed_uniforms(seeds[[4, 1]], 50, 3), whole[[4, 1]])
    np.testing.assert_array_equal(keyed_uniforms(seeds, 20, 3), whole[:, :20])
    assert whole.min() >= 0 and whole.max() < 1


def test_derive_seed_distinct():
    s = derive_seed(0, np.arange(100_000))
    assert len(np.unique(s)) == 100_000
    assert derive_seed(1, 5) != derive_seed(2, 5)


def test_csv_export(tmp_path):
    g = build_cycle(5)
    b = sample(make_sampler("antisym-uniform", 2), g, 11)
    path = tmp_path / "b.csv"
    b.to_csv(path)
    data = np.genfromtxt(path, delimiter=",", names=True)
    assert len(data) == 10
    back = np.zeros((5, 2))
    back[data["vertex"].astype(int), data["slot"].astype(int)] = data["value"]
    np.testing.assert_array_equal(back, b.entries)
