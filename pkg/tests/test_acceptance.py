"""Acceptance criteria 1-10.  Each test prints one PASS/FAIL line."""

import math

import numpy as np
import pytest

from girthlab.covariance import tree_alpha
from girthlab.environment import make_sampler, sample
from girthlab.experiments import ExperimentConfig, FunctionSpec, run_campaign
from girthlab.functionals import PowerSeries, m_eps, t_function, zero_entry_check
from girthlab.graphs import build_cycle, build_lcf
from girthlab.treeform import (TreeModel, beta_hat, green, integrate_interval,
                               integrate_square, kernel_beta, kernel_beta2_diagonal,
                               kernel_beta_boundary_check, lhs_ratio_form,
                               limit_density, localization_ratio, s_param,
                               stieltjes_residual)

from conftest import dense_B, dense_M

mono = PowerSeries.monomial
SQRT2 = math.sqrt(2)
# generic zero-sum base for d = 3: no rational relations, so T is not lattice valued
GENERIC_BASE = np.array([1.0, SQRT2 - 1, -SQRT2]) * math.sqrt(3 / (6 - 2 * SQRT2))


@pytest.fixture
def report(capsys):
    def emit(criterion, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {criterion:>2}] {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail
    return emit


def test_criterion_01_zero_entry(report):
    c200 = build_cycle(200)
    worst = max(zero_entry_check(c200, sample(make_sampler("antisym", 2), c200, s), 30)
                for s in range(3))
    foster = build_lcf("foster")
    for base in (None, GENERIC_BASE):
        s = make_sampler("permvec", 3, base)
        worst = max(worst, max(zero_entry_check(foster, sample(s, foster, k), 4) for k in range(3)))
    report(1, worst <= 1e-14, f"max |(B M^k)_vv| = {worst:.3g} (C_200 k<=30, Foster k<=4)")


def radial_green(d, lam, depth):
    m = depth + 1
    A = np.zeros((m, m), dtype=complex)
    A[0, 0], A[0, 1] = 1, -lam
    for r in range(1, m):
        A[r, r], A[r, r - 1] = 1, -lam / d
        if r + 1 < m:
            A[r, r + 1] = -lam * (d - 1) / d
    rhs = np.zeros(m, dtype=complex)
    rhs[0] = 1
    return np.linalg.solve(A, rhs)


def test_criterion_02_closed_forms(report):
    pts = [0.0, 0.45, -0.3 + 0.4j, 0.7j, 0.6 - 0.5j]
    route = 0.0
    for d in (2, 3, 4):
        for lam in pts:
            for mu in pts:
                a = beta_hat(d, s_param(d, lam), s_param(d, mu))
                route = max(route, abs(a - lhs_ratio_form(d, lam, mu)))
    gerr = 0.0
    for d in (2, 3, 4):
        for lam in (0.2, 0.4, 0.5 + 0.2j):
            oracle = radial_green(d, lam, 30)
            gerr = max(gerr, max(abs(green(d, lam, r) - oracle[r]) for r in range(12)))
    report(2, route <= 1e-12 and gerr <= 1e-10,
           f"lhs route gap {route:.2g}, Green vs depth-30 tree solve {gerr:.2g}")


def test_criterion_03_kernel(report):
    gap = 0.0
    for d in (2.1, 3, 4):
        t = TreeModel(d)
        x = (np.arange(20) + 0.5) / 20 * t.rho
        X, Y = np.meshgrid(x, x)
        a, b = kernel_beta(t, X, Y), kernel_beta_boundary_check(t, X, Y)
        gap = max(gap, float(np.max(np.abs(a - b))))
    val = kernel_beta(3, 4 / 9, 4 / 9)
    R = [localization_ratio(d) for d in (2.1, 3, 4)]
    ok = gap <= 1e-10 and abs(val - 162 / math.pi ** 2) <= 1e-12 and R[0] > R[1] > R[2]
    report(3, ok, f"route gap {gap:.2g}, beta_3(4/9,4/9) - 162/pi^2 = {val - 162 / math.pi ** 2:.2g}, "
                  f"R = {R[0]:.4g} > {R[1]:.4g} > {R[2]:.4g}")


def test_criterion_04_normalization(report):
    dens = [integrate_interval(lambda x, d=d: limit_density(d, x), TreeModel(d).rho, 1e-12)[0]
            for d in (2, 3, 4)]
    dbl = [integrate_square(lambda x, y, d=d: kernel_beta(d, x, y), TreeModel(d).rho, 1e-9)[0]
           for d in (3, 4)]
    diag = integrate_interval(kernel_beta2_diagonal, 1.0, 1e-12)[0]
    ok = (max(abs(v - 1) for v in dens) <= 1e-8
          and abs(dbl[0] - 6) <= 1e-6 and abs(dbl[1] - 8) <= 1e-6 and abs(diag - 4) <= 1e-10)
    fmt = lambda vals: "[" + ", ".join(f"{float(v):.15g}" for v in vals) + "]"
    report(4, ok, f"int a_d = {fmt(dens)}, int int beta = {fmt(dbl)}, int beta2 = {float(diag):.15g}")


def test_criterion_05_stieltjes(report):
    pairs = [(0.3, 0.5), (0.5 + 0.2j, 0.4 - 0.1j), (0.01, 0.01), (0.8j, -0.6),
             (-0.7 + 0.3j, 0.2 + 0.5j), (0.9, 0.95)]
    res = [stieltjes_residual(d, lam, mu) for d in (3, 4) for lam, mu in pairs]
    report(5, max(res) < 1e-6, f"max residual {max(res):.2g} over {len(res)} (d, lam, mu)")


def test_criterion_06_moment_bridge(report):
    s = make_sampler("permvec", 3)
    rho = TreeModel(3).rho
    worst = 0.0
    for i in range(1, 4):
        for j in range(1, 4):
            lhs, _ = integrate_square(lambda x, y: i * x ** (i - 1) * j * y ** (j - 1)
                                      * kernel_beta(3, x, y), rho, 1e-10)
            worst = max(worst, abs(lhs - 2 * i * j * tree_alpha(3, s, 2 * i, 2 * j)))
    report(6, worst <= 1e-6, f"max |kernel moment - 2ij alpha_tree| = {worst:.2g}")


def _campaign_summary(res):
    bad = [c.name for c in res.checks if not c.passed]
    zmax = max((abs(r["z"]) for r in res.h_comparison if r.get("z") is not None), default=0)
    return bad, zmax


def test_criterion_07_mean_and_covariance(report):
    panel = [FunctionSpec(f"z{j}", mono(j)) for j in range(2, 7)]
    c200 = run_campaign(ExperimentConfig("cycle n=200", "antisym", panel, samples=10_000, seed=71))
    foster = run_campaign(ExperimentConfig("lcf name=foster", "permvec", panel,
                                           samples=10_000, seed=72))
    bad = _campaign_summary(c200)[0] + _campaign_summary(foster)[0]
    var2 = c200.variance[0]
    band = 4 * math.sqrt(2 / 1e4) * 4
    ok = not bad and abs(var2 - 4) <= band
    report(7, ok, f"{len(c200.checks) + len(foster.checks)} mean/cov checks, failing {bad}; "
                  f"C_200 Var T(z^2) = {var2:.4f} (4 +- {band:.3f})")


def test_criterion_08_tree_limit(report):
    panel = [FunctionSpec("z", mono(1), True), FunctionSpec("z2", mono(2), True),
             FunctionSpec("z+z2", PowerSeries([0, 1, 1]), True)]
    foster = run_campaign(ExperimentConfig("lcf name=foster", "permvec", panel,
                                           samples=10_000, seed=81))
    tree_rows = [r for r in foster.tree_comparison if r.get("z") is not None]
    tree_ok = len(tree_rows) == 6 and all(abs(r["z"]) <= 4 for r in tree_rows)
    cyc = run_campaign(ExperimentConfig("cycle n=500", "antisym", [panel[0]],
                                        samples=10_000, seed=82))
    row = cyc.tree_comparison[0]
    ok = tree_ok and abs(row["reference"] - 4) < 1e-9 and abs(row["z"]) <= 4
    zs = ", ".join(f"{r['z']:+.2f}" for r in tree_rows)
    report(8, ok, f"Foster tree z-scores [{zs}]; C_500 Var T~(z) = {row['empirical']:.4f}, "
                  f"z = {row['z']:+.2f}")


def _normal_or_degenerate(res, k):
    r = res.normality[k]
    if r.degenerate:
        # limit law N(0, H) with H = 0 is the point mass at 0
        return (np.all(res.values[:, k] == 0) and abs(res.h_reference[k, k]) < 1e-12,
                "identically 0, H = 0")
    ok = (abs(r.skewness) < r.skew_band and abs(r.excess_kurtosis) < r.kurtosis_band
          and r.ks_pvalue > 0.01)
    return ok, f"skew {r.skewness:+.4f}, ex.kurt {r.excess_kurtosis:+.4f}, KS p {r.ks_pvalue:.3f}"


def test_criterion_09_normality(report):
    panel = [FunctionSpec("z2", mono(2)), FunctionSpec("z3", mono(3))]
    cyc = run_campaign(ExperimentConfig("cycle n=500", "antisym-uniform", panel,
                                        samples=100_000, seed=91))
    fos = run_campaign(ExperimentConfig("lcf name=foster", "permvec", panel, samples=10_000,
                                        seed=92, base_vector=GENERIC_BASE))
    parts, ok = [], True
    for label, res in (("C_500", cyc), ("Foster", fos)):
        for k, name in enumerate(res.names):
            good, msg = _normal_or_degenerate(res, k)
            ok &= bool(good)
            parts.append(f"{label} T({name}): {msg}")
    report(9, ok, "; ".join(parts))


def dense_m_eps(g, b, f, eps):
    lam1 = np.linalg.eigvals(dense_M(g) + eps * dense_B(b))
    lam0 = np.linalg.eigvalsh(dense_M(g))
    return (np.sum(f(lam1)) - np.sum(f(lam0))).real / (math.sqrt(g.n) * eps ** 2)


def test_criterion_10_m_eps(report):
    g = build_cycle(12)
    s = make_sampler("antisym", 2)
    f = mono(4)
    eps = np.array([1e-1, 1e-2, 1e-3, 1e-4])
    slopes, oracle_gap = [], 0.0
    for seed in range(20):
        b = sample(s, g, seed)
        t = t_function(g, b, f)
        err = [abs(m_eps(g, b, f, e) - t) for e in eps]
        slopes.append(np.polyfit(np.log(eps), np.log(err), 1)[0])
        for e in (0.1, 0.01):
            oracle_gap = max(oracle_gap, abs(m_eps(g, b, f, e) - dense_m_eps(g, b, f, e)))
    foster = build_lcf("foster")
    sf = make_sampler("permvec", 3)
    h = PowerSeries([0.2, -0.5, 1.0, 0.3, -0.8, 0.1])
    for seed in range(3):
        b = sample(sf, foster, seed)
        for e in (0.1, 0.01):
            oracle_gap = max(oracle_gap, abs(m_eps(foster, b, h, e) - dense_m_eps(foster, b, h, e)))
    ok = min(slopes) >= 0.9 and oracle_gap <= 1e-8
    report(10, ok, f"min slope {min(slopes):.4f} over 20 seeds; eigen-oracle gap {oracle_gap:.2g}")
