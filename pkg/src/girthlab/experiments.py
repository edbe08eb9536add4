"""Monte Carlo campaigns over random environments.

A campaign draws N independent perturbations (sample ``i`` uses the seed
``derive_seed(master, i)``), evaluates T_G on a panel of functions, and
compares the empirical moments with the exact covariance form H_G and, for
squared functions, with the tree-limit covariance.  All statistical checks use
a 4 standard-error band; covariance standard errors are leave-one-out
jackknife estimates.
"""

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .covariance import alpha_table, h_form
from .environment import Perturbation, derive_seed, make_sampler, sample_rows
from .errors import GateViolation, InvalidArgument
from .functionals import (PowerSeries, evaluate_quadratic, m_eps,
                          quadratic_forms, t_function)
from .graphs import TransitiveGraph
from .treeform import tree_covariance

Z_BAND = 4.0
KS_ALPHA = 0.01


@dataclass(frozen=True)
class FunctionSpec:
    """A named test function; ``squared`` means T is applied to ``f(z^2)``."""

    name: str
    series: PowerSeries
    squared: bool = False

    @property
    def expanded(self):
        return self.series.composed_with_square() if self.squared else self.series


@dataclass
class ExperimentConfig:
    graph: object
    sampler: str = "antisym"
    functions: list = field(default_factory=list)
    samples: int = 10_000
    seed: int = 0
    base_vector: object = None
    eps: tuple = ()
    eps_samples: int = 20
    override_gate: bool = False
    tree_reference: bool = True
    batch: int = 2000
    threads: int = 1

    def resolve_graph(self):
        if isinstance(self.graph, TransitiveGraph):
            return self.graph
        from .config import parse_graph_spec
        return parse_graph_spec(self.graph)

    def to_dict(self):
        g = self.graph if isinstance(self.graph, str) else self.graph.name
        return {"graph": g, "sampler": self.sampler,
                "base_vector": None if self.base_vector is None else list(map(float, self.base_vector)),
                "functions": [{"name": f.name, "coeffs": f.series.coeffs.tolist(),
                               "squared": f.squared} for f in self.functions],
                "samples": self.samples, "seed": self.seed, "eps": list(self.eps),
                "override_gate": self.override_gate}


# -- statistics ------------------------------------------------------------------

@dataclass(frozen=True)
class NormalityReport:
    n: int
    mean: float
    variance: float
    skewness: float
    excess_kurtosis: float
    ks_statistic: float
    ks_pvalue: float
    degenerate: bool
    n_distinct: int

    @property
    def skew_band(self):
        return Z_BAND * math.sqrt(6.0 / self.n)

    @property
    def kurtosis_band(self):
        return Z_BAND * math.sqrt(24.0 / self.n)

    def passes(self, alpha=KS_ALPHA):
        if self.degenerate:
            return False
        return (abs(self.skewness) < self.skew_band
                and abs(self.excess_kurtosis) < self.kurtosis_band
                and self.ks_pvalue > alpha)


def normality_report(samples):
    """Moment statistics and a one-sample KS test against the fitted normal.

    The p-value comes from the asymptotic Kolmogorov distribution.  It is only
    meaningful for continuous laws; ``n_distinct`` flags samples that sit on a
    coarse lattice, where the KS distance stays bounded away from 0 at any N.
    """
    x = np.asarray(samples, dtype=float)
    n = x.size
    if n < 100:
        raise InvalidArgument("normality_report needs at least 100 samples")
    mean, var = float(x.mean()), float(x.var(ddof=1))
    distinct = int(np.unique(x).size)
    if var <= 1e-24 * max(1.0, mean * mean):
        nan = math.nan
        return NormalityReport(n, mean, var, nan, nan, nan, nan, True, distinct)
    ks = stats.kstest(x, "norm", args=(mean, math.sqrt(var)), method="asymp")
    return NormalityReport(n, mean, var, float(stats.skew(x)),
                           float(stats.kurtosis(x, fisher=True)),
                           float(ks.statistic), float(ks.pvalue), False, distinct)


def jackknife_cov(x, y):
    """Sample covariance of (x, y) and its leave-one-out jackknife standard error."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    n = x.size
    # center first so the leave-one-out formulas do not cancel badly
    x = x - x.mean()
    y = y - y.mean()
    sx, sy, sxy = x.sum(), y.sum(), np.dot(x, y)
    cov = (sxy - sx * sy / n) / (n - 1)
    loo = ((sxy - x * y) - (sx - x) * (sy - y) / (n - 1)) / (n - 2)
    se = math.sqrt((n - 1) / n * np.sum((loo - loo.mean()) ** 2))
    return float(cov), se


def z_score(empirical, reference, se):
    diff = empirical - reference
    if se > 0:
        return diff / se
    return 0.0 if abs(diff) <= 1e-12 else math.copysign(math.inf, diff)


def covariance_comparison(values, references, names=None):
    """Rows ``(pair, empirical, reference, se, z)`` for every i <= j.

    ``references`` is an F x F array; NaN entries are reported with a note
    instead of a z-score.
    """
    values = np.asarray(values, float)
    F = values.shape[1]
    names = names or [f"f{i}" for i in range(F)]
    rows = []
    for i in range(F):
        for j in range(i, F):
            emp, se = jackknife_cov(values[:, i], values[:, j])
            ref = references[i][j] if references is not None else math.nan
            row = {"pair": (names[i], names[j]), "empirical": emp, "se": se}
            if ref is None or (isinstance(ref, float) and math.isnan(ref)):
                row.update(reference=None, z=None, note="no reference")
            else:
                row.update(reference=float(ref), z=z_score(emp, float(ref), se))
            rows.append(row)
    return rows


# -- campaign -------------------------------------------------------------------

@dataclass
class Check:
    name: str
    value: float
    reference: float
    tolerance: float
    passed: bool

    def to_dict(self):
        return {"name": self.name, "value": self.value, "reference": self.reference,
                "tolerance": self.tolerance, "passed": bool(self.passed)}


@dataclass
class CampaignResult:
    config: dict
    graph: dict
    sampler: str
    names: list
    values: np.ndarray
    mean: np.ndarray
    variance: np.ndarray
    covariance: np.ndarray
    mean_se: np.ndarray
    normality: list
    h_reference: np.ndarray
    tree_reference: np.ndarray
    tree_gated: np.ndarray
    h_comparison: list
    tree_comparison: list
    checks: list
    ungated: bool
    gates: dict
    eps_sweep: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def column(self, name):
        return self.values[:, self.names.index(name)]

    def to_dict(self, include_samples=False):
        def clean(a):
            a = np.asarray(a, float)
            return [[None if math.isnan(v) else v for v in row] for row in a.tolist()]
        out = {
            "config": self.config, "graph": self.graph, "sampler": self.sampler,
            "functions": self.names, "ungated": self.ungated, "gates": self.gates,
            "mean": self.mean.tolist(), "mean_se": self.mean_se.tolist(),
            "variance": self.variance.tolist(), "covariance": self.covariance.tolist(),
            "normality": [r.__dict__ for r in self.normality],
            "h_reference": clean(self.h_reference),
            "tree_reference": clean(self.tree_reference),
            "tree_gated": self.tree_gated.tolist(),
            "h_comparison": self.h_comparison, "tree_comparison": self.tree_comparison,
            "checks": [c.to_dict() for c in self.checks], "passed": self.passed,
            "eps_sweep": self.eps_sweep,
        }
        if include_samples:
            out["samples"] = self.values.tolist()
        return out

    def to_json(self, **kw):
        return json.dumps(self.to_dict(**kw), indent=2, default=_json_default)


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, tuple):
        return list(o)
    raise TypeError(type(o))


def _degree_gates(g, degrees, override):
    jmax = max(degrees) if degrees else 0
    cap = g.girth - 2
    gates = {"max_degree": jmax, "degree_cap": cap,
             "tree_exact_degree": (g.girth - 2) // 2 + 1}
    if jmax > cap and not override:
        raise GateViolation(
            f"monomial degree {jmax} exceeds girth - 2 = {cap} on {g.name}; "
            f"requires girth >= {jmax + 2}", required_girth=jmax + 2)
    return gates, jmax > cap


def run_campaign(cfg):
    g = cfg.resolve_graph()
    s = make_sampler(cfg.sampler, g.d, cfg.base_vector)
    if cfg.samples < 2:
        raise InvalidArgument("need at least 2 samples")
    if not cfg.functions:
        raise InvalidArgument("campaign needs at least one function")
    expanded = [f.expanded for f in cfg.functions]
    degrees = [f.degree for f in expanded]
    gates, ungated = _degree_gates(g, degrees, cfg.override_gate)
    jmax = max(max(degrees), 2)
    F = len(expanded)
    W = np.zeros((F, jmax + 1))
    for i, f in enumerate(expanded):
        if not f.is_real:
            raise InvalidArgument(f"{cfg.functions[i].name}: campaign functions must be real")
        W[i, :f.coeffs.size] = f.coeffs.real[:jmax + 1]
    Qs = quadratic_forms(g, jmax)
    bounds = np.array([s.c1 ** 2 * math.sqrt(g.n) * f.star_norm() for f in expanded])

    def batch(start):
        idx = np.arange(start, min(start + cfg.batch, cfg.samples), dtype=np.uint64)
        entries = sample_rows(s, g.n, derive_seed(cfg.seed, idx))
        mon = np.stack([evaluate_quadratic(Q, entries) for Q in Qs])
        return (W @ mon).T

    starts = range(0, cfg.samples, cfg.batch)
    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            parts = list(pool.map(batch, starts))
    else:
        parts = [batch(st) for st in starts]
    values = np.concatenate(parts, axis=0)
    # a-priori bound |T_G(f)| <= c1^2 sqrt(n) ||f||_* must hold on every sample
    viol = np.abs(values) > bounds * (1 + 1e-12)
    if np.any(viol):
        raise AssertionError(f"T_G bound violated in {int(viol.sum())} samples")

    N = cfg.samples
    mean = values.mean(axis=0)
    cov = np.atleast_2d(np.cov(values, rowvar=False, ddof=1))
    var = np.diag(cov).copy()
    mean_se = np.sqrt(var / N)
    normality = [normality_report(values[:, i]) for i in range(F)] if N >= 100 else []

    table = alpha_table(g, s, cap=jmax)
    H = np.array([[h_form(table, a, b) for b in expanded] for a in expanded])
    names = [f.name for f in cfg.functions]
    h_cmp = covariance_comparison(values, H, names)

    tree = np.full((F, F), np.nan)
    gated = np.zeros((F, F), dtype=bool)
    if cfg.tree_reference:
        for i, fi in enumerate(cfg.functions):
            for j, fj in enumerate(cfg.functions):
                if fi.squared and fj.squared:
                    tree[i, j] = tree_covariance(g.d, fi.series, fj.series)
                    gated[i, j] = degrees[i] + degrees[j] <= g.girth - 2
    tree_ref = np.where(gated, tree, np.nan)
    tree_cmp = covariance_comparison(values, tree_ref, names) if gated.any() else []

    checks = []
    for i, name in enumerate(names):
        z = z_score(mean[i], 0.0, mean_se[i])
        checks.append(Check(f"mean[{name}]", float(mean[i]), 0.0, Z_BAND * mean_se[i],
                            abs(z) <= Z_BAND))
    for label, rows in (("H", h_cmp), ("tree", tree_cmp)):
        for row in rows:
            if row.get("z") is None:
                continue
            a, b = row["pair"]
            checks.append(Check(f"cov_{label}[{a},{b}]", row["empirical"], row["reference"],
                                Z_BAND * row["se"], abs(row["z"]) <= Z_BAND))

    sweep = {}
    if cfg.eps:
        sweep = eps_sweep(g, s, cfg, expanded, names)

    return CampaignResult(cfg.to_dict(), g.info(), s.label, names, values, mean, var, cov,
                          mean_se, normality, H, tree, gated, h_cmp, tree_cmp, checks,
                          ungated, gates, sweep)


def perturbation_for(g, s, master, index):
    """The perturbation a campaign with seed ``master`` uses for sample ``index``."""
    seed = derive_seed(master, np.array([index], dtype=np.uint64))
    entries = sample_rows(s, g.n, seed)[0]
    entries.setflags(write=False)
    return Perturbation(g, entries, int(seed[0]), s)


def loglog_slope(eps, err):
    eps = np.asarray(eps, float)
    err = np.asarray(err, float)
    return float(np.polyfit(np.log(eps), np.log(err), 1)[0])


def eps_sweep(g, s, cfg, expanded, names):
    """``|m_eps(f) - T_G(f)|`` over cfg.eps for the first ``eps_samples`` samples."""
    out = {}
    count = min(cfg.eps_samples, cfg.samples)
    for name, f in zip(names, expanded):
        errs, slopes = [], []
        for i in range(count):
            b = perturbation_for(g, s, cfg.seed, i)
            t = t_function(g, b, f)
            e = [abs(m_eps(g, b, f, eps) - t) for eps in cfg.eps]
            errs.append(e)
            if len(cfg.eps) >= 2 and min(e) > 0:
                slopes.append(loglog_slope(cfg.eps, e))
        out[name] = {"eps": list(cfg.eps), "errors": errs, "slopes": slopes}
    return out
