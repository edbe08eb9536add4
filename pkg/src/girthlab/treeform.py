"""Closed forms on the infinite d-regular tree.

Green's function ``G_lam(r) = b a^r`` with

    s = sqrt(1 - rho lam^2),   a = 2 lam / (d (1 + s)),   b = 1 / (1 - lam a),

the limiting covariance kernel beta_d, its d = 2 diagonal limit, the
Kesten-McKay law of the squared eigenvalues, and quadrature for the covariance
double integral.  Square roots use the principal branch (cut on the negative
real axis), so ``Re s >= 0``.

``d`` may be any real number >= 2 for the kernel functions; it only needs to
be an integer where a graph is involved.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument, OutOfDomain

QUAD_TOL = 1e-8


@dataclass(frozen=True)
class TreeModel:
    d: float

    def __post_init__(self):
        if not self.d >= 2:
            raise InvalidArgument(f"tree degree must be >= 2, got {self.d}")

    @property
    def rho(self):
        """Squared spectral radius 4(d-1)/d^2 of the walk on the tree."""
        return 4.0 * (self.d - 1) / self.d ** 2


def _model(t):
    return t if isinstance(t, TreeModel) else TreeModel(t)


def s_param(t, lam):
    """``sqrt(1 - rho lam^2)``, principal branch."""
    t = _model(t)
    return np.sqrt(1.0 - t.rho * np.asarray(lam, dtype=complex) ** 2)


def _check_disc(lam):
    if np.any(np.abs(lam) >= 1):
        raise OutOfDomain(f"|lambda| must be < 1, got {lam}")


def green_coeffs(t, lam):
    """``(a_lam, b_lam)``; the lam -> 0 limit (0, 1) is returned at lam = 0."""
    t = _model(t)
    _check_disc(lam)
    lam = complex(lam)
    s = s_param(t, lam)
    # equal to d (1 - s) / (2 (d - 1) lam) without the cancellation near lam = 0
    a = 2.0 * lam / (t.d * (1.0 + s))
    b = 1.0 / (1.0 - lam * a)
    return complex(a), complex(b)


def green(t, lam, r):
    if r < 0:
        raise InvalidArgument("distance must be >= 0")
    a, b = green_coeffs(t, lam)
    return b * a ** r


def green_star(t, lam, r):
    """``G(r - 1) - G(r + 1) = b (1 - a^2) a^(r-1)`` for r >= 1."""
    if r < 1:
        raise InvalidArgument("green_star needs r >= 1")
    a, b = green_coeffs(t, lam)
    return b * (1.0 - a * a) * a ** (r - 1)


def lhs_ratio_form(t, lam, mu):
    """Geometric-series closed form in terms of (a, b)."""
    t = _model(t)
    al, bl = green_coeffs(t, lam)
    am, bm = green_coeffs(t, mu)
    d = t.d
    num = 2.0 * (bl * bm) ** 2 * (1 - al * al) ** 2 * (1 - am * am) ** 2 * d
    return num / (1.0 - (d - 1) * (al * am) ** 2)


def beta_hat(d, s, t):
    """The same quantity in the variables s, t."""
    return 32.0 * (d - 1) * d / ((1 + s) * (1 + t) * ((d - 2) * (1 + s) * (1 + t) + 2 * (s + t)))


def lhs_closed(t, lam, mu, check_tol=1e-10):
    """``2 sum_{w != o} G*_lam(r)^2 G*_mu(r)^2`` summed over the tree.

    Both algebraic forms are evaluated; a relative disagreement above
    ``check_tol`` raises ``ArithmeticError``.
    """
    t = _model(t)
    _check_disc(lam)
    _check_disc(mu)
    val = beta_hat(t.d, s_param(t, lam), s_param(t, mu))
    other = lhs_ratio_form(t, lam, mu)
    if abs(val - other) > check_tol * max(1.0, abs(val)):
        raise ArithmeticError(f"closed forms disagree: {val} vs {other}")
    return complex(val)


def lhs_series(t, lam, mu, rtol=1e-17, rmax=100_000):
    """Direct sum ``2 d sum_r (d-1)^(r-1) G*_lam(r)^2 G*_mu(r)^2``."""
    t = _model(t)
    d = t.d
    al, bl = green_coeffs(t, lam)
    am, bm = green_coeffs(t, mu)
    total = 0.0
    for r in range(1, rmax):
        gl = bl * (1 - al * al) * al ** (r - 1)
        gm = bm * (1 - am * am) * am ** (r - 1)
        term = 2 * d * (d - 1) ** (r - 1) * gl * gl * gm * gm
        total += term
        if abs(term) <= rtol * abs(total):
            break
    return complex(total)


def semicircle(t, x):
    """``kappa(x) = 2 d sqrt(x (rho - x))``."""
    t = _model(t)
    x = np.asarray(x, dtype=float)
    return 2.0 * t.d * np.sqrt(np.clip(x * (t.rho - x), 0.0, None))


def _check_open(x, hi):
    x = np.asarray(x, dtype=float)
    if np.any((x <= 0) | (x >= hi)):
        raise OutOfDomain(f"argument outside (0, {hi:g})")


def _kernel_unchecked(t, x, y):
    d, rho = t.d, t.rho
    diff2 = (x - y) ** 2
    kx, ky = semicircle(t, x), semicircle(t, y)
    A = rho * semicircle(t, 0.5 * (x + y)) ** 2 + 4 * (d + 3) * diff2 + rho ** 2 * (d - 2) ** 2
    return (2 * d ** 4 / math.pi ** 2) * (d - 2) * kx * ky / (16 * (2 * d - 3) * diff2 + (d - 2) ** 2 * A)


def kernel_beta(t, x, y):
    """Covariance kernel beta_d(x, y) on (0, rho)^2, for d > 2."""
    t = _model(t)
    if t.d <= 2:
        raise OutOfDomain("beta_d needs d > 2; use kernel_beta2_diagonal for d = 2")
    _check_open(x, t.rho)
    _check_open(y, t.rho)
    return _kernel_unchecked(t, np.asarray(x, float), np.asarray(y, float))


def boundary_s(t, x):
    """Boundary value of s(u) = sqrt(1 - rho/u) as u -> x in (0, rho) from above."""
    t = _model(t)
    return 1j * np.sqrt(t.rho / np.asarray(x, float) - 1.0)


def kernel_beta_boundary_check(t, x, y):
    """beta_d through the jump of beta_hat(u, v)/(u v) across the cut [0, rho].

    ``beta = -(4 pi^2 x y)^-1 sum_{sigma, tau = +-1} sigma tau beta_hat(sigma s, tau t)``.
    """
    t = _model(t)
    if t.d <= 2:
        raise OutOfDomain("beta_d needs d > 2")
    _check_open(x, t.rho)
    _check_open(y, t.rho)
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    s, u = boundary_s(t, x), boundary_s(t, y)
    total = sum(sg * tg * beta_hat(t.d, sg * s, tg * u)
                for sg in (1, -1) for tg in (1, -1))
    return (-total / (4 * math.pi ** 2 * x * y)).real


def kernel_beta2_diagonal(x):
    """Diagonal density ``(32/pi) sqrt(x (1 - x))`` of the d = 2 kernel."""
    _check_open(x, 1.0)
    x = np.asarray(x, float)
    return 32.0 / math.pi * np.sqrt(x * (1 - x))


def localization_ratio(t):
    """``beta_d(rho/2, rho/2) / beta_d(rho/4, 3 rho/4)``; grows without bound as d -> 2."""
    t = _model(t)
    r = t.rho
    return float(kernel_beta(t, r / 2, r / 2) / kernel_beta(t, r / 4, 3 * r / 4))


def limit_density(t, x):
    """Kesten-McKay law of the squared eigenvalues of the walk on the d-regular tree.

    ``(d / 2 pi) sqrt(rho - x) / (sqrt(x) (1 - x))`` on (0, rho), 0 elsewhere.
    """
    t = _model(t)
    x = np.asarray(x, float)
    inside = (x > 0) & (x < t.rho)
    xs = np.where(inside, x, 0.5 * t.rho)
    val = t.d / (2 * math.pi) * np.sqrt(t.rho - xs) / (np.sqrt(xs) * (1 - xs))
    return np.where(inside, val, 0.0)


# -- quadrature ----------------------------------------------------------------

def sin2_rule(rho, n):
    """Nodes and weights for ``int_0^rho h(x) dx`` after ``x = rho sin^2 theta``.

    Gauss-Legendre in theta; the Jacobian ``rho sin(2 theta)`` cancels square
    root behaviour at both endpoints.
    """
    z, w = np.polynomial.legendre.leggauss(n)
    theta = 0.25 * math.pi * (z + 1.0)
    x = rho * np.sin(theta) ** 2
    return x, w * 0.25 * math.pi * rho * np.sin(2 * theta)


def _refine(compute, tol, n0=16, nmax=1024):
    prev = compute(n0)
    n = n0
    err = math.inf
    while n < nmax:
        n *= 2
        cur = compute(n)
        err = abs(cur - prev)
        prev = cur
        if err <= tol:
            return cur, err
    warnings.warn(f"quadrature did not reach tolerance {tol:g}; "
                  f"estimated error {err:.3g}", RuntimeWarning, stacklevel=3)
    return prev, err


def integrate_interval(h, rho, tol=QUAD_TOL):
    """Adaptive ``int_0^rho h(x) dx`` with the sin^2 substitution; (value, error)."""
    def compute(n):
        x, w = sin2_rule(rho, n)
        return np.sum(w * h(x))
    return _refine(compute, tol)


def integrate_square(h, rho, tol=QUAD_TOL):
    """Adaptive tensor ``int int_{[0, rho]^2} h(x, y) dx dy``; (value, error)."""
    def compute(n):
        x, w = sin2_rule(rho, n)
        return w @ h(x[:, None], x[None, :]) @ w
    return _refine(compute, tol)


def _derivative(f):
    return f.derivative() if hasattr(f, "derivative") else f


def tree_covariance(t, f, g, tol=QUAD_TOL, full_output=False):
    """Limiting ``E[T~(f) T~(g)] = int int f'(x) g'(y) beta_d(x, y) dx dy``.

    For d = 2 this collapses to ``(32/pi) int_0^1 f'(x) g'(x) sqrt(x(1-x)) dx``.
    """
    t = _model(t)
    fp, gp = _derivative(f), _derivative(g)
    if t.d == 2:
        val, err = integrate_interval(
            lambda x: fp(x) * gp(x) * 32.0 / math.pi * np.sqrt(x * (1 - x)), 1.0, tol)
    else:
        val, err = integrate_square(
            lambda x, y: fp(x) * gp(y) * _kernel_unchecked(t, x, y), t.rho, tol)
    val = val.real if np.isrealobj(val) or val.imag == 0 else val
    return (val, err) if full_output else val


def stieltjes_rhs(t, lam, mu, tol=QUAD_TOL):
    """``u v int int beta_d(x, y) / ((x - u)(y - v)) dx dy`` with ``u = lam^-2, v = mu^-2``.

    Written as ``int int beta_d / ((1 - lam^2 x)(1 - mu^2 y))`` so it stays
    finite at lam = 0.
    """
    t = _model(t)
    l2, m2 = complex(lam) ** 2, complex(mu) ** 2
    return integrate_square(
        lambda x, y: _kernel_unchecked(t, x, y) / ((1 - l2 * x) * (1 - m2 * y)), t.rho, tol)


def _cut_distance(u, rho):
    if u is None:
        return math.inf
    if 0 <= u.real <= rho:
        return abs(u.imag)
    return min(abs(u), abs(u - rho))


def stieltjes_residual(t, lam, mu, tol=QUAD_TOL):
    """``|lhs_closed(lam, mu) - u v int int beta_d / ((x - u)(y - v))|``."""
    t = _model(t)
    if t.d <= 2:
        raise OutOfDomain("Stieltjes identity check needs d > 2")
    _check_disc(lam)
    _check_disc(mu)
    for z in (lam, mu):
        u = None if z == 0 else 1.0 / complex(z) ** 2
        if _cut_distance(u, t.rho) < 10 * tol:
            raise OutOfDomain(f"lambda^-2 = {u} is on or near the cut [0, rho]")
    rhs, _ = stieltjes_rhs(t, lam, mu, tol)
    return float(abs(lhs_closed(t, lam, mu) - rhs))
