"""Special-function kernels: Gamma, erf, 1F1, 0F2, Hermite functions, Meijer G.

The hypergeometric series are summed term by term with an explicit stopping
rule so that truncation is controlled by :class:`SeriesConfig`.  All functions
accept numpy arrays where it makes sense and broadcast elementwise.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special as _sp


class SeriesTruncationError(ArithmeticError):
    """A series did not meet its tolerance within ``max_terms`` terms."""

    def __init__(self, message, partial):
        super().__init__(message)
        self.partial = partial


class PoleError(ValueError):
    """A lower parameter of a hypergeometric series is a non-positive integer."""


class ContourAccuracyWarning(UserWarning):
    """Mellin-Barnes inversion could not reach the requested accuracy."""

    def __init__(self, message, estimated_error):
        super().__init__(message)
        self.estimated_error = estimated_error


@dataclass(frozen=True)
class SeriesConfig:
    rel_tol: float = 1e-15
    max_terms: int = 2000
    contour_height: float = 40.0
    contour_points: int = 4001

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if self.max_terms < 1:
            raise ValueError("max_terms must be >= 1")
        if not self.contour_height > 0:
            raise ValueError("contour_height must be positive")
        if self.contour_points < 2:
            raise ValueError("contour_points must be >= 2")


DEFAULT_CONFIG = SeriesConfig()

# Lanczos approximation, g = 7, n = 9 (Godfrey's coefficients).
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _lanczos_loggamma(z):
    """log Gamma(z) for Re z >= 1/2 (principal branch), complex arrays."""
    z = z - 1.0
    acc = np.full_like(z, _LANCZOS_COEF[0])
    for k, ck in enumerate(_LANCZOS_COEF[1:], start=1):
        acc = acc + ck / (z + k)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * np.log(t) - t + np.log(acc)


def loggamma_complex(z):
    """Principal-branch log Gamma for complex arguments off the poles.

    Uses the reflection formula for Re z < 1/2.  Only needed on Mellin-Barnes
    contours, where the argument never approaches a pole.
    """
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    right = z.real >= 0.5
    out[right] = _lanczos_loggamma(z[right])
    if np.any(~right):
        zl = z[~right]
        out[~right] = (math.log(math.pi) - np.log(np.sin(np.pi * zl))
                       - _lanczos_loggamma(1.0 - zl))
    return out


def gamma_fn(x):
    """Gamma function for real x > 0, about 15 significant digits.

    Raises ``ValueError`` for non-positive arguments.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise ValueError("gamma_fn requires x > 0")
    # Recurrence down to [1, 2] keeps the Lanczos sum in its best regime for small x.
    small = arr < 0.5
    val = np.exp(_lanczos_loggamma(np.where(small, arr + 1.0, arr).astype(complex)).real)
    val = np.where(small, val / np.where(small, arr, 1.0), val)
    if np.ndim(x) == 0:
        return float(val)
    return val


def erf_fn(x):
    """Error function (scipy kernel; |abs error| well below 1e-12)."""
    out = _sp.erf(x)
    return float(out) if np.ndim(x) == 0 else out


def _check_lower(*params):
    for b in params:
        if b <= 0 and float(b).is_integer():
            raise PoleError(f"lower parameter {b} is a non-positive integer")


def _sum_series(ratio, x, cfg, name):
    """Sum 1 + sum_n t_n with t_{n+1} = t_n * ratio(n) * x, elementwise.

    Stops once |term| < rel_tol*|sum| holds for three consecutive terms at
    every point; raises :class:`SeriesTruncationError` otherwise.
    """
    x = np.asarray(x)
    dtype = complex if np.iscomplexobj(x) else float
    xa = np.atleast_1d(x).astype(dtype)
    term = np.ones_like(xa)
    total = np.ones_like(xa)
    quiet = np.zeros(xa.shape, dtype=int)
    for n in range(cfg.max_terms):
        term = term * (ratio(n) * xa)
        total = total + term
        small = np.abs(term) < cfg.rel_tol * np.abs(total)
        quiet = np.where(small, quiet + 1, 0)
        if np.all(quiet >= 3):
            break
    else:
        partial = total if x.ndim else total[0]
        raise SeriesTruncationError(
            f"{name} did not converge in {cfg.max_terms} terms", partial)
    if x.ndim == 0:
        return total[0].item()
    return total.reshape(x.shape)


def kummer_1f1(a, c, x, cfg=DEFAULT_CONFIG):
    """Confluent hypergeometric 1F1(a; c; x) by direct summation.

    Accurate to ``cfg.rel_tol`` for x >= 0 (all terms share a sign when
    a > 0).  Negative and complex x are accepted but lose digits to
    cancellation once |x| is more than a few units.
    """
    _check_lower(c)
    return _sum_series(lambda n: (a + n) / ((c + n) * (n + 1)), x, cfg, "1F1")


def hyp0f2(b1, b2, x, cfg=DEFAULT_CONFIG):
    """Generalized hypergeometric 0F2(; b1, b2; x) by direct summation."""
    _check_lower(b1, b2)
    return _sum_series(lambda n: 1.0 / ((n + 1) * (b1 + n) * (b2 + n)), x, cfg, "0F2")


def hermite_phi(n, x):
    """Normalized eigenfunction of p^2 + x^2 at level n and its x-derivative.

    Three-term recurrence on the normalized functions; the derivative comes
    from phi_n' = sqrt(2n) phi_{n-1} - x phi_n.
    """
    x = np.asarray(x, dtype=float)
    prev = np.zeros_like(x)
    cur = math.pi ** -0.25 * np.exp(-0.5 * x * x)
    for k in range(n):
        prev, cur = cur, math.sqrt(2.0 / (k + 1)) * x * cur - math.sqrt(k / (k + 1)) * prev
    deriv = math.sqrt(2.0 * n) * prev - x * cur
    if x.ndim == 0:
        return float(cur), float(deriv)
    return cur, deriv


def hermite_table(n_max, x):
    """Rows phi_0..phi_{n_max} and their derivatives, shape (n_max+1, len(x))."""
    x = np.asarray(x, dtype=float)
    vals = np.empty((n_max + 1,) + x.shape)
    vals[0] = math.pi ** -0.25 * np.exp(-0.5 * x * x)
    if n_max >= 1:
        vals[1] = math.sqrt(2.0) * x * vals[0]
    for k in range(1, n_max):
        vals[k + 1] = math.sqrt(2.0 / (k + 1)) * x * vals[k] - math.sqrt(k / (k + 1)) * vals[k - 1]
    ders = -x * vals
    for k in range(1, n_max + 1):
        ders[k] += math.sqrt(2.0 * k) * vals[k - 1]
    return vals, ders


def meijer_parameters(eps):
    """Lower parameters (0, -(1+eps)/2, (1-eps)/2) of the natural-family G."""
    return (0.0, -(1.0 + eps) / 2.0, (1.0 - eps) / 2.0)


@lru_cache(maxsize=32)
def _contour(eps, cfg):
    t = np.linspace(-cfg.contour_height, cfg.contour_height, cfg.contour_points)
    s = 1.0 + 1j * t
    logg = sum(loggamma_complex(s + b) for b in meijer_parameters(eps))
    w = np.full(t.shape, t[1] - t[0])
    w[0] *= 0.5
    w[-1] *= 0.5
    kernel = np.exp(logg) * w / (2.0 * np.pi)
    kernel.setflags(write=False)
    s.setflags(write=False)
    # Size of the neglected contour ends, relative to the integrand peak.
    edge = float(np.exp(logg[[0, -1]].real).max() / np.exp(logg.real).max())
    return s, kernel, edge


def meijer_g_natural(x, eps, cfg=DEFAULT_CONFIG, return_abs=False):
    """G^{3,0}_{0,3}(x | 0, -(1+eps)/2, (1-eps)/2) by Mellin-Barnes inversion.

    Trapezoid rule on Re s = 1, |Im s| <= contour_height.  With
    ``return_abs`` also returns the sum of term magnitudes, which bounds the
    round-off floor of the result.
    """
    if not eps < 1:
        raise ValueError("eps must be < 1")
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise ValueError("x must be > 0")
    s, kernel, edge = _contour(float(eps), cfg)
    if edge > 1e-14:
        warnings.warn(ContourAccuracyWarning(
            f"contour truncated where integrand is {edge:.1e} of its peak", edge))
    logx = np.log(np.atleast_1d(x))
    g = np.empty(logx.shape)
    mag = np.empty(logx.shape)
    absk = np.abs(kernel)
    for lo in range(0, logx.size, 256):
        chunk = logx[lo:lo + 256, None]
        phase = np.exp(-s[None, :] * chunk)
        g[lo:lo + 256] = (phase @ kernel).real
        mag[lo:lo + 256] = np.abs(phase) @ absk
    g = g.reshape(x.shape) if x.ndim else g[0]
    mag = mag.reshape(x.shape) if x.ndim else mag[0]
    if return_abs:
        return g, mag
    return g


def meijer_h_natural(x, eps, cfg=DEFAULT_CONFIG):
    """The measure function h(x) = G(x) / (8 pi) of the natural family."""
    return meijer_g_natural(x, eps, cfg) / (8.0 * math.pi)


def mellin_moment_exact(m, eps):
    """Gamma(m) Gamma(m - (1+eps)/2) Gamma(m + (1-eps)/2): Mellin transform of 8 pi h."""
    return math.prod(math.gamma(m + b) for b in meijer_parameters(eps))


@lru_cache(maxsize=32)
def reliable_range(eps, cfg=DEFAULT_CONFIG, safety=1e3):
    """Largest x for which the inverted G stays well above its round-off floor.

    Scans a log grid outward; beyond the returned x the contour sum is
    dominated by cancellation error.
    """
    xs = np.logspace(0, 7, 701)
    g, mag = meijer_g_natural(xs, eps, cfg, return_abs=True)
    bad = np.abs(g) < safety * np.finfo(float).eps * mag
    if not bad.any():
        return float(xs[-1])
    return float(xs[np.argmax(bad)])


@lru_cache(maxsize=32)
def _log_grid(eps, cfg, u_lo, n_nodes):
    u = np.linspace(u_lo, math.log(reliable_range(eps, cfg)), n_nodes)
    g = meijer_g_natural(np.exp(u), eps, cfg)
    u.setflags(write=False)
    g.setflags(write=False)
    return u, g


def mellin_moment_numeric(m, eps, cfg=DEFAULT_CONFIG, n_nodes=6001):
    """Quadrature of x^{m-1} G(x) over (0, inf) with x = e^u.

    The upper limit stops where the inverted G reaches its round-off floor;
    the lower limit sits where x^(m + min b) |log x|^2 is negligible for
    every m >= 1.
    """
    from scipy.integrate import simpson

    u_lo = -40.0 / (1.0 + min(meijer_parameters(eps)))
    u, g = _log_grid(float(eps), cfg, u_lo, n_nodes)
    return float(simpson(np.exp(m * u) * g, x=u))
