"""Fock-Bargmann series realization and formal P-representations.

A vector with psi-basis coefficients v (index 0 is psi_0) maps to the power
series f(z*) = sum_n v[n+1] conj(c_{n+1}(z)) / (z*)^n, i.e. the coefficient
of (z*)^n is v[n+1] * weight_n with

    natural:   weight_n = [Gamma(p)Gamma(q) / (n! Gamma(n+p) Gamma(n+q))]^{1/2} 8^{-n/2}
    distorted: weight_n = [Gamma(w) / Gamma(w+n)]^{1/2} 2^{-n/2}

Ladder operators then act on coefficient arrays exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .coherent import CoherentState, natural_weights
from .specfun import DEFAULT_CONFIG, gamma_fn, hyp0f2, meijer_g_natural

FAMILIES = ("natural", "distorted")


@dataclass(frozen=True, eq=False)
class PowerSeries:
    """Coefficients of (z*)^n, n = 0..len-1."""
    coeffs: np.ndarray = field(repr=False)
    truncated: bool = False

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).ravel()
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def __len__(self):
        return self.coeffs.size

    def __call__(self, zc):
        """Evaluate at z* (Horner)."""
        zc = np.asarray(zc, dtype=complex)
        out = np.zeros_like(zc)
        for a in self.coeffs[::-1]:
            out = out * zc + a
        return out

    def padded(self, n):
        out = np.zeros(max(n, self.coeffs.size), dtype=complex)
        out[:self.coeffs.size] = self.coeffs
        return out


def _family(family):
    if family not in FAMILIES:
        raise ValueError(f"family must be one of {FAMILIES}, got {family!r}")
    return family


def series_weights(n_terms, family, param):
    """weight_n for n < n_terms; ``param`` is eps (natural) or w (distorted)."""
    n = np.arange(n_terms, dtype=float)
    if _family(family) == "natural":
        return natural_weights(n, param) * 8.0 ** (-n / 2)
    w = float(param)
    if not w > 0:
        raise ValueError("w must be > 0")
    lg = np.array([math.lgamma(w) - math.lgamma(w + k) for k in range(n_terms)])
    return np.exp(0.5 * lg) * 2.0 ** (-n / 2)


def to_bargmann(state, family, param) -> PowerSeries:
    """Series coefficients of f_s(z*) for a psi-basis vector or coherent state."""
    v = state.coeffs if isinstance(state, CoherentState) else np.asarray(state, dtype=complex)
    v = np.asarray(v, dtype=complex).ravel()
    if v.size < 2:
        return PowerSeries(np.zeros(1))
    body = v[1:]
    return PowerSeries(body * series_weights(body.size, family, param))


def from_bargmann(series: PowerSeries, family, param, f0=0.0):
    """Inverse of to_bargmann; f0 is the psi_0 component (invisible to the series)."""
    c = series.coeffs
    v = np.empty(c.size + 1, dtype=complex)
    v[0] = f0
    v[1:] = c / series_weights(c.size, family, param)
    return v


def bargmann_create(series: PowerSeries, max_len=None) -> PowerSeries:
    """Multiplication by z*; drops the top coefficient when max_len is exceeded."""
    c = np.concatenate([[0.0], series.coeffs])
    if max_len is not None and c.size > max_len:
        dropped = np.any(c[max_len:] != 0)
        return PowerSeries(c[:max_len], truncated=series.truncated or bool(dropped))
    return PowerSeries(c, truncated=series.truncated)


def _derivative(c):
    k = np.arange(1, c.size)
    return c[1:] * k


def bargmann_partial_natural(series: PowerSeries) -> PowerSeries:
    """2 d/dz*."""
    if len(series) < 2:
        return PowerSeries(np.zeros(1))
    return PowerSeries(2.0 * _derivative(series.coeffs))


def bargmann_annihilate_natural(series: PowerSeries, eps) -> PowerSeries:
    """2[4 z*^2 d^3 + 4(3-eps) z* d^2 + (1-eps)(3-eps) d] on coefficients.

    On (z*)^{n+1} the bracket equals (n+1)(2n+1-eps)(2n+3-eps) (z*)^n.
    """
    c = series.coeffs
    if c.size < 2:
        return PowerSeries(np.zeros(1))
    k = np.arange(1, c.size, dtype=float)
    bracket = k * (4 * (k - 1) * (k - 2) + 4 * (3 - eps) * (k - 1) + (1 - eps) * (3 - eps))
    return PowerSeries(2.0 * bracket * c[1:])


def bargmann_annihilate_distorted(series: PowerSeries, w, f1=None) -> PowerSeries:
    """2 df/dz* + 2(w-1)(f - f1)/z*, the division done as an index shift."""
    c = series.coeffs
    if f1 is None:
        f1 = c[0]
    if not np.isclose(f1, c[0], rtol=0, atol=1e-300):
        raise ValueError("f1 must equal the constant term of the series")
    if c.size < 2:
        return PowerSeries(np.zeros(1))
    # (f - f1)/z* has coefficients c[1:], 2 d/dz* has 2 k c[k]
    return PowerSeries(2.0 * _derivative(c) + 2.0 * (w - 1.0) * c[1:])


def growth_bound(z, v, eps, cfg=DEFAULT_CONFIG):
    """sqrt(0F2(p, q; |z|^2/8)) * ||v||, the bound on |f_N(z*)|."""
    v = np.asarray(v, dtype=complex)
    r = abs(complex(z))
    return math.sqrt(hyp0f2((1 - eps) / 2, (3 - eps) / 2, r * r / 8, cfg)) * float(np.linalg.norm(v[1:]))


# ---------------------------------------------------------------- measures

def sigma_density(r, family, param, cfg=DEFAULT_CONFIG):
    """d sigma_s / (r dr dtheta) = |c_0|^2 d mu / (r dr dtheta)."""
    r = np.asarray(r, dtype=float)
    if _family(family) == "natural":
        eps = param
        p, q = (1 - eps) / 2, (3 - eps) / 2
        return h_natural(r * r / 8.0, eps, cfg) / (gamma_fn(p) * gamma_fn(q))
    w = param
    return r ** (2 * (w - 1)) * h_distorted(r * r, w) / (math.pi * gamma_fn(w))


def h_distorted(x, w):
    """Distorted-family measure function h_w(x) = e^{-x/2} / 2^w.

    With it the distorted measure reads r^{2(w-1)} h_w(r^2) r dr dtheta /
    (pi Gamma(w)) after the |c_0|^2 factor is absorbed.
    """
    return np.exp(-0.5 * np.asarray(x, dtype=float)) / 2.0 ** w


def h_natural(x, eps, cfg=DEFAULT_CONFIG):
    return meijer_g_natural(np.asarray(x, dtype=float), eps, cfg) / (8.0 * math.pi)


def bargmann_inner(g: PowerSeries, f: PowerSeries, family, param):
    """(g, f)_s from coefficients: sum conj(g_n) f_n / weight_n^2."""
    n = max(len(g), len(f))
    wts = series_weights(n, family, param)
    return complex(np.sum(np.conj(g.padded(n)) * f.padded(n) / wts ** 2))


def bargmann_inner_quadrature(g: PowerSeries, f: PowerSeries, family, param,
                              r_max=None, n_theta=64, cfg=DEFAULT_CONFIG):
    """(g, f)_s = int conj(g(z*)) f(z*) d sigma_s over the disk |z| <= r_max.

    Uses a polar product rule: trapezoid in theta (exact for the
    trigonometric polynomials here) and Simpson in log r.
    """
    from scipy.integrate import simpson

    if _family(family) == "natural":
        from .specfun import reliable_range
        x_hi = reliable_range(float(param), cfg)
        r_hi = math.sqrt(8.0 * x_hi) if r_max is None else r_max
        r_lo = math.sqrt(8.0) * math.exp(-20.0)
    else:
        w = float(param)
        deg = max(len(g), len(f))
        r_hi = r_max or math.sqrt(2.0 * (deg + w + 60.0))
        r_lo = math.exp(-40.0 / max(2.0 * w, 0.05))
    u = np.linspace(math.log(r_lo), math.log(r_hi), 8001)
    r = np.exp(u)
    theta = 2 * math.pi * np.arange(n_theta) / n_theta
    zc = (r[:, None] * np.exp(-1j * theta[None, :]))  # z*
    prod = np.conj(g(zc)) * f(zc)
    ang = prod.mean(axis=1) * 2 * math.pi
    dens = sigma_density(r, family, param, cfg)
    return complex(simpson(ang * dens * r * r, x=u))


# ---------------------------------------------------------------- P-representation

@dataclass(frozen=True)
class PDistribution:
    """Formal P-function: a constant, a delta-derivative at 0, or a delta at alpha.

    ``numerator`` is the constant part of the prefactor; the r-dependent part
    is the reciprocal of the family's measure function (see prefactor).
    ``scale`` is what multiplies the distribution once d sigma is absorbed.
    """
    kind: str
    order: int = 0
    alpha: complex = 0j
    tag: str = ""
    numerator: float = 1.0
    scale: float = 1.0
    family: str = ""
    param: float = float("nan")

    def prefactor(self, r, cfg=DEFAULT_CONFIG):
        """The full r-dependent prefactor in front of the distribution."""
        r = np.asarray(r, dtype=float)
        if self.kind == "constant_one":
            return np.ones_like(r)
        if self.family == "natural":
            return self.numerator / h_natural(r * r / 8.0, self.param, cfg)
        w = self.param
        return self.numerator / (r ** (2 * (w - 1)) * h_distorted(r * r, w))

    def pair(self, test_fn, sigma=1e-3, n_r=64, n_theta=16, cfg=DEFAULT_CONFIG):
        """int d sigma P test_fn, with the delta replaced by a Gaussian of width sigma.

        The measure density and the prefactor are evaluated from their own
        formulas and multiplied pointwise, so their cancellation is
        numerical rather than assumed.  Supports orders 0 and 1.
        """
        if self.kind == "constant_one":
            raise ValueError("P_0 pairs with psi_0 directly, not through the measure")
        if self.kind == "delta_derivative" and self.order > 1:
            raise NotImplementedError("regularized pairing implemented for order <= 1")
        center = self.alpha if self.kind == "delta_at" else 0j
        t, wt = np.polynomial.legendre.leggauss(n_r)
        rho_max = 12.0 * sigma
        rho = 0.5 * rho_max * (t + 1)
        wr = 0.5 * rho_max * wt
        theta = 2 * math.pi * np.arange(n_theta) / n_theta
        z = center + rho[:, None] * np.exp(1j * theta[None, :])
        g = np.exp(-rho ** 2 / (2 * sigma ** 2)) / (2 * math.pi * sigma ** 2)
        if self.order == 1:
            # d_z d_z* = Laplacian / 4
            g = g * (rho ** 2 / sigma ** 4 - 2 / sigma ** 2) / 4.0
        # |z| depends on theta only when the delta sits off the origin
        r_abs = np.abs(z) if center != 0 else rho[:, None]
        dens = sigma_density(r_abs.ravel(), self.family, self.param, cfg)
        pref = self.prefactor(r_abs.ravel(), cfg)
        vals = (dens * pref).reshape(r_abs.shape) * g[:, None] * test_fn(z)
        return complex(np.sum(vals.mean(axis=1) * 2 * math.pi * rho * wr))


def p_representation(state, family, param):
    """P-function of |psi_k> (k = index) or of a family coherent state."""
    _family(family)
    param = float(param)
    if isinstance(state, CoherentState):
        alpha = complex(state.z)
        if family == "natural":
            from .coherent import natural_norm
            p, q = (1 - param) / 2, (3 - param) / 2
            norm = natural_norm(abs(alpha), param)
            num = gamma_fn(p) * gamma_fn(q) / norm
            tag = "Gamma(p) Gamma(q) / (h(r^2/8) 0F2(p, q; |alpha|^2/8)) delta(z - alpha)"
        else:
            from .coherent import distorted_norm
            norm = distorted_norm(abs(alpha), param)
            num = math.pi * gamma_fn(param) / norm
            tag = "pi Gamma(w) / (1F1(1, w; |alpha|^2/2) r^(2(w-1)) h_w(r^2)) delta(z - alpha)"
        return PDistribution("delta_at", 0, alpha, tag, num, 1.0 / norm, family, param)
    k = int(state)
    if k < 0:
        raise ValueError("state index must be >= 0")
    if k == 0:
        return PDistribution("constant_one", 0, 0j, "P_0 = 1", 1.0, 1.0, family, param)
    n = k - 1
    if family == "natural":
        p, q = (1 - param) / 2, (3 - param) / 2
        lnum = n * math.log(8.0) + math.lgamma(n + p) + math.lgamma(n + q) - math.lgamma(n + 1)
        num = math.exp(lnum)
        scale = math.exp(lnum - math.lgamma(p) - math.lgamma(q))
        tag = f"8^{n} Gamma({n}+p) Gamma({n}+q) / ({n}! h(r^2/8)) d^{2 * n} delta(z)"
    else:
        w = param
        lnum = n * math.log(2.0) + math.lgamma(w + n) - 2 * math.lgamma(n + 1)
        num = math.pi * math.exp(lnum)
        scale = math.exp(lnum - math.lgamma(w))
        tag = f"pi 2^{n} Gamma(w+{n}) / (({n}!)^2 r^(2(w-1)) h_w(r^2)) d^{2 * n} delta(z)"
    return PDistribution("delta_derivative", n, 0j, tag, num, scale, family, param)


def coefficient_fn(index, family, param):
    """z -> c_index(z), the unnormalized coherent-state coefficient of |psi_index>."""
    if index < 1:
        raise ValueError("index must be >= 1")
    n = index - 1
    wt = series_weights(n + 1, family, param)[n]
    return lambda z: wt * np.asarray(z, dtype=complex) ** n


def pairing_matrix_element(pdist: PDistribution, m, k, **kw):
    """int d sigma P c_m(z) conj(c_k(z)); equals <psi_bar_m|rho|psi_k> (up to c_0 factors)."""
    cm = coefficient_fn(m, pdist.family, pdist.param)
    ck = coefficient_fn(k, pdist.family, pdist.param)
    return pdist.pair(lambda z: cm(z) * np.conj(ck(z)), **kw)
