"""Complex oscillator potentials obtained by a Darboux transformation of p^2 + x^2.

Conventions: A = -d/dx + beta, B = d/dx + beta, H = AB + eps and
H_lambda = BA + eps = -d^2/dx^2 + V.  The factorization function is

    beta = -alpha'/alpha + i lam / alpha^2,
    alpha^2 = a u1^2 + b u1 u2 + c u2^2,

with u1, u2 the even/odd solutions of -u'' + x^2 u = eps u normalized to a
unit Wronskian.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .specfun import DEFAULT_CONFIG, SeriesConfig, erf_fn, kummer_1f1

SQRT_PI = math.sqrt(math.pi)
NODE_FLOOR = 1e-10


class ParameterError(ValueError):
    """Model parameters violate the admissibility constraints."""


class SingularityError(ArithmeticError):
    """alpha (or a denominator built from it) vanishes at an evaluation point."""


@dataclass(frozen=True)
class ModelParams:
    """The five real numbers fixing one member of the family.

    ``lam`` is the imaginary-part strength (``lambda`` is a Python keyword).
    """
    eps: float
    lam: float
    a: float
    b: float
    c: float

    def __post_init__(self):
        for name in ("eps", "lam", "a", "b", "c"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ParameterError(f"{name} must be finite, got {v!r}")
            object.__setattr__(self, name, float(v))
        if not self.eps < 1.0:
            raise ParameterError(f"eps must be < 1, got {self.eps!r}")
        for name in ("a", "b", "c"):
            if getattr(self, name) < 0:
                raise ParameterError(f"{name} must be >= 0, got {getattr(self, name)!r}")
        lhs = 4 * self.a * self.c - self.b ** 2
        rhs = 4 * self.lam ** 2
        scale = max(1.0, 4 * self.a * self.c, self.b ** 2, rhs)
        if abs(lhs - rhs) > 1e-12 * scale:
            raise ParameterError(
                f"4ac - b^2 = {lhs!r} but 4 lam^2 = {rhs!r} (mismatch {lhs - rhs:.3e})")

    @property
    def pt_symmetric(self):
        # b = 0 makes alpha^2 even, so Re V is even and Im V odd.
        return self.b == 0.0

    @classmethod
    def from_abc(cls, eps, a, b, c, lam_sign=1.0):
        """Build with lam fixed by 4ac - b^2 = 4 lam^2."""
        disc = 4 * a * c - b * b
        if disc < 0 and disc > -1e-12 * max(1.0, 4 * a * c, b * b):
            disc = 0.0
        if disc < 0:
            raise ParameterError("4ac - b^2 must be non-negative")
        return cls(eps=eps, lam=math.copysign(0.5 * math.sqrt(disc), lam_sign), a=a, b=b, c=c)

    @classmethod
    def amm(cls, gamma):
        """Hermitian eps = -1 member with alpha^2 proportional to (gamma + int_0^x e^{-y^2})^2."""
        gamma = float(gamma)
        if gamma <= 0:
            raise ParameterError("gamma must be > 0 (b >= 0 convention)")
        c = (2.0 / SQRT_PI) ** 2
        return cls(eps=-1.0, lam=0.0, a=gamma * gamma * c, b=2.0 * gamma * c, c=c)


@dataclass(frozen=True)
class Grid:
    x_min: float = -10.0
    x_max: float = 10.0
    n_points: int = 2001

    def __post_init__(self):
        if self.n_points < 2:
            raise ValueError("n_points must be >= 2")
        if not self.x_max > self.x_min:
            raise ValueError("x_max must exceed x_min")

    @property
    def x(self):
        return np.linspace(self.x_min, self.x_max, self.n_points)

    @property
    def h(self):
        return (self.x_max - self.x_min) / (self.n_points - 1)


DEFAULT_GRID = Grid()


@dataclass(frozen=True, eq=False)
class GridFunction:
    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.shape != (self.grid.n_points,):
            raise ValueError(f"expected {self.grid.n_points} samples, got shape {v.shape}")

    @property
    def x(self):
        return self.grid.x

    # uniform-grid calculus
    def integral(self):
        return simpson_uniform(self.values, self.grid.h)

    def derivative(self):
        return fd_first(self.values, self.grid.h)

    def second_derivative(self):
        return fd_second(self.values, self.grid.h)


# 6th-order central stencils
_D1 = np.array([-1 / 60, 3 / 20, -3 / 4, 0.0, 3 / 4, -3 / 20, 1 / 60])
_D2 = np.array([1 / 90, -3 / 20, 3 / 2, -49 / 18, 3 / 2, -3 / 20, 1 / 90])
EDGE = 5


def _stencil(f, coef, scale):
    f = np.asarray(f)
    out = np.full(f.shape, np.nan, dtype=np.result_type(f, float))
    m = len(coef) // 2
    acc = np.zeros(f.size - 2 * m, dtype=out.dtype)
    for k, ck in enumerate(coef):
        if ck:
            acc = acc + ck * f[k:f.size - 2 * m + k]
    out[m:-m] = acc / scale
    return out


def fd_first(f, h):
    """Central 6th-order first derivative; the 3 edge samples are NaN."""
    return _stencil(f, _D1, h)


def fd_second(f, h):
    """Central 6th-order second derivative; the 3 edge samples are NaN."""
    return _stencil(f, _D2, h * h)


def interior(n, edge=EDGE):
    """Slice dropping ``edge`` points at both ends (residual checks)."""
    return slice(edge, n - edge)


def simpson_uniform(f, h):
    from scipy.integrate import simpson
    return simpson(np.asarray(f), dx=h)


# ---------------------------------------------------------------- seeds

def seed_solutions(x, eps, derivs=False, cfg: SeriesConfig = DEFAULT_CONFIG):
    """Even and odd solutions u1, u2 of -u'' + x^2 u = eps u (and u', if asked).

    Derivatives come from d/dz 1F1(a,c;z) = (a/c) 1F1(a+1,c+1;z), so no
    numerical differentiation is involved.  Any real eps is accepted here;
    eps < 1 is a property of ModelParams, not of the seeds.
    """
    if not math.isfinite(eps):
        raise ParameterError("eps must be finite")
    x = np.asarray(x, dtype=float)
    z = x * x
    a1 = (1.0 - eps) / 4.0
    a2 = (3.0 - eps) / 4.0
    g = np.exp(-0.5 * z)
    f1 = kummer_1f1(a1, 0.5, z, cfg)
    f2 = kummer_1f1(a2, 1.5, z, cfg)
    u1 = f1 * g
    u2 = x * f2 * g
    if not derivs:
        return u1, u2
    df1 = (a1 / 0.5) * kummer_1f1(a1 + 1, 1.5, z, cfg)
    df2 = (a2 / 1.5) * kummer_1f1(a2 + 1, 2.5, z, cfg)
    du1 = x * (2.0 * df1 - f1) * g
    du2 = (f2 + z * (2.0 * df2 - f2)) * g
    return u1, u2, du1, du2


def _quadratic_form(x, p: ModelParams, cfg=DEFAULT_CONFIG):
    """alpha^2 and its first two x-derivatives (second via u'' = (x^2-eps) u)."""
    x = np.asarray(x, dtype=float)
    u1, u2, d1, d2 = seed_solutions(x, p.eps, derivs=True, cfg=cfg)
    v = x * x - p.eps
    dd1, dd2 = v * u1, v * u2
    a, b, c = p.a, p.b, p.c
    q = a * u1 * u1 + b * u1 * u2 + c * u2 * u2
    dq = 2 * a * u1 * d1 + b * (d1 * u2 + u1 * d2) + 2 * c * u2 * d2
    ddq = (2 * a * (d1 * d1 + u1 * dd1) + b * (dd1 * u2 + 2 * d1 * d2 + u1 * dd2)
           + 2 * c * (d2 * d2 + u2 * dd2))
    return q, dq, ddq


def _require_nodeless(q):
    if np.any(~(np.asarray(q) > NODE_FLOOR)):
        raise SingularityError("alpha^2 below the node floor at an evaluation point")


def alpha_fn(x, p: ModelParams, cfg=DEFAULT_CONFIG):
    u1, u2 = seed_solutions(x, p.eps, cfg=cfg)
    q = p.a * u1 * u1 + p.b * u1 * u2 + p.c * u2 * u2
    if np.any(np.asarray(q) < 0):
        raise ParameterError("negative radicand in alpha; parameters inadmissible")
    return np.sqrt(q)


def _t_roots(p: ModelParams):
    # real roots of a + b t + c t^2
    if p.c == 0.0:
        if p.b == 0.0:
            return np.array([]) if p.a != 0 else None
        return np.array([-p.a / p.b])
    disc = p.b * p.b - 4 * p.a * p.c
    if disc < 0:
        return np.array([])
    s = math.sqrt(disc)
    return np.array([(-p.b - s) / (2 * p.c), (-p.b + s) / (2 * p.c)])


def nodeless_check(p: ModelParams, grid: Grid = DEFAULT_GRID, floor=NODE_FLOOR,
                   cfg=DEFAULT_CONFIG):
    """True when alpha^2 stays above ``floor`` with constant sign on the grid.

    alpha^2 = u1^2 P(t) with t = u2/u1 increasing (t' = 1/u1^2), so a node
    exists in [x_min, x_max] iff a real root of P lies in [t(x_min), t(x_max)].
    The root test catches touching zeros that fall between grid samples.
    """
    x = grid.x
    u1, u2 = seed_solutions(x, p.eps, cfg=cfg)
    q = p.a * u1 * u1 + p.b * u1 * u2 + p.c * u2 * u2
    if not (np.all(q > floor) or np.all(q < -floor)):
        return False
    roots = _t_roots(p)
    if roots is None:
        return False
    t = u2 / u1
    return not np.any((roots >= t[0]) & (roots <= t[-1]))


def beta_fn(x, p: ModelParams, cfg=DEFAULT_CONFIG):
    q, dq, _ = _quadratic_form(x, p, cfg)
    _require_nodeless(q)
    return -dq / (2 * q) + 1j * p.lam / q


def beta_prime(x, p: ModelParams, cfg=DEFAULT_CONFIG):
    q, dq, ddq = _quadratic_form(x, p, cfg)
    _require_nodeless(q)
    return -(ddq / (2 * q) - dq * dq / (2 * q * q)) - 1j * p.lam * dq / (q * q)


def potential(x, p: ModelParams, cfg=DEFAULT_CONFIG):
    """V = x^2 + 2 beta'."""
    x = np.asarray(x, dtype=float)
    return x * x + 2.0 * beta_prime(x, p, cfg)


def potential_parts(x, p: ModelParams, cfg=DEFAULT_CONFIG):
    """Re V and Im V from alpha alone (no beta' needed).

    Re V = 2 eps - x^2 + 2 (alpha'/alpha)^2 - 2 lam^2/alpha^4,
    Im V = -4 lam alpha'/alpha^3.
    """
    x = np.asarray(x, dtype=float)
    q, dq, _ = _quadratic_form(x, p, cfg)
    _require_nodeless(q)
    la = dq / (2 * q)
    re = 2 * p.eps - x * x + 2 * la * la - 2 * p.lam ** 2 / (q * q)
    im = -2 * p.lam * dq / (q * q)
    return re, im


def zero_total_area(p: ModelParams, L, cfg=DEFAULT_CONFIG):
    """Integral of Im V over [-L, L] and the endpoint value 2 lam/alpha^2 |_{-L}^{L}."""
    from scipy.integrate import quad

    if p.lam == 0.0:
        return 0.0, 0.0

    def im_v(x):
        q, dq, _ = _quadratic_form(np.array([x]), p, cfg)
        return float(-2 * p.lam * dq[0] / (q[0] * q[0]))

    # split at 0 so the adaptive rule sees each lobe separately
    left, _ = quad(im_v, -L, 0.0, epsabs=1e-13, epsrel=1e-12, limit=400)
    right, _ = quad(im_v, 0.0, L, epsabs=1e-13, epsrel=1e-12, limit=400)
    q_ends = alpha_fn(np.array([-L, L]), p, cfg) ** 2
    closed = 2 * p.lam / q_ends[1] - 2 * p.lam / q_ends[0]
    return left + right, float(closed)


def potential_eps_minus1(x, a, b, c, lam):
    """Closed eps = -1 form, independent of the 1F1 series.

    With s = erf(x) and P(s) = a + (sqrt(pi)/2) b s + (pi/4) c s^2 one has
    alpha^2 = e^{x^2} P(s), and V = x^2 - 2 - 2 d/dx[N / (sqrt(pi) alpha^2)]
    with N = P'(s) - i sqrt(pi) lam.
    """
    x = np.asarray(x, dtype=float)
    s = erf_fn(x)
    ex = np.exp(x * x)
    P = a + 0.5 * SQRT_PI * b * s + 0.25 * math.pi * c * s * s
    dP = 0.5 * SQRT_PI * b + 0.5 * math.pi * c * s
    q = ex * P
    _require_nodeless(q)
    dq = 2 * x * q + (2 / SQRT_PI) * dP
    num = dP - 1j * SQRT_PI * lam
    dnum = SQRT_PI * c * np.exp(-x * x)
    deriv = (dnum / q - num * dq / (q * q)) / SQRT_PI
    return x * x - 2 - 2 * deriv


def amm_potential(x, gamma):
    """Abraham-Moses-Mielnik potential x^2 - 2 - 2 M', M = e^{-x^2}/(gamma + int_0^x e^{-y^2})."""
    x = np.asarray(x, dtype=float)
    den = gamma + 0.5 * SQRT_PI * erf_fn(x)
    if np.any(den == 0) or np.any(np.sign(den) != np.sign(den.flat[0] if np.ndim(den) else den)):
        raise SingularityError("gamma + int_0^x exp(-y^2) dy vanishes")
    m = np.exp(-x * x) / den
    dm = -2 * x * m - m * m
    return x * x - 2 - 2 * dm


# ------------------------------------------------------------ grid cache

@dataclass(frozen=True, eq=False)
class ModelOnGrid:
    """Read-only samples of the model ingredients on one grid."""
    params: ModelParams
    grid: Grid
    x: np.ndarray = field(repr=False)
    u1: np.ndarray = field(repr=False)
    u2: np.ndarray = field(repr=False)
    q: np.ndarray = field(repr=False)
    dq: np.ndarray = field(repr=False)
    beta: np.ndarray = field(repr=False)
    dbeta: np.ndarray = field(repr=False)
    V: np.ndarray = field(repr=False)


@lru_cache(maxsize=64)
def on_grid(p: ModelParams, grid: Grid = DEFAULT_GRID) -> ModelOnGrid:
    x = grid.x
    u1, u2 = seed_solutions(x, p.eps)
    q, dq, ddq = _quadratic_form(x, p)
    if not nodeless_check(p, grid):
        raise SingularityError("alpha has a node on the working interval")
    beta = -dq / (2 * q) + 1j * p.lam / q
    dbeta = -(ddq / (2 * q) - dq * dq / (2 * q * q)) - 1j * p.lam * dq / (q * q)
    V = x * x + 2 * dbeta
    arrays = dict(x=x, u1=u1, u2=u2, q=q, dq=dq, beta=beta, dbeta=dbeta, V=V)
    for arr in arrays.values():
        arr.setflags(write=False)
    return ModelOnGrid(params=p, grid=grid, **arrays)
