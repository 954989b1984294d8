"""Generalized coherent states of H_lambda in the psi-basis.

Index 0 of every coefficient vector is |psi_0>, which none of the families
touch; index n+1 carries the n-th term of the family's series.  Expectation
values use the bi-orthogonal form sum_n conj(c_n) O_nm c_m.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import algebra
from .specfun import (DEFAULT_CONFIG, SeriesConfig, gamma_fn, hyp0f2, kummer_1f1,
                      meijer_g_natural, mellin_moment_exact, reliable_range)

TAIL_TOL = 1e-16


class TruncationError(ValueError):
    """Coefficient tail beyond the truncation is not negligible."""


@dataclass(frozen=True, eq=False)
class CoherentState:
    family: str
    z: complex
    coeffs: np.ndarray = field(repr=False)
    norm_const: float
    w: float | None = None
    eps: float | None = None

    @property
    def dim(self):
        return self.coeffs.size

    def norm2(self):
        return float(np.sum(np.abs(self.coeffs) ** 2))

    def expect(self, op):
        """Bi-orthogonal expectation sum conj(c) O c."""
        m = op.entries if isinstance(op, algebra.TruncatedOperator) else np.asarray(op)
        c = self.coeffs
        return complex(np.conj(c) @ (m @ c))


def _series(z, ratio, n_terms):
    # s_0 = 1, s_{n+1} = s_n * z * ratio(n)
    out = np.empty(n_terms, dtype=complex)
    out[0] = 1.0
    for n in range(n_terms - 1):
        out[n + 1] = out[n] * z * ratio(n)
    return out


def _auto_dim(z, ratio, tol=TAIL_TOL, cap=4000):
    """Smallest N whose dropped tail is below tol relative to the kept mass.

    The ratios of every family here decrease in n, so once the term ratio
    is below 1/2 the tail is bounded by twice the last dropped term.
    """
    s, mass = 1.0, 1.0
    r = abs(z)
    for n in range(cap):
        q = r * ratio(n)
        s_next = s * q
        if q < 0.5 and 2 * s_next ** 2 < tol * mass:
            return n + 2  # indices 0 and 1..n+1
        s = s_next
        mass += s * s
    raise TruncationError(f"no truncation below {cap} for |z| = {r}")


def _pack(series, N):
    v = np.zeros(N, dtype=complex)
    v[1:] = series[:N - 1]
    return v


def _natural_ratio(eps):
    p, q = (1 - eps) / 2, (3 - eps) / 2
    return lambda n: 1.0 / (math.sqrt(8.0) * math.sqrt((n + 1) * (n + p) * (n + q)))


def _distorted_ratio(w):
    return lambda n: 1.0 / math.sqrt(2.0 * (w + n))


def _transformed_ratio(eps):
    return lambda n: math.sqrt((2 * n + 3 - eps) / ((2 * n + 1 - eps) * (n + 1))) / math.sqrt(2.0)


# ---------------------------------------------------------------- families

def transformed_cs(alpha, eps, N=None) -> CoherentState:
    """B acting on the oscillator coherent state |alpha>, normalized."""
    if not eps < 1:
        raise ValueError("eps must be < 1")
    alpha = complex(alpha)
    ratio = _transformed_ratio(eps)
    N = N or _auto_dim(alpha, ratio)
    s = _series(alpha, ratio, N - 1) * math.sqrt(1 - eps)
    a2 = abs(alpha) ** 2
    k = math.exp(-a2 / 4) / math.sqrt(a2 + 1 - eps)
    return CoherentState("transformed", alpha, k * _pack(s, N), k, eps=eps)


def natural_weights(n, eps):
    """[Gamma(p)Gamma(q) / (n! Gamma(n+p) Gamma(n+q))]^{1/2}, p, q = (1-eps)/2, (3-eps)/2."""
    p, q = (1 - eps) / 2, (3 - eps) / 2
    n = np.asarray(n, dtype=float)
    lg = (math.lgamma(p) + math.lgamma(q)
          - np.vectorize(math.lgamma)(n + 1) - np.vectorize(math.lgamma)(n + p)
          - np.vectorize(math.lgamma)(n + q))
    return np.exp(0.5 * lg)


def natural_norm(r, eps, cfg: SeriesConfig = DEFAULT_CONFIG):
    return hyp0f2((1 - eps) / 2, (3 - eps) / 2, r * r / 8.0, cfg)


def natural_cs(z, eps, N=None, cfg: SeriesConfig = DEFAULT_CONFIG) -> CoherentState:
    """Eigenvector of the quadratic-algebra lowering operator A with eigenvalue z."""
    if not eps < 1:
        raise ValueError("eps must be < 1")
    z = complex(z)
    ratio = _natural_ratio(eps)
    N = N or _auto_dim(z, ratio)
    c0 = natural_norm(abs(z), eps, cfg) ** -0.5
    s = _series(z, ratio, N - 1)
    return CoherentState("natural", z, c0 * _pack(s, N), c0, eps=eps)


def distorted_norm(r, w, cfg: SeriesConfig = DEFAULT_CONFIG):
    return kummer_1f1(1.0, w, r * r / 2.0, cfg)


def distorted_cs(z, w, N=None, cfg: SeriesConfig = DEFAULT_CONFIG) -> CoherentState:
    """Eigenvector of the distorted lowering operator C_w with eigenvalue z."""
    if not w > 0:
        raise ValueError("w must be > 0: Gamma(w) diverges at w = 0")
    z = complex(z)
    ratio = _distorted_ratio(w)
    N = N or _auto_dim(z, ratio)
    c0 = distorted_norm(abs(z), w, cfg) ** -0.5
    s = _series(z, ratio, N - 1)
    return CoherentState("distorted", z, c0 * _pack(s, N), c0, w=w)


def _kernel(f, y, z):
    y, z = complex(y), complex(z)
    return f(z * y.conjugate()) / math.sqrt(f(abs(y) ** 2).real * f(abs(z) ** 2).real)


def natural_kernel(y, z, eps, cfg: SeriesConfig = DEFAULT_CONFIG):
    """K(y*, z) = 0F2(zy*/8) / sqrt(0F2(|y|^2/8) 0F2(|z|^2/8))."""
    p, q = (1 - eps) / 2, (3 - eps) / 2
    return complex(_kernel(lambda x: hyp0f2(p, q, np.complex128(x) / 8.0, cfg), y, z))


def distorted_kernel(y, z, w, cfg: SeriesConfig = DEFAULT_CONFIG):
    return complex(_kernel(lambda x: kummer_1f1(1.0, w, np.complex128(x) / 2.0, cfg), y, z))


# ---------------------------------------------------------------- variances

def natural_moments(r, eps, cfg: SeriesConfig = DEFAULT_CONFIG):
    """Closed forms of <H_lambda> and <H_lambda^2> in |phi^N(z)>, |z| = r."""
    x = r * r / 8.0
    f0 = hyp0f2((1 - eps) / 2, (3 - eps) / 2, x, cfg)
    f1 = hyp0f2((3 - eps) / 2, (5 - eps) / 2, x, cfg)
    f2 = hyp0f2((5 - eps) / 2, (7 - eps) / 2, x, cfg)
    mh = 1.0 + r ** 2 / ((1 - eps) * (3 - eps)) * f1 / f0
    mh2 = 4.0 * mh - 3.0 + r ** 4 / ((1 - eps) * (3 - eps) ** 2 * (5 - eps)) * f2 / f0
    return mh, mh2


def natural_variance(z, eps, N=None, cfg: SeriesConfig = DEFAULT_CONFIG):
    """(<H>, <H^2>, Delta X Delta P) from the closed forms."""
    mh, mh2 = natural_moments(abs(complex(z)), eps, cfg)
    return mh, mh2, 0.5 * (3 * mh2 - 4 * eps * mh + eps * eps)


def natural_variance_matrix(z, eps, N=None):
    """Matrix route: (1/2) <[X,P]>/i with X, P built from the ladder matrices."""
    st = natural_cs(z, eps, N)
    N = st.dim + 2  # two spare levels so X P is exact on the kept span
    c = np.zeros(N, dtype=complex)
    c[:st.dim] = st.coeffs
    X, P = algebra.quadratures(eps, N)
    comm = algebra.commutator(X, P)
    H = algebra.hamiltonian_matrix(eps, N)
    mh = (np.conj(c) @ (H.entries @ c)).real
    mh2 = (np.conj(c) @ (H.entries @ H.entries @ c)).real
    return mh, mh2, (np.conj(c) @ (comm.entries @ c) / 2j).real


def distorted_variance(z, w, cfg: SeriesConfig = DEFAULT_CONFIG):
    """Delta X_w Delta P_w = <I_w>/2 = (1/2)[1 + (w-1)/1F1(1,w;r^2/2)].

    Written in the hypergeometric-ratio form
    (1/2)[w - x + (x/w) 1F1(2,w+1;x)/1F1(1,w;x)] with x = r^2/2.
    """
    x = abs(complex(z)) ** 2 / 2.0
    ratio = kummer_1f1(2.0, w + 1.0, x, cfg) / kummer_1f1(1.0, w, x, cfg)
    return 0.5 * (w - x + (x / w) * ratio)


def distorted_variance_matrix(z, w, N=None):
    st = distorted_cs(z, w, N)
    _, _, Iw = algebra.ladder_Cw(w, st.dim)
    return 0.5 * st.expect(Iw).real


# ---------------------------------------------------------------- measures

def _gl_panels(a, b, panels, order=40):
    t, wt = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    lo, hi = edges[:-1, None], edges[1:, None]
    x = 0.5 * (hi - lo) * t[None, :] + 0.5 * (hi + lo)
    w = 0.5 * (hi - lo) * wt[None, :]
    return x.ravel(), w.ravel()


def distorted_identity_check(w, n_max, cfg: SeriesConfig = DEFAULT_CONFIG):
    """|Lambda_n - 1| from radial quadrature against the explicit measure.

    dmu = r^{2(w-1)} e^{-r^2/2} 1F1(1,w;r^2/2) r dr dtheta / (pi Gamma(w) 2^w);
    the substitution r = t^{1/(2w)} removes the r^{2w-1} endpoint behaviour.
    """
    from scipy.integrate import quad_vec

    if not w > 0:
        raise ValueError("w must be > 0")
    n = np.arange(n_max + 1)
    # integrand ~ r^{2n+2w-1} e^{-r^2/2}; stop where it is below 1e-18 of its peak
    x_peak = n_max + w
    R = math.sqrt(2.0 * (x_peak + 45.0 + 4.0 * math.sqrt(x_peak + 1.0)))
    pref = 1.0 / (math.pi * gamma_fn(w) * 2.0 ** w)
    lg = np.array([math.lgamma(w + k) for k in n])
    logw = math.lgamma(w) - lg  # |c_{n+1}|^2 / (|z|^2/2)^n

    def integrand(t):
        if t <= 0:
            return np.zeros(n.size)
        r = t ** (1.0 / (2.0 * w))
        x = r * r / 2.0
        F = kummer_1f1(1.0, w, x, cfg)
        weight = pref * math.exp(-x) * F
        cs = np.exp(logw + n * math.log(x)) / F
        # r^{2(w-1)} r dr = dt / (2w); angular integral gives 2 pi
        return 2.0 * math.pi * cs * weight / (2.0 * w)

    lam, _ = quad_vec(integrand, 0.0, R ** (2.0 * w), epsabs=1e-13, epsrel=1e-12, limit=400)
    return np.abs(lam - 1.0)


def natural_identity_check(eps, n_max, cfg: SeriesConfig = DEFAULT_CONFIG, n_nodes=6001):
    """|Lambda_n - 1| with the numerically inverted h, by radial quadrature.

    Uses dmu = 0F2(r^2/8)/(Gamma(p)Gamma(q)) h(r^2/8) r dr dtheta, which is the
    scaling for which Lambda_n reduces to the Mellin moments of 8 pi h.
    Returns (radial residuals, moment-route residuals).
    """
    from scipy.integrate import simpson

    p, q = (1 - eps) / 2, (3 - eps) / 2
    u_lo = -40.0 / (1.0 + min(0.0, -(1 + eps) / 2))
    u = np.linspace(u_lo, math.log(reliable_range(float(eps), cfg)), n_nodes)
    x = np.exp(u)  # x = r^2/8
    r = np.sqrt(8.0 * x)
    h = meijer_g_natural(x, eps, cfg) / (8.0 * math.pi)
    F = hyp0f2(p, q, x, cfg)
    weight = F / (gamma_fn(p) * gamma_fn(q)) * h
    out_radial, out_moment = [], []
    for k in range(n_max + 1):
        wk = natural_weights(k, eps)
        c2 = (wk * (r / math.sqrt(8.0)) ** k) ** 2 / F
        # 2 pi r dr with r^2 = 8 e^u: r dr = 4 x du
        integrand = c2 * weight * 2.0 * math.pi * 4.0 * x
        out_radial.append(abs(float(simpson(integrand, x=u)) - 1.0))
        from .specfun import mellin_moment_numeric
        m = k + 1
        out_moment.append(abs(mellin_moment_numeric(m, eps, cfg) / mellin_moment_exact(m, eps) - 1.0))
    return np.array(out_radial), np.array(out_moment)


# ---------------------------------------------------------------- displacement

def displaced_closed(z, w, N) -> CoherentState:
    """sqrt(Gamma(w+n)/Gamma(w)) (sqrt2 z)^n / n!, normalized by 1F1(w,1;2|z|^2)."""
    z = complex(z)
    s = _series(math.sqrt(2.0) * z, lambda n: math.sqrt(w + n) / (n + 1), N - 1)
    norm = kummer_1f1(w, 1.0, 2.0 * abs(z) ** 2)
    c0 = norm ** -0.5
    return CoherentState("displaced", z, c0 * _pack(s, N), c0, w=w)


def displacement_matrix(z, w, N):
    """D_w(z) = exp(z C_w^+) exp(-z* C_w) by dense scaling-and-squaring."""
    from scipy.linalg import expm

    C, Cp, _ = algebra.ladder_Cw(w, N)
    z = complex(z)
    return expm(z * Cp.entries) @ expm(-z.conjugate() * C.entries)


def displaced_state(z, w, N, tail_tol=1e-12):
    """Numeric D_w(z)|psi_1> versus the closed form; residual minimized over a global phase."""
    if not w > 0:
        raise ValueError("w must be > 0")
    closed = displaced_closed(z, w, N)
    if np.abs(closed.coeffs[-1]) > tail_tol:
        raise TruncationError(f"coefficient at the truncation edge is {abs(closed.coeffs[-1]):.1e}")
    e1 = np.zeros(N, dtype=complex)
    e1[1] = 1.0
    v = displacement_matrix(z, w, N) @ e1
    nv = np.linalg.norm(v)
    numeric = CoherentState("displaced", complex(z), v / nv, 1.0 / nv, w=w)
    ov = np.vdot(closed.coeffs, numeric.coeffs)
    phase = ov / abs(ov) if abs(ov) > 0 else 1.0
    resid = float(np.linalg.norm(numeric.coeffs - phase * closed.coeffs))
    return numeric, closed, resid


# ---------------------------------------------------------------- eigen-residuals

def eigen_residual(state: CoherentState):
    """max |(L v)_k - z v_k| over components k < N-1 (the last one is truncation-bound)."""
    N = state.dim
    if state.family == "natural":
        L, _ = algebra.ladder_A(state.eps, N)
    elif state.family == "distorted":
        L, _, _ = algebra.ladder_Cw(state.w, N)
    else:
        raise ValueError(f"no annihilator for family {state.family!r}")
    r = L.entries @ state.coeffs - state.z * state.coeffs
    return float(np.max(np.abs(r[:N - 1])))
