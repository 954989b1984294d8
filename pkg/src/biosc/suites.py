"""Named verification checks shared by the CLI and the test-suite.

Each check is a top-level function returning one non-negative residual, so
cases can be farmed out to a process pool.  Results are keyed by the
identity tag they test; a tag passes when all of its cases are within
tolerance.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import algebra, bargmann, coherent, model, spectral
from .model import Grid, ModelParams

SUITES = ("biorthogonality", "algebra", "measures", "bargmann", "limits")

TOLERANCES = {
    "ortho1": 1e-6,
    "zero": 1e-8,
    "zero_endpoint": 1e-10,
    "pot2a": 1e-8,
    "Acomm1": 1e-9,
    "Acomm2": 1e-9,
    "Acomm3": 1e-9,
    "Acomm4": 1e-9,
    "quad1": 1e-9,
    "rcom2": 1e-12,
    "dist2": 1e-12,
    "aosc": 1e-12,
    "int4": 1e-4,
    "int3": 1e-3,
    "constdist": 1e-6,
    "bargmann1": 1e-12,
    "inner": 1e-4,
    "P8": 1e-4,
    "states": 1e-5,
    "potg": 1e-5,
}


@dataclass(frozen=True)
class Case:
    key: str
    label: str
    fn: object
    args: tuple = ()
    tol_key: str = ""

    @property
    def tolerance(self):
        return TOLERANCES[self.tol_key or self.key]


@dataclass
class Outcome:
    key: str
    cases: dict = field(default_factory=dict)  # label -> (value, tol)

    @property
    def value(self):
        return max(v for v, _ in self.cases.values())

    def passed(self, scale=1.0):
        return all(v <= t * scale for v, t in self.cases.values())


# ------------------------------------------------------------------ checks

def chk_ortho(p, grid, n_max=8):
    return spectral.biorthogonality_matrix(p, n_max, grid)[1]


def chk_zero(p, L):
    return abs(model.zero_total_area(p, L)[0])


def chk_zero_endpoint(p, L):
    integral, closed = model.zero_total_area(p, L)
    return abs(integral - closed)


def chk_pot_routes(p, grid):
    x = grid.x
    V = model.potential(x, p)
    re, im = model.potential_parts(x, p)
    out = max(np.max(np.abs(V.real - re)), np.max(np.abs(V.imag - im)))
    if p.eps == -1.0:
        out = max(out, np.max(np.abs(V - model.potential_eps_minus1(x, p.a, p.b, p.c, p.lam))))
    return float(out)


def chk_algebra(part, eps, N):
    if part == "quad1":
        return algebra.verify_quad1(eps, N).value
    return algebra.verify_quadratic_algebra(eps, N).parts[part]


def chk_distorted(part, w, N):
    return algebra.verify_distorted_algebra(w, 0.5, N).parts[part]


def chk_aosc(w, N):
    A_osc, C_osc = algebra.oscillator_limit_ops(w, N)
    A, _ = algebra.ladder_A(-1.0, N)
    C, _, _ = algebra.ladder_Cw(w, N)
    return float(max(np.max(np.abs(A.entries[1:, 1:] - A_osc.entries[1:, 1:])),
                     np.max(np.abs(C.entries[1:, 1:] - C_osc.entries[1:, 1:]))))


def chk_moments(eps, m_max=5):
    from .specfun import mellin_moment_exact, mellin_moment_numeric
    return max(abs(mellin_moment_numeric(m, eps) / mellin_moment_exact(m, eps) - 1.0)
               for m in range(1, m_max + 1))


def chk_natural_identity(eps, n_max=4):
    return float(np.max(coherent.natural_identity_check(eps, n_max)[0]))


def chk_distorted_identity(w, n_max=8):
    return float(np.max(coherent.distorted_identity_check(w, n_max)))


def chk_homomorphism(family, param, n_states=100, seed=0):
    """Largest gap between acting with a matrix then mapping, and mapping then acting."""
    rng = np.random.default_rng(seed)
    N = 14
    if family == "natural":
        A, Ap = algebra.ladder_A(param, N)
        ops = [(A, lambda f: bargmann.bargmann_annihilate_natural(f, param)),
               (Ap, bargmann.bargmann_create),
               (algebra.ladder_A_partial(param, N), bargmann.bargmann_partial_natural)]
    else:
        C, Cp, _ = algebra.ladder_Cw(param, N)
        ops = [(C, lambda f: bargmann.bargmann_annihilate_distorted(f, param)),
               (Cp, bargmann.bargmann_create)]
    worst = 0.0
    for _ in range(n_states):
        v = np.zeros(N, dtype=complex)
        v[1:11] = rng.normal(size=10) + 1j * rng.normal(size=10)
        f = bargmann.to_bargmann(v, family, param)
        for M, op in ops:
            lhs = bargmann.to_bargmann(M.entries @ v, family, param).padded(N)
            rhs = op(f).padded(N)
            worst = max(worst, float(np.max(np.abs(lhs - rhs)) / max(1.0, np.max(np.abs(lhs)))))
    return worst


def chk_inner(family, param, seed=1):
    rng = np.random.default_rng(seed)
    g = bargmann.PowerSeries(rng.normal(size=6) + 1j * rng.normal(size=6))
    f = bargmann.PowerSeries(rng.normal(size=6) + 1j * rng.normal(size=6))
    exact = bargmann.bargmann_inner(g, f, family, param)
    quad = bargmann.bargmann_inner_quadrature(g, f, family, param)
    return abs(exact - quad) / abs(exact)


def chk_pairing(family, param, index, size=3):
    P = bargmann.p_representation(index, family, param)
    M = np.array([[bargmann.pairing_matrix_element(P, m, k) for k in range(1, size + 1)]
                  for m in range(1, size + 1)])
    E = np.zeros((size, size))
    E[index - 1, index - 1] = 1.0
    return float(np.max(np.abs(M - E)))


def chk_states(gamma, grid):
    return float(np.max(spectral.oscillator_limit_deviation(gamma, 4, grid)))


def chk_amm_potential(gamma, x_abs=6.0):
    x = np.linspace(-x_abs, x_abs, 1201)
    return float(np.max(np.abs(model.amm_potential(x, gamma) - (x * x - 2))))


# ------------------------------------------------------------------ assembly

def _fmt(v):
    return f"{v:g}"


def build_cases(suite, p: ModelParams, grid: Grid, N, eps_list=(), w_list=(), gamma_list=()):
    eps_vals = list(eps_list) or [p.eps]
    w_pos = [w for w in w_list if w > 0] or [1.0]
    cases = []
    if suite == "biorthogonality":
        L = max(abs(grid.x_min), abs(grid.x_max))
        cases += [Case("ortho1", f"eps={_fmt(p.eps)}", chk_ortho, (p, grid)),
                  Case("zero", "integral", chk_zero, (p, L)),
                  Case("zero", "endpoint", chk_zero_endpoint, (p, L), "zero_endpoint"),
                  Case("pot2a", "routes", chk_pot_routes, (p, grid))]
    elif suite == "algebra":
        for part in ("Acomm1", "Acomm2", "Acomm3", "Acomm4", "quad1"):
            cases += [Case(part, f"eps={_fmt(e)}", chk_algebra, (part, e, N)) for e in eps_vals]
        for part in ("rcom2", "dist2"):
            cases += [Case(part, f"w={_fmt(w)}", chk_distorted, (part, w, N)) for w in w_list]
        cases += [Case("aosc", f"w={_fmt(w)}", chk_aosc, (w, N)) for w in w_pos]
    elif suite == "measures":
        cases += [Case("int4", f"eps={_fmt(e)}", chk_moments, (e,)) for e in eps_vals]
        cases += [Case("int3", f"eps={_fmt(e)}", chk_natural_identity, (e,)) for e in eps_vals]
        cases += [Case("constdist", f"w={_fmt(w)}", chk_distorted_identity, (w,)) for w in w_pos]
    elif suite == "bargmann":
        cases += [Case("bargmann1", f"natural eps={_fmt(e)}", chk_homomorphism, ("natural", e))
                  for e in eps_vals]
        cases += [Case("bargmann1", f"distorted w={_fmt(w)}", chk_homomorphism, ("distorted", w))
                  for w in w_pos]
        cases += [Case("inner", f"natural eps={_fmt(e)}", chk_inner, ("natural", e))
                  for e in eps_vals]
        cases += [Case("inner", f"distorted w={_fmt(w)}", chk_inner, ("distorted", w))
                  for w in w_pos]
        cases += [Case("P8", f"natural eps={_fmt(e)} n=1", chk_pairing, ("natural", e, 1))
                  for e in eps_vals]
        cases += [Case("P8", f"distorted w={_fmt(w)} n={k}", chk_pairing, ("distorted", w, k))
                  for w in w_pos for k in (1, 2)]
    elif suite == "limits":
        g = max(gamma_list) if gamma_list else 1e6
        cases += [Case("states", f"gamma={_fmt(g)}", chk_states, (g, grid)),
                  Case("potg", f"gamma={_fmt(g)}", chk_amm_potential, (g,))]
    else:
        raise ValueError(f"unknown suite {suite!r}")
    return cases


def _run_one(case: Case):
    return float(case.fn(*case.args))


def run_cases(cases, jobs=1):
    """Evaluate cases (in parallel when jobs > 1) and group them by key, in input order."""
    if jobs > 1 and len(cases) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            values = list(ex.map(_run_one, cases))
    else:
        values = [_run_one(c) for c in cases]
    out = {}
    for case, v in zip(cases, values):
        if not math.isfinite(v):
            v = math.inf
        out.setdefault(case.key, Outcome(case.key)).cases[case.label] = (v, case.tolerance)
    return out
