import math

import numpy as np
import pytest
from hypothesis import given, assume, settings
from hypothesis import strategies as st

from biosc import spectral as sp
from biosc.model import DEFAULT_GRID, ModelParams, fd_first, fd_second, interior, nodeless_check, on_grid
from biosc.specfun import hermite_phi
from conftest import FIG5A, FIG5B, family

HERMITIAN = ModelParams(eps=-2.0, lam=0.0, a=1.0, b=1.0, c=0.25)
CASES = [FIG5A, FIG5B, family(-3.0), family(0.5), family(-5.0, b=math.sqrt(math.pi) / 2), HERMITIAN]
S = interior(DEFAULT_GRID.n_points)


def test_energies():
    assert sp.energy(0, -1.7) == -1.7
    assert [sp.energy(k, 0.3) for k in range(1, 5)] == [1.0, 3.0, 5.0, 7.0]
    st0 = sp.eigenstate(0, FIG5A)
    assert st0.energy == -1.0 and sp.eigenstate(3, FIG5A).energy == 5.0


@pytest.mark.parametrize("p", CASES)
def test_schrodinger_residual(p):
    V = on_grid(p).V
    h = DEFAULT_GRID.h
    psi = sp.eigenstates(p, 8)
    for k in range(9):
        res = -fd_second(psi[k], h) + V * psi[k] - sp.energy(k, p.eps) * psi[k]
        assert np.max(np.abs(res[S])) < 1e-5, k


@pytest.mark.parametrize("p", CASES)
def test_binorms(p):
    for k in range(6):
        psi = sp.eigenstate(k, p).values
        assert abs(complex(np.asarray(sp.simpson_uniform(psi * psi, DEFAULT_GRID.h))) - 1) < 1e-6
    G, dev = sp.biorthogonality_matrix(p, 8)
    assert dev < 1e-6
    assert np.allclose(G, G.T)


def test_biorthogonality_examples():
    assert sp.biorthogonality_matrix(HERMITIAN, 8)[1] < 1e-6
    assert sp.biorthogonality_matrix(FIG5A, 8)[1] < 1e-6
    assert sp.biorthogonality_matrix(family(-3.0), 6)[1] < 1e-6


@settings(max_examples=15)
@given(st.floats(-6.0, 0.9), st.floats(0.2, 3.0), st.floats(0.2, 3.0), st.floats(0.0, 0.9))
def test_biorthogonality_property(eps, a, c, frac):
    p = ModelParams.from_abc(eps, a, frac * 2 * math.sqrt(a * c), c)
    assume(nodeless_check(p))
    assert sp.biorthogonality_matrix(p, 5)[1] < 1e-6


def test_ground_state_hermitian_real_positive():
    psi = sp.psi_ground(HERMITIAN).values
    assert np.max(np.abs(psi.imag)) < 1e-14
    assert np.all(psi.real > 0)


@pytest.mark.parametrize("p", CASES)
def test_ground_annihilated_by_A(p):
    psi = sp.psi_ground(p).values
    beta = on_grid(p).beta
    res = -fd_first(psi, DEFAULT_GRID.h) + beta * psi
    assert np.max(np.abs(res[S])) < 1e-6


@pytest.mark.parametrize("p", [FIG5A, FIG5B])
def test_concomitant(p):
    st0 = sp.psi_ground(p)
    bar = sp.psi_bar(st0)
    assert np.array_equal(np.conj(bar.values), st0.values)
    # B^+ psi_bar_0 = (-d/dx + beta*) psi_bar_0 = 0
    beta = on_grid(p).beta
    res = -fd_first(bar.values, DEFAULT_GRID.h) + np.conj(beta) * bar.values
    assert np.max(np.abs(res[S])) < 1e-6


def test_concomitant_hermitian_is_same():
    st3 = sp.eigenstate(3, HERMITIAN)
    assert np.allclose(sp.psi_bar(st3).values, st3.values, atol=1e-15)


@pytest.mark.parametrize("p", [FIG5A, FIG5B, family(-3.0)])
def test_A_reverses_B(p):
    beta = on_grid(p).beta
    x = DEFAULT_GRID.x
    for n in range(6):
        psi = sp.psi_excited(n, p).values
        a_psi = -fd_first(psi, DEFAULT_GRID.h) + beta * psi
        phi, _ = hermite_phi(n, x)
        assert np.max(np.abs(a_psi - math.sqrt(2 * n + 1 - p.eps) * phi)[S]) < 1e-6


@pytest.mark.parametrize("p", [FIG5B, family(-3.0, b=math.sqrt(math.pi) / 2)])
def test_excited_binorm_real_positive(p):
    m = on_grid(p)
    for n in range(6):
        phi, dphi = hermite_phi(n, m.x)
        raw = dphi + m.beta * phi
        val = complex(np.asarray(sp.simpson_uniform(raw * raw, DEFAULT_GRID.h)))
        assert val.real > 0 and abs(val.imag) < 1e-8 * val.real


def test_ground_phase_against_cumulative_simpson():
    from scipy.integrate import cumulative_simpson
    for p in (FIG5A, FIG5B):
        m = on_grid(p)
        i0 = DEFAULT_GRID.n_points // 2
        f = p.lam / m.q
        h = DEFAULT_GRID.h
        right = cumulative_simpson(f[i0:], dx=h, initial=0.0)
        left = cumulative_simpson(f[i0::-1], dx=-h, initial=0.0)[::-1]
        ref = np.concatenate([left[:-1], right])
        assert np.max(np.abs(sp.ground_phase(p) - ref)) < 1e-7


def test_normalization_error():
    with pytest.raises(sp.NormalizationError):
        sp.psi_ground(FIG5A, floor=1e6)


def test_bad_index():
    with pytest.raises(ValueError):
        sp.psi_excited(-1, FIG5A)


def test_oscillator_limit_examples():
    big = sp.oscillator_limit_deviation(1e6)
    assert np.all(big < 1e-5)
    d2, d20 = sp.oscillator_limit_deviation(2.0), sp.oscillator_limit_deviation(20.0)
    assert np.all(d20 < d2)
