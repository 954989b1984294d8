import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from biosc import algebra as al

EPS = [0.5, -1.0, -3.0, -5.0]
WS = [0.0, 0.1, 0.5, 1.0, 2.0, 3.0]


# ---------------------------------------------------------------- Hubbard operators

def test_hubbard_examples():
    X = al.hubbard
    assert np.array_equal((X(0, 0, 5) @ X(0, 0, 5)).entries, X(0, 0, 5).entries)
    assert np.array_equal((X(1, 2, 5) @ X(2, 3, 5)).entries, X(1, 3, 5).entries)
    assert not np.any((X(1, 2, 5) @ X(3, 4, 5)).entries)
    with pytest.raises(IndexError):
        X(5, 0, 5)


@given(st.integers(0, 5), st.integers(0, 5), st.integers(0, 5), st.integers(0, 5))
def test_hubbard_multiplication_rule(n, m, r, s):
    N = 6
    prod = (al.hubbard(n, m, N) @ al.hubbard(r, s, N)).entries
    expected = al.hubbard(n, s, N).entries if m == r else np.zeros((N, N))
    assert np.array_equal(prod, expected)


def test_commutator_of_dyads():
    N = 5
    c = al.commutator(al.hubbard(1, 2, N), al.hubbard(2, 1, N))
    assert np.array_equal(c.entries, (al.hubbard(1, 1, N) - al.hubbard(2, 2, N)).entries)
    d1 = al.TruncatedOperator(np.diag([1.0, 2, 3]))
    d2 = al.TruncatedOperator(np.diag([5.0, -1, 0.5]))
    assert not np.any(al.commutator(d1, d2).entries)


def test_operator_plumbing():
    A = al.TruncatedOperator(np.arange(9.0).reshape(3, 3), "A")
    assert A.dim == 3 and A.entries.dtype == complex
    with pytest.raises(ValueError):
        A.entries[0, 0] = 1
    with pytest.raises(al.DimensionError):
        al.TruncatedOperator(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        al.TruncatedOperator(np.array([[np.inf]]))
    with pytest.raises(al.DimensionError):
        A @ al.identity(4)
    assert np.array_equal((2 * A - A).entries, A.entries)
    assert np.array_equal(A.dagger.entries, A.entries.T)
    assert A.block(1).shape == (2, 2)


# ---------------------------------------------------------------- matrices

def test_hamiltonian():
    assert np.array_equal(np.diag(al.hamiltonian_matrix(-1.0, 4).entries).real, [-1, 1, 3, 5])
    assert np.trace(al.hamiltonian_matrix(0.5, 4).entries).real == 9.5
    H = al.hamiltonian_matrix(0.2, 6)
    D = al.TruncatedOperator(np.diag(np.arange(6.0) ** 2))
    assert not np.any(al.commutator(H, D).entries)


def test_ladder_A_structure():
    A, Ap = al.ladder_A(-1.0, 8)
    assert A.entries[1, 2] == pytest.approx(4.0)
    assert np.array_equal(Ap.entries, A.entries.T)
    e = np.eye(8)
    assert not np.any(A @ e[0]) and not np.any(A @ e[1])
    assert not np.any(A.entries[0]) and not np.any(A.entries[:, 0])


def test_ladder_Cw_structure():
    C, Cp, Iw = al.ladder_Cw(1.0, 8)
    n = np.arange(6)
    assert np.allclose(C.entries[n + 1, n + 2], np.sqrt(2 * n + 2))
    e = np.eye(8)
    assert not np.any(C @ e[0]) and not np.any(C @ e[1]) and not np.any(Cp @ e[0])
    _, _, I0 = al.ladder_Cw(0.0, 6)
    assert np.array_equal(np.diag(I0.entries).real, [0, 0, 1, 1, 1, 1])
    with pytest.raises(ValueError):
        al.ladder_Cw(-0.5, 6)


def test_quadratures_structure():
    X, P = al.quadratures(-1.0, 10)
    for M in (X, P):
        assert not np.any(M.entries[0]) and not np.any(M.entries[:, 0])
    assert np.allclose(X.entries, X.entries.T) and not np.any(X.entries.imag)
    assert np.allclose(P.entries, -P.entries.T) and not np.any(P.entries.real)


# ---------------------------------------------------------------- identities

@pytest.mark.parametrize("eps", EPS)
@pytest.mark.parametrize("N", [10, 30, 100])
def test_quadratic_algebra(eps, N):
    r = al.verify_quadratic_algebra(eps, N)
    assert r.value < 1e-9, r
    assert set(r.parts) == {"Acomm1", "Acomm2", "Acomm3", "Acomm4"}
    assert al.verify_quad1(eps, N).value < 1e-9


@pytest.mark.parametrize("eps", [0.5, -1.0, -5.0])
def test_quadratic_algebra_double_precision_N30(eps):
    # the stricter per-op bound holds in plain double at N = 30
    assert al.verify_quadratic_algebra(eps, 30, extended=False).value < 1e-10


@pytest.mark.parametrize("w", WS)
@pytest.mark.parametrize("N", [10, 30, 100])
def test_distorted_algebra(w, N):
    r = al.verify_distorted_algebra(w, -1.0, N)
    assert r.value < 1e-12, r
    assert set(r.parts) == {"rcom2", "dist2"}


@given(st.floats(0.0, 10.0), st.floats(-8.0, 0.95))
def test_distorted_algebra_property(w, eps):
    assert al.verify_distorted_algebra(w, eps, 20).value < 1e-12


@given(st.floats(-8.0, 0.95))
def test_quadratic_algebra_property(eps):
    assert al.verify_quadratic_algebra(eps, 20).value < 1e-9
    assert al.verify_quad1(eps, 20).value < 1e-9


def test_residual_reports_offending_entry():
    r = al.verify_quadratic_algebra(-1.0, 12, drop=0, extended=False)
    # without dropping, the truncation edge breaks [A, A+]
    assert r.value > 1 and max(r.entry) >= 10


@pytest.mark.parametrize("eps", [0.5, -3.0])
def test_truncation_localized_to_edge(eps):
    N = 16
    A, Ap = al.ladder_A(eps, N)
    H = al.hamiltonian_matrix(eps, N)
    poly = np.diag([(3 * e - eps) * (e - eps) for e in al.levels(eps, N)])
    R = al.commutator(A, Ap).entries - 2 * poly
    body = np.abs(R[:N - 1, :N - 1])
    assert np.max(body) < 1e-12 * np.max(np.abs(poly))
    assert np.abs(R[N - 1, N - 1]) > 1
    assert np.max(np.abs((al.commutator(H, A) + 2 * A).entries)) < 1e-12


# ---------------------------------------------------------------- transformations

def test_transform_identity_and_hamiltonian():
    eps, N = -1.5, 8
    E = 2.0 * np.arange(N) + 1
    T = al.transform_operator(np.eye(N), eps).entries
    assert np.allclose(T, np.diag(np.concatenate([[0], E - eps])))
    T2 = al.transform_operator(np.diag(E), eps).entries
    Hl = al.levels(eps, N + 1)
    expect = np.diag(Hl * (Hl - eps))
    expect[0, 0] = 0
    assert np.allclose(T2, expect)


@pytest.mark.parametrize("eps", [-1.0, 0.5, -3.0])
def test_transform_of_boson_a_is_ladder_A(eps):
    N = 12
    a, ap, _ = al.boson_ops(N)
    A, Ap = al.ladder_A(eps, N + 1)
    assert np.allclose(al.transform_operator(a, eps).entries, A.entries, atol=1e-12)
    assert np.allclose(al.transform_operator(ap, eps).entries, Ap.entries, atol=1e-12)


@given(st.integers(2, 8), st.floats(-6, 0.9), st.integers(0, 2 ** 31 - 1))
def test_transform_commutes_with_dagger(N, eps, seed):
    rng = np.random.default_rng(seed)
    O = rng.normal(size=(N, N)) + 1j * rng.normal(size=(N, N))
    lhs = al.transform_operator(O.conj().T, eps).entries
    rhs = al.transform_operator(O, eps).dagger.entries
    assert np.allclose(lhs, rhs, atol=1e-12)


def test_oscillator_limit_ops():
    assert al.vartheta(1.0, 0, -1.0) == pytest.approx(0.5)
    for w in (0.5, 1.0, 2.5):
        A_osc, C_osc = al.oscillator_limit_ops(w, 20)
        A, _ = al.ladder_A(-1.0, 20)
        C, _, _ = al.ladder_Cw(w, 20)
        assert np.max(np.abs(A.entries[1:, 1:] - A_osc.entries[1:, 1:])) < 1e-12
        assert np.max(np.abs(C.entries[1:, 1:] - C_osc.entries[1:, 1:])) < 1e-12
    with pytest.raises(ValueError):
        al.oscillator_limit_ops(0.0, 5)


def test_A_partial_amplitude():
    Ad = al.ladder_A_partial(-1.0, 6)
    assert Ad.entries[1, 2] == pytest.approx(math.sqrt(2 / (2 * 4)))
