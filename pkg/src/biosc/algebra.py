"""Truncated matrix representations on span{psi_0, ..., psi_{N-1}}.

Matrix entries are bi-orthogonal elements <psi_bar_m|O|psi_n>, so "row m,
column n" of an operator is its X^{m,n} Hubbard component.  Products of two
ladder matrices are exact except in the last two rows/columns, which the
verifiers drop.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np


class DimensionError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class TruncatedOperator:
    entries: np.ndarray = field(repr=False)
    label: str = ""

    def __post_init__(self):
        src = np.asarray(self.entries)
        # extended precision is kept when asked for; everything else is complex128
        dt = np.clongdouble if src.dtype in (np.longdouble, np.clongdouble) else complex
        m = np.array(src, dtype=dt)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"square matrix required, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("entries must be finite")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def dim(self):
        return self.entries.shape[0]

    def _coerce(self, other):
        if isinstance(other, TruncatedOperator):
            if other.dim != self.dim:
                raise DimensionError(f"dimension mismatch {self.dim} vs {other.dim}")
            return other.entries
        return None

    def __matmul__(self, other):
        if isinstance(other, TruncatedOperator):
            m = self._coerce(other)
            return TruncatedOperator(self.entries @ m, f"{self.label}{other.label}")
        return self.entries @ np.asarray(other)

    def __add__(self, other):
        m = self._coerce(other)
        if m is None:
            return NotImplemented
        return TruncatedOperator(self.entries + m, f"({self.label}+{other.label})")

    def __sub__(self, other):
        m = self._coerce(other)
        if m is None:
            return NotImplemented
        return TruncatedOperator(self.entries - m, f"({self.label}-{other.label})")

    def __mul__(self, scalar):
        if isinstance(scalar, TruncatedOperator):
            return NotImplemented
        return TruncatedOperator(np.asarray(scalar, dtype=self.entries.dtype) * self.entries,
                                 self.label)

    __rmul__ = __mul__

    def __neg__(self):
        return TruncatedOperator(-self.entries, f"-{self.label}")

    @property
    def dagger(self):
        return TruncatedOperator(self.entries.conj().T, f"{self.label}^+")

    def block(self, drop=2):
        """Top-left (N-drop) x (N-drop) block."""
        n = self.dim - drop
        return self.entries[:n, :n]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


class Residual(NamedTuple):
    value: float
    entry: tuple
    parts: dict


def _residual(blocks: dict) -> Residual:
    parts = {}
    worst, where = 0.0, (0, 0)
    for tag, mat in blocks.items():
        mag = np.abs(np.asarray(mat)).astype(float)
        k = np.unravel_index(int(np.argmax(mag)), mag.shape) if mag.size else (0, 0)
        v = float(mag[k]) if mag.size else 0.0
        parts[tag] = max(parts.get(tag, 0.0), v)
        if v > worst:
            worst, where = v, tuple(int(i) for i in k)
    return Residual(worst, where, parts)


def _check_dim(N, minimum=1):
    if int(N) != N or N < minimum:
        raise DimensionError(f"N must be an integer >= {minimum}")
    return int(N)


def hubbard(n, m, N):
    """X^{n,m} = |psi_n><psi_bar_m| as a matrix unit."""
    N = _check_dim(N)
    if not (0 <= n < N and 0 <= m < N):
        raise IndexError(f"indices ({n}, {m}) out of range for N={N}")
    out = np.zeros((N, N), dtype=complex)
    out[n, m] = 1.0
    return TruncatedOperator(out, f"X{n},{m}")


def identity(N):
    return TruncatedOperator(np.eye(_check_dim(N)), "1")


def levels(eps, N):
    """E^(lambda)_k for k = 0..N-1: eps, 1, 3, 5, ..."""
    e = 2.0 * np.arange(N) - 1.0
    e[0] = eps
    return e


def _real(extended):
    return np.longdouble if extended else float


def hamiltonian_matrix(eps, N, extended=False):
    if not eps < 1:
        raise ValueError("eps must be < 1")
    e = levels(eps, _check_dim(N)).astype(_real(extended))
    return TruncatedOperator(np.diag(e), "H")


def _poly_h(eps, N, fn, label, extended=False):
    e = levels(eps, N).astype(_real(extended))
    return TruncatedOperator(np.diag(fn(e)), label)


def g_natural(n, eps, extended=False):
    """Ladder amplitude sqrt(2(n+1)(E_n - eps)(E_{n+1} - eps))."""
    n = np.asarray(n, dtype=_real(extended))
    return np.sqrt(2 * (n + 1) * (2 * n + 1 - eps) * (2 * n + 3 - eps))


def _shift(diag_vals, N, label):
    # entries [k+1, k+2] = diag_vals[k]: lowers psi_{k+2} -> psi_{k+1}
    diag_vals = np.asarray(diag_vals)
    out = np.zeros((N, N), dtype=np.result_type(diag_vals, complex))
    k = np.arange(N - 2)
    out[k + 1, k + 2] = diag_vals
    return TruncatedOperator(out, label)


def ladder_A(eps, N, extended=False):
    """Quadratic-algebra ladder pair (A, A^+); psi_0 decouples."""
    if not eps < 1:
        raise ValueError("eps must be < 1")
    N = _check_dim(N)
    A = _shift(g_natural(np.arange(N - 2), eps, extended), N, "A")
    return A, TruncatedOperator(A.entries.T, "A+")


def ladder_Cw(w, N, extended=False):
    """Distorted ladder pair and I_w = diag(0, w, 1, 1, ...)."""
    if not w >= 0:
        raise ValueError("w must be >= 0")
    N = _check_dim(N)
    rt = _real(extended)
    C = _shift(np.sqrt(2 * (rt(w) + np.arange(N - 2, dtype=rt))), N, "C")
    iw = np.ones(N, dtype=rt)
    iw[0] = 0.0
    if N > 1:
        iw[1] = w
    return C, TruncatedOperator(C.entries.T, "C+"), TruncatedOperator(np.diag(iw), "I_w")


def ladder_A_partial(eps, N):
    """Lowering matrix realized by 2 d/dz* on the natural Bargmann space."""
    if not eps < 1:
        raise ValueError("eps must be < 1")
    N = _check_dim(N)
    n = np.arange(N - 2, dtype=float)
    amp = np.sqrt(2 * (n + 1) / ((2 * n + 1 - eps) * (2 * n + 3 - eps)))
    return _shift(amp, N, "A_d")


def quadratures(eps, N, extended=False):
    A, Ap = ladder_A(eps, N, extended)
    X = 0.5 * (Ap + A)
    P = 0.5j * (Ap - A)
    return (TruncatedOperator(X.entries, "X"), TruncatedOperator(P.entries, "P"))


def commutator(A: TruncatedOperator, B: TruncatedOperator) -> TruncatedOperator:
    if A.dim != B.dim:
        raise DimensionError(f"dimension mismatch {A.dim} vs {B.dim}")
    return TruncatedOperator(A.entries @ B.entries - B.entries @ A.entries,
                             f"[{A.label},{B.label}]")


def verify_quadratic_algebra(eps, N, drop=2, extended=True) -> Residual:
    """[A,A+] = 2(3H-eps)(H-eps), [H,A] = -2A, [H,A+] = 2A+, [X,P] = i(3H-eps)(H-eps).

    With ``extended`` the products run in long double: at N ~ 100 the
    entries of [A,A+] reach 1e7 and double round-off alone is ~1e-9.
    """
    N = _check_dim(N, 5)
    H = hamiltonian_matrix(eps, N, extended)
    A, Ap = ladder_A(eps, N, extended)
    poly = _poly_h(eps, N, lambda e: (3 * e - eps) * (e - eps), "(3H-e)(H-e)", extended)
    X, P = quadratures(eps, N, extended)
    return _residual({
        "Acomm1": (commutator(A, Ap) - 2 * poly).block(drop),
        "Acomm2": (commutator(H, A) + 2 * A).block(drop),
        "Acomm3": (commutator(H, Ap) - 2 * Ap).block(drop),
        "Acomm4": (commutator(X, P) - 1j * poly).block(drop),
    })


def verify_distorted_algebra(w, eps, N, drop=2, extended=True) -> Residual:
    N = _check_dim(N, 5)
    H = hamiltonian_matrix(eps, N, extended)
    C, Cp, Iw = ladder_Cw(w, N, extended)
    return _residual({
        "rcom2": (commutator(C, Cp) - 2 * Iw).block(drop),
        "dist2": np.concatenate([
            (commutator(H, C) + 2 * C).block(drop),
            (commutator(H, Cp) - 2 * Cp).block(drop)]),
    })


def verify_quad1(eps, N, drop=2, extended=True) -> Residual:
    """P^2 + X^2 = [H(H-eps) + 2](H-eps)."""
    N = _check_dim(N, 5)
    X, P = quadratures(eps, N, extended)
    rhs = _poly_h(eps, N, lambda e: (e * (e - eps) + 2) * (e - eps), "rhs", extended)
    return _residual({"quad1": (P @ P + X @ X - rhs).block(drop)})


def transform_operator(O, eps) -> TruncatedOperator:
    """BOA: an N x N oscillator-basis matrix becomes (N+1) x (N+1).

    Entry [m+1, n+1] is sqrt((E_m - eps)(E_n - eps)) O[m, n]; row and column 0
    vanish since A psi_0 = 0.
    """
    if not eps < 1:
        raise ValueError("eps must be < 1")
    M = np.asarray(O.entries if isinstance(O, TruncatedOperator) else O, dtype=complex)
    N = M.shape[0]
    s = np.sqrt(2.0 * np.arange(N) + 1.0 - eps)
    out = np.zeros((N + 1, N + 1), dtype=complex)
    out[1:, 1:] = s[:, None] * M * s[None, :]
    label = getattr(O, "label", "O")
    return TruncatedOperator(out, f"B{label}A")


def boson_ops(N):
    """a, a^+ and N on the number basis, with a|n> = sqrt(2n)|n-1>."""
    N = _check_dim(N)
    a = np.diag(np.sqrt(2.0 * np.arange(1, N)), 1)
    return (TruncatedOperator(a, "a"), TruncatedOperator(a.T, "a+"),
            TruncatedOperator(np.diag(np.arange(N, dtype=float)), "N"))


def vartheta(w, n, eps):
    n = np.asarray(n, dtype=float)
    return np.sqrt(2 * (w + n) / ((2 * n + 3 - eps) * (2 * n + 1 - eps)))


def oscillator_limit_ops(w, N):
    """A_osc = (2N)a and C_osc = a_{f_w}^+ a^2 on the number basis (eps = -1).

    Both are built by composing number-basis matrices, not by copying the
    ladder amplitudes, so agreement with ladder_A / ladder_Cw is a real check.
    """
    N = _check_dim(N)
    a, ap, num = boson_ops(N)
    A_osc = TruncatedOperator((2 * num.entries) @ a.entries, "A_osc")
    if not w > 0:
        raise ValueError("w must be > 0 for C_osc")
    # a_{f_w}^+ |n> = vartheta_w(n) |n+1>
    afd = np.diag(vartheta(w, np.arange(N - 1), -1.0), -1)
    C_osc = TruncatedOperator(afd @ a.entries @ a.entries, "C_osc")
    return A_osc, C_osc
