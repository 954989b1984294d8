"""Eigenfunctions of H_lambda, their concomitants, and bi-orthonormality checks.

psi_{n+1} = B phi_n / sqrt(E_n - eps) with B = d/dx + beta, and psi_0 solves
A psi_0 = 0 with A = -d/dx + beta.  Bi-products are integrals of psi_m psi_n
without complex conjugation.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .model import DEFAULT_GRID, Grid, GridFunction, ModelParams, on_grid, simpson_uniform
from .specfun import hermite_phi, hermite_table


class NormalizationError(ArithmeticError):
    """The ground-state bi-norm vanishes or is not finite."""


@dataclass(frozen=True, eq=False)
class Eigenstate:
    index: int
    energy: float
    wavefunction: GridFunction

    @property
    def values(self):
        return self.wavefunction.values


def oscillator_energy(n):
    return 2.0 * n + 1.0


def energy(index, eps):
    """E_0 = eps, E_{n+1} = 2n + 1."""
    return float(eps) if index == 0 else oscillator_energy(index - 1)


def psi_excited(n, p: ModelParams, grid: Grid = DEFAULT_GRID) -> Eigenstate:
    """Eigenstate with index n + 1, built from the oscillator level n."""
    if n < 0:
        raise ValueError("n must be >= 0")
    gap = oscillator_energy(n) - p.eps
    if not gap > 0:
        raise ValueError("E_n - eps must be positive")
    m = on_grid(p, grid)
    phi, dphi = hermite_phi(n, m.x)
    vals = (dphi + m.beta * phi) / math.sqrt(gap)
    return Eigenstate(n + 1, oscillator_energy(n), GridFunction(grid, vals))


def ground_phase(p: ModelParams, grid: Grid = DEFAULT_GRID):
    """lam * int_0^x dy / alpha^2, in closed form.

    With t = u2/u1 (t' = 1/u1^2) and 4 lam^2 = 4ac - b^2 the integrand is
    lam t'/(a + b t + c t^2), whose antiderivative is an arctan.
    """
    if p.lam == 0.0:
        return np.zeros(grid.n_points)
    m = on_grid(p, grid)
    t = m.u2 / m.u1
    two_lam = 2.0 * p.lam
    return np.arctan((2 * p.c * t + p.b) / two_lam) - math.atan(p.b / two_lam)


def ground_unnormalized(p: ModelParams, grid: Grid = DEFAULT_GRID):
    """psi_eps = (alpha(0)/alpha(x)) exp(i lam int_0^x dy/alpha^2) = exp(int_0^x beta)."""
    m = on_grid(p, grid)
    return math.sqrt(p.a) / np.sqrt(m.q) * np.exp(1j * ground_phase(p, grid))


def psi_ground(p: ModelParams, grid: Grid = DEFAULT_GRID, floor=1e-12) -> Eigenstate:
    psi = ground_unnormalized(p, grid)
    binorm = complex(simpson_uniform(psi * psi, grid.h))
    if not (abs(binorm) > floor and cmath.isfinite(binorm)):
        raise NormalizationError(f"ground-state bi-norm {binorm!r} unusable")
    # |.|^{-1/2} e^{-i chi/2} with chi the principal argument
    theta0 = abs(binorm) ** -0.5 * cmath.exp(-0.5j * cmath.phase(binorm))
    return Eigenstate(0, float(p.eps), GridFunction(grid, theta0 * psi))


def eigenstate(index, p: ModelParams, grid: Grid = DEFAULT_GRID) -> Eigenstate:
    return psi_ground(p, grid) if index == 0 else psi_excited(index - 1, p, grid)


def psi_bar(state: Eigenstate) -> Eigenstate:
    """Concomitant: conj(psi_bar) = psi, so psi_bar = conj(psi)."""
    wf = state.wavefunction
    return Eigenstate(state.index, state.energy, GridFunction(wf.grid, np.conj(wf.values)))


def eigenstates(p: ModelParams, n_max, grid: Grid = DEFAULT_GRID):
    """psi_0 .. psi_{n_max} as a (n_max+1, n_points) complex array."""
    m = on_grid(p, grid)
    out = np.empty((n_max + 1, grid.n_points), dtype=complex)
    out[0] = psi_ground(p, grid).values
    if n_max >= 1:
        phi, dphi = hermite_table(n_max - 1, m.x)
        gaps = np.sqrt(2.0 * np.arange(n_max) + 1.0 - p.eps)
        out[1:] = (dphi + m.beta * phi) / gaps[:, None]
    return out


def biorthogonality_matrix(p: ModelParams, n_max, grid: Grid = DEFAULT_GRID):
    """G[m, n] = int psi_m psi_n dx (no conjugation) and max |G - I|."""
    psi = eigenstates(p, n_max, grid)
    from scipy.integrate import simpson

    G = simpson(psi[:, None, :] * psi[None, :, :], dx=grid.h, axis=-1)
    return G, float(np.max(np.abs(G - np.eye(n_max + 1))))


def oscillator_limit_deviation(gamma, n_max=4, grid: Grid = DEFAULT_GRID):
    """sup_x |psi_n - phi_n| for n = 0..n_max on the AMM member with parameter gamma.

    Eigenfunctions carry an arbitrary global sign, so each n takes the better
    of the two signs.
    """
    p = ModelParams.amm(gamma)
    psi = eigenstates(p, n_max, grid)
    phi, _ = hermite_table(n_max, grid.x)
    return np.array([min(np.max(np.abs(psi[n] - s * phi[n])) for s in (1.0, -1.0))
                     for n in range(n_max + 1)])
