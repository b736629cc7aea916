"""Closed-form reference states and their analytic Wigner functions.

These are the oracles the rest of the test suite leans on: infinite-well
(box) eigenstates with their exact phase-space form, and the harmonic
oscillator Wigner functions for n = 0, 1.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import DomainError
from .grid import Grid1D, PhaseGrid, PhaseSpaceField, WaveFunction


def _sinc(u: np.ndarray) -> np.ndarray:
    # sin(u)/u, stable at u = 0 (np.sinc is sin(pi z)/(pi z))
    return np.sinc(u / np.pi)


class BoxEigenstate(NamedTuple):
    psi: WaveFunction
    energy: float


def box_energy(n: int, L: float, hbar: float = 1.0, mass: float = 1.0) -> float:
    return n**2 * np.pi**2 * hbar**2 / (2 * mass * L**2)


def box_eigenstate(n: int, L: float, grid: Grid1D, x0: float = 0.0,
                   mass: float = 1.0) -> BoxEigenstate:
    """n-th Dirichlet eigenstate of the box [x0, x0+L], zero outside.

    psi_n(x) = sqrt(2/L) sin(n pi (x-x0)/L) on (x0, x0+L); E_n = n^2 pi^2 hbar^2/(2 m L^2).
    """
    if n < 1:
        raise DomainError(f"box quantum number must be >= 1, got {n}")
    if x0 < grid.x_min or x0 + L > grid.x_max:
        raise DomainError("box interval must lie inside the grid")
    x = grid.points
    # strict interior keeps the wall nodes at exactly zero
    inside = (x > x0 + 1e-12 * L) & (x < x0 + L - 1e-12 * L)
    vals = np.where(inside, np.sqrt(2.0 / L) * np.sin(n * np.pi * (x - x0) / L), 0.0)
    psi = WaveFunction(grid, vals.astype(complex), mass)
    return BoxEigenstate(psi, box_energy(n, L, grid.hbar, mass))


def box_wigner_analytic(n: int, L: float, pg: PhaseGrid, x0: float = 0.0) -> PhaseSpaceField:
    """Closed-form Wigner function of the box eigenstate on [x0, x0+L].

    Written with sin(u)/u terms so the expression is regular everywhere; at the
    critical momenta p = +- n pi hbar / L and p = 0 it reproduces the limit
    values by continuity (see `box_wigner_at_critical_momentum`).
    """
    if n < 1:
        raise DomainError(f"box quantum number must be >= 1, got {n}")
    hbar = pg.hbar
    x = pg.x_grid.points[:, None] - x0
    p = pg.p_grid.points[None, :]
    k = n * np.pi / L
    q = p / hbar
    s = L / 2 - np.abs(x - L / 2)
    w = (s / (np.pi * hbar * L)) * (_sinc(2 * s * (k - q)) + _sinc(2 * s * (k + q))) \
        - (2 * s / (np.pi * hbar * L)) * np.cos(2 * k * x) * _sinc(2 * s * q)
    w = np.where((x > 0) & (x < L), w, 0.0)
    return PhaseSpaceField(pg, w)


def box_wigner_at_critical_momentum(n: int, L: float, x: np.ndarray,
                                    hbar: float = 1.0, x0: float = 0.0) -> np.ndarray:
    """Limit value of the box Wigner function at p = n pi hbar / L."""
    xr = np.asarray(x, dtype=float) - x0
    s = L / 2 - np.abs(xr - L / 2)
    val = (s / (np.pi * hbar * L)
           + np.sin(4 * n * np.pi * s / L) / (4 * np.pi**2 * n * hbar)
           + np.cos(2 * n * np.pi * xr / L)
           * np.sin(2 * n * np.pi / L * (np.abs(xr - L / 2) - L / 2)) / (n * np.pi**2 * hbar))
    return np.where((xr > 0) & (xr < L), val, 0.0)


def harmonic_wigner(n: int, pg: PhaseGrid) -> PhaseSpaceField:
    """Harmonic-oscillator Wigner function for n in {0, 1} (m = omega = 1).

    n=0: (1/pi hbar) exp(-(x^2+p^2)/hbar)
    n=1: (1/pi hbar) (2x^2/hbar + 2p^2/hbar - 1) exp(-(x^2+p^2)/hbar)

    Higher n are generated numerically by the approx module's Hermite basis.
    """
    if n not in (0, 1):
        raise DomainError("closed forms provided for n = 0, 1 only")
    hbar = pg.hbar
    x = pg.x_grid.points[:, None]
    p = pg.p_grid.points[None, :]
    r2 = (x**2 + p**2) / hbar
    gauss = np.exp(-r2) / (np.pi * hbar)
    w = gauss if n == 0 else (2 * r2 - 1) * gauss
    return PhaseSpaceField(pg, w + np.zeros(pg.shape))


def gaussian_state(grid: Grid1D, center: float = 0.0, momentum: float = 0.0,
                   width: float | None = None, mass: float = 1.0) -> WaveFunction:
    """Normalized Gaussian wave packet; width defaults to sqrt(hbar) (coherent state)."""
    hbar = grid.hbar
    sigma = np.sqrt(hbar) if width is None else width
    x = grid.points
    vals = (np.pi * sigma**2) ** (-0.25) * np.exp(
        -(x - center) ** 2 / (2 * sigma**2) + 1j * momentum * x / hbar)
    return WaveFunction(grid, vals, mass)
