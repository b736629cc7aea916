"""Star-product action of the kinetic symbol, boundary terms, potential kernel.

The kinetic star product is the exact finite expansion

    p^2/2m * F = (p^2/2m) F - (i hbar p / 2m) dF/dx - (hbar^2/8m) d^2F/dx^2,

with derivatives taken spectrally in x.  For a state confined to [a, b] with
Dirichlet walls, the half-piece field F1 (integration limits +-(x-a)) obeys

    p^2/2m * (Theta_1 F1) = E (Theta_1 F1) + B1(x,p)   on  a < x < x0,

with the boundary term B1 concentrated nowhere: it is felt through the whole
half strip.  For grid-sampled box eigenstates F1 coincides pointwise with the
full Wigner function, which is globally C^2, so the residual of the corrected
stargenvalue equation is evaluated by differentiating that smooth field and
masking to the half strip afterwards; no edge taper is required (and a
fixed-width taper would inject O(1/dx^2) curvature at the mask edge).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError, GridMismatchError, NonlocalityError, ResolutionError
from .grid import (Grid1D, PhaseGrid, PhaseSpaceField, WaveFunction, require_same_grid,
                   spectral_derivative)
from .wigner import _cross_values


@dataclass(frozen=True)
class BoundaryPotentialSpec:
    """One smoothed wall term of the confining Hamiltonian on [a, b].

    side="left" models  -strength * delta'_+(x - a)  (evaluation shifted +2 eps),
    side="right" models +strength * delta'_-(x - b)  (evaluation shifted -2 eps).
    strength defaults to hbar^2/2m at construction sites; epsilon > 0.
    """

    a: float
    b: float
    epsilon: float
    strength: float
    side: str

    def __post_init__(self):
        if self.epsilon <= 0:
            raise DomainError("epsilon must be positive")
        if not self.a < self.b:
            raise DomainError("need a < b")
        if self.side not in ("left", "right"):
            raise DomainError("side must be 'left' or 'right'")

    @property
    def wall(self) -> float:
        return self.a if self.side == "left" else self.b

    @property
    def sign(self) -> float:
        # per the globally defined Hamiltonian: -delta'_+ at a, +delta'_- at b
        return -1.0 if self.side == "left" else 1.0

    @property
    def shift(self) -> float:
        """Evaluation shift of the multiplicand, +2eps into the bulk at a, -2eps at b."""
        return 2 * self.epsilon if self.side == "left" else -2 * self.epsilon


def gaussian_delta(u: np.ndarray, epsilon: float) -> np.ndarray:
    """delta_eps(u) = exp(-(u/eps)^2) / (sqrt(pi) eps)."""
    return np.exp(-((u / epsilon) ** 2)) / (np.sqrt(np.pi) * epsilon)


def gaussian_delta_prime(u: np.ndarray, epsilon: float) -> np.ndarray:
    return -2 * u / epsilon**2 * gaussian_delta(u, epsilon)


class SmoothedBoundarySymbol(NamedTuple):
    """Samples of the smoothed wall potential plus its evaluation-shift rule."""

    grid: Grid1D
    values: np.ndarray        # sign * strength * delta'_eps(x - wall)
    shift: float              # apply the multiplicand at x + shift
    spec: BoundaryPotentialSpec


def smoothed_boundary_symbol(spec: BoundaryPotentialSpec, grid: Grid1D) -> SmoothedBoundarySymbol:
    """Sampled delta'_eps wall term; requires eps >= 2 dx for resolvability."""
    if spec.epsilon < 2 * grid.dx:
        raise ResolutionError(
            f"epsilon {spec.epsilon} under-resolved: need epsilon >= 2*dx = {2 * grid.dx:.3e}")
    vals = spec.sign * spec.strength * gaussian_delta_prime(grid.points - spec.wall, spec.epsilon)
    return SmoothedBoundarySymbol(grid, vals, spec.shift, spec)


def kinetic_star(F: PhaseSpaceField, m: float = 1.0) -> PhaseSpaceField:
    """Exact star action of the kinetic symbol p^2/2m on F (complex output)."""
    hbar = F.grid.hbar
    p = F.grid.p_grid.points[None, :]
    dF = spectral_derivative(F.values.astype(complex), F.grid.x_grid, order=1, axis=0)
    d2F = spectral_derivative(F.values.astype(complex), F.grid.x_grid, order=2, axis=0)
    vals = (p**2 / (2 * m)) * F.values - 1j * hbar * p / (2 * m) * dF - hbar**2 / (8 * m) * d2F
    return PhaseSpaceField(F.grid, vals)


def _one_sided_derivative(psi: WaveFunction, a: float) -> complex:
    """psi'(a+) by the 4-point forward stencil."""
    g = psi.grid
    ia = g.index_of(a)
    if ia + 3 >= g.n_points:
        raise DomainError("not enough grid to the right of a for the one-sided stencil")
    v = psi.values
    return (-11 * v[ia] + 18 * v[ia + 1] - 9 * v[ia + 2] + 2 * v[ia + 3]) / (6 * g.dx)


def boundary_term_B1(psi: WaveFunction, a: float, pg: PhaseGrid) -> PhaseSpaceField:
    """Dirichlet boundary term B1^D(x,p) = -(hbar/2 pi m) e^{-2ip(a-x)/hbar} psi*(2x-a) psi'(a+).

    Evaluated on the whole grid; it is meaningful on the half strip a < x < x0
    and vanishes automatically once 2x-a leaves the support of psi.
    """
    g = pg.x_grid
    hbar = pg.hbar
    if psi.grid != g:
        raise GridMismatchError("state grid does not match the phase grid")
    dpsi_a = _one_sided_derivative(psi, a)
    x = g.points
    # 2x - a lands on grid nodes when a does; sample with zero extension
    idx = np.round((2 * x - a - g.x_min) / g.dx).astype(int)
    valid = (idx >= 0) & (idx < g.n_points)
    psi_2xa = np.where(valid, psi.values[np.clip(idx, 0, g.n_points - 1)], 0.0)
    p = pg.p_grid.points[None, :]
    phase = np.exp(-2j * p * (a - x[:, None]) / hbar)
    vals = -(hbar / (2 * np.pi * psi.mass)) * phase * np.conj(psi_2xa)[:, None] * dpsi_a
    return PhaseSpaceField(pg, vals)


def _interior_sided_gradient(psi: WaveFunction) -> np.ndarray:
    """Centered derivative with the support-edge nodes replaced by one-sided
    stencils from the interior, so the values at the walls are the lateral
    limits psi'(a+), psi'(b-) rather than kink-averaged ones."""
    v = psi.values
    h = psi.grid.dx
    d = np.gradient(v, h)
    tol = 1e-13 * max(np.max(np.abs(v)), 1e-300)
    nz = np.nonzero(np.abs(v) > tol)[0]
    if nz.size:
        lo, hi = nz[0] - 1, nz[-1] + 1          # wall nodes (psi = 0 there)
        if lo >= 0 and lo + 3 < v.size:
            d[lo] = (-11 * v[lo] + 18 * v[lo + 1] - 9 * v[lo + 2] + 2 * v[lo + 3]) / (6 * h)
        if hi < v.size and hi - 3 >= 0:
            d[hi] = (11 * v[hi] - 18 * v[hi - 1] + 9 * v[hi - 2] - 2 * v[hi - 3]) / (6 * h)
    return d


def lambda_epsilon(psi: WaveFunction, a: float, epsilon: float, pg: PhaseGrid,
                   dirichlet: bool = False) -> PhaseSpaceField:
    """The shifted-argument integral Lambda_eps (evaluated form), times i hbar^2 / 4 pi m.

    With dirichlet=True the psi(a+eps) terms are dropped (the Dirichlet variant
    Lambda^D whose eps -> 0+ limit is exactly B1^D); with False the full
    three-term expression is evaluated from the samples.  Either way the gap to
    B1^D shrinks linearly in eps.
    """
    g = pg.x_grid
    hbar = pg.hbar
    if psi.grid != g:
        raise GridMismatchError("state grid does not match the phase grid")
    x = g.points
    xg = x
    dpsi = _interior_sided_gradient(psi)

    def sample(arr: np.ndarray, pts: np.ndarray) -> np.ndarray:
        re = np.interp(pts, xg, arr.real, left=0.0, right=0.0)
        im = np.interp(pts, xg, arr.imag, left=0.0, right=0.0)
        return re + 1j * im

    psi_shift = sample(psi.values, 2 * x - a + epsilon)
    dpsi_shift = sample(dpsi, 2 * x - a + epsilon)
    psi_ae = complex(sample(psi.values, np.array([a + epsilon]))[0])
    dpsi_ae = complex(sample(dpsi, np.array([a + epsilon]))[0])
    p = pg.p_grid.points[None, :]
    phase = np.exp(-2j * p * (a - x[:, None]) / hbar)
    core = np.conj(psi_shift)[:, None] * dpsi_ae
    if not dirichlet:
        core = core - (2j * p / hbar) * np.conj(psi_shift)[:, None] * psi_ae \
            - np.conj(dpsi_shift)[:, None] * psi_ae
    lam = (2j / hbar) * phase * core
    return PhaseSpaceField(pg, 1j * hbar**2 / (4 * np.pi * psi.mass) * lam)


def half_strip_field(psi: WaveFunction, a: float, b: float, pg: PhaseGrid,
                     side: str = "left") -> PhaseSpaceField:
    """F1 (or F2): the Wigner integral with y-limits +-(x-a) (resp. +-(b-x)).

    For psi supported inside [a, b] this reproduces the full Wigner function
    pointwise; the finite limits matter for the boundary-term bookkeeping.
    """
    if side not in ("left", "right"):
        raise DomainError("side must be 'left' or 'right'")
    g = pg.x_grid
    n, half = g.n_points, g.n_points // 2
    x = g.points[:, None]
    y = (np.arange(n)[None, :] - half) * g.dx
    mask = (np.abs(y) <= (x - a) + 1e-12) if side == "left" else (np.abs(y) <= (b - x) + 1e-12)
    vals = _cross_values(psi, psi, pg, y_mask=mask)
    return PhaseSpaceField(pg, vals.real) if np.max(np.abs(vals.imag)) < 1e-9 \
        else PhaseSpaceField(pg, vals)


@dataclass(frozen=True)
class StargenResidual:
    """sup-norm residual of the boundary-corrected stargenvalue equation."""

    sup_residual: float
    sup_imag_naive: float        # sup |Im(p^2/2m * F)| = obstruction of the naive equation
    sup_field: float
    p_window: float
    x_range: tuple[float, float]

    def as_dict(self) -> dict:
        return {"sup_residual": self.sup_residual, "sup_imag_naive": self.sup_imag_naive,
                "sup_field": self.sup_field, "p_window": self.p_window,
                "x_range": list(self.x_range)}


def stargenvalue_residual(F1: PhaseSpaceField, E: float, psi: WaveFunction, a: float,
                          m: float = 1.0, x_mid: float | None = None,
                          p_window: float | None = None) -> StargenResidual:
    """sup over the half strip of | p^2/2m * (Theta_1 F1) - E Theta_1 F1 - B1^D |.

    The derivatives are taken on the globally smooth F1 and the half-strip mask
    applied afterwards (pointwise-equal on a < x < x0 and free of mask-edge
    Gibbs error).  The momentum window defaults to |p| <= 10 hbar/(x0 - a):
    the identity holds for all p, but grid rows near the dual Nyquist momentum
    carry x-frequencies 2(k_n + |p|/hbar) the grid cannot represent, so the sup
    is reported over a window the discretization resolves (recorded in the
    result).
    """
    g = F1.grid.x_grid
    x = g.points
    if x_mid is None:
        x_mid = _support_midpoint(psi, a)
    hbar = F1.grid.hbar
    if p_window is None:
        p_window = 10.0 * hbar / max(x_mid - a, g.dx)
    star = kinetic_star(F1, m)
    B1 = boundary_term_B1(psi, a, F1.grid)
    resid = star.values - E * F1.values - B1.values
    xm = (x >= a) & (x <= x_mid)
    pm = np.abs(F1.grid.p_grid.points) <= p_window
    window = np.ix_(xm, pm)
    return StargenResidual(
        sup_residual=float(np.max(np.abs(resid[window]))),
        sup_imag_naive=float(np.max(np.abs(star.values.imag[window]))),
        sup_field=float(np.max(np.abs(F1.values))),
        p_window=float(p_window),
        x_range=(a, float(x_mid)),
    )


def _support_midpoint(psi: WaveFunction, a: float) -> float:
    nz = np.nonzero(np.abs(psi.values) > 1e-13 * np.max(np.abs(psi.values)))[0]
    b = psi.grid.points[nz[-1]] if nz.size else psi.grid.x_max
    return (a + b) / 2


def doubled_window_grid(pg: PhaseGrid) -> Grid1D:
    """Grid on which the potential must be sampled for `potential_kernel`.

    The kernel integral runs over x' = 2(m - n/2) dx, so V enters at
    x +- x'/2 spanning [x_min - span/2, x_max + span/2): 2n points at dx.
    The nonlocality is physical: the exterior potential contributes to the
    bulk kernel, so the caller must supply V on the device and its complement.
    """
    g = pg.x_grid
    half_span = (g.x_max - g.x_min) / 2
    return Grid1D(g.x_min - half_span, g.x_max + half_span, 2 * g.n_points, g.hbar)


def potential_kernel(V: np.ndarray, pg: PhaseGrid) -> PhaseSpaceField:
    """Odd sine-transform kernel  K(x,p') = Int sin(x'p'/hbar) [V(x+x'/2) - V(x-x'/2)] dx'.

    V must be sampled on `doubled_window_grid(pg)`; the x'-window is truncated
    at the grid span.  Computed with one batched FFT over x'.
    """
    g = pg.x_grid
    n, half = g.n_points, g.n_points // 2
    V = np.asarray(V, dtype=float)
    if V.shape != (2 * n,):
        dw = doubled_window_grid(pg)
        raise NonlocalityError(
            f"potential must be sampled on the doubled window "
            f"[{dw.x_min}, {dw.x_max}) with {dw.n_points} points; got shape {V.shape}")
    i = np.arange(n)[:, None]
    m = np.arange(n)[None, :]
    diff = V[i + m] - V[i - m + n]
    k = np.arange(n)
    # sum_m D_m sin(2 pi (m-n/2)(k-n/2)/n) = -Im[(-1)^k FFT[D (-1)^m]]  (n % 4 == 0)
    tr = np.fft.fft(diff * (-1.0) ** m[0], axis=1) * (-1.0) ** k[None, :]
    vals = -2 * g.dx * tr.imag
    return PhaseSpaceField(pg, vals)


def boundary_potential_doubled_window(specs, pg: PhaseGrid) -> np.ndarray:
    """Smoothed wall terms sampled on the doubled window (additive to V)."""
    dw = doubled_window_grid(pg)
    out = np.zeros(dw.n_points)
    for spec in specs:
        if spec.epsilon < 2 * dw.dx:
            raise ResolutionError(
                f"epsilon {spec.epsilon} under-resolved on the doubled window "
                f"(need >= {2 * dw.dx:.3e})")
        out += spec.sign * spec.strength * gaussian_delta_prime(dw.points - spec.wall, spec.epsilon)
    return out


def momentum_convolution(kernel: PhaseSpaceField, F: PhaseSpaceField,
                         edge_tol: float = 1e-8) -> PhaseSpaceField:
    """Row-wise  Int K(x,p') F(x, p+p') dp'  by zero-padded FFT correlation.

    F is assumed negligible at the momentum-grid edge; the largest edge value
    relative to sup|F| is checked against edge_tol (confined states have slow
    1/p tails, so callers dealing with them must widen the tolerance
    deliberately).
    """
    require_same_grid(kernel, F)
    n = F.grid.p_grid.n_points
    half = n // 2
    fmax = np.max(np.abs(F.values)) or 1.0
    edge = max(np.max(np.abs(F.values[:, 0])), np.max(np.abs(F.values[:, -1])))
    if edge > edge_tol * fmax:
        raise DomainError(
            f"field not negligible at the p-grid edge (rel. {edge / fmax:.2e} > {edge_tol:.2e}); "
            "enlarge the momentum span or pass a wider edge_tol")
    M = 2 * n
    K2 = np.zeros((kernel.values.shape[0], M))
    K2[:, :n] = kernel.values
    F2 = np.zeros((F.values.shape[0], M), dtype=F.values.dtype)
    F2[:, half:half + n] = F.values
    corr = np.fft.ifft(np.conj(np.fft.fft(K2, axis=1)) * np.fft.fft(F2, axis=1), axis=1)
    vals = F.grid.p_grid.dx * corr[:, :n]
    vals = vals.real if F.is_real else vals
    return PhaseSpaceField(F.grid, vals)
