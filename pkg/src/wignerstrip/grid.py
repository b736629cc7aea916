"""Uniform grids, quadrature and the discrete Fourier contract.

Conventions used throughout the package (fixed once, here):

* position transform   psi~(p) = (2 pi hbar)^(-1/2) Integral psi(x) e^(-i x p / hbar) dx,
  realized by an FFT on a grid of n points (n a power of two) with the dual
  momentum grid  p_k = (k - n/2) * dp,  dp = 2 pi hbar / (n dx).
* phase-space transform kernel e^(-2 i p y / hbar) over a centered y-grid that
  copies the position grid; its dual momentum grid has dp = pi hbar / (n dx).

hbar is carried on the grid, never global, so experiments with different hbar
can coexist.  All containers are immutable after construction; every operation
is a pure function of its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError, GridMismatchError

_NORM_TOL = 1e-10


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid of n_points (power of two, >= 8) on [x_min, x_max)."""

    x_min: float
    x_max: float
    n_points: int
    hbar: float = 1.0

    def __post_init__(self):
        if self.n_points < 8 or not _is_power_of_two(self.n_points):
            raise DomainError(f"n_points must be a power of two >= 8, got {self.n_points}")
        if not self.x_max > self.x_min:
            raise DomainError("x_max must exceed x_min")
        if self.hbar <= 0:
            raise DomainError("hbar must be positive")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_points

    @property
    def points(self) -> np.ndarray:
        # center-anchored so that symmetric grids mirror exactly in floats
        half = self.n_points // 2
        center = self.x_min + self.dx * half
        x = center + self.dx * (np.arange(self.n_points) - half)
        x.setflags(write=False)
        return x

    def index_of(self, x0: float) -> int:
        """Nearest grid index of x0; raises if x0 lies outside the grid."""
        if x0 < self.x_min - 0.5 * self.dx or x0 > self.x_max + 0.5 * self.dx:
            raise DomainError(f"position {x0} outside grid [{self.x_min}, {self.x_max})")
        return int(round((x0 - self.x_min) / self.dx))

    def fourier_dual(self) -> "Grid1D":
        """Momentum grid dual under the e^(-ixp/hbar) kernel."""
        dp = 2 * np.pi * self.hbar / (self.n_points * self.dx)
        return Grid1D(-dp * (self.n_points // 2), dp * (self.n_points // 2),
                      self.n_points, self.hbar)


@dataclass(frozen=True)
class PhaseGrid:
    """Position grid paired with a momentum grid.

    The canonical construction (`from_position_grid`) takes the y-integration
    grid to be the position grid re-centered at 0 and the momentum grid to be
    its FFT dual under the e^(-2ipy/hbar) kernel, dp = pi hbar / (n dx).
    An explicit symmetric p-grid is also accepted, for closed-form evaluation.
    """

    x_grid: Grid1D
    p_grid: Grid1D

    def __post_init__(self):
        if self.x_grid.hbar != self.p_grid.hbar:
            raise GridMismatchError("x and p grids carry different hbar")
        pmin, pmax, dp = self.p_grid.x_min, self.p_grid.x_max - self.p_grid.dx, self.p_grid.dx
        scale = max(abs(pmin), abs(pmax), dp)
        fft_dual = abs(pmin + pmax + dp) < 1e-9 * scale
        symmetric = abs(pmin + pmax) < 1e-9 * scale
        if not (fft_dual or symmetric):
            raise GridMismatchError("p-grid must be symmetric about 0 or the FFT dual grid")

    @classmethod
    def from_position_grid(cls, x_grid: Grid1D) -> "PhaseGrid":
        n, dx, hbar = x_grid.n_points, x_grid.dx, x_grid.hbar
        dp = np.pi * hbar / (n * dx)
        p_grid = Grid1D(-dp * (n // 2), dp * (n // 2), n, hbar)
        return cls(x_grid, p_grid)

    @property
    def hbar(self) -> float:
        return self.x_grid.hbar

    @property
    def shape(self) -> tuple[int, int]:
        return (self.x_grid.n_points, self.p_grid.n_points)

    def is_fft_dual(self) -> bool:
        expected = np.pi * self.hbar / (self.x_grid.n_points * self.x_grid.dx)
        return (self.p_grid.n_points == self.x_grid.n_points
                and abs(self.p_grid.dx - expected) < 1e-12 * expected
                and abs(self.p_grid.x_min + expected * (self.p_grid.n_points // 2)) < 1e-9 * expected)


@dataclass(frozen=True)
class WaveFunction:
    """Complex samples on a Grid1D with mass metadata."""

    grid: Grid1D
    values: np.ndarray
    mass: float = 1.0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (self.grid.n_points,):
            raise GridMismatchError(
                f"values shape {v.shape} does not match grid ({self.grid.n_points},)")
        if not np.all(np.isfinite(v)):
            raise DomainError("wave function samples must be finite")
        if self.mass <= 0:
            raise DomainError("mass must be positive")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def norm(self) -> float:
        return float(np.sqrt(integrate_1d(np.abs(self.values) ** 2, self.grid)))

    @property
    def is_normalized(self) -> bool:
        return abs(self.norm - 1.0) < _NORM_TOL

    def normalized(self) -> "WaveFunction":
        n = self.norm
        if n == 0.0:
            raise DomainError("cannot normalize the zero function")
        return WaveFunction(self.grid, self.values / n, self.mass)


@dataclass(frozen=True)
class PhaseSpaceField:
    """Real or complex samples on a PhaseGrid, indexed [x, p]."""

    grid: PhaseGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.shape != self.grid.shape:
            raise GridMismatchError(f"values shape {v.shape} != grid shape {self.grid.shape}")
        if not np.all(np.isfinite(v)):
            raise DomainError("phase-space samples must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.values)


@dataclass(frozen=True)
class MixedState:
    """Probability-weighted list of wave functions on a shared grid."""

    components: Sequence[tuple[float, WaveFunction]] = field(default_factory=list)

    def __post_init__(self):
        comps = tuple((float(w), s) for w, s in self.components)
        if not comps:
            raise DomainError("mixed state needs at least one component")
        weights = np.array([w for w, _ in comps])
        if np.any(weights < 0):
            raise DomainError("weights must be nonnegative")
        if abs(weights.sum() - 1.0) > 1e-12:
            raise DomainError(f"weights must sum to 1, got {weights.sum()!r}")
        g0 = comps[0][1].grid
        for _, s in comps[1:]:
            if s.grid != g0:
                raise GridMismatchError("all components must share one grid")
        object.__setattr__(self, "components", comps)

    @property
    def grid(self) -> Grid1D:
        return self.components[0][1].grid


def integrate_1d(f: np.ndarray, grid: Grid1D) -> float | complex:
    """Integral of samples on the half-open grid [x_min, x_max).

    The uniform-weight sum dx * sum(f) is the trapezoid rule of the periodic
    continuation: exact for constants and for periodic integrands sampled over
    whole periods, O(dx^2) for C^2 integrands whose edge values match (states
    and fields here decay or vanish at the grid edges).
    """
    f = np.asarray(f)
    if f.shape != (grid.n_points,):
        raise GridMismatchError(f"sample length {f.shape} does not match grid")
    return grid.dx * f.sum()


def fourier_transform(psi: WaveFunction) -> WaveFunction:
    """Momentum representation psi~(p) = (2 pi hbar)^(-1/2) Int psi(x) e^(-ixp/hbar) dx.

    Implemented by FFT with explicit dx and boundary phases; Parseval holds on
    the dual grid to ~1e-15.  The returned WaveFunction lives on the dual grid.
    """
    g = psi.grid
    n, dx, hbar = g.n_points, g.dx, g.hbar
    dual = g.fourier_dual()
    j = np.arange(n)
    ft = np.fft.fft(psi.values * (-1.0) ** j)
    phase = np.exp(-1j * g.x_min * dual.points / hbar)
    vals = dx / np.sqrt(2 * np.pi * hbar) * phase * ft
    return WaveFunction(dual, vals, psi.mass)


def spectral_derivative(values: np.ndarray, grid: Grid1D, order: int = 1,
                        axis: int = 0) -> np.ndarray:
    """FFT derivative along `axis`; assumes the samples decay at the grid edges."""
    k = 2 * np.pi * np.fft.fftfreq(grid.n_points, grid.dx)
    shape = [1] * values.ndim
    shape[axis] = grid.n_points
    mult = (1j * k.reshape(shape)) ** order
    out = np.fft.ifft(mult * np.fft.fft(values, axis=axis), axis=axis)
    return out if np.iscomplexobj(values) else out.real


def field_integral(field: PhaseSpaceField) -> float | complex:
    """Integral over phase space (uniform weights on both axes).

    On the FFT-dual momentum grid the dp-weighted sum over p acts as an exact
    discrete delta in the transform variable, which makes the marginal,
    normalization and Moyal identities hold at machine precision for
    grid-sampled states.
    """
    v = field.values
    return field.grid.x_grid.dx * field.grid.p_grid.dx * v.sum()


def require_same_grid(a: PhaseSpaceField, b: PhaseSpaceField) -> None:
    if a.grid != b.grid:
        raise GridMismatchError("phase-space fields live on different grids")
