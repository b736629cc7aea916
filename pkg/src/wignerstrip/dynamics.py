"""Phase-space dynamics: harmonic flow, profile extraction/inversion, Moyal RHS.

The harmonic solution is the closed-form pull-back

    F(x,p,t) = F0(x cos t - p sin t, x sin t + p cos t),

so boundary profiles at fixed positions are rotations of the initial field,
and an initial field can be rebuilt from a full period of one profile.  The
three data (F0, profile at 0, profile at L) are mutually redundant, which
`consistency_check` makes operational: supplying a conflicting pair is
refused.

The generic right-hand side of the transport equation is

    dF/dt = -(p/m) dF/dx + (1/(2 pi hbar^2)) Int K(x,p') F(x, p+p') dp',

with K the odd sine-transform kernel of the potential.  The prefactor
+1/(2 pi hbar^2) is fixed by the classical limit (quadratic potentials must
reproduce dV/dx * dF/dp exactly); see the decisions record for the
discrepancy with the source material's stated constant.  No general time
stepper is provided for the confined equation; `rk4_evolve` is a plain RK4
loop intended for V = 0 or quadratic V, where the bracket is exactly
classical, and is cross-validated against the closed-form flow.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, GridMismatchError, ReconstructionError
from scipy.interpolate import CubicSpline

from .grid import Grid1D, PhaseGrid, PhaseSpaceField, spectral_derivative
from .profiles import Profile
from .starcalc import (BoundaryPotentialSpec, boundary_potential_doubled_window,
                       doubled_window_grid, momentum_convolution, potential_kernel)


def _field_sampler(F: PhaseSpaceField):
    """Cubic-spline point sampler for a field; zero outside the grid.

    Bilinear sampling on the dual momentum grid cannot reach the stated
    pull-back accuracy (its error is quadratic in the coarse dp); the cubic
    spline is prefiltered once and reused across query batches.
    """
    from scipy import ndimage
    xg, pg = F.grid.x_grid, F.grid.p_grid
    filt = ndimage.spline_filter(F.values, order=3, mode="constant")

    def sample(xq: np.ndarray, pq: np.ndarray) -> np.ndarray:
        ci = (np.asarray(xq, dtype=float) - xg.x_min) / xg.dx
        cj = (np.asarray(pq, dtype=float) - pg.x_min) / pg.dx
        ci, cj = np.broadcast_arrays(ci, cj)
        out = ndimage.map_coordinates(filt, [ci, cj], order=3,
                                      mode="constant", cval=0.0, prefilter=False)
        return out

    return sample


def harmonic_flow(F0: PhaseSpaceField, t: float) -> PhaseSpaceField:
    """Closed-form harmonic evolution (m = omega = 1) by rotated pull-back."""
    x = F0.grid.x_grid.points[:, None]
    p = F0.grid.p_grid.points[None, :]
    ct, st = np.cos(t), np.sin(t)
    sample = _field_sampler(F0)
    return PhaseSpaceField(F0.grid, sample(x * ct - p * st, x * st + p * ct))


@dataclass(frozen=True)
class TimeProfile:
    """Profile samples g(p, t) at a fixed anchor over a time grid."""

    p_grid: Grid1D
    t_values: np.ndarray
    values: np.ndarray             # shape (n_t, n_p)
    anchor_x: float

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        t = np.asarray(self.t_values, dtype=float)
        if v.shape != (t.size, self.p_grid.n_points):
            raise GridMismatchError("time-profile shape must be (n_t, n_p)")
        v.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "t_values", t)


def profile_from_initial(F0: PhaseSpaceField, anchor: float,
                         t_values: np.ndarray) -> TimeProfile:
    """g_anchor(p,t) = F0(anchor cos t - p sin t, anchor sin t + p cos t)."""
    p = F0.grid.p_grid.points
    sample = _field_sampler(F0)
    rows = []
    for t in np.asarray(t_values, dtype=float):
        ct, st = np.cos(t), np.sin(t)
        rows.append(sample(anchor * ct - p * st, anchor * st + p * ct))
    return TimeProfile(F0.grid.p_grid, np.asarray(t_values, dtype=float),
                       np.asarray(rows), anchor)


def initial_from_profile(g0: TimeProfile, pg: PhaseGrid) -> PhaseSpaceField:
    """Rebuild F0 from a full period of the anchor-0 profile.

    F0(x,p) = g0(r, theta) with r = sqrt(x^2+p^2), theta = atan2(-x, p); the
    angle grid must cover [0, 2 pi) (ReconstructionError otherwise).  Sampling
    is periodic-linear in theta and cubic in r along the positive momentum
    branch of the profile.
    """
    if abs(g0.anchor_x) > 1e-12:
        raise DomainError("inversion is defined for the anchor at the origin")
    t = g0.t_values
    if t.size < 8 or t[0] > 1e-9 or (2 * np.pi - t[-1]) > 2.5 * (t[1] - t[0]):
        raise ReconstructionError("time samples must cover a full period [0, 2 pi)")
    dt = t[1] - t[0]
    if np.max(np.abs(np.diff(t) - dt)) > 1e-9 * dt:
        raise ReconstructionError("time samples must be uniform")

    p_axis = g0.p_grid.points
    pos = p_axis >= 0
    r_axis = p_axis[pos]
    G = g0.values[:, pos]                      # (n_t, n_r)

    splines = [CubicSpline(r_axis, G[j], extrapolate=False) for j in range(t.size)]

    x = pg.x_grid.points[:, None]
    p = pg.p_grid.points[None, :]
    r = np.hypot(x, p)
    theta = np.mod(np.arctan2(-x, np.broadcast_to(p, r.shape)), 2 * np.pi)
    j0 = np.floor(theta / dt).astype(int)
    w = theta / dt - j0
    j0 = np.mod(j0, t.size)
    j1 = np.mod(j0 + 1, t.size)

    r_flat = r.ravel()
    sample = np.zeros((t.size, r_flat.size))
    inside = r_flat <= r_axis[-1]
    for j in range(t.size):
        s = splines[j](np.clip(r_flat, r_axis[0], r_axis[-1]))
        sample[j] = np.where(inside, np.nan_to_num(s), 0.0)
    flat_j0 = j0.ravel()
    flat_j1 = j1.ravel()
    flat_w = w.ravel()
    vals = (1 - flat_w) * sample[flat_j0, np.arange(r_flat.size)] \
        + flat_w * sample[flat_j1, np.arange(r_flat.size)]
    return PhaseSpaceField(pg, vals.reshape(pg.shape))


def moyal_rhs(F: PhaseSpaceField, V: np.ndarray | None,
              specs: tuple[BoundaryPotentialSpec, ...] = (),
              mass: float = 1.0, edge_tol: float = 1e-8) -> PhaseSpaceField:
    """Transport right-hand side with the potential entering via its kernel.

    V must be sampled on `doubled_window_grid(F.grid)` (the exterior potential
    contributes to the bulk kernel); pass None for V = 0.  Smoothed wall terms
    from `specs` are added to the potential samples.  Confined states have
    slow momentum tails; widen edge_tol deliberately when evaluating them.
    """
    hbar = F.grid.hbar
    p = F.grid.p_grid.points[None, :]
    dFdx = spectral_derivative(F.values, F.grid.x_grid, order=1, axis=0)
    rhs = -(p / mass) * dFdx
    dw = doubled_window_grid(F.grid)
    Veff = np.zeros(dw.n_points) if V is None else np.asarray(V, dtype=float)
    if Veff.shape != (dw.n_points,):
        from .errors import NonlocalityError
        raise NonlocalityError(
            f"potential must be sampled on the doubled window [{dw.x_min}, {dw.x_max}) "
            f"with {dw.n_points} points")
    if specs:
        Veff = Veff + boundary_potential_doubled_window(specs, F.grid)
    if np.any(Veff):
        kernel = potential_kernel(Veff, F.grid)
        conv = momentum_convolution(kernel, F, edge_tol=edge_tol)
        rhs = rhs + conv.values / (2 * np.pi * hbar**2)
    return PhaseSpaceField(F.grid, rhs)


def rk4_evolve(F0: PhaseSpaceField, V: np.ndarray | None, t_final: float,
               n_steps: int, specs: tuple[BoundaryPotentialSpec, ...] = (),
               mass: float = 1.0, edge_tol: float = 1e-8) -> PhaseSpaceField:
    """Plain RK4 on the transport RHS; intended for V = 0 / quadratic V."""
    if n_steps < 1:
        raise DomainError("need at least one step")
    dt = t_final / n_steps
    F = F0
    for _ in range(n_steps):
        k1 = moyal_rhs(F, V, specs, mass, edge_tol).values
        k2 = moyal_rhs(PhaseSpaceField(F.grid, F.values + 0.5 * dt * k1),
                       V, specs, mass, edge_tol).values
        k3 = moyal_rhs(PhaseSpaceField(F.grid, F.values + 0.5 * dt * k2),
                       V, specs, mass, edge_tol).values
        k4 = moyal_rhs(PhaseSpaceField(F.grid, F.values + dt * k3),
                       V, specs, mass, edge_tol).values
        F = PhaseSpaceField(F.grid, F.values + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4))
    return F


@dataclass(frozen=True)
class ConsistencyReport:
    consistent: bool
    mismatch_g0: float
    mismatch_gL: float
    tolerance: float

    def as_dict(self) -> dict:
        return {"consistent": self.consistent, "mismatch_g0": self.mismatch_g0,
                "mismatch_gL": self.mismatch_gL, "tolerance": self.tolerance}


def consistency_check(F0: PhaseSpaceField, g0: TimeProfile | None = None,
                      gL: TimeProfile | None = None,
                      tolerance: float = 1e-3) -> ConsistencyReport:
    """Verify that supplied boundary profiles agree with the initial field.

    In the harmonic problem F0 determines both profiles, so an independently
    supplied (F0, g) pair is over-determined; conflicts beyond `tolerance`
    are flagged (the command-line driver refuses such input).
    """
    m0 = mL = 0.0
    if g0 is not None:
        ref = profile_from_initial(F0, g0.anchor_x, g0.t_values)
        m0 = float(np.max(np.abs(ref.values - g0.values)))
    if gL is not None:
        ref = profile_from_initial(F0, gL.anchor_x, gL.t_values)
        mL = float(np.max(np.abs(ref.values - gL.values)))
    return ConsistencyReport(consistent=bool(max(m0, mL) <= tolerance),
                             mismatch_g0=m0, mismatch_gL=mL, tolerance=tolerance)
