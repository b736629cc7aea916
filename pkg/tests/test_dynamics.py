import numpy as np
import pytest

from wignerstrip import (BoundaryPotentialSpec, DomainError, Grid1D, PhaseGrid,
                         PhaseSpaceField, ReconstructionError, box_eigenstate,
                         consistency_check, field_integral, harmonic_flow,
                         hermite_state, initial_from_profile, moyal_overlap,
                         moyal_rhs, profile_from_initial, rk4_evolve,
                         wigner_transform)
from wignerstrip.dynamics import TimeProfile
from wignerstrip.grid import spectral_derivative
from wignerstrip.starcalc import doubled_window_grid
from wignerstrip.states import gaussian_state

HBAR = 1.0


@pytest.fixture(scope="module")
def fgrid():
    return Grid1D(-8.0, 8.0, 512, HBAR)


@pytest.fixture(scope="module")
def fpg(fgrid):
    return PhaseGrid.from_position_grid(fgrid)


@pytest.fixture(scope="module")
def square_pg(fgrid):
    # explicit momentum grid as fine as the x-grid: the flow and the
    # profile inversion interpolate in both directions, and the dual grid's
    # coarse dp would dominate their error
    return PhaseGrid(fgrid, Grid1D(-8.0, 8.0, 512, HBAR))


@pytest.fixture(scope="module")
def gauss_field(square_pg):
    from wignerstrip import harmonic_wigner
    return harmonic_wigner(0, square_pg)


@pytest.fixture(scope="module")
def coherent_field(square_pg):
    x = square_pg.x_grid.points[:, None]
    p = square_pg.p_grid.points[None, :]
    vals = np.exp(-((x - 1.0) ** 2 + p**2) / HBAR) / (np.pi * HBAR)
    return PhaseSpaceField(square_pg, vals + np.zeros(square_pg.shape))


class TestHarmonicFlow:
    @pytest.mark.parametrize("t", (np.pi / 7, 1.0))
    def test_rotation_invariant_gaussian(self, gauss_field, t):
        moved = harmonic_flow(gauss_field, t)
        assert np.max(np.abs(moved.values - gauss_field.values)) < 1e-6

    def test_full_period(self, coherent_field):
        back = harmonic_flow(coherent_field, 2 * np.pi)
        assert np.max(np.abs(back.values - coherent_field.values)) < 1e-4

    @pytest.mark.parametrize("t", (0.5, 1.5, 3.0))
    def test_coherent_center_follows_classical_orbit(self, square_pg,
                                                     coherent_field, t):
        # classical-trajectory oracle: (x0,p0)=(1,0) evolves to
        # (cos t, -sin t) under dx/dt = p, dp/dt = -x
        moved = harmonic_flow(coherent_field, t)
        x = square_pg.x_grid.points[:, None]
        p = square_pg.p_grid.points[None, :]
        mass = np.real(field_integral(moved))
        mean_x = field_integral(PhaseSpaceField(square_pg, moved.values * x)) / mass
        mean_p = field_integral(PhaseSpaceField(square_pg, moved.values * p)) / mass
        assert mean_x == pytest.approx(np.cos(t), abs=1e-3)
        assert mean_p == pytest.approx(-np.sin(t), abs=1e-3)

    def test_conservation_over_period(self, coherent_field):
        hbar = HBAR
        for t in np.linspace(0, 2 * np.pi, 9):
            Ft = harmonic_flow(coherent_field, t)
            assert np.real(field_integral(Ft)) == pytest.approx(1.0, abs=1e-3)
            assert np.real(moyal_overlap(Ft, Ft)) == pytest.approx(
                1 / (2 * np.pi * hbar), abs=1e-3)


class TestProfileExtraction:
    def test_gaussian_profile_time_independent(self, gauss_field, square_pg):
        t = np.linspace(0, 2 * np.pi, 16, endpoint=False)
        g0 = profile_from_initial(gauss_field, 0.0, t)
        expected = np.exp(-square_pg.p_grid.points**2 / HBAR) / (np.pi * HBAR)
        assert np.max(np.abs(g0.values - expected[None, :])) < 1e-4

    def test_time_zero_is_slice(self, coherent_field, fgrid):
        # slice at a node is reproduced by the spline exactly up to filtering
        g0 = profile_from_initial(coherent_field, 0.0, np.array([0.0]))
        i0 = fgrid.index_of(0.0)
        assert np.max(np.abs(g0.values[0] - coherent_field.values[i0, :])) < 1e-12

    def test_flow_then_slice_consistency(self, coherent_field, fgrid):
        # two-path oracle: the same interpolant is sampled either way
        t = 0.8
        g0 = profile_from_initial(coherent_field, 0.0, np.array([t]))
        sliced = harmonic_flow(coherent_field, t).values[fgrid.index_of(0.0), :]
        assert np.max(np.abs(g0.values[0] - sliced)) < 1e-12

    def test_anchor_L_formula(self, coherent_field, fgrid, fpg):
        tv = 0.6
        gL = profile_from_initial(coherent_field, 1.5, np.array([tv]))
        sliced = harmonic_flow(coherent_field, tv).values[fgrid.index_of(1.5), :]
        assert np.max(np.abs(gL.values[0] - sliced)) < 1e-12


class TestInitialFromProfile:
    def test_roundtrip_coherent(self, coherent_field, square_pg):
        t = np.linspace(0, 2 * np.pi, 256, endpoint=False)
        g0 = profile_from_initial(coherent_field, 0.0, t)
        rec = initial_from_profile(g0, square_pg)
        assert np.max(np.abs(rec.values - coherent_field.values)) < 2e-3

    def test_constant_profile_radial_field(self, square_pg):
        t = np.linspace(0, 2 * np.pi, 64, endpoint=False)
        p = square_pg.p_grid.points
        rows = np.tile(np.exp(-p**2) / np.pi, (t.size, 1))
        rec = initial_from_profile(TimeProfile(square_pg.p_grid, t, rows, 0.0),
                                   square_pg)
        x = square_pg.x_grid.points[:, None]
        expected = np.exp(-(x**2 + p[None, :] ** 2)) / np.pi
        assert np.max(np.abs(rec.values - expected)) < 1e-4

    def test_excited_state_normalization(self, square_pg):
        from wignerstrip import harmonic_wigner
        F = harmonic_wigner(1, square_pg)
        t = np.linspace(0, 2 * np.pi, 256, endpoint=False)
        g0 = profile_from_initial(F, 0.0, t)
        rec = initial_from_profile(g0, square_pg)
        assert np.real(field_integral(rec)) == pytest.approx(1.0, abs=1e-3)

    def test_insufficient_coverage(self, coherent_field, square_pg):
        t = np.linspace(0, np.pi, 64, endpoint=False)   # half a period
        g0 = profile_from_initial(coherent_field, 0.0, t)
        with pytest.raises(ReconstructionError):
            initial_from_profile(g0, square_pg)


class TestMoyalRhs:
    def test_stationary_state_quadratic_potential(self, fgrid, fpg):
        F = wigner_transform(hermite_state(0, fgrid), fpg)
        dw = doubled_window_grid(fpg)
        rhs = moyal_rhs(F, dw.points**2 / 2)
        assert np.max(np.abs(rhs.values)) < 1e-4

    def test_free_streaming(self, fgrid, fpg):
        F = wigner_transform(gaussian_state(fgrid, center=1.0), fpg)
        rhs = moyal_rhs(F, None)
        dF = spectral_derivative(F.values, fpg.x_grid, order=1, axis=0)
        expected = -fpg.p_grid.points[None, :] * dF
        assert np.max(np.abs(rhs.values - expected)) < 1e-12

    def test_probability_conservation(self, fgrid, fpg):
        F = wigner_transform(gaussian_state(fgrid, center=1.0), fpg)
        dw = doubled_window_grid(fpg)
        rhs = moyal_rhs(F, np.cos(dw.points))
        assert abs(field_integral(rhs)) < 1e-6

    def test_confined_stationarity_refines(self):
        L = 2.0
        sups = []
        for n, eps in ((1024, 0.05), (2048, 0.025)):
            g = Grid1D(-2.0, 4.0, n, HBAR)
            pgn = PhaseGrid.from_position_grid(g)
            W = wigner_transform(box_eigenstate(1, L, g).psi, pgn)
            specs = (BoundaryPotentialSpec(0.0, L, eps, HBAR**2 / 2, "left"),
                     BoundaryPotentialSpec(0.0, L, eps, HBAR**2 / 2, "right"))
            rhs = moyal_rhs(W, None, specs, edge_tol=1e-2)
            x = g.points
            inner = (x >= 0.05) & (x <= L - 0.05)
            pwin = np.abs(pgn.p_grid.points) <= 5.0
            sups.append(np.max(np.abs(rhs.values[np.ix_(inner, pwin)])))
        assert sups[1] < sups[0]

    def test_edge_tolerance_guard(self, fpg):
        vals = np.ones(fpg.shape)          # not negligible at the p edge
        F = PhaseSpaceField(fpg, vals / field_integral(PhaseSpaceField(fpg, vals)))
        dw = doubled_window_grid(fpg)
        with pytest.raises(DomainError):
            moyal_rhs(F, dw.points**2)


class TestRk4AndConsistency:
    def test_rk4_matches_closed_form_flow(self):
        # the truncated-window kernel leaves oscillatory residue at the outer
        # momentum rows, so the stage fields need a loose edge tolerance and
        # the comparison is made on the physical window
        g = Grid1D(-8.0, 8.0, 128, HBAR)
        pgc = PhaseGrid.from_position_grid(g)
        F0 = wigner_transform(gaussian_state(g, center=1.0), pgc)
        dw = doubled_window_grid(pgc)
        t = 0.4
        evolved = rk4_evolve(F0, dw.points**2 / 2, t, n_steps=80, edge_tol=1.0)
        exact = harmonic_flow(F0, t)
        pwin = np.abs(pgc.p_grid.points) <= 8.0
        assert np.max(np.abs(evolved.values - exact.values)[:, pwin]) < 1e-3

    def test_consistent_profile_accepted(self, coherent_field):
        t = np.linspace(0, 2 * np.pi, 64, endpoint=False)
        g0 = profile_from_initial(coherent_field, 0.0, t)
        rep = consistency_check(coherent_field, g0=g0)
        assert rep.consistent
        assert rep.mismatch_g0 < 1e-12

    def test_overdetermined_conflict_refused(self, coherent_field, gauss_field):
        # profile drawn from a different state conflicts with F0
        t = np.linspace(0, 2 * np.pi, 64, endpoint=False)
        g0_wrong = profile_from_initial(gauss_field, 0.0, t)
        rep = consistency_check(coherent_field, g0=g0_wrong, tolerance=1e-3)
        assert not rep.consistent

    def test_triple_consistency(self, coherent_field):
        t = np.linspace(0, 2 * np.pi, 64, endpoint=False)
        g0 = profile_from_initial(coherent_field, 0.0, t)
        gL = profile_from_initial(coherent_field, 1.5, t)
        rep = consistency_check(coherent_field, g0=g0, gL=gL)
        assert rep.consistent

    def test_reconstruction_wigner_property_checks(self, square_pg):
        # a profile that is admissible at one point can still fail to rebuild
        # a Wigner function; normalization, bound and the coherent-state
        # positivity probe operationalize the check
        from wignerstrip import coherent_positivity_probe, wigner_property_checks
        t = np.linspace(0, 2 * np.pi, 64, endpoint=False)
        p = square_pg.p_grid.points
        narrow = np.tile(np.exp(-p**2 / (0.2 * HBAR)) / (np.pi * HBAR), (t.size, 1))
        rec = initial_from_profile(TimeProfile(square_pg.p_grid, t, narrow, 0.0),
                                   square_pg)
        checks = wigner_property_checks(rec)
        assert abs(checks["normalization"] - 1.0) > 1e-2      # flagged
        good = profile_from_initial(
            PhaseSpaceField(square_pg,
                            np.exp(-(square_pg.x_grid.points[:, None] ** 2
                                     + p[None, :] ** 2)) / np.pi), 0.0, t)
        rec_good = initial_from_profile(good, square_pg)
        ok = wigner_property_checks(rec_good)
        assert abs(ok["normalization"] - 1.0) < 1e-3
        assert ok["sup_abs"] <= ok["uniform_bound"] + 1e-6
        assert coherent_positivity_probe(rec_good, n_side=5, span=2.0) > -1e-6
