import numpy as np
import pytest

from wignerstrip import (DomainError, Grid1D, GridMismatchError, MixedState,
                         PhaseGrid, PhaseSpaceField, box_eigenstate, cross_wigner,
                         field_integral, fourier_transform, harmonic_wigner,
                         hermite_state, marginals, mixed_wigner, moyal_overlap,
                         support_and_bound_report, wigner_transform)
from wignerstrip.io import load_field_binary, save_field_binary, save_field_csv
from wignerstrip.states import gaussian_state
from wignerstrip.wigner import position_shift

HBAR = 1.0
L = 2.0

# tolerance ladder: exact identities 1e-10, quadrature-limited 1e-6,
# interpolation-limited 1e-4


class TestWignerTransform:
    def test_harmonic_ground_state_closed_form(self, grid, pg):
        W = wigner_transform(hermite_state(0, grid), pg)
        expected = harmonic_wigner(0, pg)
        assert np.max(np.abs(W.values - expected.values)) < 1e-6

    def test_normalization(self, pg, state_library):
        for name, psi in state_library.items():
            W = wigner_transform(psi, pg)
            assert np.real(field_integral(W)) == pytest.approx(1.0, abs=1e-6), name

    def test_against_direct_quadrature(self, grid, pg):
        # brute-force Riemann sum of the y-integral, no FFT
        psi = box_eigenstate(2, L, grid).psi
        W = wigner_transform(psi, pg)
        n = grid.n_points
        y = (np.arange(n) - n // 2) * grid.dx
        pad = np.zeros(3 * n, dtype=complex)
        pad[n:2 * n] = psi.values
        rng = np.random.default_rng(7)
        for _ in range(20):
            i = int(rng.integers(n // 4, 3 * n // 4))
            k = int(rng.integers(0, n))
            pk = pg.p_grid.points[k]
            vals = pad[i + np.arange(n) - n // 2 + n] * np.conj(pad[i - (np.arange(n) - n // 2) + n])
            direct = grid.dx / (np.pi * HBAR) * np.sum(vals * np.exp(-2j * pk * y / HBAR))
            assert abs(W.values[i, k] - direct.real) < 1e-6

    def test_reality_residue(self, grid, pg):
        # the transform asserts and strips a < 1e-10 imaginary residue
        from wignerstrip.wigner import _cross_values
        psi = gaussian_state(grid, center=1.0, momentum=2.0)
        raw = _cross_values(psi, psi, pg)
        assert np.max(np.abs(raw.imag)) < 1e-10

    def test_grid_mismatch(self, grid, pg):
        other = Grid1D(-4.0, 4.0, 512)
        with pytest.raises(GridMismatchError):
            wigner_transform(gaussian_state(other), pg)


class TestCrossWigner:
    def test_diagonal_equals_transform(self, grid, pg):
        psi = gaussian_state(grid, center=0.5)
        W = wigner_transform(psi, pg)
        C = cross_wigner(psi, psi, pg)
        assert np.max(np.abs(C.values - W.values)) < 1e-10

    def test_orthogonal_pair_integrates_to_zero(self, grid, pg):
        # oracle: overlap integral <psi1|psi0> = 0 for harmonic neighbors
        C = cross_wigner(hermite_state(0, grid), hermite_state(1, grid), pg)
        assert abs(field_integral(C)) < 1e-8

    def test_hermiticity(self, grid, pg):
        a = gaussian_state(grid, center=1.0, momentum=-1.0)
        b = gaussian_state(grid, center=-0.5, momentum=2.0)
        ab = cross_wigner(a, b, pg)
        ba = cross_wigner(b, a, pg)
        assert np.max(np.abs(np.conj(ab.values) - ba.values)) < 1e-10


class TestMixedWigner:
    def test_single_component(self, grid, pg):
        psi = gaussian_state(grid)
        rho = MixedState([(1.0, psi)])
        assert np.max(np.abs(mixed_wigner(rho, pg).values
                             - wigner_transform(psi, pg).values)) < 1e-14

    def test_half_half_mixture_origin(self, grid, pg):
        # closed forms at the origin: (1/pi) and (-1/pi) average to zero
        rho = MixedState([(0.5, hermite_state(0, grid)), (0.5, hermite_state(1, grid))])
        W = mixed_wigner(rho, pg)
        i0 = grid.index_of(0.0)
        k0 = pg.p_grid.index_of(0.0)
        assert abs(W.values[i0, k0]) < 1e-6

    def test_marginals_are_linear(self, grid, pg):
        s0, s1 = hermite_state(0, grid), hermite_state(1, grid)
        rho = MixedState([(0.3, s0), (0.7, s1)])
        pos_mix, mom_mix = marginals(mixed_wigner(rho, pg))
        p0, m0 = marginals(wigner_transform(s0, pg))
        p1, m1 = marginals(wigner_transform(s1, pg))
        assert np.max(np.abs(pos_mix - 0.3 * p0 - 0.7 * p1)) < 1e-8
        assert np.max(np.abs(mom_mix - 0.3 * m0 - 0.7 * m1)) < 1e-8

    def test_empty_mixture_rejected(self):
        with pytest.raises(DomainError):
            MixedState([])


class TestMarginals:
    def test_harmonic_ground_state(self, grid, pg):
        # oracle: Gaussian integrals, (pi hbar)^(-1/2) e^{-x^2/hbar}
        W = wigner_transform(hermite_state(0, grid), pg)
        pos, mom = marginals(W)
        expected_x = np.exp(-grid.points**2) / np.sqrt(np.pi)
        expected_p = np.exp(-pg.p_grid.points**2) / np.sqrt(np.pi)
        assert np.max(np.abs(pos - expected_x)) < 1e-6
        assert np.max(np.abs(mom - expected_p)) < 1e-6

    def test_box_position_marginal(self, grid, pg):
        psi = box_eigenstate(1, L, grid).psi
        pos, _ = marginals(wigner_transform(psi, pg))
        x = grid.points
        expected = np.where((x >= 0) & (x <= L), 2 / L * np.sin(np.pi * x / L) ** 2, 0.0)
        assert np.max(np.abs(pos - expected)) < 1e-4

    def test_momentum_marginal_matches_fourier(self, grid, pg, state_library):
        # the Wigner p-grid is twice as fine as the Fourier dual grid; compare
        # on the common points p_k = q_j, i.e. k = 2j - n/2 for the overlap range
        n = grid.n_points
        for name, psi in state_library.items():
            _, mom = marginals(wigner_transform(psi, pg))
            tilde = fourier_transform(psi)
            j = np.arange(n // 4, 3 * n // 4)
            k = 2 * j - n // 2
            assert np.max(np.abs(mom[k] - np.abs(tilde.values[j]) ** 2)) < 1e-6, name

    def test_nonnegative_for_states(self, pg, state_library):
        for name, psi in state_library.items():
            pos, mom = marginals(wigner_transform(psi, pg))
            assert pos.min() > -1e-8, name
            assert mom.min() > -1e-8, name

    def test_zero_field(self, pg):
        pos, mom = marginals(PhaseSpaceField(pg, np.zeros(pg.shape)))
        assert not pos.any() and not mom.any()


class TestMoyalOverlap:
    def test_self_overlap(self, grid, pg):
        W = wigner_transform(hermite_state(0, grid), pg)
        assert moyal_overlap(W, W) == pytest.approx(1 / (2 * np.pi * HBAR), abs=1e-6)

    def test_orthogonal_states(self, grid, pg):
        W0 = wigner_transform(hermite_state(0, grid), pg)
        W1 = wigner_transform(hermite_state(1, grid), pg)
        assert abs(moyal_overlap(W0, W1)) < 1e-8

    def test_zero_field(self, grid, pg):
        W0 = wigner_transform(hermite_state(0, grid), pg)
        assert moyal_overlap(W0, PhaseSpaceField(pg, np.zeros(pg.shape))) == 0.0

    def test_grid_mismatch(self, grid, pg, fine_grid, fine_pg):
        W = wigner_transform(hermite_state(0, grid), pg)
        V = wigner_transform(hermite_state(0, fine_grid), fine_pg)
        with pytest.raises(GridMismatchError):
            moyal_overlap(W, V)


class TestSupportAndBound:
    def test_box_support(self, grid, pg):
        W = wigner_transform(box_eigenstate(1, L, grid).psi, pg)
        rep = support_and_bound_report(W, (0.0, L))
        assert rep.outside_strip_max < 1e-8

    def test_uniform_bound(self, pg, state_library):
        for name, psi in state_library.items():
            rep = support_and_bound_report(wigner_transform(psi, pg), (0.0, L))
            assert rep.bound_excess <= 1e-6, name

    def test_constant_field_diagnostic_only(self, pg):
        c = 1 / (2 * np.pi * HBAR)
        rep = support_and_bound_report(PhaseSpaceField(pg, np.full(pg.shape, c)), (0.0, L))
        assert rep.bound_excess < 0            # below the uniform bound
        assert rep.normalization != pytest.approx(1.0, abs=0.1)

    def test_support_property_both_directions(self, grid, pg):
        # psi supported in [0,L] => W supported in the strip; the converse via
        # the position marginal
        psi = box_eigenstate(2, L, grid).psi
        W = wigner_transform(psi, pg)
        assert support_and_bound_report(W, (0.0, L)).outside_strip_max < 1e-8
        pos, _ = marginals(W)
        outside = (grid.points < 0) | (grid.points > L)
        assert np.max(np.abs(pos[outside])) < 1e-8

    def test_translation_covariance(self, grid, pg):
        psi = gaussian_state(grid)
        shifted = position_shift(psi, 64)          # 64 cells = 1.0 in x
        W0 = wigner_transform(psi, pg)
        W1 = wigner_transform(shifted, pg)
        assert np.max(np.abs(W1.values[64:, :] - W0.values[:-64, :])) < 1e-6


class TestCoherentProbe:
    def test_genuine_wigner_function_passes(self, grid, pg):
        from wignerstrip import coherent_positivity_probe
        W = wigner_transform(hermite_state(1, grid), pg)
        assert coherent_positivity_probe(W, n_side=5, span=2.5) > -1e-6

    def test_non_wigner_field_flagged(self, grid, pg):
        from wignerstrip import coherent_positivity_probe
        W0 = wigner_transform(hermite_state(0, grid), pg)
        W1 = wigner_transform(hermite_state(1, grid), pg)
        bad = PhaseSpaceField(pg, W0.values - 0.5 * W1.values)
        assert coherent_positivity_probe(bad, n_side=5, span=2.5) < -1e-4


class TestSerialization:
    def test_binary_roundtrip(self, grid, pg, tmp_path):
        W = wigner_transform(gaussian_state(grid), pg)
        path = tmp_path / "field.bin"
        save_field_binary(W, path)
        back = load_field_binary(path)
        assert back.grid == W.grid
        assert np.array_equal(back.values, W.values)

    def test_csv_header_and_rows(self, tmp_path):
        g = Grid1D(-1.0, 1.0, 8)
        pg_small = PhaseGrid.from_position_grid(g)
        W = PhaseSpaceField(pg_small, np.arange(64, dtype=float).reshape(8, 8))
        path = tmp_path / "field.csv"
        save_field_csv(W, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "x,p,value"
        assert len(lines) == 65
