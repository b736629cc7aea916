import numpy as np
import pytest

from wignerstrip import (DomainError, PhaseSpaceField, WaveFunction, assemble_bulk,
                         box_eigenstate, field_integral, marginals,
                         positivity_witness, project_strip, wigner_transform)
from wignerstrip.wigner import position_shift

HBAR = 1.0
L = 2.0


def translated_box(n, grid, offset):
    """Box eigenstate translated to [offset, offset+L] by exact re-indexing."""
    psi = box_eigenstate(n, L, grid).psi
    return position_shift(psi, int(round(offset / grid.dx)))


def truncated_gaussian(grid, lo, hi, center, width=0.4):
    x = grid.points
    vals = np.where((x > lo) & (x < hi),
                    np.exp(-(x - center) ** 2 / (2 * width**2)), 0.0)
    psi = WaveFunction(grid, vals.astype(complex))
    return psi.normalized()


class TestProjectStrip:
    def test_idempotent(self, grid, pg):
        F = wigner_transform(truncated_gaussian(grid, -8, 8, 0.0), pg)
        once = project_strip(F, (0.0, L))
        twice = project_strip(once, (0.0, L))
        assert np.array_equal(once.values, twice.values)

    def test_supported_field_unchanged(self, grid, pg):
        F = wigner_transform(box_eigenstate(1, L, grid).psi, pg)
        assert np.array_equal(project_strip(F, (0.0, L)).values, F.values)

    def test_projected_box_normalization(self, grid, pg):
        F = wigner_transform(box_eigenstate(1, L, grid).psi, pg)
        assert np.real(field_integral(project_strip(F, (0.0, L)))) == pytest.approx(
            1.0, abs=1e-6)

    def test_l2_contraction(self, grid, pg):
        F = wigner_transform(truncated_gaussian(grid, -8, 8, 0.5, 1.0), pg)
        proj = project_strip(F, (0.0, L))
        assert np.sum(proj.values**2) <= np.sum(F.values**2)


class TestAssembleBulk:
    def test_confined_limit(self, grid, pg):
        phi = box_eigenstate(1, L, grid).psi
        chi = WaveFunction(grid, np.zeros(grid.n_points, dtype=complex))
        bulk = assemble_bulk(phi, chi, pg, (0.0, L))
        W = wigner_transform(phi, pg)
        assert np.max(np.abs(bulk.values - W.values)) < 1e-14

    def test_bilinearity_decomposition(self, grid, pg):
        # oracle: transform of the sum; with disjoint supports the projected
        # total Wigner function equals the assembled bulk field
        phi = box_eigenstate(1, L, grid).psi
        chi = translated_box(1, grid, L)
        bulk = assemble_bulk(phi, chi, pg, (0.0, L))
        total = wigner_transform(
            WaveFunction(grid, phi.values + chi.values), pg)
        projected = project_strip(total, (0.0, L))
        assert np.max(np.abs(bulk.values - projected.values)) < 1e-8

    def test_position_marginal_is_bulk_density(self, grid, pg):
        phi = box_eigenstate(1, L, grid).psi
        chi = translated_box(2, grid, L)
        bulk = assemble_bulk(phi, chi, pg, (0.0, L))
        pos, _ = marginals(bulk)
        x = grid.points
        inside = (x > 0) & (x < L)
        assert np.max(np.abs(pos[inside] - np.abs(phi.values[inside]) ** 2)) < 1e-6

    def test_overlapping_supports_rejected(self, grid, pg):
        phi = box_eigenstate(1, L, grid).psi
        with pytest.raises(DomainError):
            assemble_bulk(phi, phi, pg, (0.0, L))


class TestPositivityWitness:
    def test_default_pair_negative(self, grid, pg):
        phi = box_eigenstate(1, L, grid).psi
        chi = translated_box(1, grid, L)
        wit = positivity_witness(phi, chi, pg, L)
        assert wit.overlap < 0

    def test_closed_form_agreement(self, grid, pg):
        # oracle: independent 2-D trapezoid quadrature of the closed form,
        # with the triangular upper limit handled by interpolated cumulative sums
        phi = box_eigenstate(1, L, grid).psi
        chi = translated_box(1, grid, L)
        wit = positivity_witness(phi, chi, pg, L)
        x = grid.points
        dens_phi = np.abs(phi.values) ** 2
        dens_chi = np.abs(chi.values) ** 2
        dx = grid.dx
        cum = np.concatenate(([0.0], np.cumsum((dens_chi[1:] + dens_chi[:-1]) / 2 * dx)))
        iL = grid.index_of(L)
        in_I = np.nonzero((x >= 0) & (x <= L))[0]
        inner_vals = np.interp(2 * L - x[in_I], x, cum) - cum[iL]
        denom = np.trapezoid(dens_phi[in_I] * inner_vals, dx=dx)
        closed = 1 / (2 * np.pi * HBAR) - wit.N_used / (np.pi * HBAR) * denom
        assert wit.overlap == pytest.approx(closed, abs=1e-4)
        assert wit.overlap_closed_form == pytest.approx(closed, abs=1e-4)

    def test_confined_case_positive(self, grid, pg):
        phi = box_eigenstate(1, L, grid).psi
        chi = WaveFunction(grid, np.zeros(grid.n_points, dtype=complex))
        wit = positivity_witness(phi, chi, pg, L)
        assert wit.overlap == pytest.approx(1 / (2 * np.pi * HBAR), abs=1e-8)
        assert wit.N_used == 0.0

    @pytest.mark.parametrize("make_pair", [
        lambda g: (box_eigenstate(1, L, g).psi, translated_box(1, g, L)),
        lambda g: (box_eigenstate(2, L, g).psi, translated_box(1, g, L)),
        lambda g: (truncated_gaussian(g, 0, L, 1.0), translated_box(1, g, L)),
        lambda g: (box_eigenstate(1, L, g).psi, truncated_gaussian(g, L, 2 * L, 3.0)),
    ])
    def test_many_pairs_negative(self, grid, pg, make_pair):
        phi, chi = make_pair(grid)
        wit = positivity_witness(phi, chi, pg, L)
        assert wit.overlap < 0
        assert wit.overlap == pytest.approx(wit.overlap_closed_form, abs=1e-4)

    def test_witness_report_serializes(self, grid, pg):
        phi = box_eigenstate(1, L, grid).psi
        chi = translated_box(1, grid, L)
        d = positivity_witness(phi, chi, pg, L).as_dict()
        assert set(d) == {"N_bound", "N_used", "overlap", "overlap_closed_form",
                          "tolerance"}
