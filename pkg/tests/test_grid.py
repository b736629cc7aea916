import numpy as np
import pytest

from wignerstrip import (DomainError, Grid1D, GridMismatchError, PhaseGrid,
                         WaveFunction, fourier_transform, integrate_1d)
from wignerstrip.states import gaussian_state


class TestGrid1D:
    def test_rejects_non_power_of_two(self):
        with pytest.raises(DomainError):
            Grid1D(0.0, 1.0, 500)

    def test_rejects_tiny_grid(self):
        with pytest.raises(DomainError):
            Grid1D(0.0, 1.0, 4)

    def test_spacing_and_points(self):
        g = Grid1D(-1.0, 1.0, 16)
        assert g.dx == pytest.approx(0.125)
        assert g.points[0] == -1.0
        assert len(g.points) == 16


class TestPhaseGrid:
    def test_fft_dual_relation(self):
        pg = PhaseGrid.from_position_grid(Grid1D(-8.0, 8.0, 512))
        p = pg.p_grid
        # FFT-dual grid: p_min + p_max = -dp
        assert p.x_min + (p.x_max - p.dx) == pytest.approx(-p.dx)
        assert pg.is_fft_dual()

    def test_explicit_symmetric_grid_accepted(self):
        xg = Grid1D(-2.0, 2.0, 64)
        sym = Grid1D(-5.0, 5.0, 64)
        assert not PhaseGrid(xg, sym).is_fft_dual()

    def test_rejects_lopsided_p_grid(self):
        xg = Grid1D(-2.0, 2.0, 64)
        with pytest.raises(GridMismatchError):
            PhaseGrid(xg, Grid1D(-1.0, 5.0, 64))

    def test_rejects_mixed_hbar(self):
        with pytest.raises(GridMismatchError):
            PhaseGrid(Grid1D(-2, 2, 64, hbar=1.0), Grid1D(-2, 2, 64, hbar=0.5))


class TestIntegrate1D:
    def test_zero_function(self):
        g = Grid1D(-1.0, 1.0, 64)
        assert integrate_1d(np.zeros(64), g) == 0.0

    def test_constant(self):
        g = Grid1D(0.0, 2.0, 256)
        assert integrate_1d(np.ones(256), g) == pytest.approx(2.0, abs=1e-12)

    def test_sin_squared(self):
        # oracle: antiderivative x/2 - sin(2 pi x)/(4 pi) gives exactly 1/2 on [0,1]
        g = Grid1D(0.0, 1.0, 512)
        f = np.sin(np.pi * g.points) ** 2
        assert integrate_1d(f, g) == pytest.approx(0.5, abs=1e-6)

    def test_length_mismatch(self):
        g = Grid1D(0.0, 1.0, 64)
        with pytest.raises(GridMismatchError):
            integrate_1d(np.ones(65), g)

    def test_linearity(self):
        g = Grid1D(-1.0, 1.0, 128)
        f1 = np.cos(g.points)
        f2 = g.points**2
        lhs = integrate_1d(2.0 * f1 - 3.0 * f2, g)
        assert lhs == pytest.approx(2 * integrate_1d(f1, g) - 3 * integrate_1d(f2, g),
                                    abs=1e-13)

    def test_monotone(self):
        g = Grid1D(-1.0, 1.0, 128)
        f = np.exp(-g.points**2)
        assert integrate_1d(f, g) <= integrate_1d(f + 0.1, g)

    def test_refinement_convergence(self):
        # doubling n changes a smooth integral by < 1e-8
        vals = []
        for n in (512, 1024):
            g = Grid1D(-6.0, 6.0, n)
            vals.append(integrate_1d(np.exp(-g.points**2), g))
        assert abs(vals[1] - vals[0]) < 1e-8


class TestFourierTransform:
    def test_self_dual_gaussian(self, grid):
        psi = gaussian_state(grid)
        out = fourier_transform(psi)
        expected = np.exp(-out.grid.points**2 / 2) / np.pi**0.25
        assert np.max(np.abs(out.values - expected)) < 1e-8

    def test_shifted_gaussian_phase(self, grid):
        # oracle: closed-form transform of a displaced Gaussian
        x0 = 1.5
        psi = gaussian_state(grid, center=x0)
        out = fourier_transform(psi)
        p = out.grid.points
        expected = np.exp(-p**2 / 2) / np.pi**0.25 * np.exp(-1j * x0 * p)
        assert np.max(np.abs(out.values - expected)) < 1e-8
        assert np.max(np.abs(np.abs(out.values) - np.exp(-p**2 / 2) / np.pi**0.25)) < 1e-8

    def test_box_state_parseval(self, grid):
        from wignerstrip import box_eigenstate
        psi = box_eigenstate(1, 2.0, grid).psi
        out = fourier_transform(psi)
        assert out.norm == pytest.approx(1.0, abs=1e-8)

    @pytest.mark.parametrize("make", [
        lambda g: gaussian_state(g),
        lambda g: gaussian_state(g, center=2.0, momentum=3.0),
        lambda g: WaveFunction(g, (g.points + 1j) * np.exp(-g.points**2)),
    ])
    def test_parseval_invariant(self, grid, make):
        psi = make(grid)
        assert abs(fourier_transform(psi).norm - psi.norm) < 1e-10
