"""Tests for the discrete height-function system."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from crestline import (
    GridConfig,
    GridKind,
    ParseError,
    StagnationError,
    build_vorticity_model,
    conjugate_streams,
    dispersion_eigenvalue,
    start_branch,
)
from crestline.dispersion import kernel_mode
from crestline.heightfield import (
    HeightField,
    StripGrid,
    StripProblem,
    amplitude_row,
    discrete_onset,
    jacobian,
    newton_solve,
    read_field,
    regrid,
    residual,
    write_field,
)


def _perturbed(problem, seed, amplitude: float = 0.02) -> HeightField:
    grid = problem.grid
    mode = kernel_mode(seed, grid.q, grid.p)
    wobble = 0.3 * amplitude * np.outer(np.cos(2 * grid.q), grid.p**2)
    return HeightField(problem, problem.base + 0.5 * amplitude * mode + wobble, seed.lambda0 * 1.01)


class TestGrid:
    """Strip grids."""

    def test_uniform_levels(self) -> None:
        grid = StripGrid(8, 4)
        assert np.allclose(grid.p, [0, 0.25, 0.5, 0.75, 1.0])
        assert grid.half == 5
        assert grid.n_unknowns == 21

    def test_stretched_levels_cluster_at_surface(self) -> None:
        grid = StripGrid(8, 16, "stretched")
        assert grid.p[0] == 0.0 and grid.p[-1] == 1.0
        assert np.all(np.diff(grid.p) > 0)
        assert grid.dp[-1] < grid.dp[0]

    def test_boundary_weights_differentiate_quartics(self) -> None:
        """Five-point one-sided weights are exact for p⁴ on any spacing."""
        grid = StripGrid(8, 12, "stretched")
        f = grid.p**4
        assert grid.top_weights().size == 5
        assert float(grid.top_derivative(f)) == pytest.approx(4.0, rel=1e-10)
        assert float(grid.bottom_derivative(f)) == pytest.approx(0.0, abs=1e-10)
        assert np.allclose(grid.node_derivative(f), 4.0 * grid.p**3, atol=1e-10)

    def test_central_weights_differentiate_quadratics(self) -> None:
        grid = StripGrid(8, 12, "stretched")
        f = grid.p**2
        ca, cb, cc = grid.central_weights()
        assert np.allclose(ca * f[:-2] + cb * f[1:-1] + cc * f[2:], 2.0 * grid.p[1:-1])

    def test_derivatives_act_on_the_last_axis(self) -> None:
        grid = StripGrid(8, 12)
        h = np.outer(np.arange(1.0, 4.0), grid.p**2)
        assert np.allclose(grid.top_derivative(h), [2.0, 4.0, 6.0])

    def test_refined_doubles_both_directions(self) -> None:
        grid = StripGrid(32, 24, "stretched").refined()
        assert (grid.n_q, grid.n_p, grid.kind) == (64, 48, GridKind.STRETCHED)

    def test_too_few_levels(self) -> None:
        with pytest.raises(ValueError, match="n_p"):
            StripGrid(8, 3)


class TestResidual:
    """The residual of the stream and of trial fields."""

    def test_stream_is_a_solution(self, small_problem, seed_r2) -> None:
        field = HeightField.stream(small_problem, seed_r2.lambda0)
        assert residual(field).norm() < 1e-10

    def test_pin_enters_constraint(self, small_problem, seed_r2) -> None:
        field = _perturbed(small_problem, seed_r2)
        res = residual(field, pin=0.0)
        assert res.constraint == pytest.approx(field.amplitude)
        assert res.stacked().size == small_problem.grid.n_unknowns

    def test_stagnation_names_a_cell(self, small_problem, seed_r2) -> None:
        h = np.array(small_problem.base)
        h = np.tile(h, (small_problem.grid.n_q, 1))
        h[3, 10] = h[3, 9] - 0.01
        with pytest.raises(StagnationError, match="at cell") as info:
            residual(HeightField(small_problem, h, seed_r2.lambda0))
        assert info.value.cell is not None
        assert info.value.cell[0] == 3


class TestJacobian:
    """Analytic Jacobian against central differences."""

    def test_matches_finite_differences(self, small_problem, seed_r2) -> None:
        field = _perturbed(small_problem, seed_r2)
        pin = 0.5 * field.amplitude
        u = field.unknowns()
        analytic = jacobian(field).toarray()
        numeric = np.empty_like(analytic)
        eps = 1e-6
        for k in range(u.size):
            up, down = u.copy(), u.copy()
            up[k] += eps
            down[k] -= eps
            plus = residual(HeightField.from_unknowns(small_problem, up), pin).stacked()
            minus = residual(HeightField.from_unknowns(small_problem, down), pin).stacked()
            numeric[:, k] = (plus - minus) / (2 * eps)
        scale = np.max(np.abs(analytic))
        assert np.max(np.abs(analytic - numeric)) < 1e-5 * scale

    def test_closure_row_is_last(self, small_problem, seed_r2) -> None:
        field = _perturbed(small_problem, seed_r2)
        row = np.zeros(small_problem.grid.n_unknowns)
        row[-1] = 1.0
        matrix = jacobian(field, closure_row=row).toarray()
        assert np.array_equal(matrix[-1], row)
        assert np.array_equal(jacobian(field).toarray()[-1], amplitude_row(small_problem.grid))


class TestUnknowns:
    """Half-period unknowns and the even mirror."""

    def test_round_trip_and_mirror(self, small_problem, seed_r2) -> None:
        field = _perturbed(small_problem, seed_r2)
        rebuilt = HeightField.from_unknowns(small_problem, field.unknowns())
        assert np.array_equal(rebuilt.h, field.h)
        assert rebuilt.lam == field.lam
        n_q = small_problem.grid.n_q
        assert np.array_equal(rebuilt.h[1], rebuilt.h[n_q - 1])

    def test_arrays_read_only(self, small_problem, seed_r2) -> None:
        field = HeightField.stream(small_problem, seed_r2.lambda0)
        with pytest.raises(ValueError):
            field.h[0, 1] = 0.0


class TestNewton:
    """Pinned Newton near onset."""

    def test_onset_wavenumber(self, onset_r2, seed_r2) -> None:
        """The a = 1e-3 wave sits on the grid's own dispersion root."""
        onset = discrete_onset(onset_r2.field.problem, seed_r2)
        lam = onset_r2.field.lam
        assert abs(lam - onset.lambda0) / onset.lambda0 < 1e-4
        assert abs(lam - seed_r2.lambda0) / seed_r2.lambda0 < 1e-2
        assert onset_r2.field.residual_norm < 1e-10
        assert onset_r2.field.amplitude == pytest.approx(1e-3, rel=1e-8)

    @pytest.mark.slow
    @pytest.mark.parametrize("kind", ["uniform", "auto"])
    def test_onset_wavenumber_on_default_grid(self, kind: str) -> None:
        """ω = 0, r = 1.8 on 64×48: λ within 1e−3 of the dispersion root."""
        regime = conjugate_streams(build_vorticity_model("zero"), 1.8)
        seed = dispersion_eigenvalue(regime.subcritical)
        point = start_branch(regime, seed, 1e-3, grid_config=GridConfig(64, 48, kind))
        assert abs(point.field.lam - seed.lambda0) / seed.lambda0 < 1e-3
        assert point.field.iterations <= 8
        assert point.diagnostics.bernoulli_residual < 1e-8
        assert point.diagnostics.passed

    def test_wavenumber_grows_quadratically(self, small_problem, seed_r2) -> None:
        """λ(a) − λ(0) ∝ a² near onset, so successive differences scale by 5/3."""
        grid = small_problem.grid
        mode = kernel_mode(seed_r2, grid.q, grid.p)
        lams = []
        for a in (0.005, 0.01, 0.015):
            start = HeightField(small_problem, small_problem.base + 0.5 * a * mode, seed_r2.lambda0)
            lams.append(newton_solve(start, a).lam)
        ratio = (lams[2] - lams[1]) / (lams[1] - lams[0])
        assert 1.45 < ratio < 1.9


class TestDiscreteOnset:
    """Dispersion relation of the discrete system."""

    def test_mode_is_normalised(self, small_problem, seed_r2) -> None:
        onset = discrete_onset(small_problem, seed_r2)
        assert onset.phi0[0] == 0.0
        assert onset.phi0[-1] == pytest.approx(1.0)
        assert np.all(np.diff(onset.phi0) > 0.0)
        assert np.array_equal(onset.p_grid, small_problem.grid.p)

    def test_mode_spans_the_jacobian_kernel(self, small_problem, seed_r2) -> None:
        """‖J·φ_h cos q‖ < 1e−6 at (H, λ_h); the continuous φ₀ does not reach that."""
        grid = small_problem.grid
        m = grid.half
        onset = discrete_onset(small_problem, seed_r2)
        matrix = jacobian(HeightField.stream(small_problem, onset.lambda0)).toarray()[:-1, :-1]

        def kernel_defect(mode: np.ndarray) -> float:
            u = mode[:m, 1:].ravel()
            return float(np.max(np.abs(matrix @ u)) / np.max(np.abs(u)))

        assert kernel_defect(kernel_mode(onset, grid.q)) < 1e-6
        assert kernel_defect(kernel_mode(seed_r2, grid.q, grid.p)) > 1e-6

    def test_converges_to_the_continuous_root(self, regime_r2, seed_r2) -> None:
        """Second order overall: halving both spacings cuts the error about fourfold."""
        errors = []
        for n_q, n_p in ((32, 24), (64, 48)):
            problem = StripProblem(regime_r2.model, regime_r2, StripGrid(n_q, n_p))
            lam = discrete_onset(problem, seed_r2).lambda0
            errors.append(abs(lam - seed_r2.lambda0) / seed_r2.lambda0)
        assert errors[0] < 1e-2
        assert 3.5 < errors[0] / errors[1] < 6.0

    def test_mode_converges_to_the_eigenfunction(self, regime_r2, seed_r2) -> None:
        errors = []
        for n_q, n_p in ((32, 24), (64, 48)):
            problem = StripProblem(regime_r2.model, regime_r2, StripGrid(n_q, n_p))
            onset = discrete_onset(problem, seed_r2)
            errors.append(float(np.max(np.abs(onset.phi0 - seed_r2.phi(onset.p_grid)))))
        assert errors[0] < 1e-2
        assert errors[0] / errors[1] > 2.5

    def test_starts_the_branch(self, onset_r2, seed_r2) -> None:
        """The onset predictor already solves the system to first order in a."""
        problem = onset_r2.field.problem
        onset = discrete_onset(problem, seed_r2)
        predictor = problem.base + 0.5e-3 * kernel_mode(onset, problem.grid.q)
        gap = np.max(np.abs(predictor - onset_r2.field.h))
        assert gap < 1e-5


class TestRegrid:
    """Interpolation between grids."""

    def test_stream_survives_regrid(self, small_problem, seed_r2) -> None:
        field = HeightField.stream(small_problem, seed_r2.lambda0)
        moved = regrid(field, StripGrid(48, 24))
        assert moved.h.shape == (48, 25)
        assert np.allclose(moved.h[:, -1], field.h[0, -1])
        assert moved.lam == field.lam

    def test_onset_wave_shape_kept(self, onset_r2) -> None:
        moved = regrid(onset_r2.field, StripGrid(64, 24))
        assert moved.amplitude == pytest.approx(onset_r2.field.amplitude, rel=1e-2)
        assert np.all(moved.h[:, 0] == 0.0)


class TestFieldFiles:
    """CSV + sidecar dumps."""

    def test_exact_reload(self, onset_r2, tmp_path: Path) -> None:
        csv_path, sidecar = write_field(onset_r2.field, tmp_path / "wave.csv")
        assert sidecar == tmp_path / "wave.json"
        loaded = read_field(csv_path)
        assert np.array_equal(loaded.h, onset_r2.field.h)
        assert loaded.lam == onset_r2.field.lam
        assert loaded.r == 2.0
        assert loaded.problem.grid == onset_r2.field.problem.grid

    def test_truncated_csv(self, onset_r2, tmp_path: Path) -> None:
        csv_path, _ = write_field(onset_r2.field, tmp_path / "wave.csv")
        lines = csv_path.read_text(encoding="utf-8").splitlines()
        csv_path.write_text("\n".join(lines[:-5]) + "\n", encoding="utf-8")
        with pytest.raises(ParseError, match="expected"):
            read_field(csv_path)

    def test_missing_sidecar(self, onset_r2, tmp_path: Path) -> None:
        csv_path, sidecar = write_field(onset_r2.field, tmp_path / "wave.csv")
        sidecar.unlink()
        with pytest.raises(ParseError):
            read_field(csv_path)
