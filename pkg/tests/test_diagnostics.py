"""Tests for wave reconstruction and certification."""

from __future__ import annotations

import numpy as np
import pytest

from crestline import GateConfig, StagnationError, certify, certify_many, conjugate_streams
from crestline._config import DEFAULT_MANDATORY_CHECKS
from crestline.diagnostics import (
    bernoulli_crosscheck_residual,
    bernoulli_residual,
    check_bounds,
    check_flow_force,
    fit_crest_angle,
    flow_force_gradient_defect,
    flowforce_spread,
    g_surface_max,
    g_trough_max,
    reconstruct,
)
from crestline.dispersion import kernel_mode
from crestline.heightfield import (
    HeightField,
    StripGrid,
    StripProblem,
    discrete_onset,
    make_grid,
    newton_solve,
)
from crestline.streamflow import stream_flow_force

from .conftest import SMALL_GRID


def _stream_field(model, r: float) -> HeightField:
    regime = conjugate_streams(model, r)
    problem = StripProblem(model, regime, make_grid(SMALL_GRID))
    return HeightField.stream(problem, 2.0)


class TestReconstruct:
    """Physical variables of the stream and of a small wave."""

    def test_stream_velocity_is_exact(self, regime_r2, small_problem) -> None:
        wf = reconstruct(HeightField.stream(small_problem, 2.0))
        assert np.allclose(wf.psi_y, regime_r2.s_minus, rtol=1e-10)
        assert np.allclose(wf.psi_x, 0.0)
        assert bernoulli_residual(wf) < 1e-10

    def test_surface_velocity_comes_from_heights(self, unit_vorticity) -> None:
        """Surface ψ_y is 1/h_p of the stored heights, with no Bernoulli correction."""
        field = _stream_field(unit_vorticity, 1.3)
        wf = reconstruct(field)
        grid = field.problem.grid
        assert field.problem.shift_top != 0.0
        assert np.array_equal(wf.psi_y[:, -1], 1.0 / grid.top_derivative(field.h))
        assert np.array_equal(wf.surface_speed2, wf.psi_y[:, -1] ** 2 + wf.psi_x[:, -1] ** 2)

    def test_crosscheck_is_exact_for_linear_stream(self, small_problem) -> None:
        wf = reconstruct(HeightField.stream(small_problem, 2.0))
        assert bernoulli_crosscheck_residual(wf) < 1e-10

    def test_stream_flow_force(self, zero_model, regime_r2, small_problem) -> None:
        wf = reconstruct(HeightField.stream(small_problem, 2.0))
        expected = stream_flow_force(zero_model, regime_r2.s_minus, 2.0)
        assert wf.flow_force == pytest.approx(expected, rel=1e-3)
        assert flowforce_spread(wf) < 1e-12

    def test_g_vanishes_on_crest_line(self, onset_r2) -> None:
        wf = reconstruct(onset_r2.field)
        assert np.all(wf.G[0] == 0.0)

    def test_g_is_odd_about_the_crest(self, onset_r2) -> None:
        wf = reconstruct(onset_r2.field)
        n_q = onset_r2.field.n_q
        for j in range(1, n_q // 2):
            assert wf.G[n_q - j, -1] == -wf.G[j, -1]
        assert g_trough_max(wf) == np.max(np.abs(wf.G[n_q // 2]))

    def test_gradient_identities_hold_for_stream(self, small_problem) -> None:
        """Irrotational stream: H is linear in p, so every difference is exact."""
        wf = reconstruct(HeightField.stream(small_problem, 2.0))
        assert flow_force_gradient_defect(wf) < 1e-9

    def test_stagnation_cell(self, small_problem) -> None:
        h = np.tile(small_problem.base, (small_problem.grid.n_q, 1))
        h[5, -1] = h[5, -2]
        with pytest.raises(StagnationError):
            reconstruct(HeightField(small_problem, h, 2.0))


class TestCertify:
    """The diagnostics gate."""

    def test_onset_passes(self, onset_r2) -> None:
        diagnostics = certify(onset_r2.field)
        assert diagnostics.passed, diagnostics.failures()
        assert diagnostics.bernoulli_residual < 1e-8
        assert diagnostics.flow_force > 0.5 * 2.0**2

    def test_perturbed_surface_fails_bernoulli(self, onset_r2) -> None:
        h = np.array(onset_r2.field.h)
        h[:, -1] += 1e-4 * np.cos(2 * onset_r2.field.problem.grid.q)
        diagnostics = certify(HeightField(onset_r2.field.problem, h, onset_r2.field.lam))
        assert not diagnostics.passed
        assert "bernoulli" in diagnostics.failures()
        assert diagnostics.record("bernoulli").margin < 0.0

    def test_perturbed_level_below_surface_fails_both_bernoulli_checks(self, onset_r2) -> None:
        h = np.array(onset_r2.field.h)
        h[:, -2] += 1e-4 * np.cos(2 * onset_r2.field.problem.grid.q)
        diagnostics = certify(HeightField(onset_r2.field.problem, h, onset_r2.field.lam))
        assert {"bernoulli", "bernoulli_crosscheck"} <= set(diagnostics.failures())

    def test_onset_crosscheck_is_a_discretisation_error(self, onset_r2) -> None:
        wf = reconstruct(onset_r2.field)
        independent = bernoulli_crosscheck_residual(wf)
        assert independent < GateConfig().crosscheck_rtol * 2.0
        assert independent != bernoulli_residual(wf)
        assert certify(onset_r2.field).record("bernoulli_crosscheck").passed

    def test_spread_is_mandatory(self, onset_r2) -> None:
        assert "flow_force_spread" in DEFAULT_MANDATORY_CHECKS
        assert "flank_monotone" in DEFAULT_MANDATORY_CHECKS
        strict = GateConfig(spread_rtol=0.0, spread_rtol_near=0.0)
        diagnostics = certify(onset_r2.field, gate=strict)
        assert not diagnostics.passed
        assert "flow_force_spread" in diagnostics.failures()

    def test_mandatory_list_decides(self, onset_r2) -> None:
        h = np.array(onset_r2.field.h)
        h[:, -1] += 1e-4 * np.cos(2 * onset_r2.field.problem.grid.q)
        perturbed = HeightField(onset_r2.field.problem, h, onset_r2.field.lam)
        lenient = GateConfig(mandatory=("slope_half",))
        assert certify(perturbed, gate=lenient).passed

    def test_irrotational_records(self, onset_r2) -> None:
        names = [rec.name for rec in certify(onset_r2.field).bounds]
        assert names[:3] == ["bernoulli", "bernoulli_crosscheck", "flow_force_spread"]
        for name in ("speed_head_lower", "bottom_speed_irrotational", "slope_half",
                     "flow_force_floor", "surface_speed_floor"):
            assert name in names
        assert certify(onset_r2.field).record("speed_head_lower").constant == pytest.approx(
            (2.0 * 8.0) ** -3
        )

    def test_rotational_records(self, unit_vorticity) -> None:
        diagnostics = certify(_stream_field(unit_vorticity, 1.3))
        names = [rec.name for rec in diagnostics.bounds]
        assert "surface_speed_floor" in names
        assert "slope_half" not in names
        assert "bottom_speed_irrotational" not in names
        # A flat stream has its crest exactly at d_+, so the strict check fails.
        assert "crest_above_conjugate_depth" in diagnostics.failures()

    def test_to_dict_keys(self, onset_r2) -> None:
        data = certify(onset_r2.field).to_dict()
        assert data["passed"] is True
        assert {"name", "anchor", "margin", "pass", "constant"} == set(data["bounds"][0])

    def test_certify_many_keeps_order(self, onset_r2, small_problem) -> None:
        fields = [onset_r2.field, HeightField.stream(small_problem, 2.0), onset_r2.field]
        results = certify_many(fields, max_workers=3)
        assert [d.passed for d in results] == [True, False, True]
        assert results[0].bernoulli_residual == certify(onset_r2.field).bernoulli_residual


class TestCrestAngle:
    """Corner fit."""

    def test_120_degree_corner(self) -> None:
        xs = np.linspace(-1.0, 1.0, 401)
        assert fit_crest_angle(xs, 1.0 - np.abs(xs) / np.sqrt(3.0), 2.0) == pytest.approx(120.0)

    def test_smooth_crest_is_nearly_flat(self) -> None:
        xs = np.linspace(0.0, 2.0 * np.pi, 512, endpoint=False)
        angle = fit_crest_angle(xs, 1e-3 * np.cos(xs), 2.0 * np.pi)
        assert angle is not None and angle > 179.0

    def test_too_few_samples(self) -> None:
        xs = np.linspace(0.0, 1.0, 16, endpoint=False)
        assert fit_crest_angle(xs, np.cos(2 * np.pi * xs), 1.0) is None


class TestBounds:
    """Individual bound records."""

    def test_onset_flank_is_monotone(self, onset_r2) -> None:
        records = {rec.name: rec for rec in check_bounds(reconstruct(onset_r2.field))}
        assert records["flank_monotone"].passed
        assert records["flank_coupling"].constant > 0.0

    def test_trough_on_crest_line_breaks_monotone_flank(self, onset_r2) -> None:
        field = onset_r2.field
        shifted = np.roll(np.asarray(field.h), field.n_q // 2, axis=0)
        wf = reconstruct(HeightField(field.problem, shifted, field.lam))
        flank = next(rec for rec in check_bounds(wf) if rec.name == "flank_monotone")
        assert not flank.passed
        assert flank.margin < 0.0


class TestFlowForceSpread:
    """The flow-force invariance record and its gap-dependent limit."""

    def test_onset_spread_within_limit(self, onset_r2) -> None:
        record = check_flow_force(reconstruct(onset_r2.field))
        assert record.passed
        assert record.constant == GateConfig().spread_rtol
        assert record.margin == pytest.approx(1e-5 - certify(onset_r2.field).flowforce_spread)

    def test_limit_relaxes_near_stagnation(self, onset_r2) -> None:
        wf = reconstruct(onset_r2.field)
        far = GateConfig(spread_rtol=0.0, spread_rtol_near=1.0, near_gap=1e-6)
        near = GateConfig(spread_rtol=0.0, spread_rtol_near=1.0, near_gap=1.0)
        assert not check_flow_force(wf, far).passed
        relaxed = check_flow_force(wf, near)
        assert relaxed.passed
        assert relaxed.constant == 1.0


@pytest.mark.slow
class TestFirstIntegrals:
    """F and G identities on stored waves under grid doubling."""

    AMPLITUDES = (0.005, 0.01, 0.015)

    @staticmethod
    def _wave(regime, seed, n_q: int, n_p: int, a: float) -> HeightField:
        problem = StripProblem(regime.model, regime, StripGrid(n_q, n_p))
        onset = discrete_onset(problem, seed)
        start = HeightField(
            problem, problem.base + 0.5 * a * kernel_mode(onset, problem.grid.q), onset.lambda0
        )
        return newton_solve(start, a)

    @pytest.mark.parametrize("a", AMPLITUDES)
    def test_g_vanishes_on_the_surface(self, regime_r2, seed_r2, a: float) -> None:
        wave = self._wave(regime_r2, seed_r2, 64, 48, a)
        wf = reconstruct(wave)
        assert g_surface_max(wf) < 1e-5
        assert certify(wave).passed

    @pytest.mark.parametrize("a", AMPLITUDES)
    def test_gradient_defect_is_second_order(self, regime_r2, seed_r2, a: float) -> None:
        coarse = flow_force_gradient_defect(reconstruct(self._wave(regime_r2, seed_r2, 32, 24, a)))
        fine = flow_force_gradient_defect(reconstruct(self._wave(regime_r2, seed_r2, 64, 48, a)))
        assert coarse / fine > 3.0
