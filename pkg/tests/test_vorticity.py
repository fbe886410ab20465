"""Tests for the vorticity models."""

from __future__ import annotations

import math

import numpy as np
import pytest

from crestline import ConfigError, OmegaClass, build_vorticity_model
from crestline._config import VorticityConfig
from crestline.streamflow import model_from_description
from crestline.vorticity.constant import ConstantVorticity
from crestline.vorticity.linear import LinearVorticity
from crestline.vorticity.tabulated import TabulatedVorticity
from crestline.vorticity.zero import ZeroVorticity


class TestClosedForms:
    """ω and Ω for the analytic kinds."""

    def test_zero(self) -> None:
        model = ZeroVorticity()
        p = np.linspace(0, 1, 5)
        assert np.all(model.omega(p) == 0.0)
        assert np.all(model.Omega(p) == 0.0)
        assert model.omega_class is OmegaClass.ZERO
        assert model.peak() == (0.0, 0.0)

    def test_constant_positive(self) -> None:
        model = ConstantVorticity(b=1.0)
        assert float(model.Omega(0.3)) == pytest.approx(0.3)
        assert model.omega_class is OmegaClass.NONNEGATIVE
        assert model.peak() == (2.0, 1.0)

    def test_constant_negative_peaks_at_bottom(self) -> None:
        model = ConstantVorticity(b=-1.0)
        assert model.omega_class is OmegaClass.GENERAL
        assert model.peak() == (0.0, 0.0)
        assert model.minimum() == -1.0

    def test_linear_interior_peak(self) -> None:
        """ω = 1 − 2p: Ω = p − p² peaks at p = 1/2."""
        model = LinearVorticity(a=-2.0, b=1.0)
        peak, where = model.peak()
        assert peak == pytest.approx(0.5)
        assert where == pytest.approx(0.5)
        assert model.minimum() == pytest.approx(-1.0)
        assert model.omega_class is OmegaClass.GENERAL

    def test_linear_nonnegative(self) -> None:
        model = LinearVorticity(a=2.0)
        assert model.omega_class is OmegaClass.NONNEGATIVE
        assert float(model.Omega(0.5)) == pytest.approx(0.25)

    def test_generic_peak_matches_closed_form(self) -> None:
        """The base-class scan agrees with the linear closed form."""
        model = LinearVorticity(a=-2.0, b=1.0)
        from crestline.vorticity._base import VorticityModel

        peak, where = VorticityModel.peak(model)
        assert peak == pytest.approx(0.5, abs=1e-12)
        assert where == pytest.approx(0.5, abs=1e-6)


class TestTabulated:
    """Cubic-spline vorticity from samples."""

    def test_constant_samples_are_exact(self) -> None:
        p = np.linspace(0, 1, 9)
        model = TabulatedVorticity(tuple(p), tuple(np.full(9, 0.5)))
        x = np.linspace(0, 1, 17)
        assert np.allclose(model.omega(x), 0.5)
        assert np.allclose(model.Omega(x), 0.5 * x)
        assert model.omega_class is OmegaClass.NONNEGATIVE

    @pytest.mark.parametrize(
        "p,w",
        [
            ((0.0, 0.5, 1.0), (1.0, 1.0, 1.0)),
            ((0.0, 0.6, 0.3, 1.0), (0.0, 0.0, 0.0, 0.0)),
            ((0.1, 0.4, 0.7, 1.0), (0.0, 0.0, 0.0, 0.0)),
            ((0.0, 0.3, 0.6, 1.0), (0.0, math.nan, 0.0, 0.0)),
        ],
    )
    def test_rejects_bad_samples(self, p: tuple[float, ...], w: tuple[float, ...]) -> None:
        with pytest.raises(ConfigError, match="omega_table"):
            TabulatedVorticity(p, w)

    def test_reads_table_file(self, tmp_path) -> None:
        table = tmp_path / "omega.txt"
        table.write_text("# p omega\n0 0\n0.25 0\n0.5 0\n0.75 0\n1 0\n", encoding="utf-8")
        model = build_vorticity_model(VorticityConfig(kind="table", table=table))
        assert isinstance(model, TabulatedVorticity)
        assert model.omega_class is OmegaClass.ZERO

    def test_missing_table(self, tmp_path) -> None:
        config = VorticityConfig(kind="tabulated", table=tmp_path / "nope.txt")
        with pytest.raises(ConfigError):
            build_vorticity_model(config)


class TestDescribe:
    """describe() feeds model_from_description."""

    @pytest.mark.parametrize(
        "model",
        [
            ZeroVorticity(),
            ConstantVorticity(b=0.5),
            LinearVorticity(a=-1.0, b=0.25),
            TabulatedVorticity((0.0, 0.3, 0.7, 1.0), (1.0, 1.0, 1.0, 1.0)),
        ],
    )
    def test_rebuild_is_equal(self, model) -> None:
        assert model_from_description(model.describe()) == model

    def test_bad_description(self) -> None:
        from crestline import ParseError

        with pytest.raises(ParseError):
            model_from_description({"b": 1.0})
