"""Tests for run configuration parsing."""

from __future__ import annotations

from pathlib import Path

import pytest

from crestline import ConfigError, GateConfig, GridConfig, StepPolicy, load_config
from crestline._config import parse_config


class TestParseConfig:
    """key = value parsing into frozen dataclasses."""

    def test_minimal_defaults(self) -> None:
        config = parse_config("vorticity = zero\nr = 2.0\n")
        assert config.r == 2.0
        assert config.vorticity.kind == "zero"
        assert config.grid == GridConfig()
        assert config.grid.n_q == 64 and config.grid.n_p == 48
        assert config.a0 == 1e-3
        assert config.policy == StepPolicy()
        assert config.gate == GateConfig()
        assert config.cusp_points == 16

    def test_comments_and_overrides(self) -> None:
        text = """
        # constant vorticity
        vorticity = constant   # inline comment
        omega = 1.0
        r = 1.3
        nq = 32
        np = 24
        grid = Stretched
        slope_max = 3
        max_points = 50
        bernoulli_rtol = 1e-7
        """
        config = parse_config("\n".join(line.strip() for line in text.splitlines()))
        assert config.vorticity.b == 1.0
        assert config.grid == GridConfig(32, 24, "stretched")
        assert config.policy.slope_max == 3.0
        assert config.policy.max_points == 50
        assert config.gate.bernoulli_rtol == 1e-7

    def test_relative_paths_resolve_against_base(self, tmp_path: Path) -> None:
        config = parse_config(
            "vorticity = table\nomega_table = w.txt\nr = 2\nout_dir = out\n", base_dir=tmp_path
        )
        assert config.vorticity.table == tmp_path / "w.txt"
        assert config.out_dir == tmp_path / "out"

    def test_resolution_and_gate_keys(self) -> None:
        config = parse_config(
            "vorticity = zero\nr = 2\nmax_refinements = 0\nturn_max = 30\nangle_floor = 110\n"
            "spread_rtol = 1e-6\nspread_rtol_near = 1e-5\ncrosscheck_rtol = 1e-3\n"
        )
        assert config.policy.max_refinements == 0
        assert config.policy.turn_max == 30.0
        assert config.policy.angle_floor == 110.0
        assert config.gate.spread_rtol == 1e-6
        assert config.gate.spread_rtol_near == 1e-5
        assert config.gate.crosscheck_rtol == 1e-3

    def test_gap_threshold_default_scales_with_r(self) -> None:
        assert StepPolicy().gap_threshold(2.0) == pytest.approx(2e-3)
        assert StepPolicy(gap_min=1e-4).gap_threshold(2.0) == 1e-4


class TestConfigErrors:
    """Every failure names the offending key."""

    @pytest.mark.parametrize(
        "text,key",
        [
            ("r = 2\n", "vorticity"),
            ("vorticity = zero\n", "r"),
            ("vorticity = zero\nr = two\n", "r"),
            ("vorticity = zero\nr = 2\nwavelength = 3\n", "wavelength"),
            ("vorticity = zero\nr = 2\na0 = 0\n", "a0"),
            ("vorticity = zero\nr = 2\nnq = 15\n", "nq"),
            ("vorticity = zero\nr = 2\nnp = 8\n", "np"),
            ("vorticity = zero\nr = 2\ngrid = hex\n", "grid"),
            ("vorticity = zero\nr = 2\nholder_gamma = 1.5\n", "holder_gamma"),
            ("vorticity = zero\nr = 2\nds_min = -1\n", "ds_min"),
            ("vorticity = zero\nr = 2\nmax_refinements = -1\n", "max_refinements"),
            ("vorticity = zero\nr = 2\nturn_max = 0\n", "turn_max"),
            ("vorticity = zero\nr = 2\nangle_floor = -5\n", "angle_floor"),
            ("vorticity = zero\nr = inf\n", "r"),
        ],
    )
    def test_bad_key(self, text: str, key: str) -> None:
        with pytest.raises(ConfigError) as info:
            parse_config(text)
        assert info.value.key == key
        assert repr(key) in str(info.value)

    def test_missing_file(self, tmp_path: Path) -> None:
        with pytest.raises(ConfigError):
            load_config(tmp_path / "absent.cfg")

    def test_load_config(self, zero_config_file: Path) -> None:
        config = load_config(zero_config_file)
        assert config.grid.kind == "uniform"
        assert config.out_dir == Path("crestline-out")


class TestImmutability:
    """Configs are frozen."""

    def test_frozen(self) -> None:
        config = parse_config("vorticity = zero\nr = 2\n")
        with pytest.raises(AttributeError):
            config.r = 3.0  # type: ignore[misc]

    def test_with_out_dir(self, tmp_path: Path) -> None:
        config = parse_config("vorticity = zero\nr = 2\n")
        moved = config.with_out_dir(tmp_path)
        assert moved.out_dir == tmp_path
        assert moved.r == config.r
