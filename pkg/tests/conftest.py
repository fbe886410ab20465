"""Shared pytest fixtures for crestline tests."""

from __future__ import annotations

from typing import TYPE_CHECKING

import pytest

from crestline import (
    GridConfig,
    StepPolicy,
    build_vorticity_model,
    conjugate_streams,
    dispersion_eigenvalue,
    start_branch,
)
from crestline._config import VorticityConfig
from crestline.heightfield import StripProblem, make_grid

if TYPE_CHECKING:
    from pathlib import Path

    from crestline import BifurcationSeed, BranchPoint, FlowRegime, VorticityModel

# Small enough for a Newton solve in well under a second.
SMALL_GRID = GridConfig(n_q=32, n_p=24, kind="uniform")

ZERO_R2_CONFIG = """\
# irrotational, r = 2
vorticity = zero
r = 2.0
nq = 32
np = 24
grid = uniform
a0 = 1e-3
"""


@pytest.fixture(scope="session")
def zero_model() -> VorticityModel:
    """Irrotational model."""
    return build_vorticity_model("zero")


@pytest.fixture(scope="session")
def unit_vorticity() -> VorticityModel:
    """Constant vorticity ω = 1."""
    return build_vorticity_model(VorticityConfig(kind="constant", b=1.0))


@pytest.fixture(scope="session")
def regime_r2(zero_model: VorticityModel) -> FlowRegime:
    """Irrotational regime at r = 2."""
    return conjugate_streams(zero_model, 2.0)


@pytest.fixture(scope="session")
def seed_r2(regime_r2: FlowRegime) -> BifurcationSeed:
    """Onset data of the irrotational regime at r = 2."""
    return dispersion_eigenvalue(regime_r2.subcritical)


@pytest.fixture(scope="session")
def small_problem(regime_r2: FlowRegime) -> StripProblem:
    """32×24 uniform strip problem at r = 2."""
    return StripProblem(regime_r2.model, regime_r2, make_grid(SMALL_GRID))


@pytest.fixture(scope="session")
def onset_r2(regime_r2: FlowRegime, seed_r2: BifurcationSeed) -> BranchPoint:
    """Converged onset wave on the small grid."""
    return start_branch(regime_r2, seed_r2, 1e-3, grid_config=SMALL_GRID, policy=StepPolicy())


@pytest.fixture
def zero_config_file(tmp_path: Path) -> Path:
    """Config file for the irrotational r = 2 case on the small grid."""
    path = tmp_path / "run.cfg"
    path.write_text(ZERO_R2_CONFIG, encoding="utf-8")
    return path
