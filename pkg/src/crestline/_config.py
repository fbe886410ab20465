"""Frozen configuration dataclasses for crestline.

All configuration objects are immutable (frozen) for thread-safety.

Design Philosophy:
    Configuration uses frozen dataclasses to ensure:

    1. **Thread-Safety**: a RunConfig can be handed to parallel r-sweeps as-is
    2. **Predictability**: thresholds cannot drift during a continuation run
    3. **Reproducibility**: identical files give identical objects, and identical
       objects give byte-identical outputs

Configuration Types:
    VorticityConfig: Which vorticity function, and its parameters
    GridConfig: Strip resolution and vertical node distribution
    StepPolicy: Continuation step control and halt thresholds
    GateConfig: Tolerances of the diagnostics gate
    RunConfig: Everything a CLI run needs

File Format:
    Plain ``key = value`` lines, ``#`` starts a comment::

        vorticity = constant
        omega = 0.5
        r = 1.58
        nq = 64
        np = 48   # vertical intervals

See Also:
    crestline.cli: Loads a RunConfig per invocation
    crestline.continuation: Consumes StepPolicy and GateConfig
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np

from crestline._errors import ConfigError

if TYPE_CHECKING:
    from collections.abc import Callable, Mapping

__all__ = [
    "VorticityConfig",
    "GridConfig",
    "StepPolicy",
    "GateConfig",
    "RunConfig",
    "DEFAULT_MANDATORY_CHECKS",
    "load_config",
    "parse_config",
]

MIN_NQ = 16
MIN_NP = 12

# Checks a wave must pass to be accepted on a branch. Records not listed are
# reported but never block acceptance.
DEFAULT_MANDATORY_CHECKS: tuple[str, ...] = (
    "bernoulli",
    "flow_force_spread",
    "crest_above_conjugate_depth",
    "speed_head_upper",
    "bottom_speed_irrotational",
    "bottom_speed_conjugate",
    "surface_speed_floor",
    "slope_half",
    "flank_monotone",
)


@dataclass(frozen=True, slots=True)
class VorticityConfig:
    """Description of a vorticity function before it is built.

    Attributes:
        kind: Registry name or alias ('zero', 'constant', 'linear', 'tabulated').
        b: Constant value (constant) or intercept (linear).
        a: Slope in p (linear only).
        table: Sample file with two columns p, omega (tabulated only).
        samples: In-memory samples (p, omega); takes precedence over `table`.
        holder_gamma: Declared Hölder exponent of omega', in (0, 1).
    """

    kind: str = "zero"
    b: float = 0.0
    a: float = 0.0
    table: Path | None = None
    samples: tuple[tuple[float, ...], tuple[float, ...]] | None = None
    holder_gamma: float = 0.5

    def load_samples(self) -> tuple[np.ndarray, np.ndarray]:
        """Return tabulated samples as arrays, reading `table` if needed."""
        if self.samples is not None:
            p, omega = self.samples
            return np.asarray(p, dtype=float), np.asarray(omega, dtype=float)
        if self.table is None:
            raise ConfigError("omega_table", "tabulated vorticity needs a sample table")
        try:
            data = np.loadtxt(self.table, delimiter=None, comments="#", ndmin=2)
        except (OSError, ValueError) as exc:
            raise ConfigError("omega_table", f"cannot read {self.table}: {exc}") from exc
        if data.shape[1] < 2:
            raise ConfigError("omega_table", "expected two columns: p omega")
        return data[:, 0].copy(), data[:, 1].copy()


@dataclass(frozen=True, slots=True)
class GridConfig:
    """Strip resolution.

    Attributes:
        n_q: Nodes per period in q (even, >= 16).
        n_p: Intervals in p (>= 12); there are n_p + 1 levels including the bottom.
        kind: 'auto', 'uniform' or 'stretched'. 'auto' starts uniform and
            stretches toward the surface once r - max eta < 0.2 r.
    """

    n_q: int = 64
    n_p: int = 48
    kind: str = "auto"

    def __post_init__(self) -> None:
        if self.n_q < MIN_NQ or self.n_q % 2:
            raise ConfigError("nq", f"must be even and >= {MIN_NQ}, got {self.n_q}")
        if self.n_p < MIN_NP:
            raise ConfigError("np", f"must be >= {MIN_NP}, got {self.n_p}")
        if self.kind not in ("auto", "uniform", "stretched"):
            raise ConfigError("grid", f"expected auto, uniform or stretched, got {self.kind!r}")


@dataclass(frozen=True, slots=True)
class StepPolicy:
    """Pseudo-arclength step control and halt thresholds.

    Attributes:
        gap_min: Halt once r - max eta falls below this. None means 1e-3 * r.
        lambda_min: Halt once the wavenumber falls below this.
        slope_max: Halt once max |eta'| exceeds this.
        ds_init: First arclength step. None means the onset secant length.
        ds_min: Smallest step before failures count toward a halt.
        ds_max: Largest step.
        max_points: Total accepted points on the branch, onset included.
        grow_iterations: Double the step when the corrector needs at most this many.
        shrink_iterations: Halve the step when the corrector needs at least this many.
        max_corrector_iterations: Newton budget of one corrector solve.
        fallback_after: Consecutive corrector failures before amplitude-pinned Newton.
        max_min_step_failures: Failures at ds_min before the run halts.
        newton_tol: Max-norm residual tolerance for every Newton solve.
        max_refinements: Times the grid may be doubled when a candidate fails the
            gate or under-resolves the crest.
        turn_max: Largest direction change, in degrees, between adjacent surface
            chords before the crest counts as under-resolved.
        angle_floor: Fitted crest angles below this, in degrees, count as
            under-resolved.
    """

    gap_min: float | None = None
    lambda_min: float = 1e-2
    slope_max: float = 5.0
    ds_init: float | None = None
    ds_min: float = 1e-6
    ds_max: float = 0.02
    max_points: int = 400
    grow_iterations: int = 3
    shrink_iterations: int = 8
    max_corrector_iterations: int = 12
    fallback_after: int = 2
    max_min_step_failures: int = 3
    newton_tol: float = 1e-10
    max_refinements: int = 1
    turn_max: float = 45.0
    angle_floor: float = 100.0

    def __post_init__(self) -> None:
        for key in ("lambda_min", "slope_max", "ds_min", "ds_max", "newton_tol", "turn_max",
                    "angle_floor"):
            if not getattr(self, key) > 0:
                raise ConfigError(key, "must be positive")
        if self.gap_min is not None and not self.gap_min > 0:
            raise ConfigError("gap_min", "must be positive")
        if self.ds_init is not None and not self.ds_init > 0:
            raise ConfigError("ds_init", "must be positive")
        if self.ds_min > self.ds_max:
            raise ConfigError("ds_min", "must not exceed ds_max")
        if self.max_points < 1:
            raise ConfigError("max_points", "must be at least 1")
        if self.max_refinements < 0:
            raise ConfigError("max_refinements", "must not be negative")

    def gap_threshold(self, r: float) -> float:
        """Absolute stagnation-gap threshold for Bernoulli constant r."""
        return self.gap_min if self.gap_min is not None else 1e-3 * r


@dataclass(frozen=True, slots=True)
class GateConfig:
    """Tolerances of the diagnostics gate.

    Attributes:
        bernoulli_rtol: Surface Bernoulli residual must stay below this times r.
        bound_rtol: Relative slack on pointwise speed bounds.
        bound_atol: Absolute slack on non-strict bounds (and excess required by
            strict ones).
        slope_tol: Slack on the irrotational slope bound |eta'| <= 1/2.
        spread_rtol: Largest relative spread of the flow force along the surface.
        spread_rtol_near: The same limit once r - max eta < near_gap * r.
        near_gap: Stagnation gap, as a fraction of r, where the relaxed limit starts.
        crosscheck_rtol: Spline-derivative Bernoulli residual must stay below this times r.
        mandatory: Names of the checks that decide acceptance.
    """

    bernoulli_rtol: float = 1e-8
    bound_rtol: float = 1e-6
    bound_atol: float = 1e-10
    slope_tol: float = 0.05
    spread_rtol: float = 1e-5
    spread_rtol_near: float = 1e-4
    near_gap: float = 0.05
    crosscheck_rtol: float = 1e-4
    mandatory: tuple[str, ...] = DEFAULT_MANDATORY_CHECKS


@dataclass(frozen=True, slots=True)
class RunConfig:
    """Everything one CLI invocation needs."""

    vorticity: VorticityConfig
    r: float
    grid: GridConfig = field(default_factory=GridConfig)
    a0: float = 1e-3
    policy: StepPolicy = field(default_factory=StepPolicy)
    gate: GateConfig = field(default_factory=GateConfig)
    out_dir: Path = Path("crestline-out")
    seed_checkpoint: Path | None = None
    cusp_points: int = 16

    def __post_init__(self) -> None:
        if not math.isfinite(self.r):
            raise ConfigError("r", "must be finite")
        if not self.a0 > 0:
            raise ConfigError("a0", f"must be positive, got {self.a0}")
        if self.cusp_points < 2:
            raise ConfigError("cusp_points", "must be at least 2")

    def with_out_dir(self, out_dir: Path) -> RunConfig:
        """Copy with a different output directory."""
        return replace(self, out_dir=out_dir)


_SECTION = "run"
_REQUIRED = ("vorticity", "r")


def _as_float(key: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(key, f"expected a number, got {raw!r}") from None


def _as_int(key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(key, f"expected an integer, got {raw!r}") from None


def _as_path(base: Path) -> Callable[[str, str], Path]:
    def convert(_key: str, raw: str) -> Path:
        path = Path(raw).expanduser()
        return path if path.is_absolute() else base / path

    return convert


def parse_config(text: str, *, base_dir: Path | None = None) -> RunConfig:
    """Parse ``key = value`` text into a RunConfig.

    Args:
        text: File contents.
        base_dir: Directory relative paths are resolved against.

    Raises:
        ConfigError: On a missing required key, an unknown key, or a bad value.
    """
    base = base_dir or Path.cwd()
    parser = configparser.ConfigParser(
        comment_prefixes=("#",), inline_comment_prefixes=("#",), interpolation=None
    )
    try:
        parser.read_string(f"[{_SECTION}]\n{text}")
    except configparser.Error as exc:
        raise ConfigError("<file>", f"malformed line: {exc}") from exc
    raw: Mapping[str, str] = dict(parser[_SECTION])

    for key in _REQUIRED:
        if key not in raw or not raw[key].strip():
            raise ConfigError(key, "required key is missing")

    path = _as_path(base)
    converters: dict[str, Callable[[str, str], object]] = {
        "vorticity": lambda _k, v: v.strip(),
        "omega": _as_float,
        "omega_slope": _as_float,
        "omega_table": path,
        "holder_gamma": _as_float,
        "r": _as_float,
        "nq": _as_int,
        "np": _as_int,
        "grid": lambda _k, v: v.strip().lower(),
        "a0": _as_float,
        "gap_min": _as_float,
        "lambda_min": _as_float,
        "slope_max": _as_float,
        "ds_init": _as_float,
        "ds_min": _as_float,
        "ds_max": _as_float,
        "max_points": _as_int,
        "newton_tol": _as_float,
        "max_refinements": _as_int,
        "turn_max": _as_float,
        "angle_floor": _as_float,
        "bernoulli_rtol": _as_float,
        "bound_rtol": _as_float,
        "bound_atol": _as_float,
        "slope_tol": _as_float,
        "spread_rtol": _as_float,
        "spread_rtol_near": _as_float,
        "crosscheck_rtol": _as_float,
        "out_dir": path,
        "seed_checkpoint": path,
        "cusp_points": _as_int,
    }
    values: dict[str, object] = {}
    for key, text_value in raw.items():
        if key not in converters:
            raise ConfigError(key, f"unknown key; expected one of {sorted(converters)}")
        values[key] = converters[key](key, text_value)

    holder = values.get("holder_gamma", 0.5)
    if not 0.0 < holder < 1.0:  # type: ignore[operator]
        raise ConfigError("holder_gamma", "must lie in (0, 1)")
    vorticity = VorticityConfig(
        kind=values["vorticity"],  # type: ignore[arg-type]
        b=values.get("omega", 0.0),  # type: ignore[arg-type]
        a=values.get("omega_slope", 0.0),  # type: ignore[arg-type]
        table=values.get("omega_table"),  # type: ignore[arg-type]
        holder_gamma=holder,  # type: ignore[arg-type]
    )
    grid = GridConfig(
        n_q=values.get("nq", 64),  # type: ignore[arg-type]
        n_p=values.get("np", 48),  # type: ignore[arg-type]
        kind=values.get("grid", "auto"),  # type: ignore[arg-type]
    )
    policy_keys = ("gap_min", "lambda_min", "slope_max", "ds_init", "ds_min", "ds_max",
                   "max_points", "newton_tol", "max_refinements", "turn_max", "angle_floor")
    policy_args = {k: values[k] for k in policy_keys if k in values}
    policy = StepPolicy(**policy_args)  # type: ignore[arg-type]
    gate_keys = ("bernoulli_rtol", "bound_rtol", "bound_atol", "slope_tol", "spread_rtol",
                 "spread_rtol_near", "crosscheck_rtol")
    gate = GateConfig(**{k: values[k] for k in gate_keys if k in values})  # type: ignore[arg-type]

    run_keys = ("a0", "out_dir", "seed_checkpoint", "cusp_points")
    return RunConfig(
        vorticity=vorticity,
        r=values["r"],  # type: ignore[arg-type]
        grid=grid,
        policy=policy,
        gate=gate,
        **{k: values[k] for k in run_keys if k in values},  # type: ignore[arg-type]
    )


def load_config(path: Path) -> RunConfig:
    """Read and parse a configuration file.

    Relative paths inside the file resolve against the file's directory.

    Raises:
        ConfigError: If the file cannot be read or fails validation.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError("--config", f"cannot read {path}: {exc}") from exc
    return parse_config(text, base_dir=Path(path).resolve().parent)
