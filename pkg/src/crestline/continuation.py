"""Pseudo-arclength continuation of the Stokes branch at fixed Bernoulli constant.

The branch leaves the subcritical stream at the dispersion wavenumber λ₀ and
is followed in the unknowns (half-period heights, λ) until one of the halt
thresholds trips. The endpoint is then classified from the trends of the
stagnation gap r − max η, the wavelength Λ and the steepest slope.

**Stepping:**

1. Tangent: secant through the last two accepted points, normalised in the
   weighted norm of `_metric`
2. Predictor: u + ds·τ
3. Corrector: Newton on the system closed by ⟨τ, u − u_curr⟩ = ds
4. Step control: ds doubles after ≤ 3 corrector iterations and halves after
   ≥ 8 or on failure; two failures in a row switch to an amplitude-pinned
   corrector at the predictor's amplitude
5. Every accepted point must pass the diagnostics gate and resolve its crest
   (adjacent surface chords turn by at most `turn_max`, fitted crest angle at
   least `angle_floor`)

A candidate that fails step 5 is not accepted. The last two points move to a
finer grid (stretched first under 'auto', then doubled up to
`max_refinements` times) and the step is retried from there; with no finer
grid left the run halts with `gate_failure` or `crest_underresolved`.

The first step after onset has no secant; it is taken amplitude-pinned at
twice the onset amplitude. Onset itself starts from the kernel of the
discrete Jacobian (`crestline.heightfield.discrete_onset`).

**Checkpointing:**

`write_checkpoint` stores the last two fields plus a `ContinuationState`
after every accepted point. Field files carry the point count in their name
and `state.json` is written last, so an interrupted write leaves the previous
checkpoint intact. Resuming from a checkpoint reproduces the uninterrupted
run bit for bit.

**Thread-Safety:**

One branch is strictly sequential. Different branches share nothing and can
run in separate threads.

**See Also:**

- `crestline.heightfield.newton_closed`: The corrector
- `crestline.diagnostics.certify`: The acceptance gate
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Any, NamedTuple

import numpy as np

from crestline._config import GateConfig, GridConfig, StepPolicy
from crestline._errors import (
    BranchLogError,
    ConfigError,
    ConvergenceError,
    ParseError,
    SolverError,
    StagnationError,
)
from crestline._serialize import json_lines, read_json, write_json, write_text
from crestline._types import BranchLabel, GridKind, HaltReason, OmegaClass
from crestline.diagnostics import certify
from crestline.dispersion import kernel_mode
from crestline.heightfield import (
    HeightField,
    StripProblem,
    discrete_onset,
    make_grid,
    newton_closed,
    newton_solve,
    read_field,
    regrid,
    write_field,
)

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

    from numpy.typing import NDArray

    from crestline._protocol import BranchSample
    from crestline.diagnostics import WaveDiagnostics
    from crestline.dispersion import BifurcationSeed
    from crestline.heightfield import StripGrid
    from crestline.streamflow import FlowRegime

__all__ = [
    "BranchPoint",
    "BranchRecord",
    "BranchOutcome",
    "BranchRun",
    "ContinuationState",
    "initial_state",
    "start_branch",
    "continue_branch",
    "classify_branch",
    "parse_branch_log",
    "read_branch_log",
    "write_branch_log",
    "write_checkpoint",
    "read_checkpoint",
    "LOG_FIELDS",
]

logger = logging.getLogger(__name__)

LOG_FIELDS = (
    "t",
    "lambda",
    "Lambda",
    "max_eta",
    "min_eta",
    "stagnation_gap",
    "max_slope",
    "residual_norm",
    "diagnostics_pass",
    "r",
    "flow_force",
)
ONSET_AMPLITUDE_FRACTION = 0.05
ONSET_HALVINGS = 8
STRETCH_TRIGGER = 0.2
SURFACE_WEIGHT = 4.0
MIN_CLASSIFY_POINTS = 10
GAP_COLLAPSE_RATIO = 0.2
LAMBDA_GROWTH_RATIO = 3.0
ETA_MONOTONE_TOL = 1e-8
WAVELENGTH_REVIEW_RATIO = 0.5
STATE_FILE = "state.json"


@dataclass(frozen=True, slots=True)
class BranchPoint:
    """One accepted point of a branch.

    Attributes:
        t: Arclength coordinate (weighted norm), 0 at onset.
        field: Converged height field.
        Lambda: Wavelength 2π/λ.
        max_eta, min_eta: Surface extremes.
        stagnation_gap: r − max η.
        max_slope: max |η'|.
        diagnostics: Certification of the field.
    """

    t: float
    field: HeightField
    Lambda: float
    max_eta: float
    min_eta: float
    stagnation_gap: float
    max_slope: float
    diagnostics: WaveDiagnostics

    @classmethod
    def from_field(
        cls, t: float, field: HeightField, diagnostics: WaveDiagnostics
    ) -> BranchPoint:
        return cls(
            t=float(t),
            field=field,
            Lambda=field.Lambda,
            max_eta=field.max_eta,
            min_eta=field.min_eta,
            stagnation_gap=field.stagnation_gap,
            max_slope=field.max_slope,
            diagnostics=diagnostics,
        )

    @property
    def r(self) -> float:
        return self.field.r

    def to_log(self) -> dict[str, object]:
        """Branch-log line content, keys in `LOG_FIELDS` order."""
        return {
            "t": self.t,
            "lambda": self.field.lam,
            "Lambda": self.Lambda,
            "max_eta": self.max_eta,
            "min_eta": self.min_eta,
            "stagnation_gap": self.stagnation_gap,
            "max_slope": self.max_slope,
            "residual_norm": self.field.residual_norm,
            "diagnostics_pass": self.diagnostics.passed,
            "r": self.r,
            "flow_force": self.diagnostics.flow_force,
        }


class BranchRecord(NamedTuple):
    """A branch-log line read back from disk."""

    t: float
    lam: float
    Lambda: float
    max_eta: float
    min_eta: float
    stagnation_gap: float
    max_slope: float
    residual_norm: float
    diagnostics_pass: bool
    r: float
    flow_force: float

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> BranchRecord:
        """Raises BranchLogError naming the first missing or bad field."""
        values: list[object] = []
        for key in LOG_FIELDS:
            if key not in data:
                raise BranchLogError(f"branch log line lacks {key!r}")
            raw = data[key]
            if key == "diagnostics_pass":
                if not isinstance(raw, bool):
                    raise BranchLogError(f"{key!r} must be true or false")
                values.append(raw)
                continue
            try:
                values.append(float(raw))
            except (TypeError, ValueError):
                raise BranchLogError(f"{key!r} is not a number: {raw!r}") from None
        return cls(*values)  # type: ignore[arg-type]


@dataclass(frozen=True, slots=True)
class BranchOutcome:
    """Classification of a finished branch."""

    label: BranchLabel
    evidence: dict[str, object] = field(default_factory=dict)
    halt_reason: HaltReason | None = None
    warnings: tuple[str, ...] = ()

    def to_dict(self) -> dict[str, object]:
        return {
            "label": str(self.label),
            "halt_reason": None if self.halt_reason is None else str(self.halt_reason),
            "warnings": list(self.warnings),
            "evidence": self.evidence,
        }


@dataclass(frozen=True, slots=True)
class ContinuationState:
    """Everything besides the two fields that the next step depends on."""

    ds: float
    t: float
    count: int
    first_Lambda: float  # noqa: N815
    first_gap: float
    stretched: bool = False
    wavelength_warned: bool = False
    refinements: int = 0

    def to_dict(self) -> dict[str, object]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ContinuationState:
        try:
            return cls(
                ds=float(data["ds"]),
                t=float(data["t"]),
                count=int(data["count"]),
                first_Lambda=float(data["first_Lambda"]),
                first_gap=float(data["first_gap"]),
                stretched=bool(data.get("stretched", False)),
                wavelength_warned=bool(data.get("wavelength_warned", False)),
                refinements=int(data.get("refinements", 0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad continuation state: {exc}") from exc


class BranchRun(NamedTuple):
    """Result of `continue_branch`.

    Attributes:
        points: Points accepted by this call (the start is not repeated).
        halt: Why the run stopped.
        state: State after the last accepted point.
        warnings: Soft-check messages raised during the run.
    """

    points: list[BranchPoint]
    halt: HaltReason
    state: ContinuationState
    warnings: tuple[str, ...]


def initial_state(onset: BranchPoint, policy: StepPolicy) -> ContinuationState:
    """State of a branch that so far holds only its onset point."""
    return ContinuationState(
        ds=policy.ds_init or 0.0,
        t=onset.t,
        count=1,
        first_Lambda=onset.Lambda,
        first_gap=onset.stagnation_gap,
        stretched=onset.field.problem.grid.kind == GridKind.STRETCHED,
    )


def _weights(grid: StripGrid) -> NDArray[np.float64]:
    w = np.ones((grid.half, grid.n_p))
    w[:, -1] = SURFACE_WEIGHT
    w /= w.sum()
    return np.append(w.ravel(), 0.0)


def _metric(grid: StripGrid, Lambda: float) -> NDArray[np.float64]:  # noqa: N803
    """Weights of the squared arclength norm over (heights, λ).

    ‖δu‖² = Σ w_ij δh_ij² + δΛ², with every weight acting on squares:

    - heights: w_ij = 1 in the interior and `SURFACE_WEIGHT` on the surface,
      scaled to sum to 1, so the height part is a weighted mean square and
      does not grow with the grid
    - λ: the change is measured as the wavelength change it causes,
      δΛ = −(Λ/λ)·δλ = −(Λ²/2π)·δλ, so its weight is (Λ²/2π)²

    Both parts are then lengths in the units of the depth.
    """
    w = _weights(grid)
    w[-1] = (Lambda * Lambda / (2.0 * math.pi)) ** 2
    return w


def _distance(a: NDArray[np.float64], b: NDArray[np.float64], w: NDArray[np.float64]) -> float:
    d = a - b
    return float(math.sqrt(float(np.sum(w * d * d))))


def start_branch(
    regime: FlowRegime,
    seed: BifurcationSeed,
    a0: float,
    *,
    grid_config: GridConfig | None = None,
    policy: StepPolicy | None = None,
    gate: GateConfig | None = None,
) -> BranchPoint:
    """Converge the first small-amplitude wave next to the stream.

    The predictor is H + (a0/2)·φ_h(p)·cos q at λ_h, where (λ_h, φ_h) is the
    discrete onset of the grid nearest the continuous seed, so the predictor
    lies on the kernel of the discrete Jacobian. Its crest-to-trough height
    is a0; Newton then pins that amplitude. On failure the amplitude is
    halved, up to 8 times.

    Raises:
        ConfigError: If a0 is outside (0, 0.05·(r − d_+)].
        ConvergenceError: If every halving fails.
    """
    grid_config = grid_config or GridConfig()
    policy = policy or StepPolicy()
    gate = gate or GateConfig()
    limit = ONSET_AMPLITUDE_FRACTION * (regime.r - regime.d_plus)
    if not 0.0 < a0 <= limit:
        raise ConfigError("a0", f"onset amplitude must lie in (0, {limit!r}], got {a0!r}")
    near_stagnation = regime.r - regime.d_plus < STRETCH_TRIGGER * regime.r
    grid = make_grid(grid_config, stretched=near_stagnation)
    problem = StripProblem(regime.model, regime, grid)
    onset = discrete_onset(problem, seed)
    mode = kernel_mode(onset, grid.q)

    amplitude = a0
    for attempt in range(ONSET_HALVINGS + 1):
        initial = HeightField(problem, problem.base + 0.5 * amplitude * mode, onset.lambda0)
        try:
            wave = newton_solve(initial, amplitude, tol=policy.newton_tol)
        except (ConvergenceError, StagnationError) as exc:
            logger.info("onset at a=%r failed (%s); halving", amplitude, exc)
            amplitude *= 0.5
            continue
        if attempt:
            logger.warning("onset amplitude reduced to %r", amplitude)
        diagnostics = certify(wave, regime, gate)
        if not diagnostics.passed:
            logger.warning("onset wave fails the gate: %s", diagnostics.failures())
        logger.info("onset converged: a=%r lambda=%r (lambda0=%r, discrete %r) in %d iterations",
                    amplitude, wave.lam, seed.lambda0, onset.lambda0, wave.iterations)
        return BranchPoint.from_field(0.0, wave, diagnostics)
    raise ConvergenceError(
        f"onset failed after {ONSET_HALVINGS} amplitude halvings",
        iterations=ONSET_HALVINGS,
        residual_norm=math.nan,
    )


def _pinned(
    problem: StripProblem, u0: NDArray[np.float64], amplitude: float, policy: StepPolicy
) -> HeightField:
    start = HeightField.from_unknowns(problem, u0)
    return newton_solve(start, amplitude, tol=policy.newton_tol,
                        max_iterations=policy.max_corrector_iterations)


def _regrid_point(point_field: HeightField, grid: StripGrid, policy: StepPolicy) -> HeightField:
    moved = regrid(point_field, grid)
    return _pinned(moved.problem, moved.unknowns(), point_field.amplitude, policy)


def _moved(
    point: BranchPoint, grid: StripGrid, policy: StepPolicy, gate: GateConfig
) -> BranchPoint:
    wave = _regrid_point(point.field, grid, policy)
    return BranchPoint.from_field(point.t, wave, certify(wave, None, gate))


def _crest_resolved(wave: HeightField, diagnostics: WaveDiagnostics, policy: StepPolicy) -> bool:
    angle = diagnostics.crest_angle
    return wave.max_turn <= policy.turn_max and (angle is None or angle >= policy.angle_floor)


def _finer_grid(
    grid: StripGrid, grid_config: GridConfig, state: ContinuationState, policy: StepPolicy
) -> tuple[StripGrid, bool, int] | None:
    """Next grid to try as (grid, stretched, refinements), or None when exhausted."""
    if grid_config.kind == "auto" and not state.stretched:
        grid = make_grid(grid_config, stretched=True, refinements=state.refinements)
        return grid, True, state.refinements
    if state.refinements < policy.max_refinements:
        return grid.refined(), state.stretched, state.refinements + 1
    return None


def continue_branch(
    start: BranchPoint,
    policy: StepPolicy | None = None,
    *,
    previous: BranchPoint | None = None,
    state: ContinuationState | None = None,
    gate: GateConfig | None = None,
    grid_config: GridConfig | None = None,
    on_accept: Callable[[BranchPoint, BranchPoint | None, ContinuationState], None] | None = None,
) -> BranchRun:
    """Follow the branch from `start` until a halt condition.

    Args:
        start: Last accepted point (onset, or a restored checkpoint).
        policy: Step control and halt thresholds.
        previous: The point before `start`; None right after onset.
        state: Restored state; None builds a fresh one from `start`.
        gate: Diagnostics tolerances.
        grid_config: Base grid of the stretched and refined fallbacks.
        on_accept: Called with (point, previous point, state) after every
            acceptance; the CLI writes the log and checkpoint here.

    Returns:
        Accepted points, the halt reason, and the final state.
    """
    policy = policy or StepPolicy()
    gate = gate or GateConfig()
    grid_config = grid_config or GridConfig()
    r = start.r
    gap_min = policy.gap_threshold(r)

    current, before = start, previous
    if state is None:
        state = initial_state(start, policy)
    accepted: list[BranchPoint] = []
    warnings: list[str] = []
    failures = 0
    min_step_failures = 0

    def halt_for(point: BranchPoint, count: int) -> HaltReason | None:
        if point.stagnation_gap < gap_min:
            return HaltReason.GAP_MIN
        if point.field.lam < policy.lambda_min:
            return HaltReason.LAMBDA_MIN
        if point.max_slope > policy.slope_max:
            return HaltReason.SLOPE_MAX
        if count >= policy.max_points:
            return HaltReason.MAX_POINTS
        return None

    reason = halt_for(current, state.count)
    if reason is not None:
        return BranchRun(accepted, reason, state, ())

    while True:
        problem = current.field.problem
        u_curr = current.field.unknowns()
        metric = _metric(problem.grid, current.Lambda)
        ds = state.ds
        iterations = 0
        try:
            if before is None:
                wave = _first_step(current.field, policy)
                ds = _distance(wave.unknowns(), u_curr, metric)
            else:
                u_prev = before.field.unknowns()
                secant = u_curr - u_prev
                tangent = secant / _distance(u_curr, u_prev, metric)
                if ds <= 0.0:
                    ds = min(max(_distance(u_curr, u_prev, metric), policy.ds_min), policy.ds_max)
                predictor = u_curr + ds * tangent
                if failures >= policy.fallback_after:
                    amplitude = float(HeightField.from_unknowns(problem, predictor).amplitude)
                    logger.debug("amplitude-pinned corrector at a=%r", amplitude)
                    wave = _pinned(problem, predictor, amplitude, policy)
                else:
                    row = metric * tangent

                    def closure(
                        u: NDArray[np.float64],
                        row: NDArray[np.float64] = row,
                        ds: float = ds,
                    ) -> tuple[float, NDArray[np.float64]]:
                        return float(row @ (u - u_curr)) - ds, row

                    wave = newton_closed(problem, predictor, closure, tol=policy.newton_tol,
                                         max_iterations=policy.max_corrector_iterations)
            iterations = wave.iterations
            if wave.amplitude <= 0.0:
                raise ConvergenceError("corrector left the wave cone (amplitude <= 0)",
                                       iterations=iterations, residual_norm=wave.residual_norm)
        except SolverError as exc:
            failures += 1
            at_floor = ds <= policy.ds_min
            if at_floor:
                min_step_failures += 1
            logger.debug("corrector failed at ds=%r: %s", ds, exc)
            if min_step_failures >= policy.max_min_step_failures:
                logger.info("halt: step underflow after %d failures at ds_min", min_step_failures)
                return BranchRun(accepted, HaltReason.STEP_UNDERFLOW, state, tuple(warnings))
            state = _replace_state(state, ds=max(0.5 * ds, policy.ds_min))
            continue

        diagnostics = certify(wave, problem.regime, gate)
        resolved = _crest_resolved(wave, diagnostics, policy)
        if not (diagnostics.passed and resolved):
            if diagnostics.passed:
                why, reason = "crest under-resolved", HaltReason.UNDERRESOLVED
            else:
                failed = [n for n in diagnostics.failures() if n in gate.mandatory]
                why, reason = f"gate failure ({', '.join(failed)})", HaltReason.GATE_FAILURE
            finer = _finer_grid(problem.grid, grid_config, state, policy)
            if finer is None:
                logger.info("halt: %s at t=%r", why, state.t)
                return BranchRun(accepted, reason, state, tuple(warnings))
            grid, stretched, refinements = finer
            logger.info("%s at t=%r; moving to %dx%d %s", why, state.t, grid.n_q, grid.n_p,
                        grid.kind)
            try:
                current = _moved(current, grid, policy, gate)
                before = None if before is None else _moved(before, grid, policy, gate)
            except SolverError as exc:
                logger.info("halt: %s at t=%r, regrid failed: %s", why, state.t, exc)
                return BranchRun(accepted, reason, state, tuple(warnings))
            state = _replace_state(state, stretched=stretched, refinements=refinements)
            failures = 0
            min_step_failures = 0
            continue

        step_length = _distance(wave.unknowns(), u_curr, metric)
        point = BranchPoint.from_field(state.t + step_length, wave, diagnostics)
        if point.max_eta < current.max_eta - ETA_MONOTONE_TOL:
            message = (
                f"max_eta decreased at t={point.t!r}: {current.max_eta!r} -> {point.max_eta!r}"
            )
            logger.warning(message)
            warnings.append(message)
        wavelength_warned = state.wavelength_warned
        if not wavelength_warned and point.Lambda < WAVELENGTH_REVIEW_RATIO * state.first_Lambda:
            message = f"wavelength fell below half its onset value at t={point.t!r}"
            logger.warning(message)
            warnings.append(message)
            wavelength_warned = True

        if iterations <= policy.grow_iterations:
            next_ds = min(2.0 * ds, policy.ds_max)
        elif iterations >= policy.shrink_iterations:
            next_ds = max(0.5 * ds, policy.ds_min)
        else:
            next_ds = min(ds, policy.ds_max)
        logger.debug("accepted after %d iterations; ds %r -> %r", iterations, ds, next_ds)
        failures = 0
        min_step_failures = 0

        before, current = current, point
        stretched = state.stretched
        if (
            not stretched
            and grid_config.kind == "auto"
            and point.stagnation_gap < STRETCH_TRIGGER * r
        ):
            grid = make_grid(grid_config, stretched=True, refinements=state.refinements)
            current = _moved(current, grid, policy, gate)
            before = _moved(before, grid, policy, gate)
            stretched = True
        state = ContinuationState(
            ds=next_ds,
            t=current.t,
            count=state.count + 1,
            first_Lambda=state.first_Lambda,
            first_gap=state.first_gap,
            stretched=stretched,
            wavelength_warned=wavelength_warned,
            refinements=state.refinements,
        )
        accepted.append(current)
        logger.info("point %d: t=%r Lambda=%r gap=%r slope=%r", state.count, current.t,
                    current.Lambda, current.stagnation_gap, current.max_slope)
        if on_accept is not None:
            on_accept(current, before, state)
        reason = halt_for(current, state.count)
        if reason is not None:
            logger.info("halt: %s at t=%r", reason, current.t)
            return BranchRun(accepted, reason, state, tuple(warnings))


def _first_step(onset: HeightField, policy: StepPolicy) -> HeightField:
    """Amplitude-pinned step from onset, doubling the deviation from the stream."""
    problem = onset.problem
    base = HeightField.stream(problem, onset.lam).unknowns()
    u_onset = onset.unknowns()
    last: SolverError | None = None
    for k in range(6):
        factor = 1.0 + 0.5**k
        predictor = base + factor * (u_onset - base)
        predictor[-1] = u_onset[-1]
        try:
            return _pinned(problem, predictor, factor * onset.amplitude, policy)
        except SolverError as exc:
            last = exc
    assert last is not None
    raise last


def _replace_state(state: ContinuationState, **changes: object) -> ContinuationState:
    data = state.to_dict()
    data.update(changes)
    return ContinuationState.from_dict(data)


def classify_branch(
    samples: Sequence[BranchSample],
    *,
    omega_class: OmegaClass,
    r: float,
    slope_max: float = 5.0,
    halt_reason: HaltReason | None = None,
) -> BranchOutcome:
    """Label a branch from its trends.

    Decision table, with gap → 0 meaning the final gap is below 0.2× the
    first and the trailing quarter is non-increasing, and Λ ↑ meaning the
    final Λ exceeds 3× the first:

    ========== ====== ======== ================
    gap → 0    Λ ↑    slope ↑  label
    ========== ====== ======== ================
    yes        no     no       ExtremeStokes
    yes        yes    no       ExtremeSolitary
    no         yes    no       Solitary
    no         no     yes      Breaking
    otherwise                  Undecided
    ========== ====== ======== ================

    Breaking is never emitted for ω ≥ 0; the slope trigger there yields
    ExtremeStokes with a warning. A run halted because the crest could no
    longer be resolved is Undecided unless its gap was already closing.

    Args:
        samples: Points in branch order (live points or log records).
        omega_class: Sign class of the vorticity.
        r: Bernoulli constant of the branch.
        slope_max: Slope threshold of the run.
        halt_reason: Why continuation stopped, if known.
    """
    evidence: dict[str, object] = {
        "points": len(samples),
        "halt_reason": None if halt_reason is None else str(halt_reason),
    }
    warnings: list[str] = []
    irrotational_extreme_only = omega_class is OmegaClass.ZERO and r > 2.0 ** (2.0 / 3.0)
    evidence["irrotational_extreme_only"] = irrotational_extreme_only
    if len(samples) < MIN_CLASSIFY_POINTS:
        evidence["reason"] = f"fewer than {MIN_CLASSIFY_POINTS} accepted points"
        return BranchOutcome(BranchLabel.UNDECIDED, evidence, halt_reason, ())

    gaps = np.array([s.stagnation_gap for s in samples], dtype=float)
    lengths = np.array([s.Lambda for s in samples], dtype=float)
    slopes = np.array([s.max_slope for s in samples], dtype=float)
    evidence.update(
        stagnation_gap=gaps.tolist(), Lambda=lengths.tolist(), max_slope=slopes.tolist()
    )

    tail = gaps[-max(3, len(gaps) // 4):]
    gap_to_zero = bool(gaps[-1] < GAP_COLLAPSE_RATIO * gaps[0] and np.all(np.diff(tail) <= 0.0))
    lambda_up = bool(lengths[-1] > LAMBDA_GROWTH_RATIO * lengths[0])
    slope_up = bool(slopes[-1] > slope_max or halt_reason is HaltReason.SLOPE_MAX)
    evidence.update(gap_to_zero=gap_to_zero, lambda_up=lambda_up, slope_up=slope_up)

    label = BranchLabel.UNDECIDED
    if gap_to_zero and not slope_up:
        label = BranchLabel.EXTREME_SOLITARY if lambda_up else BranchLabel.EXTREME_STOKES
    elif lambda_up and not slope_up:
        label = BranchLabel.SOLITARY
    elif slope_up and not gap_to_zero and not lambda_up:
        if omega_class.admits_breaking:
            label = BranchLabel.BREAKING
        else:
            label = BranchLabel.EXTREME_STOKES
            warnings.append("slope trigger fired under nonnegative vorticity")
    elif gap_to_zero or lambda_up or slope_up:
        evidence["reason"] = "conflicting trends"
    if halt_reason is HaltReason.UNDERRESOLVED and not gap_to_zero:
        label = BranchLabel.UNDECIDED
        evidence["reason"] = "crest under-resolved before the stagnation gap closed"

    if irrotational_extreme_only and label not in (
        BranchLabel.EXTREME_STOKES,
        BranchLabel.UNDECIDED,
    ):
        warnings.append(f"{label} reported where only extreme Stokes waves are expected")
    for message in warnings:
        logger.warning(message)
    logger.info("branch classified as %s", label)
    return BranchOutcome(label, evidence, halt_reason, tuple(warnings))


def write_branch_log(path: Path, points: Sequence[BranchPoint | dict[str, object]]) -> None:
    """Atomically rewrite the log, one JSON object per point."""
    lines = [p if isinstance(p, dict) else p.to_log() for p in points]
    write_text(path, json_lines(lines))


def parse_branch_log(text: str, *, source: str = "<log>") -> list[BranchRecord]:
    """Parse branch-log text.

    Raises:
        BranchLogError: On a malformed line, or when lines disagree on r.
    """
    records: list[BranchRecord] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            data = json.loads(line)
        except json.JSONDecodeError as exc:
            raise BranchLogError(f"{source}:{lineno}: not JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise BranchLogError(f"{source}:{lineno}: expected a JSON object")
        try:
            records.append(BranchRecord.from_dict(data))
        except BranchLogError as exc:
            raise BranchLogError(f"{source}:{lineno}: {exc}") from exc
    rs = {rec.r for rec in records}
    if len(rs) > 1:
        raise BranchLogError(f"{source}: mixed Bernoulli constants {sorted(rs)}")
    return records


def read_branch_log(path: Path) -> list[BranchRecord]:
    """Read and parse a branch log file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise BranchLogError(f"cannot read {path}: {exc}") from exc
    return parse_branch_log(text, source=str(path))


def write_checkpoint(
    directory: Path,
    current: BranchPoint,
    previous: BranchPoint | None,
    state: ContinuationState,
) -> None:
    """Store the two newest fields and the state; `state.json` goes last."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    current_name = f"point-{state.count:05d}.csv"
    write_field(current.field, directory / current_name)
    previous_name = None
    if previous is not None:
        previous_name = f"point-{state.count - 1:05d}.csv"
        write_field(previous.field, directory / previous_name)
    payload = {
        "current": current_name,
        "previous": previous_name,
        "t_previous": None if previous is None else previous.t,
        **state.to_dict(),
    }
    write_json(directory / STATE_FILE, payload)
    keep = {current_name, previous_name}
    for stale in directory.glob("point-*"):
        if stale.with_suffix(".csv").name not in keep:
            stale.unlink(missing_ok=True)


def read_checkpoint(
    directory: Path, gate: GateConfig | None = None
) -> tuple[BranchPoint, BranchPoint | None, ContinuationState]:
    """Restore (current, previous, state) written by `write_checkpoint`.

    Raises:
        ParseError: If the checkpoint is missing or damaged.
    """
    directory = Path(directory)
    payload = read_json(directory / STATE_FILE)
    state = ContinuationState.from_dict(payload)
    try:
        current_name = str(payload["current"])
        previous_name = payload.get("previous")
    except KeyError as exc:
        raise ParseError(f"{directory / STATE_FILE}: missing {exc}") from exc
    current_field = read_field(directory / current_name)
    current = BranchPoint.from_field(state.t, current_field, certify(current_field, None, gate))
    previous = None
    if previous_name:
        previous_field = read_field(directory / str(previous_name))
        t_prev = float(payload.get("t_previous") or 0.0)
        previous = BranchPoint.from_field(t_prev, previous_field,
                                          certify(previous_field, None, gate))
    logger.info("restored checkpoint at point %d (t=%r)", state.count, state.t)
    return current, previous, state
