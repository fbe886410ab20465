"""Physical reconstruction of a wave and certification of its bounds.

A converged `HeightField` lives on the fixed strip. This module maps it back
to the fluid domain (x = q/λ, y = h) and checks every quantitative statement
a Stokes wave must satisfy: the surface Bernoulli condition, the flow-force
and G first integrals, and a family of pointwise speed and shape bounds.

**Velocity field:**

ψ_y = 1/h_p and ψ_x = −λ h_q/h_p on every node, with h_p from fourth-order
differences of the stored heights (one-sided at bed and surface). Nothing is
read back from the solver's equations. The bed value carries the stream's
one-sided correction, so for the base stream ψ_y is exact there.

**Surface Bernoulli:**

`check_bernoulli` measures ½|∇ψ|² + η against the Bernoulli constant the
discrete stream satisfies, r − shift_top (shift_top is a fixed property of
the stream and grid: zero for irrotational flow, O(Δp⁴) otherwise). It uses
the same surface stencil as the solver and certifies the stored heights to
solver precision. `check_bernoulli_crosscheck` repeats the test with h_p
from a cubic spline through each column, a differentiation independent of
the solver, against a discretisation-sized tolerance.

**First integrals:**

- F(x, y): integrated up each vertical from the bed (cubic-spline quadrature
  in p with the Jacobian h_p); its surface value is the flow force 𝔽 in every
  column. Its spread along the surface is gated like the other records.
- G(x, y): integrated along each streamline from the crest line; it vanishes
  on the surface, on the crest line and on the trough line.

**Bound records:**

Each check yields a `BoundRecord` with a signed margin. Which records apply
depends on the vorticity class; records that do not apply are omitted.
Failures are data, never exceptions. Acceptance on a branch looks only at the
names listed in `GateConfig.mandatory`.

**See Also:**

- `crestline.heightfield`: Produces the fields checked here
- `crestline.continuation`: Gates every accepted branch point on `certify`
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.interpolate import CubicSpline

from crestline._config import GateConfig
from crestline._errors import StagnationError
from crestline._parallel import map_parallel
from crestline._types import BoundRecord, OmegaClass
from crestline.streamflow import depth_inverse

if TYPE_CHECKING:
    from collections.abc import Sequence

    from numpy.typing import ArrayLike, NDArray

    from crestline.heightfield import HeightField
    from crestline.streamflow import FlowRegime
    from crestline.vorticity._base import VorticityModel

__all__ = [
    "WaveField",
    "WaveDiagnostics",
    "reconstruct",
    "bernoulli_residual",
    "flowforce_spread",
    "g_surface_max",
    "g_trough_max",
    "check_bernoulli",
    "check_bernoulli_crosscheck",
    "bernoulli_crosscheck_residual",
    "check_flow_force",
    "check_bounds",
    "crest_angle",
    "fit_crest_angle",
    "flow_force_gradient_defect",
    "certify",
    "certify_many",
]

logger = logging.getLogger(__name__)

HP_FLOOR = 1e-12
ANGLE_MIN_POINTS = 6
ANGLE_WINDOW = 0.1


@dataclass(frozen=True, slots=True)
class WaveField:
    """A wave in physical variables, sampled on the image of the strip grid.

    Attributes:
        field: Source height field.
        x: Horizontal positions q/λ, shape (Nq,).
        y: Heights of the nodes, shape (Nq, Np + 1).
        p: Stream-function levels, shape (Np + 1,).
        psi_x, psi_y: Gradient of ψ on the nodes.
        surface_speed2: |∇ψ|² on the surface from the stored heights.
        F: Flow-force function, zero on the bed.
        G: Horizontal first integral, zero on the crest line.
        flow_force: Mean of F over the surface.
    """

    field: HeightField
    x: NDArray[np.float64]
    y: NDArray[np.float64]
    p: NDArray[np.float64]
    psi_x: NDArray[np.float64]
    psi_y: NDArray[np.float64]
    surface_speed2: NDArray[np.float64]
    F: NDArray[np.float64]
    G: NDArray[np.float64]
    flow_force: float

    @property
    def eta(self) -> NDArray[np.float64]:
        return self.y[:, -1]

    @property
    def psi(self) -> NDArray[np.float64]:
        """ψ on the nodes; equals p by construction."""
        return np.broadcast_to(self.p, self.y.shape)

    @property
    def lam(self) -> float:
        return self.field.lam

    @property
    def r(self) -> float:
        return self.field.r

    @property
    def model(self) -> VorticityModel:
        return self.field.problem.model


def _node_hp(field: HeightField) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """h_p on all nodes (fourth order, bed balanced) and h_q on all nodes."""
    problem = field.problem
    grid = problem.grid
    h = field.h
    hp = grid.node_derivative(h)
    hp[:, 0] += problem.shift_bottom
    hq = (np.roll(h, -1, axis=0) - np.roll(h, 1, axis=0)) / (2.0 * grid.dq)
    return hp, hq


def reconstruct(field: HeightField, model: VorticityModel | None = None) -> WaveField:
    """Map a height field to physical variables and integrate F and G.

    Args:
        field: Converged field with h_p > 0.
        model: Vorticity model; defaults to the field's own.

    Raises:
        StagnationError: If h_p drops below 1e−12 at some node.
    """
    model = field.problem.model if model is None else model
    grid = field.problem.grid
    lam, r = field.lam, field.r
    h = field.h
    hp, hq = _node_hp(field)
    if np.min(hp) < HP_FLOOR:
        j, i = np.unravel_index(int(np.argmin(hp)), hp.shape)
        raise StagnationError(
            f"stagnation cell: h_p = {hp[j, i]:.3e}", cell=(int(j), int(i))
        )

    psi_y = 1.0 / hp
    psi_x = -lam * hq * psi_y
    speed2 = psi_x[:, -1] ** 2 + psi_y[:, -1] ** 2

    p = grid.p
    omega_p = np.asarray(model.Omega(p), dtype=float)
    omega_top = float(model.Omega(1.0))
    head = omega_p - omega_top + r - h
    f_integrand = (1.0 - lam**2 * hq**2) / (2.0 * hp) + head * hp
    F = CubicSpline(p, f_integrand, axis=1).antiderivative()(p)

    m = grid.half
    eta = h[:, -1]
    g_x = 0.5 * (psi_x**2 - psi_y**2) - omega_p + omega_top + r - eta[:, None]
    g_integrand = g_x / lam + psi_x * psi_y * hq
    G = np.empty_like(h)
    G[:m] = cumulative_trapezoid(g_integrand[:m], grid.q[:m], axis=0, initial=0.0)
    G[m:] = -G[m - 2 : 0 : -1]

    return WaveField(
        field=field,
        x=grid.q / lam,
        y=h,
        p=p,
        psi_x=psi_x,
        psi_y=psi_y,
        surface_speed2=speed2,
        F=F,
        G=G,
        flow_force=float(np.mean(F[:, -1])),
    )


def bernoulli_residual(wf: WaveField) -> float:
    """max over the surface of |½|∇ψ|² + η − (r − shift_top)|."""
    target = wf.r - wf.field.problem.shift_top
    return float(np.max(np.abs(0.5 * wf.surface_speed2 + wf.eta - target)))


def check_bernoulli(wf: WaveField, gate: GateConfig | None = None) -> BoundRecord:
    """Surface Bernoulli condition; passes iff the residual is below rtol·r."""
    gate = gate or GateConfig()
    res = bernoulli_residual(wf)
    limit = gate.bernoulli_rtol * wf.r
    return BoundRecord(
        "bernoulli", "1/2 |grad psi|^2 + eta = r on the surface", limit - res, res < limit
    )


def bernoulli_crosscheck_residual(wf: WaveField) -> float:
    """Surface Bernoulli residual with h_p from a not-a-knot cubic spline in p."""
    field = wf.field
    hp_top = CubicSpline(wf.p, field.h, axis=1).derivative()(1.0)
    hq_top = (np.roll(wf.eta, -1) - np.roll(wf.eta, 1)) / (2.0 * field.problem.grid.dq)
    speed2 = (1.0 + wf.lam**2 * hq_top**2) / hp_top**2
    return float(np.max(np.abs(0.5 * speed2 + wf.eta - wf.r)))


def check_bernoulli_crosscheck(wf: WaveField, gate: GateConfig | None = None) -> BoundRecord:
    """Bernoulli with an independent surface derivative; tolerance crosscheck_rtol·r."""
    gate = gate or GateConfig()
    res = bernoulli_crosscheck_residual(wf)
    limit = gate.crosscheck_rtol * wf.r
    return BoundRecord(
        "bernoulli_crosscheck", "1/2 |grad psi|^2 + eta = r, spline h_p", limit - res,
        res < limit,
    )


def flowforce_spread(wf: WaveField) -> float:
    """(max − min)/|mean| of F along the surface."""
    top = wf.F[:, -1]
    return float((np.max(top) - np.min(top)) / max(abs(float(np.mean(top))), 1e-300))


def check_flow_force(wf: WaveField, gate: GateConfig | None = None) -> BoundRecord:
    """Flow-force invariance along the surface.

    The limit is `spread_rtol`, relaxed to `spread_rtol_near` once the
    stagnation gap is below `near_gap`·r.
    """
    gate = gate or GateConfig()
    spread = flowforce_spread(wf)
    gap = wf.r - float(np.max(wf.eta))
    limit = gate.spread_rtol_near if gap < gate.near_gap * wf.r else gate.spread_rtol
    return BoundRecord(
        "flow_force_spread", "(max F - min F) / |mean F| on the surface", limit - spread,
        spread < limit, constant=limit,
    )


def g_surface_max(wf: WaveField) -> float:
    """max |G| on the surface over the half period."""
    return float(np.max(np.abs(wf.G[: wf.field.problem.grid.half, -1])))


def g_trough_max(wf: WaveField) -> float:
    """max |G| on the trough vertical line."""
    return float(np.max(np.abs(wf.G[wf.field.n_q // 2])))


def flow_force_gradient_defect(wf: WaveField) -> float:
    """Worst mismatch of the sampled F against its gradient identities.

    Compares λ(F_q − F_y h_q) with ψ_xψ_y and F_p/h_p with
    ½(ψ_y² − ψ_x²) + Ω(ψ) − Ω(1) + r − y on interior nodes. Both
    mismatches shrink at second order under refinement.
    """
    field = wf.field
    grid = field.problem.grid
    hp, hq = _node_hp(field)
    ca, cb, cc = grid.central_weights()
    F = wf.F
    f_q = (np.roll(F, -1, axis=0) - np.roll(F, 1, axis=0)) / (2.0 * grid.dq)
    f_p = ca * F[:, :-2] + cb * F[:, 1:-1] + cc * F[:, 2:]
    inner = slice(1, -1)
    f_y = f_p / hp[:, inner]
    f_x = wf.lam * (f_q[:, inner] - f_y * hq[:, inner])
    px, py = wf.psi_x[:, inner], wf.psi_y[:, inner]
    omega = np.asarray(wf.model.Omega(grid.p[inner]), dtype=float)
    exact_y = 0.5 * (py**2 - px**2) + omega - float(wf.model.Omega(1.0)) + wf.r - wf.y[:, inner]
    return float(max(np.max(np.abs(f_x - px * py)), np.max(np.abs(f_y - exact_y))))


def _slack(gate: GateConfig, scale: ArrayLike) -> NDArray[np.float64]:
    return gate.bound_atol + gate.bound_rtol * np.abs(np.asarray(scale, dtype=float))


def _flank_coupling_constant(model: VorticityModel, r: float) -> float:
    return max(0.0, -model.minimum()) + 1.0 / (2.0 * math.sqrt(2.0 * r))


def check_bounds(
    wf: WaveField,
    regime: FlowRegime | None = None,
    model: VorticityModel | None = None,
    gate: GateConfig | None = None,
) -> list[BoundRecord]:
    """Certify the pointwise bounds that apply to this vorticity class.

    Args:
        wf: Reconstructed wave.
        regime: Conjugate streams at the wave's r; defaults to the field's.
        model: Vorticity model; defaults to the field's.
        gate: Tolerances.

    Returns:
        One record per applicable bound, in a fixed order.
    """
    regime = wf.field.problem.regime if regime is None else regime
    model = wf.model if model is None else model
    gate = gate or GateConfig()
    r = wf.r
    cls = model.omega_class
    eta = wf.eta
    max_eta, min_eta = float(np.max(eta)), float(np.min(eta))
    bottom = wf.psi_y[:, 0]
    records: list[BoundRecord] = []

    margin = max_eta - regime.d_plus
    records.append(BoundRecord(
        "crest_above_conjugate_depth", "max eta > d_+(r), strict", margin,
        margin > gate.bound_atol,
    ))

    upper = 2.0 * (r - wf.y)
    excess = upper * (1.0 + gate.bound_rtol) + gate.bound_atol - wf.psi_y**2
    margin = float(np.min(excess))
    records.append(BoundRecord("speed_head_upper", "psi_y^2 <= 2 (r - y)", margin, margin >= 0.0))

    if cls is OmegaClass.ZERO:
        c2 = (2.0 * r**3) ** -3
        margin = float(np.min(wf.psi_y**2 - c2 * (r - wf.y)))
        records.append(BoundRecord(
            "speed_head_lower", "psi_y^2 >= C2 (r - y), C2 = (2 r^3)^-3", margin,
            margin >= -gate.bound_atol, constant=c2,
        ))
        margin = float(min(np.min(bottom - 1.0 / r), np.min(4.0 / r - bottom)))
        records.append(BoundRecord(
            "bottom_speed_irrotational", "1/r < psi_y(x, 0) < 4/r", margin, margin > 0.0,
        ))

    lo = depth_inverse(model, max_eta)
    hi = depth_inverse(model, min_eta)
    margin = float(min(np.min(bottom - lo), np.min(hi - bottom)))
    records.append(BoundRecord(
        "bottom_speed_conjugate", "d^-1(max eta) <= psi_y(x, 0) <= d^-1(min eta)", margin,
        margin >= -float(_slack(gate, hi)),
    ))

    surface = wf.psi_y[:, -1]
    if cls.is_nonnegative:
        k = 1.0 / (2.0 * math.sqrt(2.0 * r))
        floor = k * (max_eta - eta) + math.sqrt(max(2.0 * (r - max_eta), 0.0))
        diff = surface - floor
        margin = float(np.min(diff))
        records.append(BoundRecord(
            "surface_speed_floor",
            "psi_y(x, eta) >= k (max eta - eta) + sqrt(2 (r - max eta)), k = 1/(2 sqrt(2r))",
            margin, bool(np.all(diff >= -_slack(gate, floor))), constant=k,
        ))

    c1 = _flank_coupling_constant(model, r)
    n_q = wf.field.n_q
    rising = np.r_[n_q // 2 : n_q, 0]
    g = surface[rising] - c1 * eta[rising]
    running = np.minimum.accumulate(g)
    margin = float(np.min(running[:-1] - g[1:])) if g.size > 1 else math.inf
    records.append(BoundRecord(
        "flank_coupling",
        "psi_y(x2, eta(x2)) - psi_y(x1, eta(x1)) <= C1 (eta(x2) - eta(x1)) on rising flanks",
        margin, margin >= -gate.bound_atol, constant=c1,
    ))

    if cls is OmegaClass.ZERO:
        margin = 0.5 + gate.slope_tol - wf.field.max_slope
        records.append(BoundRecord("slope_half", "|eta'| <= 1/2", margin, margin >= 0.0))

    half = wf.field.problem.grid.half
    drops = -np.diff(eta[:half])
    margin = float(np.min(drops)) if drops.size else 0.0
    records.append(BoundRecord(
        "flank_monotone", "eta non-increasing from crest to trough", margin,
        margin >= -gate.bound_atol,
    ))

    if cls is OmegaClass.ZERO:
        margin = wf.flow_force - 0.5 * r * r
        records.append(BoundRecord(
            "flow_force_floor", "flow force > r^2 / 2", margin, margin > 0.0,
        ))
    return records


def fit_crest_angle(x: ArrayLike, eta: ArrayLike, period: float) -> float | None:
    """Included crest angle from a least-squares corner fit.

    Fits η(0) − η ≈ m·|x| through the origin over 2Δx ≤ |x| ≤ 0.1·period,
    where x is measured from the highest sample, and returns 180° − 2·atan(m).

    Returns:
        The angle in degrees, or None with fewer than 6 samples in the window.

    Example:
        >>> xs = np.linspace(-1, 1, 401)
        >>> round(fit_crest_angle(xs, 1 - np.abs(xs) / np.sqrt(3), 2.0), 6)
        120.0
    """
    xs = np.asarray(x, dtype=float)
    es = np.asarray(eta, dtype=float)
    crest = int(np.argmax(es))
    rel = np.mod(xs - xs[crest] + 0.5 * period, period) - 0.5 * period
    spacing = np.diff(np.sort(np.abs(rel)))
    dx = float(np.min(spacing[spacing > 0])) if np.any(spacing > 0) else 0.0
    dist = np.abs(rel)
    window = (dist >= 2.0 * dx * (1 - 1e-9)) & (dist <= ANGLE_WINDOW * period)
    if np.count_nonzero(window) < ANGLE_MIN_POINTS:
        return None
    drop = es[crest] - es[window]
    slope = np.linalg.lstsq(dist[window][:, None], drop, rcond=None)[0][0]
    return float(180.0 - 2.0 * math.degrees(math.atan(max(slope, 0.0))))


def crest_angle(wf: WaveField) -> float | None:
    """Included crest angle of a reconstructed wave (see `fit_crest_angle`)."""
    return fit_crest_angle(wf.x, wf.eta, wf.field.Lambda)


@dataclass(frozen=True, slots=True)
class WaveDiagnostics:
    """Certification summary of one wave."""

    bernoulli_residual: float
    flowforce_spread: float
    G_surface_max: float
    G_trough_max: float
    flow_force: float
    flow_force_gradient_defect: float
    bounds: tuple[BoundRecord, ...]
    crest_angle: float | None
    passed: bool

    def record(self, name: str) -> BoundRecord | None:
        for rec in self.bounds:
            if rec.name == name:
                return rec
        return None

    def failures(self) -> list[str]:
        return [rec.name for rec in self.bounds if not rec.passed]

    def to_dict(self) -> dict[str, object]:
        return {
            "bernoulli_residual": self.bernoulli_residual,
            "flowforce_spread": self.flowforce_spread,
            "G_surface_max": self.G_surface_max,
            "G_trough_max": self.G_trough_max,
            "flow_force": self.flow_force,
            "flow_force_gradient_defect": self.flow_force_gradient_defect,
            "bounds": [rec.to_dict() for rec in self.bounds],
            "crest_angle": self.crest_angle,
            "passed": self.passed,
        }


def certify(
    field: HeightField, regime: FlowRegime | None = None, gate: GateConfig | None = None
) -> WaveDiagnostics:
    """Reconstruct a wave and run every check on it.

    `passed` is true iff every record named in `gate.mandatory` passes;
    records that do not apply to the vorticity class are skipped.
    """
    gate = gate or GateConfig()
    wf = reconstruct(field)
    bounds = [
        check_bernoulli(wf, gate),
        check_bernoulli_crosscheck(wf, gate),
        check_flow_force(wf, gate),
        *check_bounds(wf, regime, None, gate),
    ]
    passed = all(rec.passed for rec in bounds if rec.name in gate.mandatory)
    diagnostics = WaveDiagnostics(
        bernoulli_residual=bernoulli_residual(wf),
        flowforce_spread=flowforce_spread(wf),
        G_surface_max=g_surface_max(wf),
        G_trough_max=g_trough_max(wf),
        flow_force=wf.flow_force,
        flow_force_gradient_defect=flow_force_gradient_defect(wf),
        bounds=tuple(bounds),
        crest_angle=crest_angle(wf),
        passed=passed,
    )
    if not passed:
        failed = [name for name in diagnostics.failures() if name in gate.mandatory]
        logger.info("certification failed: %s", ", ".join(failed))
    return diagnostics


def certify_many(
    fields: Sequence[HeightField],
    gate: GateConfig | None = None,
    *,
    max_workers: int | None = None,
) -> list[WaveDiagnostics]:
    """Certify independent fields in parallel, preserving order."""
    return map_parallel(lambda f: certify(f, None, gate), list(fields), max_workers=max_workers)
