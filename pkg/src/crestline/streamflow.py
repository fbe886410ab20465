"""Laminar stream solutions and the critical constants of a flow regime.

A stream solution is a flow with a flat surface. In height-function form it is

    H(p; s) = ∫₀^p (s² − 2Ω(p'))^{−1/2} dp',

with depth d(s) = H(1; s) and Bernoulli constant R(s) = ½s² − Ω(1) + d(s).
Everything else in the package is measured against these flows: waves
bifurcate from the subcritical stream s_−(r), the general bottom-speed bound
compares against streams of the wave's extreme depths, and the flow-force
diagram plots the two conjugate streams.

**Critical constants** (per vorticity model):

- s0: smallest admissible s, s0² = max 2Ω on [0, 1]
- sc: minimiser of R, the root of ∫₀¹ (s² − 2Ω)^{−3/2} dp = 1
- Rc = R(sc): no wave exists at r <= Rc
- d0, R0: depth and Bernoulli constant in the limit s → s0 (may be +∞)

**Numerics:**

All integrals use `scipy.integrate.quad` with absolute tolerance 1e−12 and
the maximiser of 2Ω passed as a breakpoint. The limit d0 is integrated at
s0 itself with a square-root endpoint weight; when ω vanishes at the
maximiser the integrand is not integrable and d0 = +∞. Roots are always
bracketed (`scipy.optimize.brentq`); R is monotone on either side of sc and d
is monotone everywhere, so brackets are reliable.

**Thread-Safety:**

Pure functions over frozen inputs. `critical_parameters` is memoised with
functools.cache, which is thread-safe.

**See Also:**

- `crestline.dispersion`: Bifurcation from the subcritical stream
- `crestline.diagnostics`: Uses `depth_inverse` for bottom-speed bounds
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cache
from typing import TYPE_CHECKING, Any, NamedTuple

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from crestline._config import VorticityConfig
from crestline._errors import ParseError, QuadratureError, RegimeError
from crestline._parallel import map_parallel
from crestline._registry import get_vorticity_class

if TYPE_CHECKING:
    from collections.abc import Callable, Mapping, Sequence

    from numpy.typing import ArrayLike, NDArray

    from crestline.vorticity._base import VorticityModel

__all__ = [
    "StreamSolution",
    "CriticalConstants",
    "FlowRegime",
    "build_vorticity_model",
    "model_from_description",
    "stream_solution",
    "depth",
    "bernoulli",
    "critical_parameters",
    "conjugate_streams",
    "depth_inverse",
    "stream_flow_force",
    "cusp_table",
    "regime_many",
]

logger = logging.getLogger(__name__)

QUAD_EPSABS = 1e-12
QUAD_EPSREL = 1e-12
QUAD_LIMIT = 200
INFINITE_DEPTH = 1e6
_ROOT_XTOL = 1e-15
_ROOT_RTOL = 4 * np.finfo(float).eps


def build_vorticity_model(spec: VorticityConfig | str) -> VorticityModel:
    """Build a vorticity model from its description.

    Args:
        spec: A VorticityConfig, or a bare kind name for parameter-free kinds.

    Returns:
        The model; its `omega_class` is inferred from the function.

    Raises:
        LookupError: Unknown kind.
        ConfigError: Invalid tabulated samples.

    Example:
        >>> float(build_vorticity_model(VorticityConfig("constant", b=1.0)).Omega(0.3))
        0.3
    """
    config = VorticityConfig(kind=spec) if isinstance(spec, str) else spec
    model = get_vorticity_class(config.kind).from_config(config)  # type: ignore[attr-defined]
    logger.debug("built vorticity model %s (%s)", model.describe(), model.omega_class)
    return model


def model_from_description(description: Mapping[str, Any]) -> VorticityModel:
    """Rebuild a model from the output of its `describe()`.

    Raises:
        ParseError: If the description lacks a kind or has bad parameters.
    """
    try:
        kind = str(description["kind"])
        samples = None
        if "p" in description:
            samples = (
                tuple(float(x) for x in description["p"]),
                tuple(float(x) for x in description["omega"]),
            )
        config = VorticityConfig(
            kind=kind,
            b=float(description.get("b", 0.0)),
            a=float(description.get("a", 0.0)),
            samples=samples,
            holder_gamma=float(description.get("holder_gamma", 0.5)),
        )
        return build_vorticity_model(config)
    except (KeyError, TypeError, ValueError, LookupError) as exc:
        raise ParseError(f"bad vorticity description {dict(description)!r}: {exc}") from exc


def _quad(f: Callable[[float], float], a: float, b: float, points: Sequence[float] = ()) -> float:
    inner = [x for x in points if a < x < b]
    result = quad(
        f, a, b, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=QUAD_LIMIT,
        points=inner or None, full_output=1,
    )
    value, abserr = float(result[0]), float(result[1])
    if len(result) > 3 and abserr > 1e3 * max(QUAD_EPSABS, QUAD_EPSREL * abs(value)):
        raise QuadratureError(f"quadrature on [{a}, {b}] did not converge: {result[3]}")
    return value


def _peak(model: VorticityModel) -> tuple[float, float]:
    two_omega_max, p_star = model.peak()
    return math.sqrt(two_omega_max), p_star


def _check_admissible(model: VorticityModel, s: float) -> None:
    s0, _ = _peak(model)
    if not (s > 0.0 and s * s > s0 * s0):
        raise RegimeError(f"stream parameter s = {s!r} requires s**2 > s0**2 with s0 = {s0!r}")


def _speed_squared(model: VorticityModel, s: float, p: ArrayLike) -> NDArray[np.float64]:
    return s * s - 2.0 * np.asarray(model.Omega(p), dtype=float)


def depth(model: VorticityModel, s: float) -> float:
    """Depth d(s) = ∫₀¹ (s² − 2Ω)^{−1/2} dp of the stream with bottom speed s."""
    _check_admissible(model, s)
    _, p_star = _peak(model)
    return _quad(lambda p: float(_speed_squared(model, s, p)) ** -0.5, 0.0, 1.0, [p_star])


def bernoulli(model: VorticityModel, s: float) -> float:
    """Bernoulli constant R(s) = ½s² − Ω(1) + d(s)."""
    return 0.5 * s * s - float(model.Omega(1.0)) + depth(model, s)


def _inverse_cube_moment(model: VorticityModel, s: float) -> float:
    _, p_star = _peak(model)
    return _quad(lambda p: float(_speed_squared(model, s, p)) ** -1.5, 0.0, 1.0, [p_star])


@dataclass(frozen=True, slots=True)
class StreamSolution:
    """A laminar flow with flat surface.

    Attributes:
        model: Vorticity model the stream belongs to.
        s: Bottom speed parameter (s² > s0²).
        depth: d(s) = H(1; s).
        bernoulli: R(s).
    """

    model: VorticityModel
    s: float
    depth: float
    bernoulli: float

    def H_p(self, p: ArrayLike) -> NDArray[np.float64]:  # noqa: N802
        """Closed-form vertical derivative (s² − 2Ω(p))^{−1/2}."""
        return _speed_squared(self.model, self.s, p) ** -0.5

    def H(self, p: ArrayLike) -> NDArray[np.float64]:  # noqa: N802
        """Profile H(p; s), accumulated interval by interval in increasing p."""
        x = np.asarray(p, dtype=float)
        flat = x.ravel()
        order = np.argsort(flat, kind="stable")
        _, p_star = _peak(self.model)
        out = np.empty_like(flat)
        total, previous = 0.0, 0.0
        for k in order:
            b = float(flat[k])
            if b > previous:
                total += _quad(lambda t: float(self.H_p(t)), previous, b, [p_star])
                previous = b
            out[k] = total
        return out.reshape(x.shape)

    profile_H = H

    def to_dict(self) -> dict[str, float]:
        return {"s": self.s, "depth": self.depth, "bernoulli": self.bernoulli}


def stream_solution(model: VorticityModel, s: float) -> StreamSolution:
    """Build the stream solution with bottom speed s.

    Raises:
        RegimeError: If s² <= s0².

    Example:
        >>> sol = stream_solution(build_vorticity_model("zero"), 2.0)
        >>> sol.depth, sol.bernoulli
        (0.5, 2.5)
    """
    d = depth(model, s)
    return StreamSolution(model=model, s=float(s), depth=d, bernoulli=bernoulli(model, s))


class CriticalConstants(NamedTuple):
    """Regime constants of one vorticity model."""

    s0: float
    sc: float
    Rc: float
    R0: float
    d0: float


def _limit_depth(model: VorticityModel, s0: float, p_star: float) -> float:
    """d(s0), integrating the square-root singularity at p_star exactly."""
    slope = abs(float(model.omega(p_star)))
    scale = max(1.0, abs(model.minimum()), abs(float(model.omega(p_star))))
    if slope < 1e-12 * scale:
        return math.inf
    limit = 1.0 / math.sqrt(2.0 * slope)

    def regular(p: float) -> float:
        gap = abs(p - p_star)
        if gap < 1e-12:
            return limit
        v = float(_speed_squared(model, s0, p))
        return math.sqrt(gap / v) if v > 0.0 else limit

    total = 0.0
    for a, b, wvar in ((0.0, p_star, (0.0, -0.5)), (p_star, 1.0, (-0.5, 0.0))):
        if b - a <= 0.0:
            continue
        value, _ = quad(
            regular, a, b, weight="alg", wvar=wvar,
            epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=QUAD_LIMIT,
        )
        total += float(value)
    return math.inf if total > INFINITE_DEPTH else total


@cache
def critical_parameters(model: VorticityModel) -> CriticalConstants:
    """Compute s0, sc, Rc, R0 and d0 for a vorticity model.

    sc is the root of g(s) = ∫₀¹ (s² − 2Ω)^{−3/2} dp − 1, which is strictly
    decreasing in s and tends to +∞ as s → s0.

    Raises:
        QuadratureError: If an integral fails to converge.

    Example:
        >>> c = critical_parameters(build_vorticity_model("zero"))
        >>> round(c.sc, 12), round(c.Rc, 12), c.d0
        (1.0, 1.5, inf)
    """
    s0, p_star = _peak(model)

    def g(s: float) -> float:
        return _inverse_cube_moment(model, s) - 1.0

    delta = 1e-3 * max(1.0, s0)
    lo = s0 + delta
    for _ in range(40):
        if g(lo) > 0.0:
            break
        delta *= 0.1
        lo = s0 + delta
    else:
        raise QuadratureError("could not bracket s_c from below")
    hi = max(2.0 * lo, 1.0)
    while g(hi) >= 0.0:
        hi *= 2.0
    sc = float(brentq(g, lo, hi, xtol=_ROOT_XTOL, rtol=_ROOT_RTOL))
    Rc = bernoulli(model, sc)

    d0 = _limit_depth(model, s0, p_star)
    R0 = 0.5 * s0 * s0 - float(model.Omega(1.0)) + d0 if math.isfinite(d0) else math.inf
    logger.info("critical constants: s0=%r sc=%r Rc=%r R0=%r d0=%r", s0, sc, Rc, R0, d0)
    return CriticalConstants(s0=s0, sc=sc, Rc=Rc, R0=R0, d0=d0)


@dataclass(frozen=True, slots=True)
class FlowRegime:
    """All critical constants for a (vorticity, r) pair.

    Attributes:
        model: Vorticity model.
        r: Bernoulli constant.
        s0, sc, Rc, R0, d0: Model constants (d0, R0 may be +∞).
        s_minus, s_plus: Roots of R(s) = r with s_minus < sc < s_plus.
        d_plus, d_minus: d(s_minus) and d(s_plus).
    """

    model: VorticityModel
    r: float
    s0: float
    sc: float
    Rc: float
    R0: float
    d0: float
    s_minus: float
    s_plus: float
    d_plus: float
    d_minus: float

    @property
    def subcritical(self) -> StreamSolution:
        """The stream the wave branch bifurcates from."""
        return StreamSolution(self.model, self.s_minus, self.d_plus, self.r)

    @property
    def supercritical(self) -> StreamSolution:
        return StreamSolution(self.model, self.s_plus, self.d_minus, self.r)

    def to_dict(self) -> dict[str, float]:
        return {
            "r": self.r,
            "s0": self.s0,
            "sc": self.sc,
            "Rc": self.Rc,
            "R0": self.R0,
            "d0": self.d0,
            "s_minus": self.s_minus,
            "s_plus": self.s_plus,
            "d_plus": self.d_plus,
            "d_minus": self.d_minus,
        }


def _lower_bracket(
    f: Callable[[float], float], s0: float, at_s0: float | None
) -> tuple[Callable[[float], float], float]:
    """Left end of a bracket just above s0 where f > 0.

    When the limit value at s0 is finite the bracket starts at s0 itself.
    """
    if at_s0 is not None:
        return (lambda s: at_s0 if s <= s0 else f(s)), s0
    delta = 1e-3 * max(1.0, s0)
    for _ in range(40):
        lo = s0 + delta
        if f(lo) > 0.0:
            return f, lo
        delta *= 0.1
    raise QuadratureError("could not bracket a root above s0")


def conjugate_streams(model: VorticityModel, r: float) -> FlowRegime:
    """Solve R(s) = r for the subcritical and supercritical streams.

    Raises:
        RegimeError: If r <= Rc (no non-laminar solution) or r >= d0.

    Example:
        >>> reg = conjugate_streams(build_vorticity_model("zero"), 2.0)
        >>> round(reg.s_minus, 3), round(reg.s_plus, 3)
        (0.539, 1.675)
    """
    crit = critical_parameters(model)
    if not r > crit.Rc:
        raise RegimeError(f"subcritical-regime error: r = {r!r} <= R_c = {crit.Rc!r}")
    if not r < crit.d0:
        raise RegimeError(f"regime rejected: r = {r!r} >= d0 = {crit.d0!r}")

    def f(s: float) -> float:
        return bernoulli(model, s) - r

    at_s0 = crit.R0 - r if math.isfinite(crit.R0) else None
    f_lo, lo = _lower_bracket(f, crit.s0, at_s0)
    s_minus = float(brentq(f_lo, lo, crit.sc, xtol=_ROOT_XTOL, rtol=_ROOT_RTOL))
    hi = 2.0 * crit.sc
    while f(hi) <= 0.0:
        hi *= 2.0
    s_plus = float(brentq(f, crit.sc, hi, xtol=_ROOT_XTOL, rtol=_ROOT_RTOL))

    regime = FlowRegime(
        model=model,
        r=float(r),
        s0=crit.s0,
        sc=crit.sc,
        Rc=crit.Rc,
        R0=crit.R0,
        d0=crit.d0,
        s_minus=s_minus,
        s_plus=s_plus,
        d_plus=depth(model, s_minus),
        d_minus=depth(model, s_plus),
    )
    logger.info("regime r=%r: s_-=%r s_+=%r d_+=%r d_-=%r", r, s_minus, s_plus,
                regime.d_plus, regime.d_minus)
    return regime


def depth_inverse(model: VorticityModel, d: float) -> float:
    """Bottom speed s of the stream with depth d, i.e. d⁻¹(d).

    Raises:
        RegimeError: If d <= 0 or d >= d0.
    """
    crit = critical_parameters(model)
    if not 0.0 < d < crit.d0:
        raise RegimeError(f"no stream of depth {d!r}: depths lie in (0, {crit.d0!r})")

    def f(s: float) -> float:
        return depth(model, s) - d

    at_s0 = crit.d0 - d if math.isfinite(crit.d0) else None
    f_lo, lo = _lower_bracket(f, crit.s0, at_s0)
    hi = max(2.0 * lo, 1.0)
    while f(hi) >= 0.0:
        hi *= 2.0
    return float(brentq(f_lo, lo, hi, xtol=_ROOT_XTOL, rtol=_ROOT_RTOL))


def stream_flow_force(model: VorticityModel, s: float, r: float) -> float:
    """Flow-force constant of the stream s measured at Bernoulli constant r.

    𝔽 = ∫₀¹ [½√(s² − 2Ω) + (Ω − Ω(1) + r)(s² − 2Ω)^{−1/2}] dp − ½d(s)²,
    which for ω = 0 is s/2 + r/s − 1/(2s²).
    """
    _check_admissible(model, s)
    _, p_star = _peak(model)
    omega_top = float(model.Omega(1.0))

    def integrand(p: float) -> float:
        v = float(_speed_squared(model, s, p))
        return 0.5 * math.sqrt(v) + (float(model.Omega(p)) - omega_top + r) / math.sqrt(v)

    d = depth(model, s)
    return _quad(integrand, 0.0, 1.0, [p_star]) - 0.5 * d * d


def cusp_table(
    model: VorticityModel, rs: Sequence[float], *, max_workers: int | None = None
) -> NDArray[np.float64]:
    """Flow force of both conjugate streams across Bernoulli constants.

    Returns:
        Array with columns (r, 𝔽 subcritical, 𝔽 supercritical), one row per r,
        in input order. Each r must lie in (Rc, d0).
    """

    def row(r: float) -> tuple[float, float, float]:
        regime = conjugate_streams(model, r)
        return (
            float(r),
            stream_flow_force(model, regime.s_minus, r),
            stream_flow_force(model, regime.s_plus, r),
        )

    rows = map_parallel(row, list(rs), max_workers=max_workers)
    return np.array(rows, dtype=float).reshape(len(rows), 3)


def regime_many(
    model: VorticityModel, rs: Sequence[float], *, max_workers: int | None = None
) -> list[FlowRegime]:
    """`conjugate_streams` for several Bernoulli constants, in input order.

    The first failing r raises its RegimeError.
    """
    return map_parallel(lambda r: conjugate_streams(model, r), list(rs), max_workers=max_workers)
