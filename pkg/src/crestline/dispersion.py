"""Bifurcation onset: the dispersion eigenproblem at the subcritical stream.

Linearising the height-function system at a stream H(p; s) along the even
mode φ(p)cos q gives the Sturm–Liouville problem

    −(φ'/H_p³)' + λ²φ/H_p = 0,   φ(0) = 0,   φ'(1) = H_p³(1) φ(1).

For a subcritical stream there is exactly one λ₀ > 0 solving it; that λ₀ is
where the Stokes branch leaves the laminar family.

**Shooting:**

The ODE is integrated as a first-order system in (φ, φ'/H_p³) with
`scipy.integrate.solve_ivp` (DOP853, adaptive), starting from φ(0) = 0,
φ'(0) = 1. The boundary residual at p = 1, normalised by the solution size,
is negative as λ → 0 for every subcritical stream and positive for large λ.
A geometric scan over (1e−6, λ_max) brackets the sign change and `brentq`
polishes it.

**Common Mistakes:**

```python
# ❌ WRONG: Shooting from the supercritical stream
dispersion_eigenvalue(regime.supercritical)   # raises NoBifurcationError

# ✅ CORRECT: Waves bifurcate from s_−(r)
dispersion_eigenvalue(regime.subcritical)
```

**See Also:**

- `crestline.streamflow`: The stream being perturbed
- `crestline.continuation.start_branch`: Uses the seed as predictor
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from crestline._errors import ConvergenceError, NoBifurcationError

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, NDArray

    from crestline.streamflow import StreamSolution

__all__ = ["BifurcationSeed", "dispersion_eigenvalue", "boundary_residual", "kernel_mode"]

logger = logging.getLogger(__name__)

LAMBDA_MIN = 1e-6
LAMBDA_MAX = 100.0
SCAN_POINTS = 64
DEFAULT_P_POINTS = 257


@dataclass(frozen=True, slots=True)
class BifurcationSeed:
    """Onset wavenumber and eigenfunction of a stream.

    Attributes:
        lambda0: Bifurcation wavenumber (> 0).
        phi0: Eigenfunction on `p_grid`, with phi0[0] = 0 and phi0[-1] = 1.
        p_grid: Sample points in [0, 1].
        stream: The subcritical stream it was computed from.
    """

    lambda0: float
    phi0: NDArray[np.float64]
    p_grid: NDArray[np.float64]
    stream: StreamSolution

    def __post_init__(self) -> None:
        for name in ("phi0", "p_grid"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    def phi(self, p: ArrayLike) -> NDArray[np.float64]:
        """φ₀ interpolated at arbitrary p ∈ [0, 1]."""
        return np.asarray(CubicSpline(self.p_grid, self.phi0)(np.asarray(p, dtype=float)))

    def to_dict(self) -> dict[str, object]:
        return {"lambda0": self.lambda0, "phi0": self.phi0, "p_grid": self.p_grid}


def _integrate(
    stream: StreamSolution,
    lam: float,
    p_eval: NDArray[np.float64] | None,
    rtol: float,
    atol: float,
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Integrate (φ, φ'/H_p³) over [0, 1]; returns (y1, y2) at `p_eval` or p = 1."""
    lam2 = lam * lam

    def rhs(p: float, y: NDArray[np.float64]) -> list[float]:
        hp = float(stream.H_p(p))
        return [hp**3 * y[1], lam2 * y[0] / hp]

    y0 = [0.0, float(stream.H_p(0.0)) ** -3]
    sol = solve_ivp(
        rhs, (0.0, 1.0), y0, method="DOP853", rtol=rtol, atol=atol,
        t_eval=p_eval,
    )
    if sol.status < 0:
        raise ConvergenceError(f"shooting at lambda={lam!r} failed: {sol.message}",
                               iterations=int(sol.nfev), residual_norm=math.nan)
    return sol.y[0], sol.y[1]


def boundary_residual(
    stream: StreamSolution, lam: float, *, rtol: float = 1e-12, atol: float = 1e-14
) -> float:
    """Scaled residual (φ'/H_p³ − φ)/(|φ| + |φ'/H_p³|) at p = 1 for trial λ.

    The scaling keeps the function bounded, so overflowing trials count as
    positive.
    """
    y1, y2 = _integrate(stream, lam, None, rtol, atol)
    a, b = float(y1[-1]), float(y2[-1])
    scale = abs(a) + abs(b)
    if not (math.isfinite(scale) and scale > 0.0):
        return 1.0
    return (b - a) / scale


def dispersion_eigenvalue(
    stream: StreamSolution,
    *,
    p_grid: ArrayLike | None = None,
    rtol: float = 1e-12,
    atol: float = 1e-14,
    lambda_max: float = LAMBDA_MAX,
) -> BifurcationSeed:
    """Solve the dispersion problem by shooting.

    Args:
        stream: The subcritical stream s_−(r).
        p_grid: Where to sample φ₀; default 257 uniform points.
        rtol: Relative tolerance of the ODE integration.
        atol: Absolute tolerance of the ODE integration.
        lambda_max: Upper end of the λ search.

    Returns:
        The seed, with φ₀ normalised to φ₀(1) = 1.

    Raises:
        NoBifurcationError: If the boundary residual has no sign change on
            (1e−6, lambda_max), which happens for supercritical streams.

    Example:
        >>> from crestline.streamflow import build_vorticity_model, conjugate_streams
        >>> reg = conjugate_streams(build_vorticity_model("zero"), 2.0)
        >>> seed = dispersion_eigenvalue(reg.subcritical)
        >>> abs(math.tanh(seed.lambda0 / reg.s_minus) - seed.lambda0 * reg.s_minus**2) < 1e-8
        True
    """
    grid = (
        np.linspace(0.0, 1.0, DEFAULT_P_POINTS)
        if p_grid is None
        else np.asarray(p_grid, dtype=float)
    )

    def f(lam: float) -> float:
        return boundary_residual(stream, lam, rtol=rtol, atol=atol)

    trials = np.geomspace(LAMBDA_MIN, lambda_max, SCAN_POINTS)
    previous_lam, previous = float(trials[0]), f(float(trials[0]))
    bracket: tuple[float, float] | None = None
    for lam in trials[1:]:
        value = f(float(lam))
        if previous < 0.0 <= value:
            bracket = (previous_lam, float(lam))
            break
        previous_lam, previous = float(lam), value
    if bracket is None:
        raise NoBifurcationError(
            f"no bifurcation point: boundary residual keeps its sign on "
            f"({LAMBDA_MIN}, {lambda_max}) for s = {stream.s!r}"
        )
    logger.debug("dispersion bracket (%r, %r) for s=%r", *bracket, stream.s)
    lambda0 = float(brentq(f, *bracket, xtol=1e-14, rtol=4 * np.finfo(float).eps))

    y1, _ = _integrate(stream, lambda0, grid, rtol, atol)
    phi0 = y1 / y1[-1]
    logger.info("onset lambda0=%r (Lambda0=%r) at s=%r", lambda0, 2 * math.pi / lambda0,
                stream.s)
    return BifurcationSeed(lambda0=lambda0, phi0=phi0, p_grid=grid, stream=stream)


def kernel_mode(
    seed: BifurcationSeed, q: ArrayLike, p: ArrayLike | None = None
) -> NDArray[np.float64]:
    """Tangent of the branch at onset, w(q, p) = φ₀(p)·cos q.

    Args:
        seed: Dispersion result.
        q: Horizontal grid.
        p: Vertical grid; defaults to the seed's own samples.

    Returns:
        Array of shape (len(q), len(p)).
    """
    phi = seed.phi0 if p is None else seed.phi(p)
    return np.outer(np.cos(np.asarray(q, dtype=float)), phi)
