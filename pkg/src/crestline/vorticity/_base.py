"""Base class for vorticity functions.

A vorticity model supplies ω(p) and its primitive Ω(p) = ∫₀^p ω on the
stream-function interval [0, 1], plus the metadata the solvers branch on.

**Design Philosophy:**

Subclasses are frozen, slotted dataclasses: a model is a value, safe to
share between threads and cheap to compare. Every method accepts scalars or
numpy arrays and returns the same shape.

**Contract for subclasses:**

- `omega(p)` and `Omega(p)` vectorised, with `Omega(0) == 0` exactly
- `kind` class attribute matching the registry name
- `describe()` returning JSON-ready parameters that rebuild the model

The generic `peak()` and `minimum()` scan a dense grid and polish with a
bounded scalar minimiser; closed-form models override them.

**See Also:**

- `crestline._registry`: Resolves kind names to model classes
- `crestline.streamflow`: Main consumer (stream solutions, critical constants)
"""

from __future__ import annotations

from typing import TYPE_CHECKING, ClassVar

import numpy as np
from scipy.optimize import minimize_scalar

from crestline._types import OmegaClass

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, NDArray

__all__ = ["VorticityModel"]

_SCAN_POINTS = 2049


class VorticityModel:
    """Base class for ω(p), Ω(p) pairs on [0, 1]."""

    __slots__ = ()

    kind: ClassVar[str] = ""

    # Declared Hölder exponent of ω'; every subclass stores it as a field.
    holder_gamma: float

    def omega(self, p: ArrayLike) -> NDArray[np.float64]:
        raise NotImplementedError

    def Omega(self, p: ArrayLike) -> NDArray[np.float64]:  # noqa: N802
        raise NotImplementedError

    def describe(self) -> dict[str, object]:
        raise NotImplementedError

    @property
    def omega_class(self) -> OmegaClass:
        """Sign class inferred from the function itself."""
        samples = self.omega(np.linspace(0.0, 1.0, _SCAN_POINTS))
        if np.all(samples == 0.0):
            return OmegaClass.ZERO
        if self.minimum() >= 0.0:
            return OmegaClass.NONNEGATIVE
        return OmegaClass.GENERAL

    def peak(self) -> tuple[float, float]:
        """Maximum of 2Ω on [0, 1] and a point where it is attained.

        Returns:
            (max 2Ω, argmax). Ties resolve to the smallest p.
        """
        grid = np.linspace(0.0, 1.0, _SCAN_POINTS)
        values = 2.0 * np.asarray(self.Omega(grid))
        k = int(np.argmax(values))
        best_p, best = float(grid[k]), float(values[k])
        if 0 < k < _SCAN_POINTS - 1:
            res = minimize_scalar(
                lambda x: -2.0 * float(self.Omega(x)),
                bounds=(grid[k - 1], grid[k + 1]),
                method="bounded",
                options={"xatol": 1e-14},
            )
            if -res.fun > best:
                best_p, best = float(res.x), float(-res.fun)
        return max(best, 0.0), best_p

    def minimum(self) -> float:
        """Minimum of ω on [0, 1]."""
        grid = np.linspace(0.0, 1.0, _SCAN_POINTS)
        values = np.asarray(self.omega(grid))
        k = int(np.argmin(values))
        best = float(values[k])
        if 0 < k < _SCAN_POINTS - 1:
            res = minimize_scalar(
                lambda x: float(self.omega(x)),
                bounds=(grid[k - 1], grid[k + 1]),
                method="bounded",
                options={"xatol": 1e-14},
            )
            best = min(best, float(res.fun))
        return best
