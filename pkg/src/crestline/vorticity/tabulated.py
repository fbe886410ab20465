"""Tabulated vorticity: ω from samples, interpolated by a clamped cubic spline.

The primitive Ω is the spline's exact antiderivative, so Ω(0) = 0 holds to
the last bit and Ω' = ω holds to rounding.

**Sample requirements:**

- at least 4 samples, all finite
- p strictly increasing, first sample at p = 0, last at p = 1
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, ClassVar

import numpy as np
from scipy.interpolate import CubicSpline, PPoly

from crestline._errors import ConfigError
from crestline.vorticity._base import VorticityModel

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, NDArray

    from crestline._config import VorticityConfig

__all__ = ["TabulatedVorticity"]

_MIN_SAMPLES = 4


@dataclass(frozen=True, slots=True)
class TabulatedVorticity(VorticityModel):
    """ω given at sample points.

    Raises:
        ConfigError: If the samples are non-finite, too few, unsorted, or do
            not span [0, 1].
    """

    kind: ClassVar[str] = "tabulated"

    p_samples: tuple[float, ...]
    omega_samples: tuple[float, ...]
    holder_gamma: float = 0.5
    _spline: CubicSpline = field(init=False, repr=False, compare=False)
    _primitive: PPoly = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        p = np.asarray(self.p_samples, dtype=float)
        w = np.asarray(self.omega_samples, dtype=float)
        if p.shape != w.shape or p.ndim != 1:
            raise ConfigError("omega_table", "p and omega columns differ in length")
        if p.size < _MIN_SAMPLES:
            raise ConfigError("omega_table", f"need at least {_MIN_SAMPLES} samples")
        if not (np.all(np.isfinite(p)) and np.all(np.isfinite(w))):
            raise ConfigError("omega_table", "samples must be finite")
        if np.any(np.diff(p) <= 0.0):
            raise ConfigError("omega_table", "p must be strictly increasing")
        if p[0] != 0.0 or p[-1] != 1.0:
            raise ConfigError("omega_table", "samples must start at p=0 and end at p=1")
        spline = CubicSpline(p, w, bc_type="clamped")
        object.__setattr__(self, "_spline", spline)
        object.__setattr__(self, "_primitive", spline.antiderivative())

    @classmethod
    def from_config(cls, config: VorticityConfig) -> TabulatedVorticity:
        p, w = config.load_samples()
        return cls(
            p_samples=tuple(float(x) for x in p),
            omega_samples=tuple(float(x) for x in w),
            holder_gamma=config.holder_gamma,
        )

    def omega(self, p: ArrayLike) -> NDArray[np.float64]:
        return np.asarray(self._spline(np.asarray(p, dtype=float)), dtype=float)

    def Omega(self, p: ArrayLike) -> NDArray[np.float64]:  # noqa: N802
        return np.asarray(self._primitive(np.asarray(p, dtype=float)), dtype=float)

    def describe(self) -> dict[str, object]:
        return {
            "kind": self.kind,
            "p": list(self.p_samples),
            "omega": list(self.omega_samples),
            "holder_gamma": self.holder_gamma,
        }
