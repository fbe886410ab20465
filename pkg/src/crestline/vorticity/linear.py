"""Affine vorticity: ω(p) = b + a·p."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, ClassVar

import numpy as np

from crestline._types import OmegaClass
from crestline.vorticity._base import VorticityModel

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, NDArray

    from crestline._config import VorticityConfig

__all__ = ["LinearVorticity"]


@dataclass(frozen=True, slots=True)
class LinearVorticity(VorticityModel):
    """ω(p) = b + a·p, Ω(p) = b·p + a·p²/2.

    Example:
        >>> float(LinearVorticity(a=2.0).Omega(0.5))
        0.25
    """

    kind: ClassVar[str] = "linear"

    a: float = 0.0
    b: float = 0.0
    holder_gamma: float = 0.5

    @classmethod
    def from_config(cls, config: VorticityConfig) -> LinearVorticity:
        return cls(a=float(config.a), b=float(config.b), holder_gamma=config.holder_gamma)

    def omega(self, p: ArrayLike) -> NDArray[np.float64]:
        return self.b + self.a * np.asarray(p, dtype=float)

    def Omega(self, p: ArrayLike) -> NDArray[np.float64]:  # noqa: N802
        x = np.asarray(p, dtype=float)
        return x * (self.b + 0.5 * self.a * x)

    @property
    def omega_class(self) -> OmegaClass:
        if self.a == 0.0 and self.b == 0.0:
            return OmegaClass.ZERO
        return OmegaClass.NONNEGATIVE if self.minimum() >= 0.0 else OmegaClass.GENERAL

    def peak(self) -> tuple[float, float]:
        candidates = [0.0, 1.0]
        if self.a < 0.0:
            stationary = -self.b / self.a
            if 0.0 < stationary < 1.0:
                candidates.append(stationary)
        values = [2.0 * float(self.Omega(p)) for p in candidates]
        k = int(np.argmax(values))
        return max(values[k], 0.0), candidates[k]

    def minimum(self) -> float:
        return min(self.b, self.b + self.a)

    def describe(self) -> dict[str, object]:
        return {"kind": self.kind, "a": self.a, "b": self.b, "holder_gamma": self.holder_gamma}
