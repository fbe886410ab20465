"""Constant vorticity: ω ≡ b, Ω(p) = b·p."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, ClassVar

import numpy as np

from crestline._types import OmegaClass
from crestline.vorticity._base import VorticityModel

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, NDArray

    from crestline._config import VorticityConfig

__all__ = ["ConstantVorticity"]


@dataclass(frozen=True, slots=True)
class ConstantVorticity(VorticityModel):
    """ω(p) = b.

    For b > 0 the maximum of 2Ω sits at the surface (s0 = √(2b)); for b <= 0
    it sits at the bottom and s0 = 0.
    """

    kind: ClassVar[str] = "constant"

    b: float = 0.0
    holder_gamma: float = 0.5

    @classmethod
    def from_config(cls, config: VorticityConfig) -> ConstantVorticity:
        return cls(b=float(config.b), holder_gamma=config.holder_gamma)

    def omega(self, p: ArrayLike) -> NDArray[np.float64]:
        return np.full_like(np.asarray(p, dtype=float), self.b)

    def Omega(self, p: ArrayLike) -> NDArray[np.float64]:  # noqa: N802
        return self.b * np.asarray(p, dtype=float)

    @property
    def omega_class(self) -> OmegaClass:
        if self.b == 0.0:
            return OmegaClass.ZERO
        return OmegaClass.NONNEGATIVE if self.b > 0.0 else OmegaClass.GENERAL

    def peak(self) -> tuple[float, float]:
        return (2.0 * self.b, 1.0) if self.b > 0.0 else (0.0, 0.0)

    def minimum(self) -> float:
        return self.b

    def describe(self) -> dict[str, object]:
        return {"kind": self.kind, "b": self.b, "holder_gamma": self.holder_gamma}
