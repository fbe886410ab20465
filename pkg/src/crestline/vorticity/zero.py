"""Irrotational flow: ω ≡ 0."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, ClassVar

import numpy as np

from crestline._types import OmegaClass
from crestline.vorticity._base import VorticityModel

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, NDArray

    from crestline._config import VorticityConfig

__all__ = ["ZeroVorticity"]


@dataclass(frozen=True, slots=True)
class ZeroVorticity(VorticityModel):
    """ω(p) = 0, Ω(p) = 0.

    Example:
        >>> ZeroVorticity().Omega(0.7)
        array(0.)
    """

    kind: ClassVar[str] = "zero"

    holder_gamma: float = 0.5

    @classmethod
    def from_config(cls, config: VorticityConfig) -> ZeroVorticity:
        return cls(holder_gamma=config.holder_gamma)

    def omega(self, p: ArrayLike) -> NDArray[np.float64]:
        return np.zeros_like(np.asarray(p, dtype=float))

    def Omega(self, p: ArrayLike) -> NDArray[np.float64]:  # noqa: N802
        return np.zeros_like(np.asarray(p, dtype=float))

    @property
    def omega_class(self) -> OmegaClass:
        return OmegaClass.ZERO

    def peak(self) -> tuple[float, float]:
        return 0.0, 0.0

    def minimum(self) -> float:
        return 0.0

    def describe(self) -> dict[str, object]:
        return {"kind": self.kind, "holder_gamma": self.holder_gamma}
