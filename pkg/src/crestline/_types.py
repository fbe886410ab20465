"""Core enumerations and small records for crestline.

Thread-safe, immutable types shared by every module.

Design Philosophy:
    Types in this module are deliberately tiny:

    1. **Immutable**: enumerations are StrEnums, records are NamedTuples
    2. **Serializable**: every value round-trips through JSON as a plain string
       or a plain list without custom encoders
    3. **Hashable**: records can be used as dict keys and in sets

What Goes Here:
    ✅ DO include:
        - Labels that appear in files written by the CLI (branch labels,
          halt reasons, grid kinds)
        - Records that several modules exchange (bound records)

    ❌ DON'T include:
        - Anything carrying numpy arrays (those live next to their solver)
        - Configuration (see `crestline._config`)

See Also:
    crestline.diagnostics: Produces BoundRecord values
    crestline.continuation: Produces BranchLabel and HaltReason values
"""

from enum import StrEnum
from typing import NamedTuple

__all__ = ["OmegaClass", "GridKind", "BranchLabel", "HaltReason", "BoundRecord"]


class OmegaClass(StrEnum):
    """Sign class of a vorticity function on [0, 1].

    The class decides which bounds apply: several inequalities hold only for
    irrotational flow, others for every nonnegative vorticity.

    Usage:
        >>> OmegaClass.NONNEGATIVE.admits_breaking
        False
    """

    ZERO = "zero"
    NONNEGATIVE = "nonnegative"
    GENERAL = "general"

    @property
    def is_nonnegative(self) -> bool:
        """True for zero and nonnegative vorticity."""
        return self is not OmegaClass.GENERAL

    @property
    def admits_breaking(self) -> bool:
        """Whether a branch may end in overturning before stagnation."""
        return self is OmegaClass.GENERAL


class GridKind(StrEnum):
    """Vertical node distribution of the fixed strip."""

    UNIFORM = "uniform"
    STRETCHED = "stretched"


class BranchLabel(StrEnum):
    """Endpoint alternatives of a Stokes-wave branch at fixed r."""

    EXTREME_STOKES = "ExtremeStokes"
    SOLITARY = "Solitary"
    EXTREME_SOLITARY = "ExtremeSolitary"
    BREAKING = "Breaking"
    UNDECIDED = "Undecided"


class HaltReason(StrEnum):
    """Why a continuation run stopped."""

    GAP_MIN = "gap_min"
    LAMBDA_MIN = "lambda_min"
    SLOPE_MAX = "slope_max"
    STEP_UNDERFLOW = "step_underflow"
    GATE_FAILURE = "gate_failure"
    UNDERRESOLVED = "crest_underresolved"
    MAX_POINTS = "max_points"


class BoundRecord(NamedTuple):
    """Outcome of one certified inequality on one wave.

    Attributes:
        name: Stable identifier (e.g. 'speed_head_upper').
        anchor: The inequality being certified, written out.
        margin: Signed distance to violation; negative means violated.
        passed: Whether the inequality holds within the gate tolerances.
        constant: Constant used by the check when it needs one, else None.
    """

    name: str
    anchor: str
    margin: float
    passed: bool
    constant: float | None = None

    def to_dict(self) -> dict[str, object]:
        """Report form with the key names used in diagnostics JSON."""
        return {
            "name": self.name,
            "anchor": self.anchor,
            "margin": self.margin,
            "pass": self.passed,
            "constant": self.constant,
        }
