"""Exception hierarchy for crestline.

Every exception subclasses both `CrestlineError` and the builtin a caller
would naturally catch, so `except ValueError` keeps working for bad input and
`except RuntimeError` for solver trouble. Each class carries the process exit
status the CLI maps it to.

Exit status contract:

- 1: a verification check failed
- 2: the (vorticity, r) regime was rejected
- 3: a file or configuration could not be parsed
- 4: a numerical solver failed

**Common Mistakes:**

```python
# ❌ WRONG: Matching on message text
except CrestlineError as exc:
    if "R_c" in str(exc): ...

# ✅ CORRECT: Catch the class
except RegimeError: ...
```
"""

from __future__ import annotations

__all__ = [
    "CrestlineError",
    "VerificationError",
    "RegimeError",
    "NoBifurcationError",
    "ParseError",
    "ConfigError",
    "BranchLogError",
    "SolverError",
    "QuadratureError",
    "ConvergenceError",
    "StagnationError",
]


class CrestlineError(Exception):
    """Base class for all crestline errors."""

    exit_code: int = 4


class VerificationError(CrestlineError):
    """A stored wave failed a mandatory check."""

    exit_code = 1


class RegimeError(CrestlineError, ValueError):
    """The Bernoulli constant lies outside the admissible window (Rc, d0)."""

    exit_code = 2


class NoBifurcationError(RegimeError):
    """The dispersion residual never changes sign: the stream is not subcritical."""


class ParseError(CrestlineError, ValueError):
    """A data file is missing, truncated, or malformed."""

    exit_code = 3


class ConfigError(ParseError):
    """A configuration key is missing, unknown, or has an invalid value."""

    def __init__(self, key: str, message: str) -> None:
        super().__init__(f"config key {key!r}: {message}")
        self.key = key


class BranchLogError(ParseError):
    """A branch log violates its own contract (e.g. mixed Bernoulli constants)."""


class SolverError(CrestlineError, RuntimeError):
    """A numerical procedure did not deliver a trustworthy result."""

    exit_code = 4


class QuadratureError(SolverError):
    """Adaptive quadrature did not reach its tolerance."""


class ConvergenceError(SolverError):
    """Newton's method ran out of iterations."""

    def __init__(self, message: str, *, iterations: int, residual_norm: float) -> None:
        super().__init__(f"{message} (iterations={iterations}, residual={residual_norm:.3e})")
        self.iterations = iterations
        self.residual_norm = residual_norm


class StagnationError(SolverError):
    """The discrete height function lost monotonicity in p (h_p <= 0)."""

    def __init__(self, message: str, *, cell: tuple[int, int] | None = None) -> None:
        where = f" at cell (j={cell[0]}, i={cell[1]})" if cell is not None else ""
        super().__init__(f"{message}{where}")
        self.cell = cell
