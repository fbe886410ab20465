"""Crestline: steady periodic water waves with vorticity at fixed Bernoulli constant.

Computes the laminar streams a vorticity function admits at a given
Bernoulli constant r, locates where small-amplitude waves bifurcate from the
subcritical one, follows that branch with pseudo-arclength continuation on a
height-function discretisation, certifies every computed wave against
Bernoulli's law and the a priori bounds, and labels how the branch ends.

**Public API:**

- `conjugate_streams()`: The pair s_− < s_+ and their depths for one r
- `dispersion_eigenvalue()`: Onset wavenumber λ₀ and eigenfunction
- `start_branch()` / `continue_branch()`: Follow the Stokes branch
- `certify()`: Bernoulli residual, flow force, bounds and crest angle
- `classify_branch()`: ExtremeStokes, Solitary, ExtremeSolitary, Breaking, Undecided
- `regime_many()` / `certify_many()`: Thread-pool batches

**Example:**

```python
>>> from crestline import build_vorticity_model, conjugate_streams
>>> regime = conjugate_streams(build_vorticity_model("zero"), 2.0)
>>> round(regime.s_minus, 3), round(regime.s_plus, 3)
(0.539, 1.675)
```

**Architecture:**

    VorticityModel → streamflow (H, d, R, s_±) → dispersion (λ₀, φ₀)
        → heightfield (residual, Jacobian, Newton) → continuation
        → diagnostics (certify) → classify_branch

Key Components:

- `crestline._registry`: Lazy vorticity-model loading with aliases
- `crestline._config`: INI run configuration
- `crestline.heightfield`: Discrete system on the strip q ∈ [0, 2π), p ∈ [0, 1]
- `crestline.formatters`: JSON and terminal report output

**Thread-Safety:**

Models, regimes, fields and diagnostics are frozen; solvers keep their state
in locals. Independent r values and independent fields can be processed in
parallel threads. This module declares itself safe for free-threaded Python
via the `_Py_mod_gil` attribute.

**See Also:**

- `crestline.cli`: The `crestline` command
"""

from __future__ import annotations

from crestline._config import GateConfig, GridConfig, RunConfig, StepPolicy, load_config
from crestline._errors import (
    BranchLogError,
    ConfigError,
    ConvergenceError,
    CrestlineError,
    NoBifurcationError,
    ParseError,
    QuadratureError,
    RegimeError,
    SolverError,
    StagnationError,
    VerificationError,
)
from crestline._formatter_registry import get_formatter, list_formatters, supports_formatter
from crestline._protocol import BranchSample, ReportFormatter
from crestline._registry import get_vorticity_class, list_vorticity_kinds, supports_vorticity_kind
from crestline._types import BoundRecord, BranchLabel, GridKind, HaltReason, OmegaClass
from crestline.continuation import (
    BranchOutcome,
    BranchPoint,
    classify_branch,
    continue_branch,
    start_branch,
)
from crestline.diagnostics import WaveDiagnostics, certify, certify_many
from crestline.dispersion import BifurcationSeed, dispersion_eigenvalue
from crestline.heightfield import HeightField, StripGrid, read_field, write_field
from crestline.streamflow import (
    FlowRegime,
    StreamSolution,
    build_vorticity_model,
    conjugate_streams,
    critical_parameters,
    regime_many,
    stream_solution,
)
from crestline.vorticity import VorticityModel

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # Types
    "OmegaClass",
    "GridKind",
    "BranchLabel",
    "HaltReason",
    "BoundRecord",
    "VorticityModel",
    "StreamSolution",
    "FlowRegime",
    "BifurcationSeed",
    "StripGrid",
    "HeightField",
    "BranchPoint",
    "BranchOutcome",
    "WaveDiagnostics",
    # Protocols
    "BranchSample",
    "ReportFormatter",
    # Configuration
    "GridConfig",
    "StepPolicy",
    "GateConfig",
    "RunConfig",
    "load_config",
    # Registry
    "get_vorticity_class",
    "list_vorticity_kinds",
    "supports_vorticity_kind",
    "get_formatter",
    "list_formatters",
    "supports_formatter",
    # Errors
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
    # Operations
    "build_vorticity_model",
    "stream_solution",
    "critical_parameters",
    "conjugate_streams",
    "dispersion_eigenvalue",
    "start_branch",
    "continue_branch",
    "certify",
    "classify_branch",
    "read_field",
    "write_field",
    # Parallel
    "regime_many",
    "certify_many",
]


def __getattr__(name: str) -> object:
    """Module-level attribute hook for the free-threading declaration."""
    if name == "_Py_mod_gil":
        # 0 = Py_MOD_GIL_NOT_USED
        return 0
    raise AttributeError(f"module 'crestline' has no attribute {name!r}")
