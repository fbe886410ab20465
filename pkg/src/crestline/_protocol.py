"""Protocol definitions for crestline.

Structural contracts shared by the continuation driver, the classifier and
the CLI. Anything with the right attributes works; no inheritance needed.

**Example (Custom Formatter):**

```python
class YamlReportFormatter:
    name = "yaml"

    def format(self, payload):
        return "\\n".join(f"{k}: {v}" for k, v in payload.items())
```

**Thread-Safety:**

Implementations must be immutable after construction: the registry hands the
same cached instance to every caller.

**See Also:**

- `crestline._formatter_registry`: How formatters are looked up
- `crestline.continuation.classify_branch`: Consumes `BranchSample`
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Protocol, runtime_checkable

if TYPE_CHECKING:
    from collections.abc import Mapping

__all__ = ["BranchSample", "ReportFormatter"]


@runtime_checkable
class BranchSample(Protocol):
    """One point of a continuation branch, as seen by the classifier.

    Both live `BranchPoint`s and `BranchRecord`s parsed from a log satisfy it.
    """

    @property
    def stagnation_gap(self) -> float: ...

    @property
    def Lambda(self) -> float: ...  # noqa: N802

    @property
    def max_slope(self) -> float: ...


@runtime_checkable
class ReportFormatter(Protocol):
    """Renders a JSON-compatible report mapping as text."""

    name: str

    def format(self, payload: Mapping[str, object]) -> str:
        """Render the payload; the result ends with a newline."""
        ...
