"""Report formatters, looked up by name.

Uses the lazy-spec helpers of `crestline._registry`: a formatter module is
imported on first use and one instance per format is shared.

**Available Formatters:**

- `json`: Indented JSON, identical to the files the CLI writes
- `terminal`: Aligned key/value listing with ANSI pass/fail marks
  (aliases `ansi`, `console`, `text`)

**Common Mistakes:**

```python
# ❌ WRONG: Instantiating per call
JsonReportFormatter().format(report)

# ✅ CORRECT: The registry already caches
get_formatter("json").format(report)
```
"""

from __future__ import annotations

from functools import cache
from typing import TYPE_CHECKING, cast

from crestline._registry import LazySpec, alias_table, resolve_alias

if TYPE_CHECKING:
    from crestline._protocol import ReportFormatter

__all__ = ["get_formatter", "list_formatters", "supports_formatter"]


_FORMATTERS: dict[str, LazySpec] = {
    "json": LazySpec("crestline.formatters.report", "JsonReportFormatter"),
    "terminal": LazySpec(
        "crestline.formatters.terminal",
        "TerminalReportFormatter",
        aliases=("ansi", "console", "text"),
    ),
}

_NAMES = alias_table(_FORMATTERS)


def get_formatter(name: str) -> ReportFormatter:
    """Shared formatter instance for a format name or alias.

    Raises:
        LookupError: If the formatter is not supported.
    """
    return _instance(resolve_alias(_NAMES, name, "formatter"))


@cache
def _instance(canonical: str) -> ReportFormatter:
    formatter_class = cast("type[ReportFormatter]", _FORMATTERS[canonical].load())
    return formatter_class()


def list_formatters() -> list[str]:
    """Canonical formatter names, sorted."""
    return sorted(_FORMATTERS)


def supports_formatter(name: str) -> bool:
    return name.strip().lower() in _NAMES
