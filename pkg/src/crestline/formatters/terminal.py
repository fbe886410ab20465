"""Terminal report formatter.

Renders a report mapping as aligned ``key  value`` lines. Bound records (any
list of mappings with a ``pass`` field) get one line each, prefixed with a
green PASS or red FAIL mark.

**Thread-Safety:**

Frozen dataclass; color codes are module constants.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass

from crestline._serialize import to_jsonable

__all__ = ["TerminalReportFormatter"]

_RESET = "\033[0m"
_GREEN = "\033[32m"
_RED = "\033[31m"
_BOLD = "\033[1m"


def _scalar(value: object) -> str:
    value = to_jsonable(value)
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


@dataclass(frozen=True, slots=True)
class TerminalReportFormatter:
    """Aligned text with ANSI pass/fail marks.

    Attributes:
        name: Registry name.
        color: Emit ANSI codes; off gives plain ``PASS``/``FAIL``.
    """

    name: str = "terminal"
    color: bool = True

    def _mark(self, passed: bool) -> str:
        word = "PASS" if passed else "FAIL"
        if not self.color:
            return word
        return f"{_GREEN if passed else _RED}{word}{_RESET}"

    def _lines(self, payload: Mapping[str, object], indent: str) -> list[str]:
        width = max((len(str(k)) for k in payload), default=0)
        out: list[str] = []
        for key, value in payload.items():
            if isinstance(value, Mapping):
                out.append(f"{indent}{key}:")
                out.extend(self._lines(value, indent + "  "))
            elif isinstance(value, list) and value and all(
                isinstance(v, Mapping) and "pass" in v for v in value
            ):
                out.append(f"{indent}{key}:")
                for rec in value:
                    margin = _scalar(rec.get("margin"))
                    out.append(
                        f"{indent}  {self._mark(bool(rec['pass']))} "
                        f"{rec.get('name', '?')} (margin {margin})"
                    )
            elif isinstance(value, list):
                shown = ", ".join(_scalar(v) for v in value[:8])
                suffix = ", ..." if len(value) > 8 else ""
                out.append(f"{indent}{str(key).ljust(width)}  [{shown}{suffix}]")
            elif isinstance(value, bool) and key in ("passed", "pass", "diagnostics_pass"):
                out.append(f"{indent}{str(key).ljust(width)}  {self._mark(value)}")
            else:
                out.append(f"{indent}{str(key).ljust(width)}  {_scalar(value)}")
        return out

    def format(self, payload: Mapping[str, object]) -> str:
        title = str(payload.get("title", "")) if "title" in payload else ""
        body = {k: v for k, v in payload.items() if k != "title"}
        lines = self._lines(body, "")
        if title:
            head = f"{_BOLD}{title}{_RESET}" if self.color else title
            lines.insert(0, head)
        return "\n".join(lines) + "\n"
