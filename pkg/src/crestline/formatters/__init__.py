"""Report formatters for CLI output.

**Available Formatters:**

- `JsonReportFormatter`: Indented JSON (the on-disk format)
- `TerminalReportFormatter`: Human-readable listing with ANSI marks

Most callers go through `crestline._formatter_registry.get_formatter`.
"""

from crestline.formatters.report import JsonReportFormatter
from crestline.formatters.terminal import TerminalReportFormatter

__all__ = ["JsonReportFormatter", "TerminalReportFormatter"]
