"""JSON report formatter."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

from crestline._serialize import dumps_json

if TYPE_CHECKING:
    from collections.abc import Mapping

__all__ = ["JsonReportFormatter"]


@dataclass(frozen=True, slots=True)
class JsonReportFormatter:
    """Indented JSON; infinities become the string "inf"."""

    name: str = "json"

    def format(self, payload: Mapping[str, object]) -> str:
        return dumps_json(dict(payload)) + "\n"
