"""Lazy vorticity-model registry for crestline.

Vorticity kinds are loaded on demand using functools.cache for thread-safe
memoization of the model classes.

**Design Philosophy:**

1. **Zero startup cost**: no model module is imported at package load time
2. **O(1) lookup**: pre-computed, case-insensitive alias table
3. **Single class object**: functools.cache returns the same class per kind

**Architecture:**

- `LazySpec`: where a class lives, plus its aliases; shared with the formatter registry
- `alias_table` / `resolve_alias`: case-insensitive alias lookup
- `_get_class_by_canonical`: cached import of the model class

**Common Mistakes:**

```python
# ❌ WRONG: Importing a model module by its file name
from crestline.vorticity.constant import ConstantVorticity
model = ConstantVorticity.from_config(config)   # bypasses alias resolution

# ✅ CORRECT: Go through the registry (or streamflow.build_vorticity_model)
model = get_vorticity_class(config.kind).from_config(config)
```

**Adding New Kinds:**

Create a module in `crestline/vorticity/` with a frozen dataclass subclassing
`VorticityModel` and a `from_config` classmethod, then add an entry below.

**See Also:**

- `crestline.vorticity._base`: Base class and contract
- `crestline._formatter_registry`: Same pattern for report formatters
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cache
from importlib import import_module
from typing import TYPE_CHECKING, cast

if TYPE_CHECKING:
    from collections.abc import Mapping

    from crestline.vorticity._base import VorticityModel

__all__ = ["get_vorticity_class", "list_vorticity_kinds", "supports_vorticity_kind"]


@dataclass(frozen=True, slots=True)
class LazySpec:
    """Where a lazily imported class lives.

    Attributes:
        module: Full module path (e.g., 'crestline.vorticity.constant').
        class_name: Name of the class in the module.
        aliases: Alternative names for lookup.
    """

    module: str
    class_name: str
    aliases: tuple[str, ...] = ()

    def load(self) -> object:
        """Import the module and return the class."""
        return getattr(import_module(self.module), self.class_name)


def alias_table(specs: Mapping[str, LazySpec]) -> dict[str, str]:
    """Map every canonical name and alias to the canonical name."""
    table: dict[str, str] = {}
    for name, spec in specs.items():
        table[name] = name
        for alias in spec.aliases:
            table[alias] = name
    return table


def resolve_alias(table: Mapping[str, str], name: str, what: str) -> str:
    """Resolve a name or alias, case-insensitively, to its canonical form.

    Raises:
        LookupError: If the name is not registered.
    """
    key = name.strip().lower()
    if key in table:
        return table[key]
    supported = sorted(set(table.values()))
    raise LookupError(f"Unknown {what}: {name!r}. Supported: {supported}")


_VORTICITY_SPECS: dict[str, LazySpec] = {
    "zero": LazySpec(
        "crestline.vorticity.zero",
        "ZeroVorticity",
        aliases=("irrotational", "none"),
    ),
    "constant": LazySpec(
        "crestline.vorticity.constant",
        "ConstantVorticity",
        aliases=("uniform",),
    ),
    "linear": LazySpec(
        "crestline.vorticity.linear",
        "LinearVorticity",
        aliases=("affine",),
    ),
    "tabulated": LazySpec(
        "crestline.vorticity.tabulated",
        "TabulatedVorticity",
        aliases=("table", "samples"),
    ),
}

_ALIAS_TO_NAME = alias_table(_VORTICITY_SPECS)
_SORTED_KINDS: list[str] = sorted(_VORTICITY_SPECS)


def get_vorticity_class(name: str) -> type[VorticityModel]:
    """Get a vorticity model class by name or alias.

    Args:
        name: Kind name or alias (e.g., 'zero', 'irrotational', 'table').

    Returns:
        The model class; build instances with its `from_config` classmethod.

    Raises:
        LookupError: If the kind is not supported.

    Example:
        >>> get_vorticity_class("irrotational").kind
        'zero'
    """
    return _get_class_by_canonical(resolve_alias(_ALIAS_TO_NAME, name, "vorticity kind"))


@cache
def _get_class_by_canonical(canonical: str) -> type[VorticityModel]:
    """Internal cached loader, keyed by canonical name."""
    return cast("type[VorticityModel]", _VORTICITY_SPECS[canonical].load())


def list_vorticity_kinds() -> list[str]:
    """List canonical vorticity kind names, sorted."""
    return _SORTED_KINDS.copy()


def supports_vorticity_kind(name: str) -> bool:
    """Check whether a kind name or alias is registered."""
    return name.strip().lower() in _ALIAS_TO_NAME
