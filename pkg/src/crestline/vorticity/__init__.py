"""Vorticity functions ω(p) with their primitives Ω(p).

Models are loaded lazily via `crestline._registry`; import the classes
directly only when constructing one by hand.
"""

from crestline.vorticity._base import VorticityModel

__all__ = ["VorticityModel"]
