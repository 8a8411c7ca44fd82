"""Exact-arithmetic toolkit for rank-one nonsingular group actions built
from nested finite subset systems (copy sets, shapes, stage weights)."""

from .cfcore import (
    CFParams,
    CFPoint,
    NeedsDeeperTail,
    act,
    cylinder_measure,
    rn_cocycle,
    rn_derivative,
    reduce_params,
    telescope,
    validate_params,
)
from . import catalog
from .measures import FinMeasure, UniformMeasure
from .odometers import OdometerSpec

__all__ = [
    "CFParams",
    "CFPoint",
    "FinMeasure",
    "NeedsDeeperTail",
    "OdometerSpec",
    "UniformMeasure",
    "act",
    "catalog",
    "cylinder_measure",
    "reduce_params",
    "rn_cocycle",
    "rn_derivative",
    "telescope",
    "validate_params",
]
__version__ = "0.1.0"
