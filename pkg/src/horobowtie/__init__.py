"""Horospherical products of trees and hyperbolic planes: metrics, geodesic
shapes, horoball length bounds and boundary cells."""

from .horoproduct import (
    HoroPoint,
    HoroSpace,
    build_path,
    coarse_distance,
    dl_space,
    parse_horo_point,
    sol_space,
    treebolic_space,
)
from .ledger import ConstantsLedger, threshold

__all__ = [
    "ConstantsLedger",
    "HoroPoint",
    "HoroSpace",
    "build_path",
    "coarse_distance",
    "dl_space",
    "parse_horo_point",
    "sol_space",
    "threshold",
    "treebolic_space",
]

__version__ = "0.1.0"
