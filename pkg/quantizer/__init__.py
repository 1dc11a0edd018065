from quantizer.grid import Quantizer, as_quantizer
from quantizer.geometry import (
    Method,
    assign,
    cell_statistics,
    default_method,
    distortion,
    gradient,
    nearest,
    voronoi_weights,
)

__all__ = [
    "Method",
    "Quantizer",
    "as_quantizer",
    "assign",
    "cell_statistics",
    "default_method",
    "distortion",
    "gradient",
    "nearest",
    "voronoi_weights",
]
