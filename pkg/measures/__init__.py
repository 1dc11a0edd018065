from measures.base_measure import (
    AnalyticMeasure1D,
    Exponential1D,
    Gaussian1D,
    Laplace1D,
    Measure,
    Uniform1D,
)
from measures.empirical import EmpiricalMeasure
from measures.multivariate import GaussianNd, UniformBox

__all__ = [
    "AnalyticMeasure1D",
    "EmpiricalMeasure",
    "Exponential1D",
    "Gaussian1D",
    "GaussianNd",
    "Laplace1D",
    "Measure",
    "Uniform1D",
    "UniformBox",
]
