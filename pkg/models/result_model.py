from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, Field


class VoronoiWeights(BaseModel):
    weights: list[float]
    method: str


class DistortionEstimate(BaseModel):
    """
    Distortion D_{K,μ}(x) with the quantization error e = √D.

    `std_error` is the Monte-Carlo standard error of `value`; it is zero for the
    exact methods.
    """
    value: float
    error: float
    std_error: float = 0.0
    method: str


class TridiagonalMatrix(BaseModel):
    diag: list[float]
    off: list[float]

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.off, 1) + np.diag(self.off, -1)

    def row_sums(self) -> np.ndarray:
        d = np.asarray(self.diag, dtype=float)
        off = np.asarray(self.off, dtype=float)
        sums = d.copy()
        sums[:-1] += off
        sums[1:] += off
        return sums


class PdCertificate(BaseModel):
    positive_definite: bool
    leading_minors: list[float]
    row_excess: list[float]
    lambda_star: float


class HessianReport(BaseModel):
    matrix: list[list[float]]
    certificate: PdCertificate | None = None
    fd_discrepancy: float | None = None
    boundary_flag: bool = False


class TransportResult(BaseModel):
    distance: float = Field(ge=0)
    p: int
    method: Literal["quantile1d", "sorted", "assignment", "gaussian-closed-form"]
    error_bound: float = 0.0


class BoundReport(BaseModel):
    """
    One bound evaluation. `applicable` is "asymptotic" for bounds stated only as K or n grows.
    """
    name: str
    measured: float | None = None
    measured_std_error: float | None = None
    bound: float
    slack: float | None = None
    inputs: dict[str, Any] = {}
    applicable: bool | Literal["asymptotic"] = True


class ScaleEstimates(BaseModel):
    r1: float
    r1_std_error: float = 0.0
    rn: float
    rn_std_error: float = 0.0
    r2n: float
    r2n_std_error: float = 0.0
    rho_hat: float
    e_star_hat: float
    m2: float
    q: float = 3.0
    M_q: float
    sigma_q: float


class RadiusReport(BaseModel):
    kind: Literal["hyper-exponential", "polynomial"]
    value: float
    exact_1d_factor: float | None = None
    inputs: dict[str, Any] = {}
