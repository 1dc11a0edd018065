from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

from quantizer.grid import Quantizer


class SolverSetting(BaseModel):
    method: Literal["lloyd", "newton", "clvq"] = "lloyd"
    init: str = "quantile"  # quantile | sample-pp | file:<grid.csv>
    tol: float | None = None  # None: 1e-10 for exact 1D, 1e-8 otherwise
    max_iter: int = Field(default=10_000, ge=0)
    restarts: int = Field(default=1, ge=1)
    clvq_steps: int = Field(default=100_000, ge=1)
    clvq_a: float = Field(default=1.0, gt=0)
    clvq_b: float = Field(default=100.0, ge=0)
    mc_samples: int | None = Field(default=None, ge=1)
    multid_method: Literal["montecarlo", "quadrature2d"] = "montecarlo"
    seed: int | None = None


class SolveResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    quantizer: Quantizer
    distortion: float
    iterations: int
    converged: bool
    gradient_norm: float
    method: str
    history: list[float] = []

    @property
    def quantization_error(self) -> float:
        return self.distortion ** 0.5
