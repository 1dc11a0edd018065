from typing import Literal

from pydantic import BaseModel, Field, field_validator

from models.solver_model import SolverSetting

SCHEMA_VERSION = 1

EXPERIMENTS = (
    "consistency",
    "perf-vs-n",
    "thm21-slack",
    "thm22-distance",
    "thm42-gaussian",
    "uniform-closed-form",
)


class ExperimentConfig(BaseModel):
    experiment: Literal[EXPERIMENTS]
    distribution: str
    K: list[int] = Field(min_length=1)
    n: list[int] = Field(min_length=1)
    seeds: int = Field(ge=1)
    base_seed: int | None = None  # None: QLAB_SEED
    solver: SolverSetting = SolverSetting()
    output: str | None = None
    workers: int | None = Field(default=None, ge=1)
    cell_timeout: float | None = Field(default=None, gt=0)
    reference_restarts: int | None = Field(default=None, ge=1)
    gamma: float = 1.0  # γ_K of the asymptotic bounds
    max_norm_reps: int = Field(default=100, ge=1)  # replications behind r_1, r_2n

    @field_validator('K')
    @classmethod
    def check_levels(cls, values):
        if any(k < 1 for k in values):
            raise ValueError("every K must be at least 1")
        return values

    @field_validator('n')
    @classmethod
    def check_sizes(cls, values):
        if any(v < 1 for v in values):
            raise ValueError("every n must be at least 1")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("n must be strictly increasing")
        return values


class ResultRow(BaseModel):
    """One (K, n, seed) cell. Quantities an experiment does not produce are None."""
    experiment: str
    distribution: str
    K: int
    n: int
    seed: int
    performance: float | None = None
    w2: float | None = None
    w2_surrogate: bool = False
    bound: float | None = None
    slack: float | None = None
    quantizer_distance: float | None = None
    bound_asymptotic: float | None = None
    status: Literal["ok", "timeout", "pre-asymptotic"] = "ok"
    wall_time: float = 0.0
