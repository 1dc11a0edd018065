from typing import Literal

from pydantic import BaseModel, model_validator


class TailDescriptor(BaseModel):
    """
    Tail parameters of a density, trusted as given.

    kind "hyper-exponential": f(ξ) = τ|ξ|^c exp(-ϑ|ξ|^κ) for |ξ| ≥ A.
    kind "polynomial":        f(ξ) = τ|ξ|^(-c) (log|ξ|)^β for |ξ| ≥ A.
    """
    kind: Literal["hyper-exponential", "polynomial"]
    theta: float | None = None
    kappa: float | None = None
    c: float = 0.0
    tau: float = 1.0
    beta: float = 0.0
    A: float = 1.0

    @model_validator(mode="after")
    def check_parameters(self):
        if self.kind == "hyper-exponential":
            if self.theta is None or self.kappa is None or self.theta <= 0 or self.kappa <= 0:
                raise ValueError("hyper-exponential tail needs theta > 0 and kappa > 0")
        return self


class CellMoments(BaseModel):
    mass: float
    first: float
    second: float

    def __add__(self, other: "CellMoments") -> "CellMoments":
        return CellMoments(
            mass=self.mass + other.mass,
            first=self.first + other.first,
            second=self.second + other.second,
        )
