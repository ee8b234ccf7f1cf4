"""Request and response models for the HTTP service."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field

from ..cones import Cone, cone_from_dict


class ConeModel(BaseModel):
    kind: Literal["orthant", "lorentz", "sympd"]
    n: int = Field(ge=1)

    def build(self) -> Cone:
        return cone_from_dict({"kind": self.kind, "n": self.n})


class DistanceRequest(BaseModel):
    cone: ConeModel
    x: list[float]
    y: list[float]


class DistanceResponse(BaseModel):
    thompson: Optional[float]
    hilbert: Optional[float]
    order_sup_xy: Optional[float]
    order_sup_yx: Optional[float]
    same_part: bool


class GeodesicRequest(BaseModel):
    cone: ConeModel
    x: list[float]
    y: list[float]
    s_values: list[float] = Field(min_length=1)


class GeodesicResponse(BaseModel):
    alpha: float
    beta: float
    degenerate: bool
    points: list[list[float]]


class CampaignRequest(BaseModel):
    kind: Literal[
        "theorem1", "theorem2", "busemann", "semihyperbolic", "opnorm-agreement", "embedding"
    ]
    cone: ConeModel
    metric: Literal["thompson", "hilbert"] = "thompson"
    s: float = 0.5
    R: float = 1.0
    n_samples: int = 1000
    seed: int = 0
    tol: Optional[float] = None
    span_2d: bool = False
    include_trials: bool = True


class CampaignResponse(BaseModel):
    kind: str
    config: dict
    aggregate: dict
    trials: Optional[list[dict]]
    assertable: bool
    timestamp: str
    runtime_seconds: float


class TightnessRequest(BaseModel):
    metric: Literal["thompson", "hilbert"]
    R: float
    s: float
    n_steps: int = 7


class TightnessResponse(BaseModel):
    metric: str
    R: float
    s: float
    bound: float
    achieved: float
    gap: float
    samples: list[dict]


class EmbedRequest(BaseModel):
    cone: ConeModel
    points: list[list[float]] = Field(min_length=2)


class EmbedResponse(BaseModel):
    pairs: list[list[int]]
    betas: list[list[float]]
    functionals: list[list[float]]
    images: list[list[float]]
    low_accuracy: bool
    notes: dict
    report: dict
