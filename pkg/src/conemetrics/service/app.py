"""HTTP front end wrapping the library; the CLI is a thin client of this app."""

from __future__ import annotations

import math

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..campaigns import CampaignConfig, run_campaign, tightness_sweep
from ..cones import ConePoint
from ..embedding import embed_points, verify_embedding
from ..errors import ConeGeometryError
from ..geodesics import make_geodesic
from .schemas import (
    CampaignRequest,
    CampaignResponse,
    DistanceRequest,
    DistanceResponse,
    EmbedRequest,
    EmbedResponse,
    GeodesicRequest,
    GeodesicResponse,
    TightnessRequest,
    TightnessResponse,
)


def create_app() -> FastAPI:
    app = FastAPI(title="conemetrics", version="0.1.0")

    @app.exception_handler(ConeGeometryError)
    async def _geometry_error(request: Request, exc: ConeGeometryError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(ValueError)
    async def _value_error(request: Request, exc: ValueError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/distance", response_model=DistanceResponse)
    def distance_endpoint(req: DistanceRequest):
        cone = req.cone.build()
        x = ConePoint(cone, req.x)
        y = ConePoint(cone, req.y)
        sup_xy = cone.sup_bound(x.coords, y.coords)
        sup_yx = cone.sup_bound(y.coords, x.coords)
        same_part = math.isfinite(sup_xy) and math.isfinite(sup_yx)
        if not same_part:
            return DistanceResponse(
                thompson=None, hilbert=None, order_sup_xy=None, order_sup_yx=None,
                same_part=False,
            )
        return DistanceResponse(
            thompson=math.log(max(sup_xy, sup_yx)),
            hilbert=math.log(sup_xy) + math.log(sup_yx),
            order_sup_xy=sup_xy,
            order_sup_yx=sup_yx,
            same_part=True,
        )

    @app.post("/geodesic", response_model=GeodesicResponse)
    def geodesic_endpoint(req: GeodesicRequest):
        cone = req.cone.build()
        g = make_geodesic(ConePoint(cone, req.x), ConePoint(cone, req.y))
        points = [g.evaluate(s).coords.tolist() for s in req.s_values]
        return GeodesicResponse(
            alpha=g.alpha, beta=g.beta, degenerate=g.degenerate, points=points
        )

    @app.post("/campaign", response_model=CampaignResponse)
    def campaign_endpoint(req: CampaignRequest):
        config = CampaignConfig(
            cone=req.cone.build(),
            metric=req.metric,
            s=req.s,
            R=req.R,
            n_samples=req.n_samples,
            seed=req.seed,
            tol=req.tol,
            span_2d=req.span_2d,
            include_trials=req.include_trials,
        )
        report = run_campaign(req.kind, config)
        return CampaignResponse(**report.to_dict())

    @app.post("/tightness", response_model=TightnessResponse)
    def tightness_endpoint(req: TightnessRequest):
        report = tightness_sweep(req.metric, req.R, req.s, req.n_steps)
        return TightnessResponse(**report.to_dict())

    @app.post("/embed", response_model=EmbedResponse)
    def embed_endpoint(req: EmbedRequest):
        cone = req.cone.build()
        points = [ConePoint(cone, coords) for coords in req.points]
        emb = embed_points(points)
        report = verify_embedding(emb)
        data = emb.to_dict()
        return EmbedResponse(
            pairs=data["pairs"],
            betas=data["betas"],
            functionals=data["functionals"],
            images=data["images"],
            low_accuracy=data["low_accuracy"],
            notes=data["notes"],
            report=report.to_dict(),
        )

    return app


app = create_app()
