import logging

import numpy as np
from fastapi import APIRouter, HTTPException

from app.exceptions import ToolkitError
from app.io import pair
from app.pde import residual
from app.schemas import FieldRequest, FieldResponse, ResidualRequest, ResidualResponse, SeedIn
from app.soliton import SolitonField, SolitonSeed

logger = logging.getLogger(__name__)

router = APIRouter()


def build_seed(seed: SeedIn) -> SolitonSeed:
    if seed.omega is not None:
        return SolitonSeed.imaginary_pair(seed.omega, q_minus=seed.q_minus)
    return SolitonSeed.from_dict(seed.payload())


@router.post("/field", response_model=FieldResponse)
async def get_field(request: FieldRequest):
    """Reflectionless field q(x, t) of a seed"""
    try:
        q = SolitonField(build_seed(request.seed)).q(request.x, request.t)
    except ToolkitError as exc:
        logger.error(f"Soliton field failed: {exc}")
        raise HTTPException(status_code=400, detail=str(exc))
    return FieldResponse(t=request.t, x=request.x, q=[pair(v) for v in q])


@router.post("/residual", response_model=ResidualResponse)
async def get_residual(request: ResidualRequest):
    """Central-difference residual of the equation for the seed's field"""
    try:
        seed = build_seed(request.seed)
        values = residual(SolitonField(seed).q, request.x, request.t, request.h, seed.sigma)
    except ToolkitError as exc:
        logger.error(f"Soliton residual failed: {exc}")
        raise HTTPException(status_code=400, detail=str(exc))
    return ResidualResponse(t=request.t, h=request.h, x=request.x, residual=values.tolist(),
                            max_residual=float(np.max(values)))
