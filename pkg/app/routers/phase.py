import logging

from fastapi import APIRouter, HTTPException, Query

from app.exceptions import ToolkitError
from app.io import pair
from app.schemas import PhaseResponse, SignatureResponse
from app.spectral import signature_grid, stationary_points

logger = logging.getLogger(__name__)

router = APIRouter()

MAX_GRID = 401


@router.get("", response_model=PhaseResponse)
async def get_phase(xi: float = Query(...)):
    """Stationary points of theta and the region of the ray x = xi t"""
    try:
        geometry = stationary_points(xi)
    except ToolkitError as exc:
        logger.error(f"Phase geometry failed: {exc}")
        raise HTTPException(status_code=400, detail=str(exc))
    return PhaseResponse(xi=geometry.xi, region=geometry.region, points=[pair(p) for p in geometry.points])


@router.get("/signature", response_model=SignatureResponse)
async def get_signature(
    xi: float = Query(...),
    t: float = Query(1.0, gt=0),
    nx: int = Query(41, ge=2, le=MAX_GRID),
    ny: int = Query(41, ge=2, le=MAX_GRID),
    x0: float = -3.0,
    x1: float = 3.0,
    y0: float = -3.0,
    y1: float = 3.0,
):
    """Sign of Re(2it theta) on a rectangular grid"""
    if x1 <= x0 or y1 <= y0:
        raise HTTPException(status_code=400, detail="window must satisfy x0 < x1 and y0 < y1")
    re, im, signs = signature_grid(xi, t, nx, ny, (x0, x1, y0, y1))
    return SignatureResponse(xi=xi, t=t, re=re.tolist(), im=im.tolist(), sign=signs.astype(int).tolist())
