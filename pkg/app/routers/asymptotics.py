import logging
from dataclasses import asdict

from fastapi import APIRouter, HTTPException

from app.asymptotics import AsymptoticPipeline, error_exponent
from app.config import settings
from app.exceptions import ToolkitError
from app.io import pair
from app.scattering import ScatteringData
from app.schemas import ExponentRequest, ExponentResponse, ProfileRequest, ProfileResponse, ProfileRow
from app.soliton import imaginary_pair_spectrum
from app.validation import synthetic_profile

logger = logging.getLogger(__name__)

router = APIRouter()


@router.post("/exponent", response_model=ExponentResponse)
async def get_exponent(request: ExponentRequest):
    """Remainder exponent for the given Im nu values"""
    return ExponentResponse(**asdict(error_exponent(request.im_nu)))


@router.post("/profile", response_model=ProfileResponse)
def get_profile(request: ProfileRequest):
    """Long-time expansion along x = xi t for a rational reflection profile"""
    try:
        discrete = imaginary_pair_spectrum(request.omega) if request.omega is not None else []
        if request.profile_phase is None:
            data = ScatteringData.reflectionless_data(discrete, request.sigma, request.q_minus, settings)
        else:
            data = ScatteringData.from_profile(lambda z: synthetic_profile(z, request.profile_phase),
                                               request.sigma, request.q_minus, discrete, settings)
        pipeline = AsymptoticPipeline(data, request.xi, settings, request.delta0)
        expansions = [pipeline.expand(t) for t in request.t]
    except ToolkitError as exc:
        logger.error(f"Asymptotic profile failed: {exc}")
        raise HTTPException(status_code=400, detail=str(exc))
    rows = [ProfileRow(t=e.t, x=e.x, q=pair(e.value), leading=pair(e.leading), envelope=e.envelope)
            for e in expansions]
    return ProfileResponse(xi=request.xi, region=pipeline.geometry.region, exponent=pipeline.exponent,
                           branch=pipeline.report.branch, rows=rows)
