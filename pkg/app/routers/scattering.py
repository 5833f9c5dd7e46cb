import logging
from typing import List

from fastapi import APIRouter, HTTPException

from app.config import settings
from app.exceptions import ToolkitError
from app.io import pair, unpair
from app.scattering import InitialDatum, ResidueForm, reflection, scattering_coefficients
from app.schemas import CoefficientRow, CoefficientsRequest

logger = logging.getLogger(__name__)

router = APIRouter()


@router.post("/coefficients", response_model=List[CoefficientRow])
def get_coefficients(request: CoefficientsRequest):
    """Scattering matrix entries and reflection coefficients at the requested points of Sigma"""
    try:
        datum = InitialDatum(x=request.datum.x, q=request.datum.q, sigma=request.datum.sigma,
                             q_minus=request.datum.q_minus)
        rows = []
        for value in request.z:
            z = unpair(value)
            coefficients = scattering_coefficients(datum, z, settings)
            rho, rho_tilde = reflection(datum, z, settings)
            if isinstance(coefficients, ResidueForm):
                rows.append(CoefficientRow(z=pair(z), s_pm=pair(coefficients.s_pm), rho=pair(rho),
                                           rho_tilde=pair(rho_tilde)))
                continue
            s11, s12, s21, s22 = coefficients
            rows.append(CoefficientRow(z=pair(z), s11=pair(s11), s12=pair(s12), s21=pair(s21), s22=pair(s22),
                                       rho=pair(rho), rho_tilde=pair(rho_tilde)))
    except ToolkitError as exc:
        logger.error(f"Scattering coefficients failed: {exc}")
        raise HTTPException(status_code=400, detail=str(exc))
    return rows
