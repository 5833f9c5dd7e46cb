import logging

from fastapi import APIRouter, HTTPException

from app.config import settings
from app.exceptions import ToolkitError
from app.io import to_jsonable
from app.schemas import ValidationReport
from app.validation import ValidationMode, validate

logger = logging.getLogger(__name__)

router = APIRouter()


@router.post("/{mode}", response_model=ValidationReport)
def run_validation(mode: ValidationMode):
    """Run one acceptance mode with the service configuration"""
    try:
        report = validate(mode, settings)
    except ToolkitError as exc:
        logger.error(f"Validation {mode.value} failed: {exc}")
        raise HTTPException(status_code=400, detail=str(exc))
    return to_jsonable(report)
