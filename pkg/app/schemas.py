from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

from app.soliton import PoleKind
from app.spectral import Region
from app.validation import ValidationMode

ComplexPair = Tuple[float, float]


# Phase Schemas
class PhaseResponse(BaseModel):
    xi: float
    region: Region
    points: List[ComplexPair]


class SignatureResponse(BaseModel):
    xi: float
    t: float
    re: List[float]
    im: List[float]
    sign: List[int]


# Scattering Schemas
class InitialDatumIn(BaseModel):
    x: List[float] = Field(..., min_length=4)
    q: List[float] = Field(..., min_length=4)
    sigma: int = -1
    q_minus: float = 1.0

    @field_validator("sigma")
    @classmethod
    def check_sigma(cls, value: int) -> int:
        if value not in (1, -1):
            raise ValueError("sigma must be +1 or -1")
        return value


class CoefficientsRequest(BaseModel):
    datum: InitialDatumIn
    z: List[ComplexPair] = Field(..., min_length=1)


class CoefficientRow(BaseModel):
    z: ComplexPair
    s11: Optional[ComplexPair] = None
    s12: Optional[ComplexPair] = None
    s21: Optional[ComplexPair] = None
    s22: Optional[ComplexPair] = None
    s_pm: Optional[ComplexPair] = Field(default=None, description="Residue of s11 when z is at +-i")
    rho: ComplexPair
    rho_tilde: ComplexPair


# Soliton Schemas
class PoleIn(BaseModel):
    point: ComplexPair
    constant: ComplexPair
    kind: PoleKind


class SeedIn(BaseModel):
    poles: List[PoleIn] = []
    sigma: int = -1
    q_minus: float = 1.0
    q_eff: Optional[float] = None
    scale: ComplexPair = (1.0, 0.0)
    omega: Optional[float] = Field(default=None, description="Build the imaginary pair {i omega, -i/omega} instead")

    def payload(self) -> Dict:
        data = self.model_dump(mode="json", exclude={"omega"})
        if self.q_eff is None:
            data["q_eff"] = self.q_minus
        return data


class FieldRequest(BaseModel):
    seed: SeedIn
    x: List[float] = Field(..., min_length=1)
    t: float = 0.0


class FieldResponse(BaseModel):
    t: float
    x: List[float]
    q: List[ComplexPair]


class ResidualRequest(FieldRequest):
    h: float = Field(default=1e-2, gt=0)


class ResidualResponse(BaseModel):
    t: float
    h: float
    x: List[float]
    residual: List[float]
    max_residual: float


# Asymptotics Schemas
class ExponentRequest(BaseModel):
    im_nu: List[float] = Field(..., min_length=1)


class ExponentResponse(BaseModel):
    value: Optional[float]
    branch: Optional[int]
    boundary: bool
    note: str


class ProfileRequest(BaseModel):
    """Rational reflection profile exp(i phase) z^2 / (z^4 + 4) or reflectionless data"""
    xi: float
    t: List[float] = Field(..., min_length=1)
    sigma: int = -1
    q_minus: float = 1.0
    profile_phase: Optional[float] = 0.5
    omega: Optional[float] = 2.0
    delta0: Optional[float] = None


class ProfileRow(BaseModel):
    t: float
    x: float
    q: ComplexPair
    leading: ComplexPair
    envelope: float


class ProfileResponse(BaseModel):
    xi: float
    region: Region
    exponent: float
    branch: Optional[int]
    rows: List[ProfileRow]


# Validation Schemas
class CheckOut(BaseModel):
    name: str
    passed: bool
    measured: float
    threshold: float


class ValidationReport(BaseModel):
    model_config = ConfigDict(extra="allow")

    mode: ValidationMode
    passed: bool
    checks: List[CheckOut]
