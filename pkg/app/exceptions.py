from typing import Optional


class ToolkitError(ValueError):
    """Base class for numerical and domain failures of the toolkit"""

    module = "core"

    def __init__(self, message: str, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics

    def report(self) -> dict:
        return {"module": self.module, "error": str(self), **{
            key: _plain(value) for key, value in self.diagnostics.items()
        }}


def _plain(value):
    if isinstance(value, complex):
        return [value.real, value.imag]
    return value


class DomainError(ToolkitError):
    module = "spectral_core"


class IntegrationError(ToolkitError):
    module = "scattering"

    def __init__(self, message: str, z: Optional[complex] = None, **diagnostics):
        super().__init__(message, z=z, **diagnostics)
        self.z = z


class SpectralSingularityError(ToolkitError):
    module = "scattering"


class SpectrumCountError(ToolkitError):
    module = "scattering"


class QuadratureError(ToolkitError):
    module = "rh_transforms"


class PoleHitError(ToolkitError):
    module = "rh_transforms"


class SingularSystemError(ToolkitError):
    module = "soliton_solver"


class GammaPoleError(ToolkitError):
    module = "asymptotics"


class OutOfScopeRegionError(ToolkitError):
    module = "asymptotics"


class BlowUpError(ToolkitError):
    module = "pde_oracle"
