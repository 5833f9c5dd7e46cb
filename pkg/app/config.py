import json
from pathlib import Path

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings


class RunConfig(BaseSettings):
    # Quadrature settings
    quad_tol: float = Field(default=1e-10, env="QUAD_TOL")
    quad_limit: int = Field(default=200, env="QUAD_LIMIT")

    # ODE settings for the Jost solutions
    ode_rtol: float = Field(default=1e-10, env="ODE_RTOL")
    ode_atol: float = Field(default=1e-12, env="ODE_ATOL")
    ode_method: str = Field(default="DOP853", env="ODE_METHOD")

    # Root finding
    root_tol: float = Field(default=1e-12, env="ROOT_TOL")
    search_radius: float = Field(default=4.0, env="SEARCH_RADIUS")
    search_margin: float = Field(default=0.02, env="SEARCH_MARGIN")
    search_grid: int = Field(default=24, env="SEARCH_GRID")
    argument_nodes: int = Field(default=256, env="ARGUMENT_NODES")
    norming_window: float = Field(default=2.0, env="NORMING_WINDOW")

    # Contour sampling
    real_nodes: int = Field(default=512, env="REAL_NODES")
    circle_nodes: int = Field(default=256, env="CIRCLE_NODES")
    contour_cutoff: float = Field(default=8.0, env="CONTOUR_CUTOFF")

    # Grids for the PDE oracle
    window_half_width: float = Field(default=40.0, env="WINDOW_HALF_WIDTH")
    grid_step: float = Field(default=0.05, env="GRID_STEP")
    pde_scheme: str = Field(default="spectral", env="PDE_SCHEME")
    pde_dt: float = Field(default=1e-3, env="PDE_DT")

    # Steepest-descent geometry
    theta0: float = Field(default=0.2, env="THETA0")
    delta0_fraction: float = Field(default=0.1, env="DELTA0_FRACTION")
    delta0_floor: float = Field(default=1e-3, env="DELTA0_FLOOR")
    boundary_margin: float = Field(default=0.1, env="BOUNDARY_MARGIN")
    phase_hook: float = Field(default=0.0, env="PHASE_HOOK")

    # Runs and outputs
    seed: int = Field(default=20240607, env="SEED")
    threads: int = Field(default=1, env="THREADS")
    output_dir: str = Field(default="out", env="OUTPUT_DIR")

    # API settings
    api_title: str = Field(default="Nonlocal mKdV Scattering Toolkit", env="API_TITLE")
    api_version: str = Field(default="1.0.0", env="API_VERSION")
    api_description: str = Field(
        default="Inverse scattering and long-time asymptotics for the nonlocal mKdV equation",
        env="API_DESCRIPTION"
    )

    class Config:
        env_file = ".env"

    @field_validator("quad_tol", "ode_rtol", "ode_atol", "root_tol", "contour_cutoff",
                     "window_half_width", "grid_step", "pde_dt", "delta0_fraction", "delta0_floor",
                     "boundary_margin", "search_radius", "search_margin", "norming_window")
    @classmethod
    def check_positive(cls, value: float) -> float:
        if value <= 0:
            raise ValueError("tolerances and lengths must be positive")
        return value

    @field_validator("real_nodes", "circle_nodes", "argument_nodes")
    @classmethod
    def check_power_of_two(cls, value: int) -> int:
        if value < 2 or value & (value - 1):
            raise ValueError(f"node count {value} is not a power of two")
        return value

    @field_validator("theta0")
    @classmethod
    def check_aperture(cls, value: float) -> float:
        if not 0 < value < 1.5707963267948966:
            raise ValueError("theta0 must lie in (0, pi/2)")
        return value

    @field_validator("pde_scheme")
    @classmethod
    def check_scheme(cls, value: str) -> str:
        if value not in ("spectral", "lines"):
            raise ValueError(f"unknown PDE scheme {value!r}; use spectral or lines")
        return value

    @field_validator("threads", "quad_limit", "search_grid")
    @classmethod
    def check_count(cls, value: int) -> int:
        if value < 1:
            raise ValueError("counts must be at least 1")
        return value

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        """Load a JSON config file on top of the environment defaults"""
        payload = json.loads(Path(path).read_text())
        return cls(**payload)

    def with_overrides(self, **overrides) -> "RunConfig":
        return type(self)(**{**self.model_dump(), **overrides})


settings = RunConfig()
