from contextlib import asynccontextmanager
from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from app.config import settings
from app.routers import phase, scattering, soliton, asymptotics, validation
import logging

# Configure logging
logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)


@asynccontextmanager
async def lifespan(app: FastAPI):
    # Startup
    logger.info(f"Starting {settings.api_title}...")
    logger.info(f"Quadrature tolerance {settings.quad_tol}, contour nodes "
                f"{settings.real_nodes} per real segment and {settings.circle_nodes} per quarter circle")
    yield
    # Shutdown
    logger.info(f"Shutting down {settings.api_title}...")


# Create FastAPI app
app = FastAPI(
    title=settings.api_title,
    version=settings.api_version,
    description=settings.api_description,
    lifespan=lifespan
)

# Add CORS middleware
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# Include routers
app.include_router(phase.router, prefix="/phase", tags=["phase"])
app.include_router(scattering.router, prefix="/scattering", tags=["scattering"])
app.include_router(soliton.router, prefix="/soliton", tags=["soliton"])
app.include_router(asymptotics.router, prefix="/asymptotics", tags=["asymptotics"])
app.include_router(validation.router, prefix="/validation", tags=["validation"])


@app.get("/")
async def root():
    return {
        "message": settings.api_title,
        "version": settings.api_version,
        "docs": "/docs"
    }


@app.get("/health")
async def health_check():
    """Health check endpoint for monitoring"""
    return {
        "status": "healthy",
        "version": settings.api_version,
        "config": {
            "quad_tol": settings.quad_tol,
            "ode_method": settings.ode_method,
            "real_nodes": settings.real_nodes,
            "circle_nodes": settings.circle_nodes,
        }
    }
