#!/usr/bin/env python3
"""
Startup script for the scattering toolkit API
"""

import os
import uvicorn
from app.config import settings

if __name__ == "__main__":
    port = int(os.environ.get("PORT", 8000))
    reload = os.environ.get("RELOAD", "0") == "1"

    print(f"Starting {settings.api_title}...")
    print(f"Port: {port}")
    print(f"Output directory: {settings.output_dir}")

    uvicorn.run(
        "app.main:app",
        host="0.0.0.0",
        port=port,
        reload=reload,
        log_level="info"
    )
