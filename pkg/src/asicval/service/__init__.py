"""FastAPI service wrapping the valuation engine."""

from .app import app

__all__ = ["app"]
