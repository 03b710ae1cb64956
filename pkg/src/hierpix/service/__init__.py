"""HTTP service wrapping the engine for interactive sessions."""

from .app import create_app
from .session import Session, SessionInputs

__all__ = ["Session", "SessionInputs", "create_app"]
