"""Application layer: settings resolution, service wiring and command workflows."""
from __future__ import annotations

from .configuration import AppSettings
from .container import ServiceContainer
from .services import PredictionRecord, SGTBWorkflow

__all__ = ["AppSettings", "PredictionRecord", "SGTBWorkflow", "ServiceContainer"]
