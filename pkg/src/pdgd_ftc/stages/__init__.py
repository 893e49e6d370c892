"""Pipeline stages, one per step of a scenario run."""

from .assemble import AssembleStage
from .base import AbstractStage
from .certify import CertifyStage
from .context import RunContext
from .gains import GainsStage
from .margin import MarginStage
from .monitor import MonitorStage
from .program import ProgramStage
from .simulate import SimulateStage

__all__ = [
    "AbstractStage",
    "AssembleStage",
    "CertifyStage",
    "GainsStage",
    "MarginStage",
    "MonitorStage",
    "ProgramStage",
    "RunContext",
    "SimulateStage",
]
