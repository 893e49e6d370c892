"""Passive subsystems, interconnection and the compact network model."""

from .compact import CompactPlant, PlantDims, assemble_plant, plant_rhs, steady_state
from .passivity import (
    PassivityCertificate,
    certify_storage,
    passivity_certificate,
    storage_certificate,
)
from .subsystem import (
    InterconnectionMap,
    PairViolation,
    Subsystem,
    ValidationReport,
    validate_interconnection,
)

__all__ = [
    "CompactPlant",
    "InterconnectionMap",
    "PairViolation",
    "PassivityCertificate",
    "PlantDims",
    "Subsystem",
    "ValidationReport",
    "assemble_plant",
    "certify_storage",
    "passivity_certificate",
    "plant_rhs",
    "steady_state",
    "storage_certificate",
    "validate_interconnection",
]
