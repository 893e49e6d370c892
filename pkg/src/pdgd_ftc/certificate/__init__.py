"""Numerical certificates for the controller metric and its decay."""

from .floor import p2_floor
from .gamma import GammaDiag, gamma_diag
from .margin import RATIO_FLOOR, MarginReport, delta_margin
from .shifted import (
    QReport,
    check_hessian_bounds,
    program_hessian,
    q_certificate,
    q_matrix,
    sample_hessians,
    shifted_matrix,
)
from .suite import CertificateSummary, run_certificates
from .vertex import VertexReport, vertex_inequality, vertex_margin, vertex_matrix

__all__ = [
    "CertificateSummary",
    "GammaDiag",
    "MarginReport",
    "QReport",
    "RATIO_FLOOR",
    "VertexReport",
    "check_hessian_bounds",
    "delta_margin",
    "gamma_diag",
    "p2_floor",
    "program_hessian",
    "q_certificate",
    "q_matrix",
    "run_certificates",
    "sample_hessians",
    "shifted_matrix",
    "vertex_inequality",
    "vertex_margin",
    "vertex_matrix",
]
