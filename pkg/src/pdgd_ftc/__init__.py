"""pdgd-ftc - Fault-tolerant steady-state regulation with augmented primal-dual control."""

__version__ = "0.1.0"

from .config import Config

__all__ = ["Config", "__version__"]
