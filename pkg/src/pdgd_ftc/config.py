"""Configuration management with environment variable support."""

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv


@dataclass
class Config:
    """Process-wide configuration.

    Per-run parameters (plant, controller, horizon) live in scenario files; this
    object carries paths, logging and numerical defaults shared by every run.
    """

    # Paths
    project_root: Path
    output_dir: Path
    log_dir: Path

    # Logging
    log_level: str
    log_max_lines: int

    # Sweep pool
    worker_threads: int

    # Synthesis defaults
    default_epsilon: float = 0.5
    default_rho: float = 1.0
    eta_safety: float = 1.05
    tau1_fraction: float = 0.5

    # Certificates
    psd_tolerance: float = 1e-8
    vertex_cap: int = 14
    vertex_samples: int = 100_000
    q_samples: int = 100
    seed: int = 0

    @classmethod
    def from_env(cls, env_file: Optional[Path] = None) -> "Config":
        """Load configuration from environment variables.

        Args:
            env_file: Path to .env file (defaults to .env in current directory)

        Returns:
            Config instance
        """
        if env_file is None:
            env_file = Path(".env")
        if env_file.exists():
            load_dotenv(env_file)

        project_root = Path.cwd()

        def resolve_path(env_var: str, default: str) -> Path:
            path = Path(os.getenv(env_var, default))
            if not path.is_absolute():
                path = project_root / path
            return path

        return cls(
            project_root=project_root,
            output_dir=resolve_path("PDGD_OUTPUT_DIR", "./output"),
            log_dir=resolve_path("PDGD_LOG_DIR", "./output/logs"),
            log_level=os.getenv("PDGD_LOG_LEVEL", "INFO"),
            log_max_lines=int(os.getenv("PDGD_LOG_MAX_LINES", "2000")),
            worker_threads=int(os.getenv("PDGD_WORKER_THREADS", "4")),
            default_epsilon=float(os.getenv("PDGD_EPSILON", "0.5")),
            default_rho=float(os.getenv("PDGD_RHO", "1.0")),
            eta_safety=float(os.getenv("PDGD_ETA_SAFETY", "1.05")),
            tau1_fraction=float(os.getenv("PDGD_TAU1_FRACTION", "0.5")),
            psd_tolerance=float(os.getenv("PDGD_PSD_TOL", "1e-8")),
            vertex_cap=int(os.getenv("PDGD_VERTEX_CAP", "14")),
            vertex_samples=int(os.getenv("PDGD_VERTEX_SAMPLES", "100000")),
            q_samples=int(os.getenv("PDGD_Q_SAMPLES", "100")),
            seed=int(os.getenv("PDGD_SEED", "0")),
        )

    def ensure_directories(self) -> None:
        """Create output and log directories if they don't exist."""
        self.output_dir.mkdir(parents=True, exist_ok=True)
        self.log_dir.mkdir(parents=True, exist_ok=True)
