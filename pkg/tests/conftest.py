"""Pytest configuration and fixtures."""

import tempfile
from pathlib import Path

import numpy as np
import pytest

from pdgd_ftc.config import Config
from pdgd_ftc.controller import controller_gains
from pdgd_ftc.microgrid import fig1_case
from pdgd_ftc.plant import InterconnectionMap, Subsystem, assemble_plant
from pdgd_ftc.program import Layout, QuadraticCost, SteadyStateProgram, assemble_program

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"

# eta slightly above the minimal value 2 of the scalar benchmark
SCALAR_ETA = 2.1


@pytest.fixture
def temp_dir():
    """Create temporary directory for tests."""
    with tempfile.TemporaryDirectory() as tmpdir:
        yield Path(tmpdir)


@pytest.fixture
def test_config(temp_dir):
    """Create test configuration."""
    config = Config(
        project_root=temp_dir,
        output_dir=temp_dir / "output",
        log_dir=temp_dir / "logs",
        log_level="DEBUG",
        log_max_lines=100,
        worker_threads=2,
        vertex_samples=2000,
        q_samples=20,
    )
    config.ensure_directories()
    return config


@pytest.fixture
def scenario_dir():
    return SCENARIO_DIR


@pytest.fixture
def scalar_plant():
    """``x' = -x + u``, ``y = x``."""
    sub = Subsystem(index=1, A=[[-1.0]], B=[[1.0]], C=[[1.0]])
    return assemble_plant([sub], InterconnectionMap.empty(1))


@pytest.fixture
def scalar_program(scalar_plant):
    """``min (x - 1)^2/2 + u^2/2`` on the steady-state set ``x = u``; optimum ``x = 0.5``."""
    cost = QuadraticCost.from_reduced(
        Kx=[[1.0]], Ku=[[1.0]], x_target=[1.0], u_target=[0.0], C=scalar_plant.C, k_y=1.0
    )
    return assemble_program(scalar_plant, [], cost)


@pytest.fixture
def scalar_params(scalar_program):
    return controller_gains(scalar_program, eta=SCALAR_ETA, rho=1.0, epsilon=0.5)


@pytest.fixture
def stiff_program():
    """Equality on ``y``, inequality on ``u``, cost with ``ell / mu = 10``."""
    return SteadyStateProgram(
        R_eq=np.array([[1.0, 0.0]]),
        b=np.zeros(1),
        R_ineq=np.array([[0.0, 1.0]]),
        h=np.array([10.0]),
        cost=QuadraticCost(np.diag([0.1, 1.0]), np.zeros(2)),
        layout=Layout(n=0, p=1, m=1),
    )


@pytest.fixture
def random_program():
    """Factory of feasible programs with a random SPD cost (``p = m = 1``)."""

    def make(rng, n_xi=4, n_eq=1, n_ineq=2):
        M = rng.standard_normal((n_xi, n_xi))
        R_eq = rng.standard_normal((n_eq, n_xi))
        R_ineq = rng.standard_normal((n_ineq, n_xi))
        anchor = rng.standard_normal(n_xi)
        return SteadyStateProgram(
            R_eq=R_eq,
            b=R_eq @ anchor,
            R_ineq=R_ineq,
            h=R_ineq @ anchor + rng.uniform(-0.2, 0.5, size=n_ineq),
            cost=QuadraticCost(M @ M.T + 0.5 * np.eye(n_xi), 3.0 * rng.standard_normal(n_xi)),
            layout=Layout(n=n_xi - 2, p=1, m=1),
        )

    return make


@pytest.fixture(scope="module")
def fig1():
    """Two-cluster benchmark with its two limit faults."""
    return fig1_case()
