"""Clustered DC microgrid mapped onto passive subsystems and a steady-state program."""

from .mapping import build_microgrid_plant, cluster_to_subsystem, physical_blocks, tie_line_omega
from .network import Bus, BusKind, ClusterModel, Line, Network, build_cluster
from .program import (
    Limits,
    Targets,
    apply_fault,
    bus_voltages,
    input_order,
    limit_fault,
    microgrid_program,
    oracle_injections,
    physical_residual,
    state_order,
)
from .scenarios import (
    FIG1_FAULTS,
    FIG1_TOPOLOGY,
    MicrogridCase,
    build_microgrid,
    fig1_case,
    network_from_dict,
)

__all__ = [
    "Bus",
    "BusKind",
    "ClusterModel",
    "FIG1_FAULTS",
    "FIG1_TOPOLOGY",
    "Limits",
    "Line",
    "MicrogridCase",
    "Network",
    "Targets",
    "apply_fault",
    "build_cluster",
    "build_microgrid",
    "build_microgrid_plant",
    "bus_voltages",
    "cluster_to_subsystem",
    "fig1_case",
    "input_order",
    "limit_fault",
    "microgrid_program",
    "network_from_dict",
    "oracle_injections",
    "physical_residual",
    "state_order",
    "tie_line_omega",
]
