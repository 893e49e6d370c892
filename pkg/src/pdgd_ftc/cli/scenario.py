"""Scenario files: loading, schema validation and typed access."""

import json
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
import yaml
from jsonschema import Draft202012Validator

from ..closedloop.faults import FaultEvent
from ..common.errors import ScenarioError
from ..microgrid.program import limit_fault
from ..plant.subsystem import InterconnectionMap, Subsystem
from ..program.cost import CostFunction, QuadraticCost
from ..program.templates import ConstraintTemplate

logger = logging.getLogger(__name__)

SCHEMA_PATH = Path(__file__).with_name("scenario_schema.yaml")

Start = Union[str, List[float]]


@lru_cache(maxsize=1)
def scenario_schema() -> Dict[str, Any]:
    with open(SCHEMA_PATH, "r", encoding="utf-8") as f:
        return yaml.safe_load(f)


@dataclass(frozen=True)
class ControllerSettings:
    eta: Union[str, float] = "auto"
    rho: Optional[float] = None
    epsilon: Optional[float] = None
    override_c: Optional[float] = None
    tau1: Optional[float] = None


@dataclass(frozen=True)
class SimulationSettings:
    T: float
    dt: Union[str, float] = "auto"
    record_every: int = 1
    x0: Start = "zero"
    theta0: Start = "zero"


@dataclass(frozen=True)
class CertificateSettings:
    enabled: bool = True
    q_samples: Optional[int] = None
    vertex_cap: Optional[int] = None
    vertex_samples: Optional[int] = None


@dataclass
class ScenarioConfig:
    """Validated scenario; exactly one of ``generic`` and ``microgrid`` is set."""

    name: str
    path: Optional[Path]
    controller: ControllerSettings
    simulation: SimulationSettings
    certificates: CertificateSettings
    generic: Optional[Dict[str, Any]] = None
    microgrid: Optional[Dict[str, Any]] = None
    faults: List[Dict[str, Any]] = field(default_factory=list)
    trace_path: Optional[str] = None
    report_path: Optional[str] = None

    @property
    def kind(self) -> str:
        return "generic" if self.generic is not None else "microgrid"

    def output_paths(self, output_dir: Path) -> Tuple[Path, Path]:
        """Trace and report destinations; relative paths resolve under ``output_dir``."""
        trace = Path(self.trace_path) if self.trace_path else Path(f"{self.name}_trace.csv")
        report = Path(self.report_path) if self.report_path else Path(f"{self.name}_report.json")
        if not trace.is_absolute():
            trace = output_dir / trace
        if not report.is_absolute():
            report = output_dir / report
        return trace, report


def _pointer(parts: Any) -> str:
    return "/" + "/".join(str(p) for p in parts)


def validate_payload(payload: Any) -> None:
    """Raise ``ScenarioError`` listing every schema violation by JSON pointer."""
    validator = Draft202012Validator(scenario_schema())
    errors = sorted(validator.iter_errors(payload), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        violations = [(_pointer(e.absolute_path), e.message) for e in errors]
        summary = "; ".join(f"{p}: {m}" for p, m in violations[:5])
        raise ScenarioError(f"scenario violates schema ({len(errors)} errors): {summary}",
                            violations)


def parse_scenario(payload: Dict[str, Any], path: Optional[Path] = None) -> ScenarioConfig:
    """Validate a decoded scenario and wrap it."""
    validate_payload(payload)
    plant = payload["plant"]
    controller = payload.get("controller", {})
    simulation = payload["simulation"]
    certificates = payload.get("certificates", {})
    outputs = payload.get("outputs", {})
    default_name = path.stem if path is not None else "scenario"
    return ScenarioConfig(
        name=payload.get("name", default_name),
        path=path,
        controller=ControllerSettings(
            eta=controller.get("eta", "auto"),
            rho=controller.get("rho"),
            epsilon=controller.get("epsilon"),
            override_c=controller.get("override_c"),
            tau1=controller.get("tau1"),
        ),
        simulation=SimulationSettings(
            T=float(simulation["T"]),
            dt=simulation.get("dt", "auto"),
            record_every=int(simulation.get("record_every", 1)),
            x0=simulation.get("x0", "zero"),
            theta0=simulation.get("theta0", "zero"),
        ),
        certificates=CertificateSettings(
            enabled=bool(certificates.get("enabled", True)),
            q_samples=certificates.get("q_samples"),
            vertex_cap=certificates.get("vertex_cap"),
            vertex_samples=certificates.get("vertex_samples"),
        ),
        generic=plant.get("generic"),
        microgrid=plant.get("microgrid"),
        faults=list(payload.get("faults", [])),
        trace_path=outputs.get("trace_path"),
        report_path=outputs.get("report_path"),
    )


def load_scenario(path: Path) -> ScenarioConfig:
    """Read a JSON (or YAML by suffix) scenario and validate it.

    Raises:
        ScenarioError: Unreadable file, bad syntax or schema violations
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ScenarioError(f"cannot read {path}: {e}", [("", str(e))]) from e
    try:
        if path.suffix.lower() in (".yaml", ".yml"):
            payload = yaml.safe_load(text)
        else:
            payload = json.loads(text)
    except (json.JSONDecodeError, yaml.YAMLError) as e:
        raise ScenarioError(f"cannot parse {path}: {e}", [("", str(e))]) from e
    if not isinstance(payload, dict):
        raise ScenarioError(f"{path} does not hold an object", [("", "top level is not an object")])
    config = parse_scenario(payload, path)
    logger.debug(f"Loaded scenario {config.name!r} ({config.kind}) from {path}")
    return config


def subsystems_from_spec(spec: Dict[str, Any]) -> Tuple[List[Subsystem], InterconnectionMap]:
    """Subsystems and interconnection of a generic plant block."""
    subsystems = [
        Subsystem(
            index=int(entry["index"]),
            A=np.array(entry["A"], dtype=float),
            B=np.array(entry["B"], dtype=float),
            C=np.array(entry["C"], dtype=float),
            E=np.array(entry["E"], dtype=float) if "E" in entry else None,
            G=np.array(entry["G"], dtype=float) if "G" in entry else None,
            d=np.array(entry["d"], dtype=float) if "d" in entry else None,
            storage=np.array(entry["storage"], dtype=float) if "storage" in entry else None,
        )
        for entry in spec["subsystems"]
    ]
    blocks = {(int(e["i"]), int(e["j"])): e["omega"] for e in spec.get("interconnection", [])}
    return subsystems, InterconnectionMap.from_blocks(blocks, n_subsystems=len(subsystems))


def templates_from_spec(spec: Dict[str, Any]) -> List[ConstraintTemplate]:
    templates = []
    for entry in spec.get("templates", []):
        fields = {k: np.array(v, dtype=float) for k, v in entry.items()
                  if k not in ("subsystem", "labels")}
        templates.append(ConstraintTemplate(
            subsystem=int(entry["subsystem"]), labels=dict(entry.get("labels", {})), **fields
        ))
    return templates


def cost_from_spec(spec: Dict[str, Any], C: np.ndarray) -> CostFunction:
    """Quadratic cost on ``xi``, or a reduced one lifted with the plant output map."""
    if spec["kind"] == "quadratic":
        return QuadraticCost(spec["K"], spec["target"])
    return QuadraticCost.from_reduced(
        Kx=spec["Kx"],
        Ku=spec["Ku"],
        x_target=spec["x_target"],
        u_target=spec["u_target"],
        C=C,
        k_y=float(spec.get("k_y", 1.0)),
    )


def faults_from_spec(entries: List[Dict[str, Any]]) -> List[FaultEvent]:
    """Fault events of either plant kind, in file order."""
    events = []
    for entry in entries:
        kind = entry["kind"]
        if kind == "limit_change":
            events.append(FaultEvent.limit_change(entry["time"], entry["row"], entry["value"]))
        elif kind == "matrix_change":
            matrices = {k: np.array(v, dtype=float) for k, v in entry["matrices"].items()}
            events.append(FaultEvent.matrix_change(entry["time"], entry["subsystem"], **matrices))
        else:
            events.append(limit_fault(entry["time"], kind, int(entry["bus"]), entry["value"]))
    return events
