"""Post-fault steady-state program over xi = col(x, y, u)."""

import logging
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg

from ..common.errors import DimensionError, PreconditionError, RankError, StructuralError
from ..common.linalg import as_matrix, as_vector, block_diag
from ..plant.compact import CompactPlant
from .cost import CostFunction, cost_from_dict
from .templates import ConstraintTemplate

logger = logging.getLogger(__name__)

RANK_TOL = 1e-9

RowRef = Union[int, str]


@dataclass(frozen=True)
class Layout:
    """Block sizes of ``xi = col(x, y, u)``."""

    n: int
    p: int
    m: int

    @property
    def size(self) -> int:
        return self.n + self.p + self.m

    @property
    def x(self) -> slice:
        return slice(0, self.n)

    @property
    def y(self) -> slice:
        return slice(self.n, self.n + self.p)

    @property
    def u(self) -> slice:
        return slice(self.n + self.p, self.size)


@dataclass(frozen=True, eq=False)
class ProgramSource:
    """What a program was stacked from, kept so faults can re-stack it.

    ``rebuild`` replaces template stacking for programs with a custom row layout.
    """

    plant: CompactPlant
    templates: Tuple[ConstraintTemplate, ...] = ()
    rebuild: Optional[Callable[[CompactPlant], "SteadyStateProgram"]] = None


@dataclass(frozen=True, eq=False)
class SteadyStateProgram:
    """``min J(xi)  s.t.  R_eq xi = b,  R_ineq xi <= h``."""

    R_eq: np.ndarray
    b: np.ndarray
    R_ineq: np.ndarray
    h: np.ndarray
    cost: CostFunction
    layout: Layout
    ineq_labels: Tuple[str, ...] = ()
    source: Optional[ProgramSource] = None
    sigma_min: float = field(init=False, default=float("nan"))

    def __post_init__(self) -> None:
        n_xi = self.layout.size
        b = as_vector(self.b, name="b")
        h = as_vector(self.h, name="h")
        R_eq = as_matrix(self.R_eq, rows=b.shape[0], cols=n_xi, name="R_eq")
        R_ineq = as_matrix(self.R_ineq, rows=h.shape[0], cols=n_xi, name="R_ineq")
        if self.cost.dim != n_xi:
            raise DimensionError(f"cost has dimension {self.cost.dim}, program has {n_xi}")
        labels = tuple(self.ineq_labels) or tuple(f"ineq[{k}]" for k in range(h.shape[0]))
        if len(labels) != h.shape[0]:
            raise DimensionError(f"{len(labels)} inequality labels for {h.shape[0]} rows")
        if len(set(labels)) != len(labels):
            raise StructuralError("inequality labels must be unique", offender=labels)
        object.__setattr__(self, "R_eq", R_eq)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "R_ineq", R_ineq)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "ineq_labels", labels)
        object.__setattr__(self, "sigma_min", _check_rank(np.vstack([R_eq, R_ineq])))

    @property
    def n_xi(self) -> int:
        return self.layout.size

    @property
    def n_eq(self) -> int:
        return self.R_eq.shape[0]

    @property
    def n_ineq(self) -> int:
        return self.R_ineq.shape[0]

    @property
    def n_c(self) -> int:
        return self.n_eq + self.n_ineq

    @property
    def R(self) -> np.ndarray:
        return np.vstack([self.R_eq, self.R_ineq])

    def row_index(self, row: RowRef) -> int:
        """Resolve an inequality row by position or label."""
        if isinstance(row, str):
            if row not in self.ineq_labels:
                raise StructuralError(f"unknown inequality row {row!r}", offender=row)
            return self.ineq_labels.index(row)
        if not 0 <= int(row) < self.n_ineq:
            raise StructuralError(f"inequality row {row} out of range 0..{self.n_ineq - 1}",
                                  offender=row)
        return int(row)

    def with_limit(self, row: RowRef, value: float) -> "SteadyStateProgram":
        """Copy with one inequality right-hand side replaced."""
        idx = self.row_index(row)
        h = self.h.copy()
        h[idx] = float(value)
        return replace(self, h=h)

    def with_h(self, h: np.ndarray) -> "SteadyStateProgram":
        return replace(self, h=as_vector(h, self.n_ineq, name="h"))

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready form (matrices as nested lists, cost by kind)."""
        return {
            "layout": {"n": self.layout.n, "p": self.layout.p, "m": self.layout.m},
            "R_eq": self.R_eq.tolist(),
            "b": self.b.tolist(),
            "R_ineq": self.R_ineq.tolist(),
            "h": self.h.tolist(),
            "ineq_labels": list(self.ineq_labels),
            "cost": self.cost.to_dict(),
        }

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> "SteadyStateProgram":
        lay = payload["layout"]
        layout = Layout(n=int(lay["n"]), p=int(lay["p"]), m=int(lay["m"]))
        return cls(
            R_eq=as_matrix(payload["R_eq"], cols=layout.size, name="R_eq"),
            b=as_vector(payload["b"]),
            R_ineq=as_matrix(payload["R_ineq"], cols=layout.size, name="R_ineq"),
            h=as_vector(payload["h"]),
            cost=cost_from_dict(payload["cost"]),
            layout=layout,
            ineq_labels=tuple(payload.get("ineq_labels", ())),
        )


def _check_rank(R: np.ndarray) -> float:
    if R.shape[0] == 0:
        return float("inf")
    if R.shape[0] > R.shape[1]:
        raise RankError(
            f"{R.shape[0]} constraint rows exceed {R.shape[1]} variables; "
            f"stacked R cannot have full row rank",
            sigma_min=0.0,
        )
    sigma = linalg.svdvals(R)
    sigma_min = float(sigma[-1])
    if sigma_min <= RANK_TOL:
        raise RankError(f"stacked R is rank deficient (sigma_min={sigma_min:.3e})", sigma_min)
    return sigma_min


@dataclass(frozen=True)
class KKTPoint:
    """Primal point and multipliers; ``nu_ineq`` is componentwise nonnegative."""

    xi: np.ndarray
    nu_eq: np.ndarray
    nu_ineq: np.ndarray

    def stacked(self) -> np.ndarray:
        return np.concatenate([self.xi, self.nu_eq, self.nu_ineq])


@dataclass(frozen=True)
class ResidualReport:
    stationarity: float
    primal_eq: float
    primal_ineq: float
    dual_sign: float
    complementarity: float

    @property
    def worst(self) -> float:
        return max(
            self.stationarity,
            self.primal_eq,
            self.primal_ineq,
            self.dual_sign,
            self.complementarity,
        )

    def as_dict(self) -> Dict[str, float]:
        return {
            "stationarity": self.stationarity,
            "eq": self.primal_eq,
            "ineq": self.primal_ineq,
            "dual": self.dual_sign,
            "comp": self.complementarity,
        }


def _maxnorm(v: np.ndarray) -> float:
    return float(np.max(np.abs(v))) if v.size else 0.0


def kkt_residual(program: SteadyStateProgram, point: KKTPoint) -> ResidualReport:
    """Max-norm residuals of the KKT system at ``point``."""
    xi = as_vector(point.xi, program.n_xi, name="xi")
    nu_eq = as_vector(point.nu_eq, program.n_eq, name="nu_eq")
    nu_ineq = as_vector(point.nu_ineq, program.n_ineq, name="nu_ineq")
    slack = program.R_ineq @ xi - program.h
    stationarity = program.cost.gradient(xi) + program.R_eq.T @ nu_eq + program.R_ineq.T @ nu_ineq
    return ResidualReport(
        stationarity=_maxnorm(stationarity),
        primal_eq=_maxnorm(program.R_eq @ xi - program.b),
        primal_ineq=_maxnorm(np.maximum(slack, 0.0)),
        dual_sign=_maxnorm(np.maximum(-nu_ineq, 0.0)),
        complementarity=abs(float(nu_ineq @ slack)) if nu_ineq.size else 0.0,
    )


def spectral_bounds(program: SteadyStateProgram) -> Tuple[float, float]:
    """``(kappa1, kappa2)`` = squared extreme singular values of the stacked ``R``.

    Raises:
        PreconditionError: The program has no constraint rows
        RankError: ``sigma_min`` at or below the rank tolerance
    """
    R = program.R
    if R.shape[0] == 0:
        raise PreconditionError("spectral bounds need at least one constraint row")
    sigma = linalg.svdvals(R)
    if R.shape[0] > R.shape[1] or sigma[-1] <= RANK_TOL:
        sigma_min = 0.0 if R.shape[0] > R.shape[1] else float(sigma[-1])
        raise RankError(f"stacked R lacks full row rank (sigma_min={sigma_min:.3e})", sigma_min)
    return float(sigma[-1] ** 2), float(sigma[0] ** 2)


def _stack_templates(
    plant: CompactPlant, templates: Sequence[ConstraintTemplate]
) -> Tuple[Dict[str, List], Dict[str, List], Dict[str, List[str]]]:
    by_index = {t.subsystem: t for t in templates}
    unknown = set(by_index) - {sub.index for sub in plant.subsystems}
    if unknown:
        raise StructuralError(f"templates for unknown subsystems {sorted(unknown)}",
                              offender=sorted(unknown))
    if len(by_index) != len(templates):
        raise StructuralError("at most one template per subsystem")

    eq: Dict[str, List] = {block: [] for block in ("x", "y", "u")}
    ineq: Dict[str, List] = {block: [] for block in ("x", "y", "u")}
    labels: Dict[str, List[str]] = {block: [] for block in ("x", "y", "u")}
    for sub in plant.subsystems:
        dims = sub.dims
        template = by_index.get(sub.index, ConstraintTemplate(subsystem=sub.index))
        template.check(dims)
        widths = {"x": dims.n, "y": dims.p, "u": dims.m}
        for block in ("x", "y", "u"):
            eq[block].append(template.rows("eq", block, widths[block]))
            mat, vec = template.rows("ineq", block, widths[block])
            ineq[block].append((mat, vec))
            labels[block].extend(template.ineq_labels(block, mat.shape[0]))
    return eq, ineq, labels


def assemble_program(
    plant: CompactPlant,
    templates: Sequence[ConstraintTemplate],
    cost: CostFunction,
) -> SteadyStateProgram:
    """Stack the steady-state program of a compact plant.

    Row order of ``R_eq``: output consistency ``-C x + y = 0``, plant
    equilibrium ``Ap x + B u = -d``, then the template equalities for ``x``,
    ``y`` and ``u``. ``R_ineq`` is block-diagonal over the same three blocks.

    Raises:
        DimensionError: Template or cost dimensions disagree with the plant
        RankError: Stacked ``R`` is not of full row rank
    """
    dims = plant.dims
    layout = Layout(n=dims.n, p=dims.p, m=dims.m)
    eq, ineq, labels = _stack_templates(plant, templates)

    def stacked(parts: List[Tuple[np.ndarray, np.ndarray]]) -> Tuple[np.ndarray, np.ndarray]:
        mat = block_diag([m for m, _ in parts])
        vec = np.concatenate([v for _, v in parts]) if parts else np.zeros(0)
        return mat, vec

    Req_x, b_x = stacked(eq["x"])
    Req_y, b_y = stacked(eq["y"])
    Req_u, b_u = stacked(eq["u"])
    Rin_x, h_x = stacked(ineq["x"])
    Rin_y, h_y = stacked(ineq["y"])
    Rin_u, h_u = stacked(ineq["u"])

    n, p, m = dims.n, dims.p, dims.m
    R_eq = np.vstack([
        np.hstack([-plant.C, np.eye(p), np.zeros((p, m))]),
        np.hstack([plant.Ap, np.zeros((n, p)), plant.B]),
        np.hstack([Req_x, np.zeros((Req_x.shape[0], p + m))]),
        np.hstack([np.zeros((Req_y.shape[0], n)), Req_y, np.zeros((Req_y.shape[0], m))]),
        np.hstack([np.zeros((Req_u.shape[0], n + p)), Req_u]),
    ])
    b = np.concatenate([np.zeros(p), -plant.d, b_x, b_y, b_u])
    R_ineq = block_diag([Rin_x, Rin_y, Rin_u])
    h = np.concatenate([h_x, h_y, h_u])

    program = SteadyStateProgram(
        R_eq=R_eq,
        b=b,
        R_ineq=R_ineq,
        h=h,
        cost=cost,
        layout=layout,
        ineq_labels=tuple(labels["x"] + labels["y"] + labels["u"]),
        source=ProgramSource(plant=plant, templates=tuple(templates)),
    )
    logger.debug(
        f"Assembled program n_xi={program.n_xi}, n_eq={program.n_eq}, "
        f"n_ineq={program.n_ineq}, sigma_min={program.sigma_min:.3e}"
    )
    return program
