"""Scalar margin chain showing the metric bound leaves positive slack."""

from dataclasses import asdict, dataclass
from typing import Dict

from ..common.errors import PreconditionError

# 1/40 + 1/16 + 4961/64000 + 81/800 + 1/40, attained at all-unit parameters
SLACK_AGGREGATE = 0.291265625
RATIO_FLOOR = 1.0 - SLACK_AGGREGATE


@dataclass(frozen=True)
class MarginReport:
    q_rho: float
    q_eta: float
    c_o: float
    h1: float
    h2: float
    h3: float
    h4: float
    delta: float
    leading: float

    @property
    def ratio(self) -> float:
        """``delta / (2 eta mu c_o)``."""
        return self.delta / self.leading

    @property
    def positive(self) -> bool:
        return self.delta > 0.0

    def as_dict(self) -> Dict[str, float]:
        out = asdict(self)
        out["ratio"] = self.ratio
        return out


def delta_margin(
    eta: float, rho: float, mu: float, ell: float, kappa1: float, kappa2: float
) -> MarginReport:
    """Evaluate ``Delta(c_o) = 2 eta mu c_o - (eta mu ell + h1 + h2 + h3 + h4)``.

    Raises:
        PreconditionError: Non-positive parameters, ``mu > ell`` or ``kappa1 > kappa2``
    """
    values = {"eta": eta, "rho": rho, "mu": mu, "ell": ell, "kappa1": kappa1, "kappa2": kappa2}
    bad = [name for name, value in values.items() if not value > 0.0]
    if bad:
        raise PreconditionError(f"parameters must be positive: {', '.join(bad)}")
    if mu > ell:
        raise PreconditionError(f"mu={mu} exceeds ell={ell}")
    if kappa1 > kappa2:
        raise PreconditionError(f"kappa1={kappa1} exceeds kappa2={kappa2}")

    q_rho = max(rho * kappa2 / mu, ell / mu)
    q_eta = max(eta / (ell * rho), ell / mu)
    c_o = 20.0 * ell * q_rho ** 2 * q_eta ** 2 * kappa2 / kappa1
    shift = rho * kappa2 + eta * kappa1 / (2.0 * c_o)

    h1 = 2.0 * eta ** 2 * kappa2 + 0.5 * eta ** 2 * kappa1
    h2 = 2.0 * eta * ell * shift + eta * shift ** 2
    h3 = (2.0 * eta ** 2 / rho) * (ell + shift) * kappa2 / kappa1
    h4 = eta ** 3 * kappa2 / (rho ** 2 * kappa1)
    leading = 2.0 * eta * mu * c_o
    delta = leading - (eta * mu * ell + h1 + h2 + h3 + h4)
    return MarginReport(
        q_rho=q_rho, q_eta=q_eta, c_o=c_o, h1=h1, h2=h2, h3=h3, h4=h4,
        delta=delta, leading=leading,
    )
