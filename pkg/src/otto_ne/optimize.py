"""Power maximisation over the hot-stroke frequency and efficiency at maximum power.

The strokes are adiabatic throughout.  With omega1, the temperatures, the
reservoir parameters and the cycle time held fixed, power is maximised
over omega2 alone.
"""
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Tuple

from scipy.optimize import minimize_scalar

from .errors import DomainError, NoInteriorMaximum
from .thermo_core import (
    NATURAL,
    Coherent,
    Conventions,
    CorrelatedPair,
    Deviation,
    ReservoirSpec,
    Thermal,
    delta_n,
    mean_occupation,
)

log = logging.getLogger(__name__)

HIGH_T = "high_t"
EXACT = "exact"


@dataclass(frozen=True)
class PowerProblem:
    omega1: float
    beta1: float
    beta2: float
    deviation: Deviation = Thermal()
    cycle_time: float = 1.0
    conv: Conventions = NATURAL
    bracket: Optional[Tuple[float, float]] = None
    objective: str = HIGH_T

    def __post_init__(self):
        if not (self.omega1 > 0 and self.beta1 > 0 and self.beta2 > 0 and self.cycle_time > 0):
            raise DomainError("omega1, beta1, beta2 and cycle_time must be positive")
        lo, hi = self.bounds
        if not (0 < lo < hi):
            raise DomainError(f"bracket must satisfy 0 < lo < hi, got {(lo, hi)}")
        if self.objective not in (HIGH_T, EXACT):
            raise DomainError(f"objective must be {HIGH_T!r} or {EXACT!r}")

    @property
    def bounds(self):
        if self.bracket is None:
            return (1.0001 * self.omega1, 20.0 * self.omega1)
        return tuple(float(b) for b in self.bracket)

    @property
    def hot(self) -> ReservoirSpec:
        return ReservoirSpec(self.beta2, self.deviation)


@dataclass(frozen=True)
class EMPReport:
    omega2_star: float
    eta_at_max_power: float
    eta_analytic: Optional[float]
    eta_curzon_ahlborn: float
    discrepancy: Optional[float]
    max_power: float
    analytic_form: str
    iterations: int = 0
    warnings: Tuple[str, ...] = field(default=())

    def as_dict(self):
        return asdict(self)


def total_work_highT(omega1, omega2, beta1, beta2, delta_n2=0.0, conv: Conventions = NATURAL):
    """Work delivered per cycle, W = (1/beta1)(1 - omega2/omega1) + (1/beta2 + hbar*omega2*dn)(1 - omega1/omega2).

    High-temperature occupations, adiabatic strokes; positive when the
    device runs as an engine.
    """
    hot_energy = 1.0 / beta2 + conv.hbar * omega2 * delta_n2
    return -(1.0 / beta1) * (omega2 / omega1 - 1.0) - hot_energy * (omega1 / omega2 - 1.0)


def total_work_exact(omega1, omega2, beta1, beta2, delta_n2=0.0, conv: Conventions = NATURAL):
    """Adiabatic-stroke work with exact Bose-Einstein occupations."""
    n1 = mean_occupation(beta1, omega1, conv)
    n2 = mean_occupation(beta2, omega2, conv) + delta_n2
    return conv.hbar * (omega2 - omega1) * (n2 - n1)


def curzon_ahlborn(beta1, beta2):
    return 1.0 - math.sqrt(beta2 / beta1)


def emp_correlated(beta1, beta2, dH_C=0.0):
    """1 - sqrt(beta2_eff/beta1) with beta2_eff = beta2/(1 + beta2*dH_C)."""
    denom = beta1 * (1.0 + beta2 * dH_C)
    if not (beta1 > 0 and beta2 > 0) or denom <= 0:
        raise DomainError(f"non-positive radicand in emp_correlated (1 + beta2*dH_C = {1 + beta2 * dH_C!r})")
    return 1.0 - math.sqrt(beta2 / denom)


def optimal_ratio_correlated(beta1, beta2, dH_C=0.0):
    """omega1/omega2 at maximum power when hbar*omega2*delta_n is omega2-independent."""
    return 1.0 - emp_correlated(beta1, beta2, dH_C)


def correlated_dH(dev: CorrelatedPair, beta2, conv: Conventions = NATURAL):
    """hbar*omega2*delta_n for a correlated-pair beam; independent of omega2."""
    if dev.mode == "one-atom":
        return conv.hbar**2 * beta2 * dev.lam**2 / 4.0
    return -conv.hbar * dev.lam / 2.0


def _coherent_correction(beta1, beta2, epsilon, phi, omega1, conv, printed):
    if not (beta1 > 0 and beta2 > 0):
        raise DomainError("inverse temperatures must be positive")
    a = epsilon * math.cos(phi) / (conv.hbar * beta2 * omega1)
    inner = math.sqrt(beta1 / beta2) if printed else math.sqrt(beta2 / beta1)
    return 0.5 * a * (1.0 - 2.0 * inner)


def emp_coherent(beta1, beta2, epsilon, phi, omega1, conv: Conventions = NATURAL, printed=False):
    """First-order efficiency at maximum power for the coherent reservoir.

    Returns ``(eta, omega2/omega1)``.  The default expansion is
    1 - sqrt(b2/b1) * [1 - (a/2)(1 - 2 sqrt(b2/b1))], a = eps cos(phi)/(hbar b2 omega1),
    which tracks the numerical optimum to O(eps^2).  ``printed=True`` swaps
    the inner ratio for sqrt(b1/b2); that variant misses the optimum at O(eps).
    """
    corr = _coherent_correction(beta1, beta2, epsilon, phi, omega1, conv, printed)
    if abs(corr) > 0.1:
        log.warning("coherent first-order correction %.3g exceeds 10%% of the leading term", corr)
    ratio = math.sqrt(beta2 / beta1) * (1.0 - corr)
    return 1.0 - ratio, 1.0 / ratio


def linear_regime_emp(beta1, beta2, dH_C=0.0):
    """eta_c/2 + beta2**2 dH_C/(2 beta1): leading terms for small eta_c and beta2*dH_C."""
    return 0.5 * (1.0 - beta2 / beta1) + beta2**2 * dH_C / (2.0 * beta1)


def _work_function(problem: PowerProblem):
    hot, conv = problem.hot, problem.conv
    work = total_work_highT if problem.objective == HIGH_T else total_work_exact

    def W(omega2):
        return work(problem.omega1, omega2, problem.beta1, problem.beta2, delta_n(hot, omega2, conv), conv)

    return W


def _analytic(problem: PowerProblem):
    dev, b1, b2, conv = problem.deviation, problem.beta1, problem.beta2, problem.conv
    if isinstance(dev, Thermal):
        return curzon_ahlborn(b1, b2), "curzon_ahlborn"
    if isinstance(dev, CorrelatedPair):
        return emp_correlated(b1, b2, correlated_dH(dev, b2, conv)), "correlated"
    if isinstance(dev, Coherent):
        return emp_coherent(b1, b2, dev.epsilon, dev.phi, problem.omega1, conv)[0], "coherent_first_order"
    return None, "none"


def maximize_power(problem: PowerProblem, tolerance: float = 1e-10) -> EMPReport:
    """Bracketed derivative-free search (Brent: golden section + parabolic steps) for the power maximum."""
    W = _work_function(problem)
    lo, hi = problem.bounds
    tau = problem.cycle_time

    def slope(x):
        h = 1e-6 * x
        return (W(x + h) - W(x - h)) / (2 * h)

    s_lo, s_hi = slope(lo), slope(hi)
    if not (s_lo > 0 and s_hi < 0):
        raise NoInteriorMaximum(
            "power has no interior maximum in the bracket",
            diagnostics={"bracket": [lo, hi], "slope_lo": s_lo, "slope_hi": s_hi},
        )
    res = minimize_scalar(lambda x: -W(x), bounds=(lo, hi), method="bounded",
                          options={"xatol": tolerance * problem.omega1, "maxiter": 1000})
    x = float(res.x)
    edge = 10 * tolerance * problem.omega1
    if not res.success or x - lo <= edge or hi - x <= edge:
        raise NoInteriorMaximum(
            "optimizer converged to the bracket edge",
            diagnostics={"bracket": [lo, hi], "omega2": x, "message": str(res.message)},
        )
    eta = 1.0 - problem.omega1 / x
    analytic, form = _analytic(problem)
    return EMPReport(
        omega2_star=x,
        eta_at_max_power=eta,
        eta_analytic=analytic,
        eta_curzon_ahlborn=curzon_ahlborn(problem.beta1, problem.beta2),
        discrepancy=None if analytic is None else abs(eta - analytic),
        max_power=W(x) / tau,
        analytic_form=form,
        iterations=int(res.nfev),
    )
