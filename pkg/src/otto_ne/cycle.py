"""Four-stroke Otto cycle energetics.

Corners: A (equilibrated with the cold bath at omega1), B (after
compression to omega2), C (equilibrated with the hot bath at omega2),
D (after expansion back to omega1).  W1, W3 are energy changes of the
oscillator; ``W_total = -(W1 + W3)`` is the work delivered.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

from .errors import DegenerateCycle, DomainError
from .protocols import DEFAULT_TOL, FrequencyProtocol, adiabaticity_Q
from .thermo_core import NATURAL, Conventions, ReservoirSpec, total_occupation

ENGINE = "Engine"
NOT_AN_ENGINE = "NotAnEngine"


@dataclass(frozen=True)
class CycleSpec:
    cold: ReservoirSpec
    hot: ReservoirSpec
    omega1: float
    omega2: float
    compression: FrequencyProtocol
    expansion: FrequencyProtocol
    cycle_time: float = 1.0
    conv: Conventions = NATURAL
    tolerance: float = DEFAULT_TOL

    def __post_init__(self):
        if not (self.omega1 > 0 and self.omega2 > 0):
            raise DomainError("omega1 and omega2 must be positive")
        c, e = self.compression, self.expansion
        if not (math.isclose(c.omega_start, self.omega1) and math.isclose(c.omega_end, self.omega2)):
            raise DomainError("compression protocol must run omega1 -> omega2")
        if not (math.isclose(e.omega_start, self.omega2) and math.isclose(e.omega_end, self.omega1)):
            raise DomainError("expansion protocol must run omega2 -> omega1")

    @classmethod
    def build(cls, cold, hot, omega1, omega2, stroke="adiabatic", duration=0.0, **kw):
        """Both strokes of the same kind; expansion mirrors compression."""
        comp = FrequencyProtocol(stroke, omega1, omega2, duration)
        return cls(cold, hot, omega1, omega2, comp, comp.reversed(), **kw)

    def with_(self, **changes) -> "CycleSpec":
        d = {f: getattr(self, f) for f in self.__dataclass_fields__}
        d.update(changes)
        return CycleSpec(**d)


@dataclass(frozen=True)
class CycleResult:
    E_A: float
    E_B: float
    E_C: float
    E_D: float
    W1: float
    W3: float
    Q2: float
    Q4: float
    W_total: float
    efficiency: float
    eta_quotient: float
    power: float
    q_star_1: float
    q_star_2: float
    engine_flag: str
    n1_total: float = field(default=float("nan"))
    n2_total: float = field(default=float("nan"))

    def as_dict(self):
        return asdict(self)


def q_stars(spec: CycleSpec):
    return (
        adiabaticity_Q(spec.compression, spec.tolerance).q_star,
        adiabaticity_Q(spec.expansion, spec.tolerance).q_star,
    )


def occupations(spec: CycleSpec):
    """Total occupations n + delta_n of the cold and hot steady states."""
    return (
        total_occupation(spec.cold, spec.omega1, spec.conv),
        total_occupation(spec.hot, spec.omega2, spec.conv),
    )


def corner_energies(spec: CycleSpec):
    hb = spec.conv.hbar
    n1, n2 = occupations(spec)
    q1, q2 = q_stars(spec)
    w1, w2 = spec.omega1, spec.omega2
    return (
        hb * w1 * (n1 + 0.5),
        hb * w2 * q1 * (n1 + 0.5),
        hb * w2 * (n2 + 0.5),
        hb * w1 * q2 * (n2 + 0.5),
    )


def stroke_works(spec: CycleSpec):
    EA, EB, EC, ED = corner_energies(spec)
    return EB - EA, ED - EC


def stroke_heats(spec: CycleSpec):
    EA, EB, EC, ED = corner_energies(spec)
    return EC - EB, EA - ED


def efficiency_closed_form(n1, n2, q1, q2, omega1, omega2):
    """Finite-time efficiency written directly in occupations and Q* values."""
    N1, N2 = n1 + 0.5, n2 + 0.5
    return 1.0 - (omega1 / omega2) * (N1 - q2 * N2) / (q1 * N1 - N2)


def _flag(W, Q2):
    return ENGINE if (W > 0 and Q2 > 0) else NOT_AN_ENGINE


def evaluate_cycle(spec: CycleSpec) -> CycleResult:
    if not spec.cycle_time > 0:
        raise DomainError("cycle_time must be positive")
    n1, n2 = occupations(spec)
    q1, q2 = q_stars(spec)
    hb, w1, w2 = spec.conv.hbar, spec.omega1, spec.omega2
    EA = hb * w1 * (n1 + 0.5)
    EB = hb * w2 * q1 * (n1 + 0.5)
    EC = hb * w2 * (n2 + 0.5)
    ED = hb * w1 * q2 * (n2 + 0.5)
    W1, W3 = EB - EA, ED - EC
    Q2, Q4 = EC - EB, EA - ED
    W = -(W1 + W3)
    if Q2 == 0.0 or w1 == w2:
        raise DegenerateCycle(f"degenerate cycle (Q2={Q2!r}, omega1={w1!r}, omega2={w2!r}): efficiency undefined")
    # the closed form is reported: the quotient of energy differences loses
    # digits when Q2 is small next to the corner energies
    eta = efficiency_closed_form(n1, n2, q1, q2, w1, w2)
    eta_q = W / Q2
    cond = max(EA, EB, EC, ED) / abs(Q2)
    if abs(eta - eta_q) > 1e-9 * cond * max(1.0, abs(eta)):
        raise RuntimeError(f"efficiency paths disagree: closed form {eta!r} vs quotient {eta_q!r}")
    return CycleResult(
        E_A=EA, E_B=EB, E_C=EC, E_D=ED, W1=W1, W3=W3, Q2=Q2, Q4=Q4, W_total=W,
        efficiency=eta, eta_quotient=eta_q, power=W / spec.cycle_time,
        q_star_1=q1, q_star_2=q2, engine_flag=_flag(W, Q2), n1_total=n1, n2_total=n2,
    )


def efficiency(spec: CycleSpec):
    """(eta, engine_flag); NotAnEngine is reported, not raised."""
    r = evaluate_cycle(spec)
    return r.efficiency, r.engine_flag


def power(spec: CycleSpec) -> float:
    if not spec.cycle_time > 0:
        raise DomainError("cycle_time must be positive")
    W1, W3 = stroke_works(spec)
    return -(W1 + W3) / spec.cycle_time
