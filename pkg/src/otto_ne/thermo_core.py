"""Units, thermal occupations, reservoir deviation laws and effective temperatures.

All reservoirs are described as perturbed thermal baths: an inverse
temperature ``beta`` plus an occupation deviation ``delta_n(omega)`` added on
top of the Bose-Einstein occupation at the working frequency.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import DomainError, NonphysicalOccupation

log = logging.getLogger(__name__)

ONE_ATOM = "one-atom"
TWO_ATOM = "two-atom"


@dataclass(frozen=True)
class Conventions:
    hbar: float = 1.0
    k_B: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        for name in ("hbar", "k_B", "mass"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise DomainError(f"{name} must be positive and finite, got {v!r}")


NATURAL = Conventions()


@dataclass(frozen=True)
class Thermal:
    pass


@dataclass(frozen=True)
class CorrelatedPair:
    """Beam of pairwise thermally entangled atoms; ``lam`` is the pair interaction strength."""

    lam: float
    mode: str = ONE_ATOM

    def __post_init__(self):
        if self.mode not in (ONE_ATOM, TWO_ATOM):
            raise DomainError(f"mode must be {ONE_ATOM!r} or {TWO_ATOM!r}, got {self.mode!r}")
        if self.lam < 0:
            raise DomainError("lam must be non-negative")


@dataclass(frozen=True)
class Coherent:
    """Beam of three-level atoms with ground-state coherence of amplitude ``epsilon`` and phase ``phi``."""

    epsilon: float
    phi: float

    def __post_init__(self):
        if self.epsilon < 0:
            raise DomainError("epsilon must be non-negative")


@dataclass(frozen=True)
class CustomPowerLaw:
    """delta_n(omega) = c * omega**(-p)"""

    c: float
    p: float


@dataclass(frozen=True)
class CustomTabulated:
    """Sampled (omega, delta_n) pairs, monotone cubic interpolation, no extrapolation."""

    omegas: Tuple[float, ...]
    values: Tuple[float, ...]
    _interp: PchipInterpolator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        w = np.asarray(self.omegas, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if w.ndim != 1 or w.shape != v.shape or w.size < 2:
            raise DomainError("tabulated deviation needs >= 2 matching (omega, value) samples")
        if np.any(np.diff(w) <= 0) or w[0] <= 0:
            raise DomainError("tabulated omegas must be positive and strictly increasing")
        object.__setattr__(self, "omegas", tuple(w.tolist()))
        object.__setattr__(self, "values", tuple(v.tolist()))
        object.__setattr__(self, "_interp", PchipInterpolator(w, v, extrapolate=False))

    def __call__(self, omega):
        if not (self.omegas[0] <= omega <= self.omegas[-1]):
            raise DomainError(
                f"omega={omega} outside tabulated range [{self.omegas[0]}, {self.omegas[-1]}]"
            )
        return float(self._interp(omega))


Deviation = Union[Thermal, CorrelatedPair, Coherent, CustomPowerLaw, CustomTabulated]


@dataclass(frozen=True)
class ReservoirSpec:
    beta: float
    deviation: Deviation = Thermal()

    def __post_init__(self):
        if not (self.beta > 0 and math.isfinite(self.beta)):
            raise DomainError(f"beta must be positive and finite, got {self.beta!r}")

    def temperature(self, conv: Conventions = NATURAL) -> float:
        return 1.0 / (conv.k_B * self.beta)

    @property
    def is_thermal(self) -> bool:
        return isinstance(self.deviation, Thermal)


@dataclass(frozen=True)
class EffectiveTemperature:
    value: float
    base_temperature: float
    deviation_energy: float

    def beta(self, conv: Conventions = NATURAL) -> float:
        return 1.0 / (conv.k_B * self.value)


@dataclass(frozen=True)
class RegimeDiagnostics:
    hbar_beta_omega: float
    high_temperature: bool
    hbar_beta_lambda: Optional[float] = None
    weak_correlation: Optional[bool] = None
    warnings: Tuple[str, ...] = ()


def _check_positive(name, value):
    if not (value > 0 and math.isfinite(value)):
        raise DomainError(f"{name} must be positive and finite, got {value!r}")


def mean_occupation(beta: float, omega: float, conv: Conventions = NATURAL) -> float:
    """Bose-Einstein occupation 1/(exp(hbar*beta*omega) - 1).

    Returns exactly 0.0 once the exponential overflows.
    """
    _check_positive("beta", beta)
    _check_positive("omega", omega)
    x = conv.hbar * beta * omega
    try:
        return 1.0 / math.expm1(x)
    except OverflowError:
        return 0.0


def _raw_delta_n(res: ReservoirSpec, omega: float, conv: Conventions) -> float:
    dev = res.deviation
    if isinstance(dev, Thermal):
        return 0.0
    if isinstance(dev, CorrelatedPair):
        if dev.mode == ONE_ATOM:
            return res.beta * conv.hbar * dev.lam**2 / (4.0 * omega)
        return -dev.lam / (2.0 * omega)
    if isinstance(dev, Coherent):
        return -dev.epsilon * math.cos(dev.phi) / (conv.hbar * res.beta * omega) ** 2
    if isinstance(dev, CustomPowerLaw):
        return dev.c * omega ** (-dev.p)
    if isinstance(dev, CustomTabulated):
        return dev(omega)
    raise TypeError(f"unknown deviation model {dev!r}")


def delta_n(res: ReservoirSpec, omega: float, conv: Conventions = NATURAL) -> float:
    """Occupation deviation of the reservoir steady state at frequency ``omega``."""
    _check_positive("omega", omega)
    dn = _raw_delta_n(res, omega, conv)
    total = mean_occupation(res.beta, omega, conv) + dn
    if total < 0:
        raise NonphysicalOccupation(
            f"total occupation {total:.6g} < 0 at omega={omega} (delta_n={dn:.6g})"
        )
    return dn


def total_occupation(res: ReservoirSpec, omega: float, conv: Conventions = NATURAL) -> float:
    return mean_occupation(res.beta, omega, conv) + delta_n(res, omega, conv)


def effective_temperature(
    res: ReservoirSpec, omega: float, conv: Conventions = NATURAL
) -> EffectiveTemperature:
    """T_eff = T + hbar*omega*delta_n/k_B."""
    T = res.temperature(conv)
    dH = conv.hbar * omega * delta_n(res, omega, conv)
    return EffectiveTemperature(value=T + dH / conv.k_B, base_temperature=T, deviation_energy=dH)


def energy_matched_temperature(
    res: ReservoirSpec, omega: float, conv: Conventions = NATURAL
) -> float:
    """Temperature of the Gibbs state at ``omega`` whose occupation equals n + delta_n.

    Agrees with :func:`effective_temperature` to leading order in hbar*beta*omega.
    """
    n = total_occupation(res, omega, conv)
    if n == 0.0:
        return 0.0
    return conv.hbar * omega / (conv.k_B * math.log1p(1.0 / n))


def regime_check(
    res: ReservoirSpec,
    omega: float,
    conv: Conventions = NATURAL,
    high_t_threshold: float = 0.1,
    correlation_threshold: float = 0.1,
    emit: bool = True,
) -> RegimeDiagnostics:
    """Compare hbar*beta*omega (and hbar*beta*lambda) against the small-parameter thresholds.

    Never raises on regime grounds; problems are logged and listed in ``warnings``.
    """
    _check_positive("omega", omega)
    x = conv.hbar * res.beta * omega
    warnings = []
    high_t = x < high_t_threshold
    if not high_t:
        warnings.append(f"hbar*beta*omega={x:.3g} >= {high_t_threshold}: outside high-temperature regime")
    lam_x = weak = None
    if isinstance(res.deviation, CorrelatedPair):
        lam_x = conv.hbar * res.beta * res.deviation.lam
        weak = lam_x < correlation_threshold
        if not weak:
            warnings.append(f"hbar*beta*lambda={lam_x:.3g} >= {correlation_threshold}: correlation not weak")
    if emit:
        for w in warnings:
            log.warning(w)
    return RegimeDiagnostics(
        hbar_beta_omega=x,
        high_temperature=high_t,
        hbar_beta_lambda=lam_x,
        weak_correlation=weak,
        warnings=tuple(warnings),
    )
