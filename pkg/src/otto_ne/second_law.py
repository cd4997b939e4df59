"""Entropy production, effective-temperature bounds and second-law diagnostics.

Two energies that are easy to confuse live here:

* ``dH_A``/``dH_C`` - deviation of the steady-state energy from its Gibbs
  value, hbar*omega*delta_n.  These enter the efficiency bounds.
* ``M_B``/``M_C`` - expectation of the mean-force correction
  (a/2)<p^2> + (b/2)<x^2> in states B and C.  At high temperature
  ``M_C = -dH_C``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.special import xlogy

from .cycle import CycleResult, CycleSpec, evaluate_cycle, occupations
from .errors import DomainError, TruncationError
from .protocols import ADIABATIC, Covariance, propagate_covariance
from .thermo_core import (
    NATURAL,
    Conventions,
    effective_temperature,
    energy_matched_temperature,
)

PURE_TOL = 1e-12


@dataclass(frozen=True)
class GaussianState:
    """Centered single-mode Gaussian state; ``frequency_context`` is where energies are read off."""

    cov: Covariance
    frequency_context: float

    @classmethod
    def thermal(cls, occupation, omega, conv: Conventions = NATURAL):
        return cls(Covariance.thermal(occupation, omega, conv), omega)

    def energy(self, conv: Conventions = NATURAL) -> float:
        return self.cov.energy(self.frequency_context, conv)


@dataclass(frozen=True)
class MeanForceCoefficients:
    a: float
    b: float


@dataclass(frozen=True)
class DeviationEnergies:
    dH_A: float
    dH_C: float
    M_B: Optional[float]
    M_C: Optional[float]


@dataclass(frozen=True)
class ClausiusCheck:
    ok: bool
    applicable: bool
    heat_sign: int
    temperature_sign: int


@dataclass(frozen=True)
class EngineWindow:
    ok: bool
    hot_ratio: float
    cold_ratio: float
    q_star_1: float
    q_star_2: float
    first_holds: bool
    second_holds: bool


@dataclass(frozen=True)
class SecondLawReport:
    entropy_production: float
    inequality_margin: float
    inequality_margin_energy_matched: float
    eta: float
    eta_max: float
    eta_max_expansion: float
    T1_eff: float
    T2_eff: float
    clausius_ok: bool
    engine_window_ok: bool
    heat_balance_rhs: Optional[float]

    def as_dict(self):
        return asdict(self)


def mean_force_coefficients(
    beta2: float, omega2: float, state_C: GaussianState, conv: Conventions = NATURAL
) -> MeanForceCoefficients:
    """High-temperature coefficients of the quadratic mean-force correction at point C."""
    pp, xx = state_C.cov.pp, state_C.cov.xx
    if not (pp > 0 and xx > 0):
        raise DomainError("state quadratures must be positive")
    m = conv.mass
    return MeanForceCoefficients(a=1.0 / (beta2 * pp) - 1.0 / m, b=1.0 / (beta2 * xx) - m * omega2**2)


def _is_adiabatic(spec: CycleSpec) -> bool:
    return spec.compression.kind == ADIABATIC and spec.expansion.kind == ADIABATIC


def deviation_energies(spec: CycleSpec) -> DeviationEnergies:
    hb, k = spec.conv.hbar, spec.conv.k_B
    t1 = effective_temperature(spec.cold, spec.omega1, spec.conv)
    t2 = effective_temperature(spec.hot, spec.omega2, spec.conv)
    dH_A, dH_C = t1.deviation_energy, t2.deviation_energy
    if not _is_adiabatic(spec):
        return DeviationEnergies(dH_A, dH_C, None, None)
    T1, T2, T2eff = t1.base_temperature, t2.base_temperature, t2.value
    M_B = k * T1 * (spec.omega2 / spec.omega1) * (T2 / T2eff - 1.0)
    M_C = k * (T2 - T2eff)
    return DeviationEnergies(dH_A, dH_C, M_B, M_C)


def _theta(nu):
    # ln((nu + 1/2)/(nu - 1/2)): inverse "temperature" of the Williamson normal mode
    return math.log1p(1.0 / (nu - 0.5))


def von_neumann_entropy(state: GaussianState, conv: Conventions = NATURAL) -> float:
    nu = max(state.cov.symplectic_eigenvalue(conv), 0.5)
    return float(xlogy(nu + 0.5, nu + 0.5) - xlogy(nu - 0.5, nu - 0.5))


def relative_entropy_gaussian(
    rho1: GaussianState, rho2: GaussianState, conv: Conventions = NATURAL
) -> float:
    """S(rho1 || rho2) for centered single-mode Gaussian states.

    ln rho2 is a quadratic form, -(theta2*nu2/2) r^T sigma2^{-1} r plus a
    constant, so only tr(sigma2^{-1} sigma1) is needed.  A pure rho2 gives
    ``math.inf`` unless the states coincide.
    """
    s1, s2 = rho1.cov, rho2.cov
    nu1 = max(s1.symplectic_eigenvalue(conv), 0.5)
    nu2 = max(s2.symplectic_eigenvalue(conv), 0.5)
    same = np.allclose(s1.matrix(), s2.matrix(), rtol=1e-14, atol=0.0)
    if same:
        return 0.0
    if nu2 - 0.5 <= PURE_TOL:
        return math.inf
    tr = (s2.pp * s1.xx + s2.xx * s1.pp - 2.0 * s2.xp * s1.xp) / s2.det
    th2 = _theta(nu2)
    neg_s1 = -math.log(nu1 + 0.5) - ((nu1 - 0.5) * _theta(nu1) if nu1 - 0.5 > 0 else 0.0)
    return neg_s1 + 0.5 * th2 * nu2 * tr - 0.5 * th2 + math.log(nu2 + 0.5)


def fock_oracle_relative_entropy(
    rho1_params: Tuple[float, float],
    rho2_params: Tuple[float, float],
    cutoff: int = 256,
    conv: Conventions = NATURAL,
) -> float:
    """Relative entropy of two Gibbs-like states computed in a truncated number basis.

    Each state is ``(occupation, omega)``; matrices are written in the
    number basis of the first state's oscillator.  Independent of the
    covariance-matrix route in :func:`relative_entropy_gaussian`.
    """
    (n1, w1), (n2, w2) = rho1_params, rho2_params
    if n1 <= 0 or n2 <= 0:
        raise DomainError("oracle needs mixed states (occupation > 0)")
    for n in (n1, n2):
        kept = 1.0 - (n / (n + 1.0)) ** cutoff
        if kept < 1.0 - 1e-12:
            raise TruncationError(
                f"cutoff {cutoff} keeps only {kept:.3e} of the trace for occupation {n}"
            )
    k = np.arange(cutoff)
    p1 = (1.0 / (n1 + 1.0)) * (n1 / (n1 + 1.0)) ** k
    rho1 = np.diag(p1)
    log_rho1 = _logm_hermitian(rho1)
    if w1 == w2:
        rho2 = np.diag((1.0 / (n2 + 1.0)) * (n2 / (n2 + 1.0)) ** k)
        log_rho2 = _logm_hermitian(rho2)
    else:
        # ln rho2 = -theta2 * N2 - ln Z2, with N2 the number operator of the
        # omega2 oscillator written in the omega1 basis
        m, hb = conv.mass, conv.hbar
        d = cutoff + 2
        a = np.diag(np.sqrt(np.arange(1, d)), 1)
        x = math.sqrt(hb / (2 * m * w1)) * (a + a.T)
        p = 1j * math.sqrt(m * hb * w1 / 2) * (a.T - a)
        H2 = (p @ p).real / (2 * m) + 0.5 * m * w2**2 * (x @ x)
        N2 = H2[:cutoff, :cutoff] / (hb * w2) - 0.5 * np.eye(cutoff)
        theta2 = math.log1p(1.0 / n2)
        log_rho2 = -theta2 * N2 - math.log(n2 + 1.0) * np.eye(cutoff)
    return float(np.trace(rho1 @ (log_rho1 - log_rho2)).real)


def _logm_hermitian(mat):
    vals, vecs = np.linalg.eigh(mat)
    vals = np.clip(vals, np.finfo(float).tiny, None)
    return (vecs * np.log(vals)) @ vecs.conj().T


def corner_states(spec: CycleSpec):
    """(rho_A, rho_B, rho_C, rho_D) as Gaussian states."""
    n1, n2 = occupations(spec)
    A = GaussianState.thermal(n1, spec.omega1, spec.conv)
    C = GaussianState.thermal(n2, spec.omega2, spec.conv)
    B = GaussianState(propagate_covariance(spec.compression, A.cov, spec.conv, spec.tolerance), spec.omega2)
    D = GaussianState(propagate_covariance(spec.expansion, C.cov, spec.conv, spec.tolerance), spec.omega1)
    return A, B, C, D


def entropy_production(spec: CycleSpec) -> float:
    """S(rho_B || rho_C) + S(rho_D || rho_A): irreversibility of the two isochores."""
    A, B, C, D = corner_states(spec)
    return relative_entropy_gaussian(B, C, spec.conv) + relative_entropy_gaussian(D, A, spec.conv)


def second_law_margin(Q2: float, Q4: float, beta1_eff: float, beta2_eff: float) -> float:
    return -beta2_eff * Q2 - beta1_eff * Q4


def _beta_eff(beta, dH):
    denom = 1.0 + beta * dH
    if denom <= 0:
        raise DomainError(f"effective inverse temperature non-positive (1 + beta*dH = {denom!r})")
    return beta / denom


def max_efficiency(beta1, beta2, dH_A=0.0, dH_C=0.0, omega1=None, omega2=None) -> float:
    """1 - beta2_eff/beta1_eff with beta_eff = beta/(1 + beta*dH).

    With ``dH_A = 0`` this is 1 - beta2/(beta1*(1 + beta2*dH_C)).  The
    frequencies are only used by :func:`max_efficiency_expansion`; they are
    accepted here so both forms share a signature.
    """
    return 1.0 - _beta_eff(beta2, dH_C) / _beta_eff(beta1, dH_A)


def max_efficiency_expansion(beta1, beta2, dH_A, dH_C, omega1, omega2) -> float:
    """First-order form eta_c + beta2*((omega1/omega2)*dH_C - dH_A).

    Matches :func:`max_efficiency` to first order only when
    omega1/omega2 = beta2/beta1, i.e. at the reversible operating point.
    """
    return 1.0 - beta2 / beta1 + beta2 * ((omega1 / omega2) * dH_C - dH_A)


def clausius_direction(T1_eff, T2_eff, Q2, W_total) -> ClausiusCheck:
    """Heat enters from the hot side only if it is hotter in the effective sense.

    Only constrains cycles with W_total >= 0; a strictly opposite sign of Q2
    and T2_eff - T1_eff is a violation.
    """
    hs = int(np.sign(Q2))
    ts = int(np.sign(T2_eff - T1_eff))
    if W_total < 0:
        return ClausiusCheck(True, False, hs, ts)
    return ClausiusCheck(hs * ts >= 0, True, hs, ts)


def engine_window(spec: CycleSpec, result: Optional[CycleResult] = None) -> EngineWindow:
    """Heat-sign conditions on Q*: first <=> Q2 >= 0, second <=> Q4 <= 0."""
    n1, n2 = occupations(spec)
    if result is None:
        from .cycle import q_stars

        q1, q2 = q_stars(spec)
    else:
        q1, q2 = result.q_star_1, result.q_star_2
    N1, N2 = n1 + 0.5, n2 + 0.5
    hot, cold = N2 / N1, N1 / N2
    first, second = hot >= q1, cold <= q2
    return EngineWindow(first and second, hot, cold, q1, q2, first, second)


def second_law_report(spec: CycleSpec, result: Optional[CycleResult] = None) -> SecondLawReport:
    if result is None:
        result = evaluate_cycle(spec)
    conv = spec.conv
    t1 = effective_temperature(spec.cold, spec.omega1, conv)
    t2 = effective_temperature(spec.hot, spec.omega2, conv)
    b1e, b2e = t1.beta(conv), t2.beta(conv)
    margin = second_law_margin(result.Q2, result.Q4, b1e, b2e)
    tm1 = energy_matched_temperature(spec.cold, spec.omega1, conv)
    tm2 = energy_matched_temperature(spec.hot, spec.omega2, conv)
    margin_exact = second_law_margin(result.Q2, result.Q4, 1.0 / (conv.k_B * tm1), 1.0 / (conv.k_B * tm2))
    dev = deviation_energies(spec)
    b1, b2 = spec.cold.beta, spec.hot.beta
    eta_max = max_efficiency(b1, b2, dev.dH_A, dev.dH_C)
    eta_exp = max_efficiency_expansion(b1, b2, dev.dH_A, dev.dH_C, spec.omega1, spec.omega2)
    rhs = None
    if dev.M_B is not None and spec.cold.is_thermal:
        rhs = -b2 * result.Q2 - b1 * result.Q4 + b2 * (dev.M_B - dev.M_C)
    return SecondLawReport(
        entropy_production=entropy_production(spec),
        inequality_margin=margin,
        inequality_margin_energy_matched=margin_exact,
        eta=result.efficiency,
        eta_max=eta_max,
        eta_max_expansion=eta_exp,
        T1_eff=t1.value,
        T2_eff=t2.value,
        clausius_ok=clausius_direction(t1.value, t2.value, result.Q2, result.W_total).ok,
        engine_window_ok=engine_window(spec, result).ok,
        heat_balance_rhs=rhs,
    )
