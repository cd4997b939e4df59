"""Frequency protocols for the isentropic strokes.

The unitary strokes are solved through the classical equation
``x'' + omega(t)**2 x = 0``: its two fundamental solutions fix both the
adiabaticity parameter Q* and the linear phase-space map acting on the
second moments of a centered Gaussian state.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numba
import numpy as np
from scipy.integrate._ivp import dop853_coefficients as _dop
from scipy.interpolate import PchipInterpolator

from .errors import DomainError, IntegrationFailure, UseClosedForm
from .thermo_core import NATURAL, Conventions

SUDDEN = "sudden"
ADIABATIC = "adiabatic"
LINEAR = "linear"
SMOOTH = "smooth"
TABULATED = "tabulated"
KINDS = (SUDDEN, ADIABATIC, LINEAR, SMOOTH, TABULATED)
INTEGRATED_KINDS = (LINEAR, SMOOTH, TABULATED)

DEFAULT_TOL = 1e-10
# the integrator runs this much tighter than the requested tolerance so that
# the accumulated Wronskian drift stays below 10*tol over ~1e4 oscillations
LOCAL_TOL_FACTOR = 1e-2
MIN_LOCAL_TOL = 1e-13


@dataclass(frozen=True)
class FrequencyProtocol:
    kind: str
    omega_start: float
    omega_end: float
    duration: float = 0.0
    times: Optional[Tuple[float, ...]] = None
    omegas: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown protocol kind {self.kind!r}; expected one of {KINDS}")
        for name in ("omega_start", "omega_end"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise DomainError(f"{name} must be positive, got {v!r}")
        if not (self.duration >= 0 and math.isfinite(self.duration)):
            raise DomainError(f"duration must be >= 0, got {self.duration!r}")
        if self.kind == TABULATED:
            if self.times is None or self.omegas is None:
                raise DomainError("tabulated protocol needs times and omegas")
            t = np.asarray(self.times, float)
            w = np.asarray(self.omegas, float)
            if t.shape != w.shape or t.size < 2:
                raise DomainError("tabulated protocol needs >= 2 matching samples")
            if np.any(np.diff(t) <= 0) or t[0] != 0.0:
                raise DomainError("tabulated times must start at 0 and increase strictly")
            if np.any(w <= 0):
                raise DomainError("tabulated omegas must be strictly positive")
            if not (math.isclose(w[0], self.omega_start) and math.isclose(w[-1], self.omega_end)):
                raise DomainError("tabulated omegas must start at omega_start and end at omega_end")
            object.__setattr__(self, "times", tuple(t.tolist()))
            object.__setattr__(self, "omegas", tuple(w.tolist()))
            object.__setattr__(self, "duration", float(t[-1]))

    @classmethod
    def sudden(cls, w0, w1):
        return cls(SUDDEN, w0, w1)

    @classmethod
    def adiabatic(cls, w0, w1):
        return cls(ADIABATIC, w0, w1)

    @classmethod
    def linear(cls, w0, w1, duration):
        return cls(LINEAR, w0, w1, duration)

    @classmethod
    def smooth(cls, w0, w1, duration):
        return cls(SMOOTH, w0, w1, duration)

    @classmethod
    def tabulated(cls, times, omegas):
        return cls(TABULATED, omegas[0], omegas[-1], times[-1], tuple(times), tuple(omegas))

    def reversed(self) -> "FrequencyProtocol":
        """Same shape run backwards in time (omega_end -> omega_start)."""
        if self.kind == TABULATED:
            T = self.duration
            times = tuple(T - t for t in reversed(self.times))
            return FrequencyProtocol.tabulated(times, tuple(reversed(self.omegas)))
        return FrequencyProtocol(self.kind, self.omega_end, self.omega_start, self.duration)

    def omega_at(self, t):
        """omega_t for the integrated kinds (vectorised over ``t``)."""
        t = np.asarray(t, float)
        kind_code, params, xb, coef = _kernel_args(self)
        out = np.sqrt(np.vectorize(lambda s: _omega_sq(kind_code, s, params, xb, coef))(t))
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class ClassicalSolutionPair:
    X: float
    Xdot: float
    Y: float
    Ydot: float
    wronskian_drift: float
    steps: int = 0
    rejected: int = 0

    @property
    def wronskian(self) -> float:
        return self.X * self.Ydot - self.Y * self.Xdot


@dataclass(frozen=True)
class AdiabaticityResult:
    q_star: float
    method: str
    error_estimate: float
    wronskian_drift: float = 0.0


@dataclass(frozen=True)
class Covariance:
    """Second moments of a centered single-mode state: <x^2>, <p^2> and <xp+px>/2."""

    xx: float
    pp: float
    xp: float = 0.0

    @property
    def det(self) -> float:
        return self.xx * self.pp - self.xp * self.xp

    def matrix(self) -> np.ndarray:
        return np.array([[self.xx, self.xp], [self.xp, self.pp]])

    def symplectic_eigenvalue(self, conv: Conventions = NATURAL) -> float:
        """sqrt(det)/hbar; 1/2 for pure states."""
        return math.sqrt(max(self.det, 0.0)) / conv.hbar

    def energy(self, omega: float, conv: Conventions = NATURAL) -> float:
        m = conv.mass
        return self.pp / (2 * m) + 0.5 * m * omega**2 * self.xx

    def check(self, conv: Conventions = NATURAL, rtol: float = 1e-9) -> None:
        if not (self.xx > 0 and self.pp > 0):
            raise DomainError("covariance quadratures must be positive")
        bound = (conv.hbar / 2) ** 2
        if self.det < bound * (1 - rtol):
            raise DomainError(f"uncertainty relation violated: det={self.det!r} < (hbar/2)^2={bound!r}")

    @classmethod
    def thermal(cls, occupation: float, omega: float, conv: Conventions = NATURAL) -> "Covariance":
        """Gibbs-like state with the given occupation, quadratures split evenly between x and p."""
        if occupation < 0:
            raise DomainError("occupation must be >= 0")
        s = conv.hbar * (occupation + 0.5)
        return cls(xx=s / (conv.mass * omega), pp=s * conv.mass * omega, xp=0.0)


# ---------------------------------------------------------------------------
# DOP853 kernel (tableau from scipy, stepping loop compiled with numba)

_NS = _dop.N_STAGES
_A = np.ascontiguousarray(_dop.A[:_NS, :_NS])
_B = np.ascontiguousarray(_dop.B)
_C = np.ascontiguousarray(_dop.C[:_NS])
_E3 = np.ascontiguousarray(_dop.E3)
_E5 = np.ascontiguousarray(_dop.E5)

_KIND_CODE = {LINEAR: 0, SMOOTH: 1, TABULATED: 2}


@numba.njit(cache=True)
def _omega_sq(kind, t, params, xb, coef):
    w0 = params[0]
    w1 = params[1]
    T = params[2]
    if kind == 0:
        w = w0 + (w1 - w0) * (t / T)
        return w * w
    if kind == 1:
        u = t / T
        s = u * u * (3.0 - 2.0 * u)
        return w0 * w0 + (w1 * w1 - w0 * w0) * s
    n = xb.shape[0] - 1
    i = np.searchsorted(xb, t, side="right") - 1
    if i < 0:
        i = 0
    elif i > n - 1:
        i = n - 1
    dt = t - xb[i]
    w = ((coef[0, i] * dt + coef[1, i]) * dt + coef[2, i]) * dt + coef[3, i]
    return w * w


@numba.njit(cache=True)
def _rhs(kind, t, y, params, xb, coef, out):
    w2 = _omega_sq(kind, t, params, xb, coef)
    out[0] = y[1]
    out[1] = -w2 * y[0]
    out[2] = y[3]
    out[3] = -w2 * y[2]


@numba.njit(cache=True)
def _dop853(kind, params, xb, coef, rtol, atol, A, B, C, E3, E5, max_steps):
    T = params[2]
    wmax = params[3]
    ns = B.shape[0]
    y = np.array([0.0, 1.0, 1.0, 0.0])
    K = np.zeros((ns + 1, 4))
    f = np.zeros(4)
    tmp = np.zeros(4)
    ynew = np.zeros(4)
    _rhs(kind, 0.0, y, params, xb, coef, f)
    t = 0.0
    h = min(T, 0.1 / wmax)
    steps = 0
    rejected = 0
    last_rejected = False
    while t < T:
        if steps + rejected >= max_steps:
            return y, t, steps, rejected, 2
        final = t + h >= T
        if final:
            h = T - t
        if h <= 1e-15 * max(1.0, abs(t)):
            return y, t, steps, rejected, 1
        for j in range(4):
            K[0, j] = f[j]
        for s in range(1, ns):
            for j in range(4):
                acc = 0.0
                for r in range(s):
                    acc += A[s, r] * K[r, j]
                tmp[j] = y[j] + h * acc
            _rhs(kind, t + C[s] * h, tmp, params, xb, coef, K[s])
        for j in range(4):
            acc = 0.0
            for r in range(ns):
                acc += B[r] * K[r, j]
            ynew[j] = y[j] + h * acc
        _rhs(kind, t + h, ynew, params, xb, coef, K[ns])
        e5 = 0.0
        e3 = 0.0
        for j in range(4):
            sc = atol + max(abs(y[j]), abs(ynew[j])) * rtol
            a5 = 0.0
            a3 = 0.0
            for r in range(ns + 1):
                a5 += E5[r] * K[r, j]
                a3 += E3[r] * K[r, j]
            e5 += (a5 / sc) ** 2
            e3 += (a3 / sc) ** 2
        if e5 == 0.0 and e3 == 0.0:
            err = 0.0
        else:
            err = abs(h) * e5 / math.sqrt((e5 + 0.01 * e3) * 4.0)
        if err < 1.0:
            if err == 0.0:
                factor = 10.0
            else:
                factor = min(10.0, 0.9 * err ** (-1.0 / 8.0))
            if last_rejected:
                factor = min(1.0, factor)
            # snap onto T: t + (T - t) can round to just below T
            t = T if final else t + h
            for j in range(4):
                y[j] = ynew[j]
                f[j] = K[ns, j]
            h = h * factor
            steps += 1
            last_rejected = False
        else:
            h = h * max(0.2, 0.9 * err ** (-1.0 / 8.0))
            rejected += 1
            last_rejected = True
    return y, t, steps, rejected, 0


def _kernel_args(protocol: FrequencyProtocol):
    w0, w1, T = protocol.omega_start, protocol.omega_end, protocol.duration
    if protocol.kind == TABULATED:
        pchip = PchipInterpolator(np.asarray(protocol.times), np.asarray(protocol.omegas))
        xb = np.ascontiguousarray(pchip.x)
        coef = np.ascontiguousarray(pchip.c)
        # pchip stays within neighbouring samples, so max(samples) bounds omega_t
        wmax = max(protocol.omegas)
    else:
        xb = np.zeros(2)
        coef = np.zeros((4, 1))
        wmax = max(w0, w1)
    params = np.array([w0, w1, T, wmax])
    return _KIND_CODE[protocol.kind], params, xb, coef


def local_tolerance(tolerance: float) -> float:
    return max(tolerance * LOCAL_TOL_FACTOR, MIN_LOCAL_TOL)


@functools.lru_cache(maxsize=4096)
def _solve_cached(protocol: FrequencyProtocol, tolerance: float) -> ClassicalSolutionPair:
    if protocol.duration == 0.0:
        return ClassicalSolutionPair(0.0, 1.0, 1.0, 0.0, 0.0)
    kind, params, xb, coef = _kernel_args(protocol)
    tol = local_tolerance(tolerance)
    # generous ceiling: ~ 1e4 steps per unit of omega*duration
    max_steps = int(1e5 + 1e4 * params[3] * protocol.duration)
    y, t, steps, rejected, status = _dop853(
        kind, params, xb, coef, tol, tol, _A, _B, _C, _E3, _E5, max_steps
    )
    if status != 0:
        reason = "step size underflow" if status == 1 else "step budget exhausted"
        raise IntegrationFailure(
            f"integration of {protocol.kind} protocol failed: {reason}",
            diagnostics={"t_reached": float(t), "duration": protocol.duration, "steps": int(steps),
                         "rejected": int(rejected), "local_tolerance": tol},
        )
    X, Xd, Y, Yd = (float(v) for v in y)
    w = X * Yd - Y * Xd
    drift = abs(w + 1.0)
    # project back onto unit Wronskian (det of the transfer matrix = 1); the
    # raw drift is kept as the error estimate.  With this, Q* >= 1 holds by
    # AM-GM instead of only up to the integration error.
    scale = 1.0 / math.sqrt(abs(w))
    X, Xd, Y, Yd = X * scale, Xd * scale, Y * scale, Yd * scale
    return ClassicalSolutionPair(X, Xd, Y, Yd, drift, int(steps), int(rejected))


def solve_classical_pair(protocol: FrequencyProtocol, tolerance: float = DEFAULT_TOL) -> ClassicalSolutionPair:
    """Fundamental solutions X (X(0)=0, X'(0)=1) and Y (Y(0)=1, Y'(0)=0) at the end of the ramp.

    The returned values are rescaled to an exact unit Wronskian;
    ``wronskian_drift`` reports the unprojected integration error.
    """
    if protocol.kind not in INTEGRATED_KINDS:
        raise UseClosedForm(f"{protocol.kind} protocol has a closed-form Q*; nothing to integrate")
    if not tolerance > 0:
        raise DomainError("tolerance must be positive")
    return _solve_cached(protocol, float(tolerance))


def sudden_q_star(w0: float, w1: float) -> float:
    return (w0 * w0 + w1 * w1) / (2.0 * w0 * w1)


def q_star_from_pair(pair: ClassicalSolutionPair, w0: float, w1: float) -> float:
    X, Xd, Y, Yd = pair.X, pair.Xdot, pair.Y, pair.Ydot
    return (w0**2 * (w1**2 * X**2 + Xd**2) + (w1**2 * Y**2 + Yd**2)) / (2.0 * w0 * w1)


def adiabaticity_Q(protocol: FrequencyProtocol, tolerance: float = DEFAULT_TOL) -> AdiabaticityResult:
    """Ratio of the final mean energy to its adiabatic value after the stroke.

    Q* >= |Wronskian| by the AM-GM inequality, so Q* >= 1 holds up to the
    reported drift, which doubles as the error estimate.
    """
    w0, w1 = protocol.omega_start, protocol.omega_end
    if protocol.kind == SUDDEN:
        return AdiabaticityResult(sudden_q_star(w0, w1), "closed-form limit", 0.0)
    if protocol.kind == ADIABATIC:
        return AdiabaticityResult(1.0, "closed-form limit", 0.0)
    pair = solve_classical_pair(protocol, tolerance)
    q = q_star_from_pair(pair, w0, w1)

    # independent algebra on the same pair: evolve a thermal state, compare energies
    ref = Covariance.thermal(1.0, w0)
    out = _apply_pair(pair, ref, NATURAL)
    q_cov = out.energy(w1) / (w1 * 1.5)
    if abs(q_cov - q) > 10 * tolerance * max(1.0, q):
        raise IntegrationFailure(
            "Q* cross-check against covariance propagation failed",
            diagnostics={"q_pair": q, "q_covariance": q_cov},
        )
    return AdiabaticityResult(q, "ODE", pair.wronskian_drift, pair.wronskian_drift)


def _apply_pair(pair: ClassicalSolutionPair, cov: Covariance, conv: Conventions) -> Covariance:
    m = conv.mass
    M = np.array([[pair.Y, pair.X / m], [m * pair.Ydot, pair.Xdot]])
    S = M @ cov.matrix() @ M.T
    return Covariance(xx=float(S[0, 0]), pp=float(S[1, 1]), xp=float(0.5 * (S[0, 1] + S[1, 0])))


def propagate_covariance(
    protocol: FrequencyProtocol,
    initial: Covariance,
    conv: Conventions = NATURAL,
    tolerance: float = DEFAULT_TOL,
) -> Covariance:
    """Second moments after the stroke: x -> Y x + (X/m) p,  p -> m Y' x + X' p.

    The symbolic adiabatic limit rescales x by sqrt(w0/w1) and p by
    sqrt(w1/w0); the dynamical phase is dropped, which is exact for the
    rotation-invariant states the cycle produces.
    """
    initial.check(conv)
    w0, w1 = protocol.omega_start, protocol.omega_end
    if protocol.kind == SUDDEN:
        return initial
    if protocol.kind == ADIABATIC:
        r = w0 / w1
        return Covariance(xx=initial.xx * r, pp=initial.pp / r, xp=initial.xp)
    if protocol.duration == 0.0:
        return initial
    return _apply_pair(solve_classical_pair(protocol, tolerance), initial, conv)
