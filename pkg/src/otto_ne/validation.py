"""Seeded random cycle specs and the second-law invariant battery.

Sample ``i`` of seed ``s`` is drawn from a Philox4x64-10 generator keyed
with ``(s, i)`` (numpy ``Philox(key=[s, i])``), so every sample can be
regenerated on its own and the stream does not depend on ``--jobs``.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import spec_to_config
from .cycle import CycleSpec, evaluate_cycle
from .errors import OttoError
from .protocols import FrequencyProtocol
from .second_law import engine_window, second_law_report
from .thermo_core import (
    NATURAL,
    Coherent,
    CorrelatedPair,
    CustomPowerLaw,
    ReservoirSpec,
    Thermal,
    mean_occupation,
    regime_check,
)

HIGH_T = "high_t"
OUT_OF_REGIME = "out_of_regime"

# hard tolerances of the battery
FIRST_LAW_RTOL = 1e-12
KLEIN_ATOL = 1e-12
MARGIN_ATOL = 1e-12
ETA_MAX_SLACK = 1e-4
ADIABATIC_LAW_RTOL = 1e-12
HIGH_T_GATE = 0.01


def sample_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[int(seed), int(index)]))


def _log_uniform(rng, lo, hi):
    return math.exp(rng.uniform(math.log(lo), math.log(hi)))


def _deviation(rng, beta, omega, allow_thermal_weight):
    """A random deviation model sized to stay a small perturbation of n(beta, omega)."""
    kind = rng.choice(["thermal", "one", "two", "coherent", "power"],
                      p=[allow_thermal_weight] + [(1 - allow_thermal_weight) / 4] * 4)
    y = beta * omega
    if kind == "thermal":
        return Thermal()
    if kind in ("one", "two"):
        lam = rng.uniform(0.0, 0.1) / beta
        return CorrelatedPair(lam, "one-atom" if kind == "one" else "two-atom")
    if kind == "coherent":
        # relative deviation eps*cos(phi)/(y*(n+1/2)*y) kept below ~5%
        eps = rng.uniform(0.0, 0.05) * y * min(1.0, y * (mean_occupation(beta, omega) + 0.5))
        return Coherent(eps, rng.uniform(0.0, 2 * math.pi))
    p = float(rng.choice([1.0, 2.0]))
    rel = rng.uniform(-0.05, 0.05)
    c = rel * (mean_occupation(beta, omega) + 0.5) * omega**p
    return CustomPowerLaw(c, p)


def _protocol(rng, w0, w1):
    kind = rng.choice(["adiabatic", "sudden", "linear", "smooth"], p=[0.5, 0.15, 0.2, 0.15])
    if kind in ("adiabatic", "sudden"):
        return FrequencyProtocol(str(kind), w0, w1)
    return FrequencyProtocol(str(kind), w0, w1, _log_uniform(rng, 0.1, 50.0))


def sample_spec(seed: int, index: int, envelope: str = HIGH_T) -> CycleSpec:
    rng = sample_rng(seed, index)
    w1 = rng.uniform(0.5, 2.0)
    w2 = w1 * rng.uniform(1.05, 4.0)
    if envelope == HIGH_T:
        y1 = _log_uniform(rng, 1e-3, 1e-2)
        y2 = min(y1 * rng.uniform(0.2, 1.2), HIGH_T_GATE)
    elif envelope == OUT_OF_REGIME:
        y1 = rng.uniform(0.5, 2.0)
        y2 = y1 * rng.uniform(0.2, 1.2)
    else:
        raise ValueError(f"unknown envelope {envelope!r}")
    b1, b2 = y1 / w1, y2 / w2
    cold_dev = Thermal() if rng.uniform() < 0.6 else _deviation(rng, b1, w1, 0.0)
    hot_dev = _deviation(rng, b2, w2, 0.2)
    comp = _protocol(rng, w1, w2)
    exp = _protocol(rng, w2, w1)
    return CycleSpec(
        cold=ReservoirSpec(b1, cold_dev),
        hot=ReservoirSpec(b2, hot_dev),
        omega1=w1,
        omega2=w2,
        compression=comp,
        expansion=exp,
        cycle_time=rng.uniform(0.5, 5.0),
    )


@dataclass
class CheckTally:
    passed: int = 0
    failed: int = 0
    skipped: int = 0
    worst_margin: float = math.inf

    def record(self, margin):
        """``margin`` >= 0 means the check passed; None means not applicable."""
        if margin is None:
            self.skipped += 1
            return True
        self.worst_margin = min(self.worst_margin, margin)
        if margin >= 0:
            self.passed += 1
            return True
        self.failed += 1
        return False


CHECKS = (
    "first_law",
    "klein_positivity",
    "second_law_margin",
    "eta_below_eta_max",
    "clausius_direction",
    "engine_window_consistency",
    "adiabatic_efficiency_law",
)


def evaluate_sample(spec: CycleSpec) -> dict:
    """Margins of every check for one spec (positive = satisfied, None = not applicable)."""
    res = evaluate_cycle(spec)
    rep = second_law_report(spec, res)
    win = engine_window(spec, res)
    y1 = spec.conv.hbar * spec.cold.beta * spec.omega1
    y2 = spec.conv.hbar * spec.hot.beta * spec.omega2
    maxE = max(abs(res.E_A), abs(res.E_B), abs(res.E_C), abs(res.E_D))
    in_window = win.ok and res.Q2 > 0
    engine = in_window and res.W_total > 0
    out = {}
    out["first_law"] = FIRST_LAW_RTOL * maxE - abs(res.W1 + res.W3 + res.Q2 + res.Q4)
    out["klein_positivity"] = rep.entropy_production + KLEIN_ATOL
    out["second_law_margin"] = rep.inequality_margin + MARGIN_ATOL if in_window else None
    out["eta_below_eta_max"] = (
        rep.eta_max + ETA_MAX_SLACK - res.efficiency if engine and max(y1, y2) <= HIGH_T_GATE else None
    )
    if res.W_total >= 0 and in_window:
        t_sign = math.copysign(1.0, rep.T2_eff - rep.T1_eff) if rep.T2_eff != rep.T1_eff else 0.0
        out["clausius_direction"] = 1.0 if t_sign > 0 else -1.0
    else:
        out["clausius_direction"] = None
    heat_signs = res.Q2 >= 0 and res.Q4 <= 0
    out["engine_window_consistency"] = 1.0 if win.ok == heat_signs else -1.0
    if spec.compression.kind == "adiabatic" and spec.expansion.kind == "adiabatic":
        target = 1.0 - spec.omega1 / spec.omega2
        out["adiabatic_efficiency_law"] = ADIABATIC_LAW_RTOL * abs(target) - abs(res.efficiency - target)
    else:
        out["adiabatic_efficiency_law"] = None
    regime = [regime_check(spec.cold, spec.omega1, spec.conv, emit=False),
              regime_check(spec.hot, spec.omega2, spec.conv, emit=False)]
    out["_regime_warnings"] = sum(len(r.warnings) for r in regime)
    return out


def _run_one(args):
    seed, index, envelope = args
    spec = sample_spec(seed, index, envelope)
    try:
        return index, evaluate_sample(spec), None
    except OttoError as exc:
        return index, None, f"{type(exc).__name__}: {exc}"


def run_battery(samples: int, seed: int = 42, envelope: str = HIGH_T, jobs: int = 1,
                max_failures_reported: int = 10) -> dict:
    tasks = [(seed, i, envelope) for i in range(samples)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_one, tasks, chunksize=max(1, samples // (4 * jobs))))
    else:
        results = [_run_one(t) for t in tasks]
    tallies = {name: CheckTally() for name in CHECKS}
    failures, physics_errors, regime_warnings = [], [], 0
    for index, margins, err in results:
        if err is not None:
            physics_errors.append({"index": index, "error": err})
            continue
        regime_warnings += margins.pop("_regime_warnings")
        bad = [name for name in CHECKS if not tallies[name].record(margins[name])]
        if bad and len(failures) < max_failures_reported:
            failures.append({"index": index, "checks": bad,
                             "spec": spec_to_config(sample_spec(seed, index, envelope))})
    checks = {}
    for name, t in tallies.items():
        checks[name] = {"passed": t.passed, "failed": t.failed, "skipped": t.skipped,
                        "worst_margin": None if math.isinf(t.worst_margin) else t.worst_margin}
    return {
        "seed": seed,
        "samples": samples,
        "envelope": envelope,
        "generator": "numpy Philox4x64-10, key=(seed, sample_index)",
        "checks": checks,
        "regime_warnings": regime_warnings,
        "physics_errors": physics_errors,
        "failures": failures,
        "all_passed": all(t.failed == 0 for t in tallies.values()),
    }
