"""RunConfig loading, schema validation and conversion to/from model objects."""
from __future__ import annotations

import json
import sys
from importlib import resources

import jsonschema

from .cycle import CycleSpec
from .errors import DomainError
from .protocols import DEFAULT_TOL, TABULATED, FrequencyProtocol
from .thermo_core import (
    Coherent,
    Conventions,
    CorrelatedPair,
    CustomPowerLaw,
    CustomTabulated,
    ReservoirSpec,
    Thermal,
)


class ConfigError(Exception):
    """Malformed or incomplete configuration (CLI exit code 2)."""


def load_schema(name: str) -> dict:
    text = resources.files("otto_ne").joinpath("schemas", name).read_text(encoding="utf-8")
    return json.loads(text)


def validate_config(cfg: dict) -> dict:
    try:
        jsonschema.validate(cfg, load_schema("run_config.schema.json"))
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config invalid at {path}: {exc.message}") from None
    return cfg


def load_config(path) -> dict:
    """Read a JSON RunConfig from ``path`` ('-' for stdin); None gives an empty config."""
    if path is None:
        return {}
    try:
        if path == "-":
            cfg = json.load(sys.stdin)
        else:
            with open(path, encoding="utf-8") as fh:
                cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from None
    return validate_config(cfg)


def require(cfg, *keys):
    missing = [k for k in keys if k not in cfg]
    if missing:
        raise ConfigError(f"config is missing required field(s): {', '.join(missing)}")


def conventions_from(cfg) -> Conventions:
    return Conventions(**cfg.get("conventions", {}))


def deviation_from(block):
    if block is None:
        return Thermal()
    kind = block["type"]
    if kind == "thermal":
        return Thermal()
    if kind == "correlated_pair":
        return CorrelatedPair(block["lambda"], block.get("mode", "one-atom"))
    if kind == "coherent":
        return Coherent(block["epsilon"], block["phi"])
    if kind == "power_law":
        return CustomPowerLaw(block["c"], block["p"])
    return CustomTabulated(tuple(block["omegas"]), tuple(block["values"]))


def deviation_to(dev) -> dict:
    if isinstance(dev, Thermal):
        return {"type": "thermal"}
    if isinstance(dev, CorrelatedPair):
        return {"type": "correlated_pair", "lambda": dev.lam, "mode": dev.mode}
    if isinstance(dev, Coherent):
        return {"type": "coherent", "epsilon": dev.epsilon, "phi": dev.phi}
    if isinstance(dev, CustomPowerLaw):
        return {"type": "power_law", "c": dev.c, "p": dev.p}
    return {"type": "tabulated", "omegas": list(dev.omegas), "values": list(dev.values)}


def reservoir_from(block) -> ReservoirSpec:
    return ReservoirSpec(block["beta"], deviation_from(block.get("deviation")))


def reservoir_to(res: ReservoirSpec) -> dict:
    return {"beta": res.beta, "deviation": deviation_to(res.deviation)}


def protocol_from(block, w_start, w_end) -> FrequencyProtocol:
    block = block or {"kind": "adiabatic"}
    if block["kind"] == TABULATED:
        if "times" not in block or "omegas" not in block:
            raise ConfigError("tabulated protocol needs 'times' and 'omegas'")
        return FrequencyProtocol.tabulated(tuple(block["times"]), tuple(block["omegas"]))
    return FrequencyProtocol(block["kind"], w_start, w_end, block.get("duration", 0.0))


def protocol_to(p: FrequencyProtocol) -> dict:
    out = {"kind": p.kind, "duration": p.duration}
    if p.kind == TABULATED:
        out.update(times=list(p.times), omegas=list(p.omegas))
    return out


def spec_from(cfg) -> CycleSpec:
    require(cfg, "cold", "hot", "omega1", "omega2")
    w1, w2 = cfg["omega1"], cfg["omega2"]
    try:
        comp = protocol_from(cfg.get("compression"), w1, w2)
        if "expansion" in cfg:
            exp = protocol_from(cfg["expansion"], w2, w1)
        else:
            exp = comp.reversed()
        return CycleSpec(
            cold=reservoir_from(cfg["cold"]),
            hot=reservoir_from(cfg["hot"]),
            omega1=w1,
            omega2=w2,
            compression=comp,
            expansion=exp,
            cycle_time=cfg.get("cycle_time", 1.0),
            conv=conventions_from(cfg),
            tolerance=cfg.get("tolerance", DEFAULT_TOL),
        )
    except DomainError as exc:
        raise ConfigError(str(exc)) from None


def spec_to_config(spec: CycleSpec) -> dict:
    return {
        "conventions": {"hbar": spec.conv.hbar, "k_B": spec.conv.k_B, "mass": spec.conv.mass},
        "cold": reservoir_to(spec.cold),
        "hot": reservoir_to(spec.hot),
        "omega1": spec.omega1,
        "omega2": spec.omega2,
        "compression": protocol_to(spec.compression),
        "expansion": protocol_to(spec.expansion),
        "cycle_time": spec.cycle_time,
        "tolerance": spec.tolerance,
    }
