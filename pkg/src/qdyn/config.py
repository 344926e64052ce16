"""Run configuration: JSON parsing and validation."""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from typing import Any, Optional

from .errors import ConfigError, QdynError
from .models import MODEL_TYPES

ANALYSES = ("speed", "blp", "divisibility")

UNITS_CONVENTION = (
    "all frequencies and rates are dimensionless multiples of the model's reference scale "
    "(omega_c for ohmic, dn for polarization, lam for jc and the Pauli families); "
    "times are in the inverse unit"
)


@dataclass(frozen=True)
class Tolerances:
    h: float = 1e-4
    ode_tol: float = 1e-9
    blp_zero: float = 1e-8
    choi: float = 1e-10
    rate: float = 1e-12


@dataclass(frozen=True)
class Sweep:
    parameter: str
    start: float
    stop: float
    points: int = 16


@dataclass(frozen=True)
class RunConfig:
    model: str
    params: dict
    theta: float = math.pi / 2
    phi: float = 0.0
    t0: float = 0.0
    t1: float = 10.0
    n_points: int = 2000
    pairs: tuple = ()
    sweep: Optional[Sweep] = None
    analysis: tuple = ANALYSES
    out: str = "out"
    seed: int = 0
    tolerances: Tolerances = field(default_factory=Tolerances)

    def build_model(self, **overrides):
        return MODEL_TYPES[self.model](**{**self.params, **overrides})

    @property
    def horizon(self) -> float:
        return self.t1

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["pairs"] = [[list(a), list(b)] for a, b in self.pairs]
        d["analysis"] = list(self.analysis)
        return d


_TOP_KEYS = {
    "model", "theta", "phi", "t0", "t1", "n_points", "pairs", "sweep",
    "analysis", "out", "seed", "tolerances",
}


def _number(value: Any, path: str, integer: bool = False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"expected a number, got {value!r}", path)
    if integer:
        if isinstance(value, float) and not value.is_integer():
            raise ConfigError(f"expected an integer, got {value!r}", path)
        return int(value)
    if not math.isfinite(value):
        raise ConfigError("must be finite", path)
    return float(value)


def _angles(value: Any, path: str) -> tuple:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ConfigError("expected [theta, phi]", path)
    return (_number(value[0], f"{path}[0]"), _number(value[1], f"{path}[1]"))


def _model_fields(model: str) -> list[str]:
    return [f.name for f in dataclasses.fields(MODEL_TYPES[model])]


def from_mapping(doc: dict) -> RunConfig:
    """Validate a decoded JSON document and fill in defaults."""
    if not isinstance(doc, dict):
        raise ConfigError("top level must be an object", "$")
    if "model" not in doc:
        raise ConfigError("missing required key", "$.model")
    model = doc["model"]
    if model not in MODEL_TYPES:
        raise ConfigError(f"unknown model {model!r}; choose from {sorted(MODEL_TYPES)}", "$.model")
    fields = _model_fields(model)
    for key in doc:
        if key not in _TOP_KEYS and key not in fields:
            raise ConfigError(f"unknown key {key!r}", f"$.{key}")
    params = {k: _number(doc[k], f"$.{k}") for k in fields if k in doc}
    kw: dict = {"model": model, "params": params}

    for key in ("theta", "phi", "t0", "t1"):
        if key in doc:
            kw[key] = _number(doc[key], f"$.{key}")
    if "n_points" in doc:
        kw["n_points"] = _number(doc["n_points"], "$.n_points", integer=True)
    if "seed" in doc:
        kw["seed"] = _number(doc["seed"], "$.seed", integer=True)
    if "out" in doc:
        if not isinstance(doc["out"], str) or not doc["out"]:
            raise ConfigError("expected a non-empty path", "$.out")
        kw["out"] = doc["out"]
    if "pairs" in doc:
        if not isinstance(doc["pairs"], list):
            raise ConfigError("expected a list of [[theta, phi], [theta, phi]]", "$.pairs")
        pairs = []
        for i, p in enumerate(doc["pairs"]):
            if not isinstance(p, list) or len(p) != 2:
                raise ConfigError("expected [[theta, phi], [theta, phi]]", f"$.pairs[{i}]")
            pairs.append((_angles(p[0], f"$.pairs[{i}][0]"), _angles(p[1], f"$.pairs[{i}][1]")))
        kw["pairs"] = tuple(pairs)
    if "analysis" in doc:
        an = doc["analysis"]
        if not isinstance(an, list):
            raise ConfigError(f"expected a list drawn from {list(ANALYSES)}", "$.analysis")
        for i, name in enumerate(an):
            if name not in ANALYSES:
                raise ConfigError(f"unknown analysis {name!r}", f"$.analysis[{i}]")
        kw["analysis"] = tuple(a for a in ANALYSES if a in an)
    if "tolerances" in doc:
        tol = doc["tolerances"]
        if not isinstance(tol, dict):
            raise ConfigError("expected an object", "$.tolerances")
        names = [f.name for f in dataclasses.fields(Tolerances)]
        vals = {}
        for key, value in tol.items():
            if key not in names:
                raise ConfigError(f"unknown tolerance {key!r}", f"$.tolerances.{key}")
            vals[key] = _number(value, f"$.tolerances.{key}")
            if vals[key] <= 0:
                raise ConfigError("tolerances must be > 0", f"$.tolerances.{key}")
        kw["tolerances"] = Tolerances(**vals)
    if "sweep" in doc:
        kw["sweep"] = _sweep(doc["sweep"], fields)

    cfg = RunConfig(**kw)
    _validate(cfg)
    return cfg


def _sweep(sw: Any, fields: list[str]) -> Sweep:
    if not isinstance(sw, dict):
        raise ConfigError("expected an object", "$.sweep")
    for key in sw:
        if key not in ("parameter", "start", "stop", "points"):
            raise ConfigError(f"unknown key {key!r}", f"$.sweep.{key}")
    for key in ("parameter", "start", "stop"):
        if key not in sw:
            raise ConfigError("missing required key", f"$.sweep.{key}")
    if sw["parameter"] not in fields:
        raise ConfigError(f"parameter {sw['parameter']!r} is not in the model; choose from {fields}", "$.sweep.parameter")
    points = _number(sw.get("points", 16), "$.sweep.points", integer=True)
    if points < 2:
        raise ConfigError("need at least 2 points", "$.sweep.points")
    start = _number(sw["start"], "$.sweep.start")
    stop = _number(sw["stop"], "$.sweep.stop")
    if not stop > start:
        raise ConfigError("need stop > start", "$.sweep.stop")
    return Sweep(sw["parameter"], start, stop, points)


def _validate(cfg: RunConfig) -> None:
    if not (0.0 <= cfg.t0 < cfg.t1):
        raise ConfigError(f"need 0 <= t0 < t1, got [{cfg.t0}, {cfg.t1}]", "$.t1")
    if cfg.n_points < 3:
        raise ConfigError("need at least 3 grid points", "$.n_points")
    if not (0.0 <= cfg.theta <= math.pi):
        raise ConfigError("theta must lie in [0, pi]", "$.theta")
    if not (0.0 <= cfg.phi < 2 * math.pi):
        raise ConfigError("phi must lie in [0, 2pi)", "$.phi")
    for i, pair in enumerate(cfg.pairs):
        for j, (th, ph) in enumerate(pair):
            if not (0.0 <= th <= math.pi and 0.0 <= ph < 2 * math.pi):
                raise ConfigError("angles out of range", f"$.pairs[{i}][{j}]")
    try:
        cfg.build_model()
        if cfg.sweep is not None:
            cfg.build_model(**{cfg.sweep.parameter: cfg.sweep.start})
            cfg.build_model(**{cfg.sweep.parameter: cfg.sweep.stop})
    except QdynError as exc:
        raise ConfigError(str(exc), "$.sweep" if cfg.sweep is not None else "$") from exc


def parse_config(document: str) -> RunConfig:
    """Parse JSON text into a validated ``RunConfig``."""
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON: {exc.msg} at line {exc.lineno} column {exc.colno}", "$") from exc
    return from_mapping(doc)
