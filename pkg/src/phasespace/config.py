"""Scenario configuration: strict YAML with unknown-key rejection.

Typos in scientific configs must fail loudly, so every mapping level is
validated against an explicit key set and all embedded invariants are
re-checked on load.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import yaml

from . import states
from .distributions import PhaseSpaceGrid
from .errors import ConfigError
from .evolution import KerrDamped, MasterEquationParams, PhaseInsensitive
from .fock import DEFAULT_CUTOFF
from .su11 import OrderingParameter

_TOP_KEYS = {"state", "order_a", "grid", "cutoff", "model", "times", "method",
             "output_dir", "oracle_dt"}
_GRID_KEYS = {"half_width", "points"}
_MODEL_KEYS = {
    "kerr_damped": {"kind", "omega", "chi", "gamma", "nbar"},
    "phase_insensitive": {"kind", "kappa"},
}
METHODS = ("closed-form", "oracle", "both")


@dataclass(frozen=True)
class ScenarioConfig:
    state: states.StateSpec
    orders: tuple
    grid: PhaseSpaceGrid
    cutoff: int = DEFAULT_CUTOFF
    model: MasterEquationParams | None = None
    times: tuple = ()
    method: str = "closed-form"
    output_dir: str | None = None
    oracle_dt: float | None = None
    sha256: str = field(default="", compare=False)


def _reject_unknown(mapping: dict, allowed: set, where: str) -> None:
    if not isinstance(mapping, dict):
        raise ConfigError(f"{where} must be a mapping, got {type(mapping).__name__}")
    unknown = set(mapping) - allowed
    if unknown:
        raise ConfigError(f"unknown {where} keys: {sorted(unknown)}")


def _parse_model(data) -> MasterEquationParams:
    if not isinstance(data, dict) or "kind" not in data:
        raise ConfigError("model must be a mapping with a 'kind' key")
    kind = data["kind"]
    if kind not in _MODEL_KEYS:
        raise ConfigError(f"unknown model kind {kind!r}; expected {sorted(_MODEL_KEYS)}")
    _reject_unknown(data, _MODEL_KEYS[kind], f"model[{kind}]")
    try:
        if kind == "phase_insensitive":
            return PhaseInsensitive(kappa=float(data.get("kappa", 0.0)))
        return KerrDamped(
            omega=float(data.get("omega", 0.0)),
            chi=float(data.get("chi", 0.0)),
            gamma=float(data.get("gamma", 0.0)),
            nbar=float(data.get("nbar", 0.0)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid model parameters: {exc}") from exc


def parse_config(text: str) -> ScenarioConfig:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"unparseable config: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config document must be a mapping")
    _reject_unknown(data, _TOP_KEYS, "config")
    if "state" not in data:
        raise ConfigError("config requires a 'state' entry")
    try:
        spec = states.spec_from_dict(data["state"])
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"invalid state: {exc}") from exc

    raw_orders = data.get("order_a", 0.0)
    if not isinstance(raw_orders, list):
        raw_orders = [raw_orders]
    try:
        orders = tuple(OrderingParameter(float(a)) for a in raw_orders)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"invalid order_a: {exc}") from exc

    if "grid" in data:
        _reject_unknown(data["grid"], _GRID_KEYS, "grid")
        try:
            grid = PhaseSpaceGrid(
                half_width=float(data["grid"].get("half_width")),
                points=int(data["grid"].get("points", 121)),
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid grid: {exc}") from exc
    else:
        grid = PhaseSpaceGrid(half_width=states.coverage_radius(spec) + 1.0, points=121)

    cutoff = data.get("cutoff", DEFAULT_CUTOFF)
    if not isinstance(cutoff, int) or cutoff < 2:
        raise ConfigError(f"cutoff must be an integer >= 2, got {cutoff!r}")

    model = _parse_model(data["model"]) if "model" in data else None

    times = data.get("times", ())
    if times is None:
        times = ()
    if not isinstance(times, (list, tuple)):
        raise ConfigError("times must be a list")
    try:
        times = tuple(float(t) for t in times)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid times: {exc}") from exc
    if any(t < 0 for t in times):
        raise ConfigError("times must be nonnegative")

    method = data.get("method", "closed-form")
    if method not in METHODS:
        raise ConfigError(f"method must be one of {METHODS}, got {method!r}")

    output_dir = data.get("output_dir")
    if output_dir is not None and not isinstance(output_dir, str):
        raise ConfigError("output_dir must be a string")

    oracle_dt = data.get("oracle_dt")
    if oracle_dt is not None:
        oracle_dt = float(oracle_dt)
        if oracle_dt <= 0:
            raise ConfigError("oracle_dt must be positive")

    return ScenarioConfig(
        state=spec, orders=orders, grid=grid, cutoff=cutoff, model=model,
        times=tuple(sorted(times)), method=method, output_dir=output_dir,
        oracle_dt=oracle_dt,
        sha256=hashlib.sha256(text.encode()).hexdigest(),
    )


def load_config(path) -> ScenarioConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)
