"""JSON model configurations.

A configuration is an object with a ``kind`` and the constructor parameters
of that kind, for example ``{"kind": "curie_weiss", "beta": 0.5}``.  Products
nest: ``{"kind": "product", "factors": [{...}, {...}]}``.  An optional
``tolerances`` object overrides the validation tolerances.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..core.system import HamiltonianSystem
from ..errors import ConfigError
from ..tensor import ProjectionMap, empirical_product, product
from .curie_weiss import curie_weiss, curie_weiss_two_state
from .hypercube import hypercube
from .jump_chain import jump_chain
from .langevin import langevin
from .levy import levy_remark
from .ou import ornstein_uhlenbeck
from .wright_fisher import wright_fisher, wright_fisher_1d

DEFAULT_TOLERANCES = {
    "derivative_rel": 1e-5,
    "stationarity": 1e-8,
    "reversibility": 1e-10,
    "pos_tol": 1e-8,
}

KINDS = ("ornstein_uhlenbeck", "langevin", "wright_fisher", "wright_fisher_1d", "curie_weiss",
         "hypercube", "jump_chain", "product", "empirical_product", "levy_remark")


@dataclass(frozen=True)
class ModelConfig:
    kind: str
    params: dict
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    source: str | None = None

    def to_json(self) -> dict:
        return {"kind": self.kind, **self.params, "tolerances": self.tolerances}


def _number(params, key, default=None, positive=False, nonnegative=False):
    if key not in params:
        if default is None:
            raise ConfigError(f"missing parameter {key!r}")
        return default
    val = params[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(f"parameter {key!r} must be a number, got {val!r}")
    val = float(val)
    if not np.isfinite(val):
        raise ConfigError(f"parameter {key!r} must be finite")
    if positive and not val > 0:
        raise ConfigError(f"parameter {key!r} must be positive, got {val}")
    if nonnegative and val < 0:
        raise ConfigError(f"parameter {key!r} must be nonnegative, got {val}")
    return val


def _vector(params, key):
    if key not in params:
        raise ConfigError(f"missing parameter {key!r}")
    try:
        arr = np.asarray(params[key], dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"parameter {key!r} is not numeric: {exc}") from None
    return arr


def parse_config(data: dict, source: str | None = None) -> ModelConfig:
    if not isinstance(data, dict):
        raise ConfigError("a model configuration must be a JSON object")
    if "kind" not in data:
        raise ConfigError("configuration has no 'kind'")
    kind = data["kind"]
    if kind not in KINDS:
        raise ConfigError(f"unknown model kind {kind!r}; expected one of {', '.join(KINDS)}")
    params = {k: v for k, v in data.items() if k not in ("kind", "tolerances")}
    tol = dict(DEFAULT_TOLERANCES)
    extra = data.get("tolerances", {})
    if not isinstance(extra, dict):
        raise ConfigError("'tolerances' must be an object")
    for k, v in extra.items():
        if k not in DEFAULT_TOLERANCES:
            raise ConfigError(f"unknown tolerance {k!r}")
        tol[k] = _number(extra, k, positive=True)
    return ModelConfig(kind, params, tol, source)


def load_config(path) -> ModelConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return parse_config(data, str(path))


def _build(kind: str, params: dict, on_simplex: bool = False) -> HamiltonianSystem:
    if kind == "ornstein_uhlenbeck":
        dom = params.get("domain")
        if dom is not None:
            if not (isinstance(dom, (list, tuple)) and len(dom) == 2):
                raise ConfigError("OU 'domain' must be [lower, upper]")
            dom = (list(np.atleast_1d(dom[0])), list(np.atleast_1d(dom[1])))
        return ornstein_uhlenbeck(params.get("V"), domain=dom)
    if kind == "langevin":
        return langevin(_number(params, "gamma", 1.0, positive=True), _number(params, "theta", 1.0, positive=True),
                        _number(params, "m", 1.0, positive=True), params.get("V"))
    if kind == "wright_fisher":
        reduced = params.get("reduced", False)
        if not isinstance(reduced, bool):
            raise ConfigError("'reduced' must be true or false")
        return wright_fisher(_vector(params, "mu"), reduced=reduced and not on_simplex)
    if kind == "wright_fisher_1d":
        return wright_fisher_1d(_vector(params, "mu"))
    if kind == "curie_weiss":
        beta = _number(params, "beta", nonnegative=True)
        two_state = params.get("two_state", on_simplex)
        return curie_weiss_two_state(beta) if two_state else curie_weiss(beta)
    if kind == "hypercube":
        N = params.get("N")
        if isinstance(N, bool) or not isinstance(N, int):
            raise ConfigError("hypercube 'N' must be an integer")
        return hypercube(N, _number(params, "beta", nonnegative=True))
    if kind == "jump_chain":
        system = jump_chain(_vector(params, "rates"), _vector(params, "pi"))
        if not system.reversible and not params.get("allow_nonreversible", False):
            raise ConfigError("jump_chain rates are not reversible with respect to pi (tolerance 1e-10)")
        return system
    if kind == "levy_remark":
        ent = params.get("entropy")
        if ent not in (None, "fitted"):
            raise ConfigError("levy_remark 'entropy' must be null or \"fitted\"")
        return levy_remark(ent)
    if kind in ("product", "empirical_product"):
        factors = params.get("factors")
        if not isinstance(factors, list) or not factors:
            raise ConfigError(f"{kind} needs a non-empty 'factors' list")
        simplex = kind == "empirical_product"
        systems = []
        for f in factors:
            sub = parse_config(f)
            systems.append(_build(sub.kind, sub.params, on_simplex=simplex))
        if kind == "product":
            return product(systems)
        sizes = tuple(s.domain.dimension for s in systems)
        scales = params.get("time_scales")
        if scales is not None:
            scales = _vector(params, "time_scales")
        return empirical_product(systems, ProjectionMap(sizes), scales)
    raise ConfigError(f"unknown model kind {kind!r}")


def build_system(config: ModelConfig | dict) -> HamiltonianSystem:
    """Construct the system described by ``config``; every failure surfaces as ``ConfigError``."""
    if isinstance(config, dict):
        config = parse_config(config)
    try:
        return _build(config.kind, config.params)
    except ConfigError:
        raise
    except (ValueError, TypeError, KeyError, IndexError) as exc:
        raise ConfigError(f"invalid {config.kind} configuration: {exc}") from None
