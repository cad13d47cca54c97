"""Experiment configuration: YAML file, environment and command-line overrides.

A ``t`` specification is one of

* a number, ``"2.5"``;
* a range ``"a:b:steps"`` (``steps + 1`` equispaced points from ``a`` to ``b``);
* a named regime, scaled with ``n``:
  ``"mu_over_sqrt_n:MU"`` (``MU / sqrt(n)``), ``"mu_sqrt_n:MU"`` (``MU sqrt(n)``)
  or ``"n_pow:P[:C]"`` (``C n^P``, ``C`` defaults to 1).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np
import yaml

from rmtlab.errors import InvalidConfig, IoFailure
from rmtlab.models import ModelKind

SEED_ENV = "RMT_LAB_SEED"
ANALYSES = ("sample", "trajectories", "outlier", "gaf", "overlaps")
W_MODES = ("v", "uniform")


@dataclass(frozen=True)
class TSpec:
    """Parsed ``t`` specification; :meth:`values` resolves it for a given ``n``."""

    text: str
    start: float
    stop: float | None = None
    steps: int = 0
    regime: str | None = None

    @classmethod
    def parse(cls, spec) -> TSpec:
        if isinstance(spec, TSpec):
            return spec
        if isinstance(spec, (int, float)) and not isinstance(spec, bool):
            return cls(str(spec), float(spec))
        text = str(spec).strip()
        parts = text.split(":")
        try:
            if len(parts) == 1:
                return cls(text, float(parts[0]))
            head = parts[0]
            if head in ("mu_over_sqrt_n", "mu_sqrt_n") and len(parts) == 2:
                return cls(text, float(parts[1]), regime=head)
            if head == "n_pow" and len(parts) in (2, 3):
                coef = float(parts[2]) if len(parts) == 3 else 1.0
                return cls(text, coef, stop=float(parts[1]), regime=head)
            if len(parts) == 3:
                steps = int(parts[2])
                if steps < 1:
                    raise InvalidConfig(f"t range needs at least one step: {text!r}")
                return cls(text, float(parts[0]), float(parts[1]), steps)
        except ValueError as exc:
            raise InvalidConfig(f"cannot parse t specification {text!r}") from exc
        raise InvalidConfig(f"cannot parse t specification {text!r}")

    @property
    def is_range(self) -> bool:
        return self.regime is None and self.steps > 0

    def values(self, n: int) -> np.ndarray:
        if self.regime == "mu_over_sqrt_n":
            return np.array([self.start / math.sqrt(n)])
        if self.regime == "mu_sqrt_n":
            return np.array([self.start * math.sqrt(n)])
        if self.regime == "n_pow":
            return np.array([self.start * float(n) ** self.stop])
        if self.is_range:
            return np.linspace(self.start, self.stop, self.steps + 1)
        return np.array([self.start])


@dataclass(frozen=True)
class ExperimentConfig:
    kind: ModelKind = ModelKind.ADDITIVE
    n: int = 100
    t: TSpec = field(default_factory=lambda: TSpec.parse("2"))
    trials: int = 1
    master_seed: int = 0
    out: Path = Path("rmtlab-out")
    epsilon: float = 0.3
    analysis: str = "sample"
    w: str = "v"
    svg: bool = False
    workers: int = 1
    radius: float = 0.5
    c: complex = 0j

    def __post_init__(self):
        try:
            object.__setattr__(self, "kind", ModelKind.parse(self.kind))
        except ValueError as exc:
            raise InvalidConfig(str(exc)) from exc
        object.__setattr__(self, "t", TSpec.parse(self.t))
        object.__setattr__(self, "out", Path(self.out))
        object.__setattr__(self, "c", complex(self.c))
        if int(self.n) < 1:
            raise InvalidConfig("n must be at least 1")
        if int(self.trials) < 1:
            raise InvalidConfig("trials must be at least 1")
        if int(self.workers) < 1:
            raise InvalidConfig("workers must be at least 1")
        if not 0 <= int(self.master_seed) < 2**64:
            raise InvalidConfig("master seed must lie in [0, 2^64)")
        if self.analysis not in ANALYSES:
            raise InvalidConfig(f"unknown analysis {self.analysis!r}")
        if self.w not in W_MODES:
            raise InvalidConfig(f"w must be one of {W_MODES}")
        if not 0.0 < self.radius < 1.0:
            raise InvalidConfig("radius must lie in (0, 1)")
        ts = self.t_values()
        if self.kind is ModelKind.MULTIPLICATIVE and np.any(np.abs(ts) > 1.0):
            raise InvalidConfig("multiplicative model needs t in [-1, 1]")
        if self.analysis == "trajectories" and ts.shape[0] < 3:
            raise InvalidConfig("trajectories need a t range with at least two steps")

    def t_values(self) -> np.ndarray:
        return self.t.values(int(self.n))

    def as_record(self) -> dict:
        rec = {}
        for f in fields(self):
            val = getattr(self, f.name)
            if isinstance(val, ModelKind):
                val = val.value
            elif isinstance(val, TSpec):
                val = val.text
            elif isinstance(val, Path):
                val = str(val)
            elif isinstance(val, complex):
                val = [val.real, val.imag]
            rec[f.name] = val
        return rec


_ALIASES = {"model": "kind", "seed": "master_seed", "t_range": "t"}


def load_file(path) -> dict:
    """Read a YAML mapping of configuration fields."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise IoFailure(path, str(exc)) from exc
    try:
        data = yaml.safe_load(text) or {}
    except yaml.YAMLError as exc:
        raise InvalidConfig(f"{path}: {exc}") from exc
    if not isinstance(data, dict):
        raise InvalidConfig(f"{path}: top level must be a mapping")
    return data


def _normalise(raw: dict) -> dict:
    known = {f.name for f in fields(ExperimentConfig)}
    out = {}
    for key, val in raw.items():
        key = _ALIASES.get(key.replace("-", "_"), key.replace("-", "_"))
        if key not in known:
            raise InvalidConfig(f"unknown configuration field {key!r}")
        if key == "c" and isinstance(val, (list, tuple)):
            val = complex(*val)
        out[key] = val
    return out


def build_config(file_values: dict | None = None, overrides: dict | None = None, env=None) -> ExperimentConfig:
    """Merge defaults, file values, ``RMT_LAB_SEED`` and explicit overrides (in that order).

    ``None`` entries in ``overrides`` are ignored.
    """
    env = os.environ if env is None else env
    merged = _normalise(file_values or {})
    if SEED_ENV in env and env[SEED_ENV] != "":
        try:
            merged["master_seed"] = int(env[SEED_ENV])
        except ValueError as exc:
            raise InvalidConfig(f"{SEED_ENV} must be an integer") from exc
    merged.update(_normalise({k: v for k, v in (overrides or {}).items() if v is not None}))
    try:
        return ExperimentConfig(**merged)
    except TypeError as exc:
        raise InvalidConfig(str(exc)) from exc


def with_overrides(config: ExperimentConfig, **changes) -> ExperimentConfig:
    return replace(config, **changes)
