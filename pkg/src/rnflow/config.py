"""Experiment configuration files (JSON) and their conversion to a DynamicSpec.

Example::

    {
      "problem": {"type": "quadratic", "A": [[1, 1], [1, 1]], "b": [-2, -2], "c": 2},
      "flow": "rn_tikhonov",
      "mu": 1.0,
      "schedule": {"family": "power", "c": 1.0, "p": 0.75},
      "x0": [3, -1],
      "T": 2000, "h": 0.001, "sample_stride": 10,
      "output_dir": "runs/hyperplane"
    }

``v0`` may be omitted for smooth problems, in which case it is the
gradient at ``x0``.  The problem is shifted to zero minimum before
integration.
"""
from __future__ import annotations

import json
import numbers
from dataclasses import asdict, dataclass, replace

import numpy as np

from . import convex_atoms as ca
from . import schedules
from .dynamics import FLOWS, DynamicSpec

REQUIRED = {"problem", "flow", "mu", "schedule", "x0", "T"}
OPTIONAL = {"v0", "h", "sample_stride", "output_dir", "seed"}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    problem: dict
    flow: str
    mu: float
    schedule: dict
    x0: list
    T: float
    v0: list | None = None
    h: float = 1e-3
    sample_stride: int = 10
    output_dir: str = "rnflow_out"
    seed: int = 0

    def to_json(self) -> dict:
        return asdict(self)

    def with_value(self, axis: str, value: float) -> "ExperimentConfig":
        if axis == "mu":
            return replace(self, mu=value)
        if axis in ("p", "c"):
            sched = dict(self.schedule)
            if axis not in schedules.from_json(sched).to_json():
                raise ConfigError(f"schedule family {sched.get('family')!r} has no parameter {axis!r}")
            sched[axis] = value
            return replace(self, schedule=sched)
        raise ConfigError(f"unknown sweep axis {axis!r}")

    def function(self) -> ca.ConvexFunction:
        return ca.from_json(self.problem)

    def schedule_obj(self) -> schedules.Schedule:
        return schedules.from_json(self.schedule)

    def to_spec(self) -> DynamicSpec:
        """Validate and build the integration spec; raises ConfigError."""
        try:
            f = ca.shift_to_zero_min(self.function())
            sched = self.schedule_obj()
            x0 = np.asarray(self.x0, dtype=float)
            if x0.shape != (f.dim,):
                raise ConfigError(f"x0: expected {f.dim} entries, got {x0.size}")
            if self.v0 is None:
                if f.lipschitz is None:
                    raise ConfigError("v0: required for nonsmooth problems (must be a subgradient at x0)")
                v0 = f.gradient(x0)
            else:
                v0 = np.asarray(self.v0, dtype=float)
            return DynamicSpec(self.flow, f, self.mu, sched, x0, v0, self.T, self.h, self.sample_stride)
        except ConfigError:
            raise
        except (ValueError, NotImplementedError) as exc:
            raise ConfigError(str(exc)) from None


def _number(obj, key):
    val = obj[key]
    if not isinstance(val, numbers.Real) or isinstance(val, bool):
        raise ConfigError(f"{key}: expected a number")
    return val


def _vector(obj, key):
    val = obj[key]
    if not isinstance(val, list) or not all(isinstance(v, numbers.Real) and not isinstance(v, bool) for v in val):
        raise ConfigError(f"{key}: expected a list of numbers")
    return [float(v) for v in val]


def parse_config(obj: dict) -> ExperimentConfig:
    if not isinstance(obj, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(obj) - REQUIRED - OPTIONAL
    if unknown:
        raise ConfigError(f"unknown config key(s) {sorted(unknown)}")
    missing = REQUIRED - set(obj)
    if missing:
        raise ConfigError(f"missing config key(s) {sorted(missing)}")
    if obj["flow"] not in FLOWS:
        raise ConfigError(f"flow: must be one of {list(FLOWS)}")
    kwargs = dict(
        problem=obj["problem"],
        flow=obj["flow"],
        mu=float(_number(obj, "mu")),
        schedule=obj["schedule"],
        x0=_vector(obj, "x0"),
        T=float(_number(obj, "T")),
    )
    if obj.get("v0") is not None:
        kwargs["v0"] = _vector(obj, "v0")
    if "h" in obj:
        kwargs["h"] = float(_number(obj, "h"))
    if "sample_stride" in obj:
        stride = _number(obj, "sample_stride")
        if int(stride) != stride:
            raise ConfigError("sample_stride: expected an integer")
        kwargs["sample_stride"] = int(stride)
    if "output_dir" in obj:
        if not isinstance(obj["output_dir"], str):
            raise ConfigError("output_dir: expected a string")
        kwargs["output_dir"] = obj["output_dir"]
    if "seed" in obj:
        seed = _number(obj, "seed")
        if int(seed) != seed:
            raise ConfigError("seed: expected an integer")
        kwargs["seed"] = int(seed)
    cfg = ExperimentConfig(**kwargs)
    # fail early on malformed trees
    try:
        cfg.function()
        cfg.schedule_obj()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def load_config(path) -> ExperimentConfig:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from None
    return parse_config(obj)
