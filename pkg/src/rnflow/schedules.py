"""Vanishing controls t -> eps(t) and checks of the hypotheses placed on them.

Three families are built in: ``PowerLaw(c, p)`` with
``eps(t) = c (1 + t)^(-p)``, ``Constant(c)`` and ``Zero()``.  Together they
cover every regime that matters for the selection result: slow or fast
decay, square integrable or not, and with or without a constant ``k`` such
that ``-k eps^2 <= eps'``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np


class Classification(NamedTuple):
    slow: bool     # integral of eps over [0, inf) diverges
    in_L2: bool    # integral of eps^2 over [0, inf) is finite


def _check_time(t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("schedules are defined for t >= 0 only")
    return t


class Schedule:
    def value(self, t):
        raise NotImplementedError

    def __call__(self, t):
        return self.value(t)

    def deriv(self, t):
        raise NotImplementedError

    def integral(self, T):
        raise NotImplementedError

    def classify(self) -> Classification:
        raise NotImplementedError

    def h2_constant(self) -> float | None:
        raise NotImplementedError

    @property
    def lipschitz(self) -> float:
        """Bound on ``|eps'|`` over ``[0, inf)``."""
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class PowerLaw(Schedule):
    c: float
    p: float

    def __post_init__(self):
        if not (self.c > 0 and math.isfinite(self.c)):
            raise ValueError(f"PowerLaw needs c > 0 (field 'c', got {self.c})")
        if not (self.p >= 0 and math.isfinite(self.p)):
            raise ValueError(f"PowerLaw needs p >= 0 (field 'p', got {self.p})")

    def value(self, t):
        t = _check_time(t)
        return self.c * (1.0 + t) ** (-self.p)

    def deriv(self, t):
        t = _check_time(t)
        return -self.c * self.p * (1.0 + t) ** (-self.p - 1.0)

    def integral(self, T):
        if T < 0:
            raise ValueError("T must be nonnegative")
        if math.isinf(T):
            return self.c / (self.p - 1.0) if self.p > 1 else math.inf
        if self.p == 1:
            return self.c * math.log1p(T)
        return self.c * ((1.0 + T) ** (1.0 - self.p) - 1.0) / (1.0 - self.p)

    def classify(self):
        return Classification(slow=self.p <= 1, in_L2=self.p > 0.5)

    def h2_constant(self):
        # need k c >= p (1+t)^(p-1) for all t >= 0
        if self.p > 1:
            return None
        return self.p / self.c

    @property
    def lipschitz(self):
        return self.c * self.p

    def to_json(self):
        return {"family": "power", "c": self.c, "p": self.p}


@dataclass(frozen=True)
class Constant(Schedule):
    c: float

    def __post_init__(self):
        if not (self.c >= 0 and math.isfinite(self.c)):
            raise ValueError(f"Constant needs c >= 0 (field 'c', got {self.c})")

    def value(self, t):
        return np.full_like(_check_time(t), self.c)

    def deriv(self, t):
        return np.zeros_like(_check_time(t))

    def integral(self, T):
        if T < 0:
            raise ValueError("T must be nonnegative")
        if self.c == 0:
            return 0.0
        return self.c * T

    def classify(self):
        return Classification(slow=self.c > 0, in_L2=self.c == 0)

    def h2_constant(self):
        return 0.0

    @property
    def lipschitz(self):
        return 0.0

    def to_json(self):
        return {"family": "constant", "c": self.c}


@dataclass(frozen=True)
class Zero(Schedule):
    def value(self, t):
        return np.zeros_like(_check_time(t))

    def deriv(self, t):
        return np.zeros_like(_check_time(t))

    def integral(self, T):
        if T < 0:
            raise ValueError("T must be nonnegative")
        return 0.0

    def classify(self):
        return Classification(slow=False, in_L2=True)

    def h2_constant(self):
        return 0.0

    @property
    def lipschitz(self):
        return 0.0

    def to_json(self):
        return {"family": "zero"}


def from_json(obj, path: str = "schedule") -> Schedule:
    if not isinstance(obj, dict) or "family" not in obj:
        raise ValueError(f"{path}: expected an object with a 'family' field")
    family = obj["family"]
    allowed = {"power": {"c", "p"}, "constant": {"c"}, "zero": set()}
    if family not in allowed:
        raise ValueError(f"{path}.family: unknown schedule family {family!r}")
    keys = set(obj) - {"family"}
    if keys != allowed[family]:
        extra, missing = keys - allowed[family], allowed[family] - keys
        what = f"unknown field(s) {sorted(extra)}" if extra else f"missing field(s) {sorted(missing)}"
        raise ValueError(f"{path}: {what}")
    for key in keys:
        if not isinstance(obj[key], (int, float)) or isinstance(obj[key], bool):
            raise ValueError(f"{path}.{key}: expected a number")
    try:
        if family == "power":
            return PowerLaw(float(obj["c"]), float(obj["p"]))
        if family == "constant":
            return Constant(float(obj["c"]))
        return Zero()
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from None


# --------------------------------------------------------------------------

@dataclass(frozen=True)
class H1Report:
    r: float | None
    holds: bool
    message: str = ""


def default_grid(center, radius: float = 3.0, points: int = 21):
    """Uniform grid on the cube ``center + [-radius, radius]^n`` as an (N, n) array."""
    center = np.atleast_1d(np.asarray(center, dtype=float))
    axes = [np.linspace(c - radius, c + radius, points) for c in center]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def h1_model_check(f, schedule: Schedule, project_argmin: Callable, grid, min_dist: float = 1e-8) -> H1Report:
    """Check the quadratic-growth shortcut for the (H1) hypothesis.

    Estimates ``r = inf 2 f(x) / dist(x, C)^2`` over the grid points lying
    outside ``C = argmin f`` (``f`` must have minimum value 0), where
    distances come from the exact projection ``project_argmin``.  A
    positive ``r`` together with a square-integrable schedule is sufficient
    for (H1); it is not necessary.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 2 or grid.shape[1] > 3:
        raise ValueError("grid must be an (N, n) array with n <= 3")
    dist = np.linalg.norm(grid - project_argmin(grid), axis=-1)
    outside = dist > min_dist
    if not np.any(outside):
        return H1Report(None, False, "no grid point lies outside argmin f")
    ratio = 2.0 * np.asarray(f.value(grid[outside]), dtype=float) / dist[outside] ** 2
    ratio = ratio[np.isfinite(ratio)] if np.any(np.isfinite(ratio)) else ratio
    r = float(np.min(ratio))
    in_l2 = schedule.classify().in_L2
    if not r > 0:
        return H1Report(r, False, "grid estimate of r is not positive (grid too coarse or no quadratic growth)")
    if not in_l2:
        return H1Report(r, False, "schedule is not square integrable")
    return H1Report(r, True)
