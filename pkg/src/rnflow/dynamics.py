"""Regularized Newton flow and steepest descent with control, in the y variable.

With ``y = x + mu v`` the differential inclusion ``v in df(x)``,
``lam x' + v' + v + eps x = 0`` becomes the Lipschitz ODE

    y' = -mu yosida(y) - mu eps(t) prox(y)          (flow "rn_tikhonov")

and the steepest-descent-with-control variant is

    y' = -mu yosida(y) - eps(t) y                   (flow "sdc")

Both are integrated with classical fixed-step RK4; ``x = prox(y)`` and
``v = yosida(y)`` are outputs only.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .convex_atoms import ConvexFunction, NoConjugateRuleError, inf_value, subgradient_check
from .moreau import EnvelopeContext, yosida
from .schedules import Constant, PowerLaw, Schedule, Zero

FLOWS = ("rn_tikhonov", "sdc")


class NumericalAbort(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class DynamicSpec:
    flow: str
    f: ConvexFunction
    mu: float
    schedule: Schedule
    x0: np.ndarray
    v0: np.ndarray
    T: float
    h: float = 1e-3
    sample_stride: int = 10

    def __post_init__(self):
        if self.flow not in FLOWS:
            raise ValueError(f"flow must be one of {FLOWS}, got {self.flow!r}")
        if not self.mu > 0:
            raise ValueError(f"mu must be positive (field 'mu', got {self.mu})")
        if not self.h > 0:
            raise ValueError(f"step h must be positive (field 'h', got {self.h})")
        if not self.T >= 0:
            raise ValueError(f"horizon T must be nonnegative (field 'T', got {self.T})")
        if int(self.sample_stride) != self.sample_stride or self.sample_stride < 1:
            raise ValueError("sample_stride must be a positive integer")
        x0 = np.array(self.x0, dtype=float).reshape(-1)
        v0 = np.array(self.v0, dtype=float).reshape(-1)
        if x0.size != self.f.dim or v0.size != self.f.dim:
            raise ValueError(f"x0 and v0 must have length {self.f.dim}")
        if not subgradient_check(self.f, x0, v0, 1e-7):
            raise ValueError("v0 not a subgradient at x0 (Fenchel equality fails)")
        try:
            m = inf_value(self.f)
        except NoConjugateRuleError:
            m = 0.0
        if abs(m) > 1e-9:
            raise ValueError(f"f must have minimum value 0 (got inf f = {m}); use shift_to_zero_min")
        nsteps = round(self.T / self.h)
        if abs(nsteps * self.h - self.T) > 1e-9 * max(1.0, self.T):
            raise ValueError(f"T={self.T} is not an integer multiple of h={self.h}")
        x0.setflags(write=False)
        v0.setflags(write=False)
        object.__setattr__(self, "x0", x0)
        object.__setattr__(self, "v0", v0)
        object.__setattr__(self, "mu", float(self.mu))
        object.__setattr__(self, "sample_stride", int(self.sample_stride))

    @property
    def nsteps(self) -> int:
        return round(self.T / self.h)

    @property
    def y0(self) -> np.ndarray:
        return self.x0 + self.mu * self.v0

    @property
    def lam(self) -> float:
        return 1.0 / self.mu


@dataclass(eq=False)
class Trajectory:
    t: np.ndarray
    y: np.ndarray
    x: np.ndarray
    v: np.ndarray
    phi_x: np.ndarray
    norm_x: np.ndarray
    ydot_norm: np.ndarray
    mu: float
    flow: str = "rn_tikhonov"
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return self.t.size

    @property
    def dim(self) -> int:
        return self.y.shape[1]

    def until(self, T: float) -> "Trajectory":
        """Samples with ``t <= T`` (up to rounding)."""
        keep = self.t <= T * (1 + 1e-12) + 1e-12
        return Trajectory(self.t[keep], self.y[keep], self.x[keep], self.v[keep], self.phi_x[keep],
                          self.norm_x[keep], self.ydot_norm[keep], self.mu, self.flow, dict(self.meta))

    def header(self) -> list[str]:
        n = self.dim
        cols = ["t"]
        for name in "yxv":
            cols += [f"{name}_{i}" for i in range(n)]
        return cols + ["phi_x", "norm_x", "ydot_norm"]

    def to_array(self) -> np.ndarray:
        return np.column_stack([self.t, self.y, self.x, self.v, self.phi_x, self.norm_x, self.ydot_norm])

    def to_csv(self, path) -> None:
        np.savetxt(path, self.to_array(), delimiter=",", fmt="%.17g", header=",".join(self.header()), comments="")

    @classmethod
    def from_csv(cls, path, mu: float, flow: str = "rn_tikhonov") -> "Trajectory":
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        n = (data.shape[1] - 4) // 3
        cut = np.cumsum([1, n, n, n, 1, 1])
        t, y, x, v, phi, nx, yd = np.split(data, cut, axis=1)
        return cls(t[:, 0], y, x, v, phi[:, 0], nx[:, 0], yd[:, 0], mu, flow)


def _schedule_code(s: Schedule):
    if isinstance(s, Zero):
        return 0, 0.0, 0.0
    if isinstance(s, Constant):
        return 1, s.c, 0.0
    if isinstance(s, PowerLaw):
        return 2, s.c, s.p
    raise TypeError(f"unsupported schedule {s!r}")


def rhs_rn(f, mu, s: Schedule, t, y):
    """``-mu yosida(y) - mu eps(t) prox(y)``."""
    y = np.asarray(y, dtype=float)
    x = f.prox(mu, y)
    return -(y - x) - mu * float(s.value(t)) * x


def rhs_sdc(f, mu, s: Schedule, t, y):
    """``-mu yosida(y) - eps(t) y``."""
    y = np.asarray(y, dtype=float)
    return -mu * yosida(EnvelopeContext(f, mu), y) - float(s.value(t)) * y


def _rk4_python(spec, rhs):
    h, N, stride = spec.h, spec.nsteps, spec.sample_stride
    y = spec.y0.copy()
    ts, ys = [], []
    for step in range(N + 1):
        t = step * h
        if step % stride == 0 or step == N:
            ts.append(t)
            ys.append(y.copy())
        if step == N:
            break
        k1 = rhs(t, y)
        k2 = rhs(t + h / 2, y + h / 2 * k1)
        k3 = rhs(t + h / 2, y + h / 2 * k2)
        k4 = rhs(t + h, y + h * k3)
        y = y + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(y)):
            raise NumericalAbort(f"nonfinite state at t={t + h}")
    ys = np.array(ys)
    xs = spec.f.prox(spec.mu, ys)
    ydot = np.array([np.linalg.norm(rhs(t, yy)) for t, yy in zip(ts, ys)])
    return np.array(ts), ys, xs, ydot


def integrate(spec: DynamicSpec, backend: str = "compiled") -> Trajectory:
    """Fixed-step RK4 from 0 to ``spec.T``.

    Records every ``sample_stride``-th step plus the final step.  The
    ``"compiled"`` backend runs a numba kernel on a flattened prox plan;
    ``"python"`` steps with the reference :func:`rhs_rn`/:func:`rhs_sdc`
    and is meant for cross-checks on short horizons.
    """
    f, mu = spec.f, spec.mu
    if backend == "python":
        fun = rhs_rn if spec.flow == "rn_tikhonov" else rhs_sdc
        t, ys, xs, ydot = _rk4_python(spec, lambda tt, yy: fun(f, mu, spec.schedule, tt, yy))
    elif backend == "compiled":
        meta, params = _kernels.compile_plan(f, mu)
        N, stride = spec.nsteps, spec.sample_stride
        m = N // stride + 1 + (1 if N % stride else 0)
        n = f.dim
        ys, xs, ydot = np.empty((m, n)), np.empty((m, n)), np.empty(m)
        skind, sc, sp = _schedule_code(spec.schedule)
        flow = FLOWS.index(spec.flow)
        rows = _kernels.rk4_run(spec.y0, spec.h, N, stride, mu, flow, skind, sc, sp, meta, params, ys, xs, ydot)
        if rows < 0:
            raise NumericalAbort(f"nonfinite state at t={-rows * spec.h}")
        idx = np.arange(0, N + 1, stride)
        if N % stride:
            idx = np.append(idx, N)
        t = idx * spec.h
    else:
        raise ValueError(f"unknown backend {backend!r}")
    v = (ys - xs) / mu
    return Trajectory(
        t=t, y=ys, x=xs, v=v,
        phi_x=np.asarray(f.value(xs), dtype=float),
        norm_x=np.linalg.norm(xs, axis=1),
        ydot_norm=ydot,
        mu=mu, flow=spec.flow,
    )


def residual_original(traj: Trajectory, lam: float, s: Schedule) -> float:
    """Max over interior samples of ``||lam x' + v' + v + eps x||``.

    Derivatives are central differences of the sampled ``x`` and ``v``.
    """
    if len(traj) < 3:
        raise ValueError("need at least 3 samples")
    dt = np.diff(traj.t)
    if not np.allclose(dt, dt[0], rtol=1e-9, atol=0):
        raise ValueError("samples must be uniformly spaced")
    delta = dt[0]
    dx = (traj.x[2:] - traj.x[:-2]) / (2 * delta)
    dv = (traj.v[2:] - traj.v[:-2]) / (2 * delta)
    eps = np.asarray(s.value(traj.t[1:-1]))[:, None]
    res = lam * dx + dv + traj.v[1:-1] + eps * traj.x[1:-1]
    return float(np.max(np.linalg.norm(res, axis=1)))
