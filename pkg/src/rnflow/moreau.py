"""Moreau envelopes, Yosida approximations and the prox potential psi.

``psi(y) = 0.5 ||y||^2 - mu * env_mu(y)`` is convex and C^1 with
``grad psi = prox_{mu f}``.  The same function also equals
``mu * (f*)_{1/mu}(y / mu)``; :func:`psi_dual` evaluates it that way,
through the conjugate only, so the two routes can be compared.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .convex_atoms import ConvexFunction


@dataclass(frozen=True)
class EnvelopeContext:
    f: ConvexFunction
    mu: float

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError(f"mu must be positive, got {self.mu}")

    @property
    def lam(self) -> float:
        return 1.0 / self.mu


def _sq(v):
    return np.sum(v * v, axis=-1)


def envelope(ctx: EnvelopeContext, y):
    y = np.asarray(y, dtype=float)
    x = ctx.f.prox(ctx.mu, y)
    return ctx.f.value(x) + _sq(y - x) / (2.0 * ctx.mu)


def yosida(ctx: EnvelopeContext, y):
    y = np.asarray(y, dtype=float)
    return (y - ctx.f.prox(ctx.mu, y)) / ctx.mu


def psi(ctx: EnvelopeContext, y):
    y = np.asarray(y, dtype=float)
    return 0.5 * _sq(y) - ctx.mu * envelope(ctx, y)


def psi_dual(ctx: EnvelopeContext, y):
    """``mu * (f*)_{1/mu}(y / mu)`` via the conjugate.

    The envelope of ``f*`` with parameter ``1/mu`` at ``y/mu`` is attained
    at ``u = yosida(y)``, giving ``mu f*(u) + 0.5 ||prox(y)||^2``.
    """
    y = np.asarray(y, dtype=float)
    x = ctx.f.prox(ctx.mu, y)
    u = (y - x) / ctx.mu
    return ctx.mu * ctx.f.conjugate(u) + 0.5 * _sq(x)


def theta(ctx: EnvelopeContext, y):
    """``mu * env_mu(y)``, the potential driving the unregularized flow."""
    return ctx.mu * envelope(ctx, y)


def viscosity(ctx: EnvelopeContext, y):
    """``mu * psi(y)``; its gradient is ``mu * prox_{mu f}``."""
    return ctx.mu * psi(ctx, y)


def central_gradient(fun, y, h: float = 1e-4):
    """Componentwise central-difference gradient of a scalar function."""
    y = np.asarray(y, dtype=float)
    n = y.shape[-1]
    steps = h * np.eye(n)
    plus = fun(y[..., None, :] + steps)
    minus = fun(y[..., None, :] - steps)
    return (plus - minus) / (2.0 * h)


def grad_psi_discrepancy(ctx: EnvelopeContext, y, h: float = 1e-4) -> float:
    """``||FD_h[psi](y) - prox(y)||`` with central differences."""
    if not h > 0:
        raise ValueError("h must be positive")
    y = np.asarray(y, dtype=float)
    fd = central_gradient(lambda z: psi(ctx, z), y, h)
    return float(np.linalg.norm(fd - ctx.f.prox(ctx.mu, y)))
