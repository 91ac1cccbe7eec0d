"""Compiled prox plans and the fixed-step RK4 loop.

A function tree is flattened, for a fixed ``mu``, into coordinate blocks.
Each block maps ``y`` to ``S + P_tau(y - O)`` where ``P_tau`` is one of a
handful of leaf proximal maps.  Translate/AddLinear/Scale/ShiftValue nodes
only change ``S``, ``O`` and ``tau``, so every tree built from the atom
library has an exact plan.
"""
from __future__ import annotations

import numpy as np
from numba import njit

from . import convex_atoms as ca

AFFINE, SOFT, CLIP, HALFSPACE, HSQD, PIECEWISE = range(6)


def compile_plan(f: ca.ConvexFunction, mu: float):
    """Return ``(meta, params)`` arrays describing ``prox_{mu f}``."""
    meta, params = [], []
    n = f.dim
    _collect(f, 0, np.zeros(n), 1.0, np.zeros(n), mu, meta, params)
    meta_arr = np.array(meta, dtype=np.int64).reshape(-1, 4)
    params_arr = np.concatenate(params) if params else np.zeros(0)
    return meta_arr, params_arr


def _emit(kind, start, out_shift, in_shift, tau, leaf_params, meta, params):
    offset = sum(p.size for p in params)
    k = out_shift.size
    meta.append((kind, start, k, offset))
    params.append(np.concatenate([out_shift, in_shift, [tau], *[np.ravel(p) for p in leaf_params]]).astype(float))


def _collect(node, start, S, a, O, mu, meta, params):
    if isinstance(node, ca.ShiftValue):
        return _collect(node.f, start, S, a, O, mu, meta, params)
    if isinstance(node, ca.Translate):
        return _collect(node.f, start, S + node.shift, a, O + node.shift, mu, meta, params)
    if isinstance(node, ca.AddLinear):
        return _collect(node.f, start, S, a, O + mu * a * node.slope, mu, meta, params)
    if isinstance(node, ca.Scale):
        return _collect(node.f, start, S, a * node.alpha, O, mu, meta, params)
    if isinstance(node, ca.SeparableSum):
        offs = node._offsets
        for child, lo, hi in zip(node.children, offs[:-1], offs[1:]):
            _collect(child, start + lo, S[lo:hi], a, O[lo:hi], mu, meta, params)
        return
    tau = mu * a
    if isinstance(node, ca.Quadratic):
        M = np.linalg.inv(np.eye(node.dim) + tau * node.A)
        _emit(AFFINE, start, S, O, tau, [M, -tau * M @ node.b], meta, params)
    elif isinstance(node, ca.IndicatorAffine):
        _emit(AFFINE, start, S, O, tau, [node._null, node._xbar], meta, params)
    elif isinstance(node, (ca.AbsValue, ca.NormOne)):
        _emit(SOFT, start, S, O, tau, [], meta, params)
    elif isinstance(node, ca.IndicatorBox):
        _emit(CLIP, start, S, O, tau, [node.lo, node.hi], meta, params)
    elif isinstance(node, ca.HalfSqDistToBox):
        _emit(HSQD, start, S, O, tau, [node.lo, node.hi], meta, params)
    elif isinstance(node, ca.IndicatorHalfspace):
        _emit(HALFSPACE, start, S, O, tau, [node.a, [node.beta, node._aa]], meta, params)
    elif isinstance(node, ca.Sum) and node._pw is not None:
        pw = node._pw
        _emit(PIECEWISE, start, S, O, tau, [[pw.breaks.size], pw.breaks, pw.slopes], meta, params)
    else:
        raise ca.NoProxRuleError(f"no compiled prox rule for {type(node).__name__}")


@njit(cache=True, nogil=True)
def prox_plan(y, meta, params, z, out):
    for bi in range(meta.shape[0]):
        kind, st, k, po = meta[bi, 0], meta[bi, 1], meta[bi, 2], meta[bi, 3]
        tau = params[po + 2 * k]
        lp = po + 2 * k + 1
        for i in range(k):
            z[i] = y[st + i] - params[po + k + i]
        if kind == AFFINE:
            for i in range(k):
                acc = params[lp + k * k + i]
                for j in range(k):
                    acc += params[lp + i * k + j] * z[j]
                out[st + i] = acc
        elif kind == SOFT:
            for i in range(k):
                zi = z[i]
                if zi > tau:
                    out[st + i] = zi - tau
                elif zi < -tau:
                    out[st + i] = zi + tau
                else:
                    out[st + i] = 0.0
        elif kind == CLIP or kind == HSQD:
            for i in range(k):
                c = min(max(z[i], params[lp + i]), params[lp + k + i])
                if kind == CLIP:
                    out[st + i] = c
                else:
                    out[st + i] = (z[i] + tau * c) / (1.0 + tau)
        elif kind == HALFSPACE:
            beta = params[lp + k]
            aa = params[lp + k + 1]
            dot = 0.0
            for i in range(k):
                dot += params[lp + i] * z[i]
            excess = max(dot - beta, 0.0) / aa
            for i in range(k):
                out[st + i] = z[i] - excess * params[lp + i]
        else:
            nb = int(params[lp])
            bp = lp + 1
            sp = bp + nb
            zi = z[0]
            res = zi - tau * params[sp + nb]
            for j in range(nb):
                if zi < params[bp + j] + tau * params[sp + j]:
                    res = zi - tau * params[sp + j]
                    break
                if zi <= params[bp + j] + tau * params[sp + j + 1]:
                    res = params[bp + j]
                    break
            out[st] = res
        for i in range(k):
            out[st + i] += params[po + i]


@njit(cache=True, nogil=True)
def schedule_value(kind, c, p, t):
    if kind == 0:
        return 0.0
    if kind == 1:
        return c
    return c * (1.0 + t) ** (-p)


@njit(cache=True, nogil=True)
def rhs_plan(t, y, mu, flow, skind, sc, sp, meta, params, z, x, out):
    prox_plan(y, meta, params, z, x)
    eps = schedule_value(skind, sc, sp, t)
    n = y.shape[0]
    for i in range(n):
        # mu * yosida(y) = y - x
        if flow == 0:
            out[i] = -(y[i] - x[i]) - mu * eps * x[i]
        else:
            out[i] = -(y[i] - x[i]) - eps * y[i]


@njit(cache=True, nogil=True)
def rk4_run(y0, h, nsteps, stride, mu, flow, skind, sc, sp, meta, params, ys, xs, ydot):
    """Integrate and fill the sample buffers; returns the number of samples
    written, or minus the step index at which a nonfinite state appeared."""
    n = y0.shape[0]
    y = y0.copy()
    z = np.empty(n)
    x = np.empty(n)
    k1 = np.empty(n)
    k2 = np.empty(n)
    k3 = np.empty(n)
    k4 = np.empty(n)
    tmp = np.empty(n)
    row = 0
    for step in range(nsteps + 1):
        t = step * h
        if step % stride == 0 or step == nsteps:
            rhs_plan(t, y, mu, flow, skind, sc, sp, meta, params, z, x, k1)
            for i in range(n):
                ys[row, i] = y[i]
                xs[row, i] = x[i]
            acc = 0.0
            for i in range(n):
                acc += k1[i] * k1[i]
            ydot[row] = np.sqrt(acc)
            row += 1
        if step == nsteps:
            break
        rhs_plan(t, y, mu, flow, skind, sc, sp, meta, params, z, x, k1)
        for i in range(n):
            tmp[i] = y[i] + 0.5 * h * k1[i]
        rhs_plan(t + 0.5 * h, tmp, mu, flow, skind, sc, sp, meta, params, z, x, k2)
        for i in range(n):
            tmp[i] = y[i] + 0.5 * h * k2[i]
        rhs_plan(t + 0.5 * h, tmp, mu, flow, skind, sc, sp, meta, params, z, x, k3)
        for i in range(n):
            tmp[i] = y[i] + h * k3[i]
        rhs_plan(t + h, tmp, mu, flow, skind, sc, sp, meta, params, z, x, k4)
        finite = True
        for i in range(n):
            y[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
            if not np.isfinite(y[i]):
                finite = False
        if not finite:
            return -(step + 1)
    return row
