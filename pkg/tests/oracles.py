"""Brute-force references, independent of the closed forms under test."""
import numpy as np


def grid(lo, hi, points, dim):
    axes = [np.linspace(lo, hi, points)] * dim
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def grid_prox(fun, mu, y, lo=-10.0, hi=10.0, points=20001):
    """argmin_xi fun(xi) + |y - xi|^2 / (2 mu) on a grid (1D or 2D)."""
    y = np.atleast_1d(np.asarray(y, dtype=float))
    pts = grid(lo, hi, points, y.size)
    obj = fun(pts) + np.sum((pts - y) ** 2, axis=1) / (2 * mu)
    return pts[np.argmin(obj)]


def grid_sup(fun, z, lo=-10.0, hi=10.0, points=2001, with_arg=False):
    """sup_x <x, z> - fun(x) over a grid."""
    z = np.atleast_1d(np.asarray(z, dtype=float))
    pts = grid(lo, hi, points, z.size)
    vals = pts @ z - fun(pts)
    vals = np.where(np.isfinite(vals), vals, -np.inf)
    i = int(np.argmax(vals))
    return (float(vals[i]), pts[i]) if with_arg else float(vals[i])


def grid_min(fun, lo=-10.0, hi=10.0, points=20001, dim=1):
    pts = grid(lo, hi, points, dim)
    vals = fun(pts)
    i = np.argmin(vals)
    return float(vals[i]), pts[i]


def central_diff(fun, y, h):
    y = np.asarray(y, dtype=float)
    out = np.empty_like(y)
    for i in range(y.size):
        e = np.zeros_like(y)
        e[i] = h
        out[i] = (fun(y + e) - fun(y - e)) / (2 * h)
    return out
