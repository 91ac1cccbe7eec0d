"""Closed-form calculus of proper closed convex functions on R^n.

Every node exposes pointwise evaluation, the proximal mapping
``prox_{mu f}``, and (where a closed form is registered) the Fenchel
conjugate, the gradient and a projection onto ``argmin f``.  All methods
broadcast over leading axes: ``x`` may have shape ``(n,)`` or ``(..., n)``.

Extended reals are plain floats: ``+inf`` marks points outside an
indicator's domain.  Membership in a set (for indicators and for the
indicator-shaped conjugates of nonsmooth atoms) is decided with the
relative tolerance ``DOMAIN_TOL`` so that points produced by a projection
are not rejected because of rounding.
"""
from __future__ import annotations

import numbers
from dataclasses import dataclass, field

import numpy as np

DOMAIN_TOL = 1e-9


class NoProxRuleError(NotImplementedError):
    """Raised when a node has no exact proximal formula."""


class NoConjugateRuleError(NotImplementedError):
    """Raised when a node has no registered conjugate."""


class NoClosedFormError(NotImplementedError):
    """Raised when argmin/infimum information is not available in closed form."""


class UnboundedBelowError(ValueError):
    pass


def _vec(a, name):
    arr = np.array(a, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be a vector, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


def _mat(a, name):
    arr = np.array(a, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a matrix, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


def _freeze(obj, **arrays):
    for key, value in arrays.items():
        object.__setattr__(obj, key, value)


def _inf_where(mask, values):
    return np.where(mask, values, np.inf)


def _inside(ok):
    return np.where(ok, 0.0, np.inf)


class ConvexFunction:
    """Base node.  Subclasses are frozen dataclasses."""

    @property
    def dim(self) -> int:
        raise NotImplementedError

    @property
    def lipschitz(self) -> float | None:
        """Lipschitz constant of the gradient, ``None`` for nonsmooth nodes."""
        return None

    def value(self, x):
        raise NotImplementedError

    def __call__(self, x):
        return self.value(x)

    def prox(self, mu, y):
        raise NoProxRuleError(f"{type(self).__name__} has no prox rule")

    def conjugate(self, z):
        raise NoConjugateRuleError(f"{type(self).__name__} has no conjugate rule")

    def gradient(self, x):
        raise NotImplementedError(f"{type(self).__name__} is not differentiable")

    def project_argmin(self, x):
        """Euclidean projection onto ``argmin f``."""
        raise NoClosedFormError(f"no closed-form argmin for {type(self).__name__}")

    def to_json(self) -> dict:
        raise NotImplementedError

    # 1D convex piecewise-linear view, None when not applicable
    def _piecewise(self):
        return None

    def _check_dim(self, x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 0 or x.shape[-1] != self.dim:
            raise ValueError(
                f"dimension mismatch: {type(self).__name__} acts on R^{self.dim}, "
                f"got array of shape {x.shape}"
            )
        return x

    def __repr__(self):
        return f"{type(self).__name__}({self.to_json()})"


# --------------------------------------------------------------------------
# 1D piecewise-linear helper

@dataclass(frozen=True, eq=False)
class _Piecewise:
    """Convex piecewise-linear function of one variable.

    ``breaks`` (K,) sorted, ``slopes`` (K+1,) nondecreasing with
    ``slopes[j]`` the slope left of ``breaks[j]``, ``vals`` (K,) the values
    at the breakpoints.
    """

    breaks: np.ndarray
    slopes: np.ndarray
    vals: np.ndarray

    def value(self, x):
        b, s, v = self.breaks, self.slopes, self.vals
        out = np.interp(x, b, v)
        out = np.where(x < b[0], v[0] + s[0] * (x - b[0]), out)
        return np.where(x > b[-1], v[-1] + s[-1] * (x - b[-1]), out)

    def slope_at(self, x):
        # right derivative, used to merge pieces
        idx = np.searchsorted(self.breaks, x, side="right")
        return self.slopes[idx]

    def prox(self, tau, z):
        z = np.asarray(z, dtype=float)
        b, s = self.breaks, self.slopes
        out = z - tau * s[-1]
        done = np.zeros(z.shape, dtype=bool)
        for j in range(b.size):
            left = ~done & (z < b[j] + tau * s[j])
            out = np.where(left, z - tau * s[j], out)
            done |= left
            kink = ~done & (z <= b[j] + tau * s[j + 1])
            out = np.where(kink, b[j], out)
            done |= kink
        return out

    def conjugate(self, z):
        z = np.asarray(z, dtype=float)
        lo, hi = self.slopes[0], self.slopes[-1]
        tol = DOMAIN_TOL * (1.0 + np.abs(z))
        ok = (z >= lo - tol) & (z <= hi + tol)
        zc = np.clip(z, lo, hi)
        best = np.max(np.multiply.outer(zc, self.breaks) - self.vals, axis=-1)
        return _inf_where(ok, best)

    def argmin_interval(self):
        s, b = self.slopes, self.breaks
        if s[0] > 0 or s[-1] < 0:
            raise UnboundedBelowError("piecewise-linear function is unbounded below")
        lo = -np.inf if s[0] == 0 else b[np.argmax(s[1:] >= 0)]
        hi = np.inf if s[-1] == 0 else b[len(b) - 1 - np.argmax(s[:-1][::-1] <= 0)]
        return lo, hi

    def translate(self, shift):
        return _Piecewise(self.breaks + shift, self.slopes, self.vals)

    def add_linear(self, a):
        return _Piecewise(self.breaks, self.slopes + a, self.vals + a * self.breaks)

    def scale(self, alpha):
        return _Piecewise(self.breaks, alpha * self.slopes, alpha * self.vals)

    def shift_value(self, c):
        return _Piecewise(self.breaks, self.slopes, self.vals + c)

    @staticmethod
    def add(parts):
        breaks = np.unique(np.concatenate([p.breaks for p in parts]))
        vals = sum(p.value(breaks) for p in parts)
        probes = np.concatenate([[breaks[0] - 1.0], (breaks[:-1] + breaks[1:]) / 2, [breaks[-1] + 1.0]])
        slopes = np.zeros(breaks.size + 1)
        for p in parts:
            slopes = slopes + p.slope_at(probes)
        return _Piecewise(breaks, slopes, vals)


# --------------------------------------------------------------------------
# atoms

@dataclass(frozen=True, eq=False, repr=False)
class Quadratic(ConvexFunction):
    """``0.5 <A x, x> + <b, x> + c`` with ``A`` symmetric PSD."""

    A: np.ndarray
    b: np.ndarray | None = None
    c: float = 0.0

    def __post_init__(self):
        A = _mat(self.A, "A")
        if A.shape[0] != A.shape[1]:
            raise ValueError(f"A must be square, got shape {A.shape}")
        if not np.allclose(A, A.T, atol=1e-12):
            raise ValueError("A must be symmetric")
        eig = np.linalg.eigvalsh(A)
        if eig.size and eig[0] < -1e-10 * max(1.0, abs(eig[-1])):
            raise ValueError("A must be positive semidefinite")
        b = np.zeros(A.shape[0]) if self.b is None else _vec(self.b, "b")
        if b.shape[0] != A.shape[0]:
            raise ValueError("b has the wrong length")
        pinv = np.linalg.pinv(A, hermitian=True)
        pinv.setflags(write=False)
        _freeze(self, A=A, b=b, c=float(self.c), _pinv=pinv, _L=float(max(eig[-1], 0.0)) if eig.size else 0.0)

    @classmethod
    def least_squares(cls, M, d):
        """``0.5 ||M x - d||^2``."""
        M = np.atleast_2d(np.asarray(M, dtype=float))
        d = _vec(d, "d")
        return cls(M.T @ M, -M.T @ d, 0.5 * float(d @ d))

    @property
    def dim(self):
        return self.A.shape[0]

    @property
    def lipschitz(self):
        return self._L

    def value(self, x):
        x = self._check_dim(x)
        return 0.5 * np.einsum("...i,ij,...j->...", x, self.A, x) + x @ self.b + self.c

    def gradient(self, x):
        x = self._check_dim(x)
        return x @ self.A + self.b

    def prox(self, mu, y):
        y = self._check_dim(y)
        M = np.eye(self.dim) + mu * self.A
        rhs = y - mu * self.b
        return np.linalg.solve(M, rhs[..., None])[..., 0]

    def _in_range(self, w):
        resid = w - (w @ self._pinv) @ self.A
        return np.linalg.norm(resid, axis=-1) <= DOMAIN_TOL * (1.0 + np.linalg.norm(w, axis=-1))

    def conjugate(self, z):
        z = self._check_dim(z)
        w = z - self.b
        val = 0.5 * np.einsum("...i,ij,...j->...", w, self._pinv, w) - self.c
        return _inf_where(self._in_range(w), val)

    def project_argmin(self, x):
        x = self._check_dim(x)
        if not self._in_range(self.b):
            raise UnboundedBelowError("quadratic is unbounded below (b not in range of A)")
        return x - (x @ self.A + self.b) @ self._pinv

    def to_json(self):
        return {"type": "quadratic", "A": self.A.tolist(), "b": self.b.tolist(), "c": self.c}


@dataclass(frozen=True, eq=False, repr=False)
class AbsValue(ConvexFunction):
    """``|x|`` on the real line."""

    @property
    def dim(self):
        return 1

    def value(self, x):
        return np.abs(self._check_dim(x)[..., 0])

    def prox(self, mu, y):
        y = self._check_dim(y)
        return np.sign(y) * np.maximum(np.abs(y) - mu, 0.0)

    def conjugate(self, z):
        z = self._check_dim(z)[..., 0]
        return _inside(np.abs(z) <= 1.0 + DOMAIN_TOL)

    def project_argmin(self, x):
        return np.zeros_like(self._check_dim(x))

    def _piecewise(self):
        return _Piecewise(np.array([0.0]), np.array([-1.0, 1.0]), np.array([0.0]))

    def to_json(self):
        return {"type": "abs"}


@dataclass(frozen=True, eq=False, repr=False)
class NormOne(ConvexFunction):
    """``||x||_1`` on R^n."""

    n: int = 1

    def __post_init__(self):
        if int(self.n) < 1:
            raise ValueError("n must be positive")
        _freeze(self, n=int(self.n))

    @property
    def dim(self):
        return self.n

    def value(self, x):
        return np.sum(np.abs(self._check_dim(x)), axis=-1)

    def prox(self, mu, y):
        y = self._check_dim(y)
        return np.sign(y) * np.maximum(np.abs(y) - mu, 0.0)

    def conjugate(self, z):
        z = self._check_dim(z)
        return _inside(np.max(np.abs(z), axis=-1) <= 1.0 + DOMAIN_TOL)

    def project_argmin(self, x):
        return np.zeros_like(self._check_dim(x))

    def _piecewise(self):
        return AbsValue()._piecewise() if self.n == 1 else None

    def to_json(self):
        return {"type": "norm1", "n": self.n}


def _box_check(lo, hi):
    lo = _vec(lo, "lo")
    hi = _vec(hi, "hi")
    if lo.shape != hi.shape:
        raise ValueError("lo and hi must have the same length")
    if np.any(lo > hi):
        bad = int(np.argmax(lo > hi))
        raise ValueError(f"box requires lo <= hi componentwise (field 'lo'/'hi', index {bad})")
    return lo, hi


def _support_box(lo, hi, z):
    hi_part = np.where(z > 0, z * np.where(z > 0, hi, 0.0), 0.0)
    lo_part = np.where(z < 0, z * np.where(z < 0, lo, 0.0), 0.0)
    return np.sum(hi_part + lo_part, axis=-1)


def _box_tol(lo, hi, x):
    scale = DOMAIN_TOL * (1.0 + np.abs(x))
    return np.all((x >= lo - scale) & (x <= hi + scale), axis=-1)


@dataclass(frozen=True, eq=False, repr=False)
class IndicatorBox(ConvexFunction):
    """Indicator of ``{x : lo <= x <= hi}`` (infinite bounds allowed)."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo, hi = _box_check(self.lo, self.hi)
        _freeze(self, lo=lo, hi=hi)

    @property
    def dim(self):
        return self.lo.shape[0]

    def value(self, x):
        x = self._check_dim(x)
        return _inside(_box_tol(self.lo, self.hi, x))

    def prox(self, mu, y):
        return np.clip(self._check_dim(y), self.lo, self.hi)

    def conjugate(self, z):
        return _support_box(self.lo, self.hi, self._check_dim(z))

    def project_argmin(self, x):
        return np.clip(self._check_dim(x), self.lo, self.hi)

    def to_json(self):
        return {"type": "box", "lo": self.lo.tolist(), "hi": self.hi.tolist()}


@dataclass(frozen=True, eq=False, repr=False)
class HalfSqDistToBox(ConvexFunction):
    """``0.5 dist(x, box)^2``; smooth with 1-Lipschitz gradient."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo, hi = _box_check(self.lo, self.hi)
        _freeze(self, lo=lo, hi=hi)

    @property
    def dim(self):
        return self.lo.shape[0]

    @property
    def lipschitz(self):
        return 1.0

    def value(self, x):
        x = self._check_dim(x)
        d = x - np.clip(x, self.lo, self.hi)
        return 0.5 * np.sum(d * d, axis=-1)

    def gradient(self, x):
        x = self._check_dim(x)
        return x - np.clip(x, self.lo, self.hi)

    def prox(self, mu, y):
        y = self._check_dim(y)
        return (y + mu * np.clip(y, self.lo, self.hi)) / (1.0 + mu)

    def conjugate(self, z):
        z = self._check_dim(z)
        return _support_box(self.lo, self.hi, z) + 0.5 * np.sum(z * z, axis=-1)

    def project_argmin(self, x):
        return np.clip(self._check_dim(x), self.lo, self.hi)

    def to_json(self):
        return {"type": "half_sq_dist_box", "lo": self.lo.tolist(), "hi": self.hi.tolist()}


@dataclass(frozen=True, eq=False, repr=False)
class IndicatorHalfspace(ConvexFunction):
    """Indicator of ``{x : <a, x> <= beta}``."""

    a: np.ndarray
    beta: float

    def __post_init__(self):
        a = _vec(self.a, "a")
        if not np.any(a):
            raise ValueError("halfspace normal 'a' must be nonzero")
        _freeze(self, a=a, beta=float(self.beta), _aa=float(a @ a))

    @property
    def dim(self):
        return self.a.shape[0]

    def value(self, x):
        x = self._check_dim(x)
        lhs = x @ self.a
        tol = DOMAIN_TOL * (1.0 + np.abs(self.beta) + np.linalg.norm(x, axis=-1) * np.sqrt(self._aa))
        return _inside(lhs <= self.beta + tol)

    def prox(self, mu, y):
        y = self._check_dim(y)
        excess = np.maximum(y @ self.a - self.beta, 0.0)
        return y - (excess / self._aa)[..., None] * self.a

    def conjugate(self, z):
        z = self._check_dim(z)
        s = (z @ self.a) / self._aa
        resid = np.linalg.norm(z - s[..., None] * self.a, axis=-1)
        tol = DOMAIN_TOL * (1.0 + np.linalg.norm(z, axis=-1))
        ok = (resid <= tol) & (s >= -tol)
        return _inf_where(ok, np.maximum(s, 0.0) * self.beta)

    def project_argmin(self, x):
        return self.prox(1.0, x)

    def to_json(self):
        return {"type": "halfspace", "a": self.a.tolist(), "beta": self.beta}


@dataclass(frozen=True, eq=False, repr=False)
class IndicatorAffine(ConvexFunction):
    """Indicator of ``{x : A x = b}`` (must be nonempty)."""

    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        A = _mat(self.A, "A")
        b = _vec(self.b, "b")
        if b.shape[0] != A.shape[0]:
            raise ValueError("b must have one entry per row of A")
        pinv = np.linalg.pinv(A)
        xbar = pinv @ b
        if np.linalg.norm(A @ xbar - b) > 1e-9 * (1.0 + np.linalg.norm(b)):
            raise ValueError("affine set {x : A x = b} is empty")
        null_proj = np.eye(A.shape[1]) - pinv @ A
        for arr in (pinv, xbar, null_proj):
            arr.setflags(write=False)
        _freeze(self, A=A, b=b, _xbar=xbar, _null=null_proj)

    @property
    def dim(self):
        return self.A.shape[1]

    def value(self, x):
        x = self._check_dim(x)
        resid = np.linalg.norm(x @ self.A.T - self.b, axis=-1)
        tol = DOMAIN_TOL * (1.0 + np.linalg.norm(self.b) + np.linalg.norm(x, axis=-1) * np.linalg.norm(self.A))
        return _inside(resid <= tol)

    def prox(self, mu, y):
        y = self._check_dim(y)
        return y @ self._null.T + self._xbar

    def conjugate(self, z):
        z = self._check_dim(z)
        resid = np.linalg.norm(z @ self._null.T, axis=-1)
        ok = resid <= DOMAIN_TOL * (1.0 + np.linalg.norm(z, axis=-1))
        return _inf_where(ok, z @ self._xbar)

    def project_argmin(self, x):
        return self.prox(1.0, x)

    def to_json(self):
        return {"type": "affine", "A": self.A.tolist(), "b": self.b.tolist()}


# --------------------------------------------------------------------------
# combinators

@dataclass(frozen=True, eq=False, repr=False)
class SeparableSum(ConvexFunction):
    """``f(x) = sum_k f_k(x_k)`` over consecutive coordinate blocks."""

    children: tuple

    def __post_init__(self):
        children = tuple(self.children)
        if not children:
            raise ValueError("SeparableSum needs at least one child")
        offsets = np.cumsum([0] + [c.dim for c in children])
        _freeze(self, children=children, _offsets=tuple(int(o) for o in offsets))

    @property
    def dim(self):
        return self._offsets[-1]

    def _blocks(self, x):
        return [x[..., lo:hi] for lo, hi in zip(self._offsets[:-1], self._offsets[1:])]

    @property
    def lipschitz(self):
        consts = [c.lipschitz for c in self.children]
        return None if any(L is None for L in consts) else max(consts)

    def value(self, x):
        x = self._check_dim(x)
        return sum(c.value(xb) for c, xb in zip(self.children, self._blocks(x)))

    def gradient(self, x):
        x = self._check_dim(x)
        return np.concatenate([c.gradient(xb) for c, xb in zip(self.children, self._blocks(x))], axis=-1)

    def prox(self, mu, y):
        y = self._check_dim(y)
        return np.concatenate([c.prox(mu, yb) for c, yb in zip(self.children, self._blocks(y))], axis=-1)

    def conjugate(self, z):
        z = self._check_dim(z)
        return sum(c.conjugate(zb) for c, zb in zip(self.children, self._blocks(z)))

    def project_argmin(self, x):
        x = self._check_dim(x)
        return np.concatenate([c.project_argmin(xb) for c, xb in zip(self.children, self._blocks(x))], axis=-1)

    def _piecewise(self):
        return self.children[0]._piecewise() if len(self.children) == 1 else None

    def to_json(self):
        return {"type": "separable_sum", "children": [c.to_json() for c in self.children]}


@dataclass(frozen=True, eq=False, repr=False)
class Translate(ConvexFunction):
    """``x -> f(x - shift)``."""

    f: ConvexFunction
    shift: np.ndarray

    def __post_init__(self):
        shift = _vec(self.shift, "shift")
        if shift.shape[0] != self.f.dim:
            raise ValueError("shift has the wrong length")
        _freeze(self, shift=shift)

    @property
    def dim(self):
        return self.f.dim

    @property
    def lipschitz(self):
        return self.f.lipschitz

    def value(self, x):
        return self.f.value(self._check_dim(x) - self.shift)

    def gradient(self, x):
        return self.f.gradient(self._check_dim(x) - self.shift)

    def prox(self, mu, y):
        return self.shift + self.f.prox(mu, self._check_dim(y) - self.shift)

    def conjugate(self, z):
        z = self._check_dim(z)
        return self.f.conjugate(z) + z @ self.shift

    def project_argmin(self, x):
        return self.shift + self.f.project_argmin(self._check_dim(x) - self.shift)

    def _piecewise(self):
        pw = self.f._piecewise()
        return None if pw is None else pw.translate(self.shift[0])

    def to_json(self):
        return {"type": "translate", "f": self.f.to_json(), "shift": self.shift.tolist()}


@dataclass(frozen=True, eq=False, repr=False)
class AddLinear(ConvexFunction):
    """``x -> f(x) + <slope, x>``."""

    f: ConvexFunction
    slope: np.ndarray

    def __post_init__(self):
        slope = _vec(self.slope, "slope")
        if slope.shape[0] != self.f.dim:
            raise ValueError("slope has the wrong length")
        _freeze(self, slope=slope)

    @property
    def dim(self):
        return self.f.dim

    @property
    def lipschitz(self):
        return self.f.lipschitz

    def value(self, x):
        x = self._check_dim(x)
        return self.f.value(x) + x @ self.slope

    def gradient(self, x):
        return self.f.gradient(self._check_dim(x)) + self.slope

    def prox(self, mu, y):
        return self.f.prox(mu, self._check_dim(y) - mu * self.slope)

    def conjugate(self, z):
        return self.f.conjugate(self._check_dim(z) - self.slope)

    def project_argmin(self, x):
        x = self._check_dim(x)
        inner = _strip_value_shifts(self.f)
        if isinstance(inner, Quadratic):
            return Quadratic(inner.A, inner.b + self.slope, inner.c).project_argmin(x)
        pw = self._piecewise()
        if pw is not None:
            lo, hi = pw.argmin_interval()
            return np.clip(x, lo, hi)
        raise NoClosedFormError("argmin of AddLinear only known over quadratics and 1D piecewise-linear nodes")

    def _piecewise(self):
        pw = self.f._piecewise()
        return None if pw is None else pw.add_linear(self.slope[0])

    def to_json(self):
        return {"type": "add_linear", "f": self.f.to_json(), "slope": self.slope.tolist()}


@dataclass(frozen=True, eq=False, repr=False)
class Scale(ConvexFunction):
    """``alpha * f`` with ``alpha > 0``."""

    f: ConvexFunction
    alpha: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"Scale requires alpha > 0 (field 'alpha', got {self.alpha})")
        _freeze(self, alpha=float(self.alpha))

    @property
    def dim(self):
        return self.f.dim

    @property
    def lipschitz(self):
        L = self.f.lipschitz
        return None if L is None else self.alpha * L

    def value(self, x):
        return self.alpha * self.f.value(x)

    def gradient(self, x):
        return self.alpha * self.f.gradient(x)

    def prox(self, mu, y):
        return self.f.prox(mu * self.alpha, y)

    def conjugate(self, z):
        return self.alpha * self.f.conjugate(self._check_dim(z) / self.alpha)

    def project_argmin(self, x):
        return self.f.project_argmin(x)

    def _piecewise(self):
        pw = self.f._piecewise()
        return None if pw is None else pw.scale(self.alpha)

    def to_json(self):
        return {"type": "scale", "f": self.f.to_json(), "alpha": self.alpha}


@dataclass(frozen=True, eq=False, repr=False)
class ShiftValue(ConvexFunction):
    """``f + constant``."""

    f: ConvexFunction
    constant: float

    def __post_init__(self):
        _freeze(self, constant=float(self.constant))

    @property
    def dim(self):
        return self.f.dim

    @property
    def lipschitz(self):
        return self.f.lipschitz

    def value(self, x):
        return self.f.value(x) + self.constant

    def gradient(self, x):
        return self.f.gradient(x)

    def prox(self, mu, y):
        return self.f.prox(mu, y)

    def conjugate(self, z):
        return self.f.conjugate(z) - self.constant

    def project_argmin(self, x):
        return self.f.project_argmin(x)

    def _piecewise(self):
        pw = self.f._piecewise()
        return None if pw is None else pw.shift_value(self.constant)

    def to_json(self):
        return {"type": "shift_value", "f": self.f.to_json(), "constant": self.constant}


@dataclass(frozen=True, eq=False, repr=False)
class Sum(ConvexFunction):
    """Pointwise sum of functions on the same space.

    Evaluation and gradients always work.  Prox and conjugate are exact only
    when every summand is a 1D piecewise-linear node (e.g.
    ``|x - 1| + |x + 1|``); any other combination raises
    :class:`NoProxRuleError` / :class:`NoConjugateRuleError`.
    """

    children: tuple
    _pw: _Piecewise | None = field(default=None, init=False)

    def __post_init__(self):
        children = tuple(self.children)
        if len(children) < 1:
            raise ValueError("Sum needs at least one child")
        if len({c.dim for c in children}) != 1:
            raise ValueError("Sum children must share a dimension")
        parts = [c._piecewise() for c in children]
        pw = _Piecewise.add(parts) if all(p is not None for p in parts) else None
        _freeze(self, children=children, _pw=pw)

    @property
    def dim(self):
        return self.children[0].dim

    @property
    def lipschitz(self):
        consts = [c.lipschitz for c in self.children]
        return None if any(L is None for L in consts) else sum(consts)

    def value(self, x):
        x = self._check_dim(x)
        return sum(c.value(x) for c in self.children)

    def gradient(self, x):
        return sum(c.gradient(x) for c in self.children)

    def prox(self, mu, y):
        y = self._check_dim(y)
        if self._pw is None:
            raise NoProxRuleError("no prox rule for a sum of non-piecewise-linear functions")
        return self._pw.prox(mu, y)

    def conjugate(self, z):
        z = self._check_dim(z)
        if self._pw is None:
            raise NoConjugateRuleError("no conjugate rule for a general sum (infimal convolution)")
        return self._pw.conjugate(z[..., 0])

    def project_argmin(self, x):
        x = self._check_dim(x)
        if self._pw is None:
            raise NoClosedFormError("argmin of a general sum has no closed form")
        lo, hi = self._pw.argmin_interval()
        return np.clip(x, lo, hi)

    def _piecewise(self):
        return self._pw

    def to_json(self):
        return {"type": "sum", "children": [c.to_json() for c in self.children]}


def _strip_value_shifts(f):
    while isinstance(f, ShiftValue):
        f = f.f
    return f


# --------------------------------------------------------------------------
# spec-level operations

def evaluate(f: ConvexFunction, x) -> float:
    return f.value(x)


def prox(f: ConvexFunction, mu: float, y):
    """Proximal point ``argmin_xi f(xi) + ||y - xi||^2 / (2 mu)``."""
    if not mu > 0:
        raise ValueError(f"mu must be positive, got {mu}")
    return f.prox(mu, f._check_dim(y))


def conjugate(f: ConvexFunction, z) -> float:
    return f.conjugate(z)


def subgradient_check(f: ConvexFunction, x, v, tol: float = 1e-9) -> bool:
    """True iff ``v`` is a subgradient of ``f`` at ``x`` up to ``tol``.

    Uses the Fenchel equality ``f(x) + f*(v) = <x, v>``; infinite values on
    either side make the check fail.
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    fx = float(f.value(x))
    fv = float(f.conjugate(v))
    if not (np.isfinite(fx) and np.isfinite(fv)):
        return False
    return abs(fx + fv - float(x @ v)) <= tol


def inf_value(f: ConvexFunction) -> float:
    """``inf f``, read off the conjugate as ``-f*(0)``."""
    return -float(f.conjugate(np.zeros(f.dim))) + 0.0


def shift_to_zero_min(f: ConvexFunction) -> ConvexFunction:
    """Return ``f - inf f`` (``f`` itself when the minimum is already 0)."""
    try:
        m = inf_value(f)
    except NoConjugateRuleError:
        if f.dim > 3:
            raise
        from .diagnostics import brute_minimum

        m = brute_minimum(f)
    if not np.isfinite(m):
        raise UnboundedBelowError("function is unbounded below; cannot shift to zero minimum")
    if m == 0.0:
        return f
    return ShiftValue(f, -m)


# --------------------------------------------------------------------------
# JSON expression trees

def _num(obj, key, path):
    if key not in obj:
        raise ValueError(f"{path}: missing field '{key}'")
    val = obj[key]
    if not isinstance(val, numbers.Real) or isinstance(val, bool):
        raise ValueError(f"{path}.{key}: expected a number")
    return float(val)


_FIELDS = {
    "quadratic": ({"A"}, {"b", "c"}),
    "abs": (set(), set()),
    "norm1": (set(), {"n"}),
    "box": ({"lo", "hi"}, set()),
    "half_sq_dist_box": ({"lo", "hi"}, set()),
    "halfspace": ({"a", "beta"}, set()),
    "affine": ({"A", "b"}, set()),
    "separable_sum": ({"children"}, set()),
    "sum": ({"children"}, set()),
    "translate": ({"f", "shift"}, set()),
    "add_linear": ({"f", "slope"}, set()),
    "scale": ({"f", "alpha"}, set()),
    "shift_value": ({"f", "constant"}, set()),
}


def from_json(obj, path: str = "problem") -> ConvexFunction:
    """Build a function from its JSON expression tree.

    Errors are ``ValueError`` messages prefixed with the offending path,
    e.g. ``problem.children[1].lo``.
    """
    if not isinstance(obj, dict) or "type" not in obj:
        raise ValueError(f"{path}: expected an object with a 'type' field")
    kind = obj["type"]
    if kind not in _FIELDS:
        raise ValueError(f"{path}.type: unknown function type {kind!r}")
    required, optional = _FIELDS[kind]
    keys = set(obj) - {"type"}
    missing = required - keys
    if missing:
        raise ValueError(f"{path}: missing field(s) {sorted(missing)}")
    unknown = keys - required - optional
    if unknown:
        raise ValueError(f"{path}: unknown field(s) {sorted(unknown)}")
    try:
        if kind == "quadratic":
            return Quadratic(obj["A"], obj.get("b"), obj.get("c", 0.0))
        if kind == "abs":
            return AbsValue()
        if kind == "norm1":
            return NormOne(obj.get("n", 1))
        if kind == "box":
            return IndicatorBox(obj["lo"], obj["hi"])
        if kind == "half_sq_dist_box":
            return HalfSqDistToBox(obj["lo"], obj["hi"])
        if kind == "halfspace":
            return IndicatorHalfspace(obj["a"], _num(obj, "beta", path))
        if kind == "affine":
            return IndicatorAffine(obj["A"], obj["b"])
        if kind in ("separable_sum", "sum"):
            kids = obj["children"]
            if not isinstance(kids, list):
                raise ValueError("'children' must be a list")
            built = [from_json(c, f"{path}.children[{i}]") for i, c in enumerate(kids)]
            return SeparableSum(built) if kind == "separable_sum" else Sum(built)
        inner = from_json(obj["f"], f"{path}.f")
        if kind == "translate":
            return Translate(inner, obj["shift"])
        if kind == "add_linear":
            return AddLinear(inner, obj["slope"])
        if kind == "scale":
            return Scale(inner, _num(obj, "alpha", path))
        return ShiftValue(inner, _num(obj, "constant", path))
    except ValueError as exc:
        msg = str(exc)
        if msg.startswith(path):
            raise
        raise ValueError(f"{path}: {msg}") from None
