"""Closed convex sets in R^d with exact metric projections.

Every set exposes ``project``, which accepts a single point of shape ``(d,)``
or a batch of points of shape ``(k, d)`` and returns an array of the same
shape.  Points are plain float64 numpy arrays; :func:`as_vector` is the single
place where user input is validated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidInputError

#: relative scale of the membership tolerance, ``tol * (1 + |u|)``
MEMBERSHIP_TOL = 1e-10
#: witness points must be this close to every set of a family
WITNESS_TOL = 1e-9


def as_vector(x, dim=None, name="vector"):
    """Validate ``x`` as a finite 1-D float vector, optionally of length ``dim``."""
    v = np.array(x, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise InvalidInputError(f"{name} must be a non-empty 1-D sequence, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise InvalidInputError(f"{name} has non-finite entries")
    if dim is not None and v.size != dim:
        raise InvalidInputError(f"{name} has dimension {v.size}, expected {dim}")
    v.setflags(write=False)
    return v


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _fmt(v):
    return "(" + ", ".join(f"{float(t):g}" for t in np.atleast_1d(v)) + ")"


class ConvexSet:
    """Base class.  Subclasses implement ``_project`` on a ``(k, d)`` batch."""

    dim: int
    kind = "set"

    def _check(self, u):
        arr = np.asarray(u, dtype=float)
        if arr.ndim not in (1, 2) or arr.shape[-1] != self.dim:
            raise InvalidInputError(
                f"{self.kind} lives in R^{self.dim}, got input of shape {arr.shape}"
            )
        return arr

    def project(self, u):
        """Metric projection of ``u`` (shape ``(d,)`` or ``(k, d)``) onto the set."""
        arr = self._check(u)
        out = self._project(np.atleast_2d(arr))
        return out[0] if arr.ndim == 1 else out

    def violation(self, x):
        """Closed-form membership residual: 0 for members, positive outside."""
        arr = self._check(x)
        out = self._violation(np.atleast_2d(arr))
        return float(out[0]) if arr.ndim == 1 else out

    def contains(self, x, tol=MEMBERSHIP_TOL):
        x = self._check(x)
        return self.violation(x) <= tol * (1.0 + float(np.linalg.norm(x)))

    def _violation(self, X):
        return np.linalg.norm(X - self._project(X), axis=1)

    def to_dict(self):
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class Halfspace(ConvexSet):
    """``{x : <a, x> <= beta}`` with ``a != 0``."""

    a: np.ndarray
    beta: float
    kind = "halfspace"

    def __post_init__(self):
        a = as_vector(self.a, name="halfspace normal")
        if not np.any(a):
            raise InvalidInputError("halfspace normal must be nonzero")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "beta", float(self.beta))
        if not math.isfinite(self.beta):
            raise InvalidInputError("halfspace offset must be finite")

    @property
    def dim(self):
        return self.a.size

    def _project(self, X):
        excess = np.maximum(X @ self.a - self.beta, 0.0)
        return X - np.outer(excess / (self.a @ self.a), self.a)

    def _violation(self, X):
        return np.maximum(X @ self.a - self.beta, 0.0) / np.linalg.norm(self.a)

    def to_dict(self):
        return {"type": self.kind, "a": self.a.tolist(), "beta": self.beta}

    def __repr__(self):
        return f"Halfspace(a={_fmt(self.a)}, beta={self.beta:g})"


@dataclass(frozen=True, eq=False)
class Hyperplane(ConvexSet):
    """``{x : <a, x> = beta}`` with ``a != 0``."""

    a: np.ndarray
    beta: float
    kind = "hyperplane"

    def __post_init__(self):
        a = as_vector(self.a, name="hyperplane normal")
        if not np.any(a):
            raise InvalidInputError("hyperplane normal must be nonzero")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "beta", float(self.beta))
        if not math.isfinite(self.beta):
            raise InvalidInputError("hyperplane offset must be finite")

    @property
    def dim(self):
        return self.a.size

    def _project(self, X):
        gap = X @ self.a - self.beta
        return X - np.outer(gap / (self.a @ self.a), self.a)

    def _violation(self, X):
        return np.abs(X @ self.a - self.beta) / np.linalg.norm(self.a)

    def to_dict(self):
        return {"type": self.kind, "a": self.a.tolist(), "beta": self.beta}

    def __repr__(self):
        return f"Hyperplane(a={_fmt(self.a)}, beta={self.beta:g})"


@dataclass(frozen=True, eq=False)
class Ball(ConvexSet):
    """Closed Euclidean ball."""

    center: np.ndarray
    radius: float
    kind = "ball"

    def __post_init__(self):
        object.__setattr__(self, "center", as_vector(self.center, name="ball center"))
        r = float(self.radius)
        if not (math.isfinite(r) and r >= 0):
            raise InvalidInputError(f"ball radius must be finite and >= 0, got {self.radius}")
        object.__setattr__(self, "radius", r)

    @property
    def dim(self):
        return self.center.size

    def _project(self, X):
        D = X - self.center
        nrm = np.linalg.norm(D, axis=1)
        out = X.copy()
        far = nrm > self.radius
        out[far] = self.center + D[far] * (self.radius / nrm[far])[:, None]
        return out

    def _violation(self, X):
        return np.maximum(np.linalg.norm(X - self.center, axis=1) - self.radius, 0.0)

    def to_dict(self):
        return {"type": self.kind, "center": self.center.tolist(), "radius": self.radius}

    def __repr__(self):
        return f"Ball(center={_fmt(self.center)}, radius={self.radius:g})"


@dataclass(frozen=True, eq=False)
class Box(ConvexSet):
    """Axis-aligned box ``lo <= x <= hi``; infinite bounds encode orthants."""

    lo: np.ndarray
    hi: np.ndarray
    kind = "box"

    def __post_init__(self):
        lo = _frozen(self.lo)
        hi = _frozen(self.hi)
        if lo.ndim != 1 or lo.shape != hi.shape or lo.size == 0:
            raise InvalidInputError("box bounds must be 1-D of equal nonzero length")
        if np.any(np.isnan(lo)) or np.any(np.isnan(hi)):
            raise InvalidInputError("box bounds must not be NaN")
        if np.any(lo > hi) or np.any(lo == np.inf) or np.any(hi == -np.inf):
            raise InvalidInputError("box needs lo <= hi with lo < +inf and hi > -inf")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self):
        return self.lo.size

    def _project(self, X):
        return np.clip(X, self.lo, self.hi)

    def to_dict(self):
        return {"type": self.kind, "lo": _bounds_out(self.lo), "hi": _bounds_out(self.hi)}

    def __repr__(self):
        return f"Box(lo={_fmt(self.lo)}, hi={_fmt(self.hi)})"


@dataclass(frozen=True, eq=False)
class AffineSubspace(ConvexSet):
    """``offset + span(basis)``.  The basis is orthonormalized on construction.

    Linearly dependent basis vectors are dropped; an empty basis is the single
    point ``offset``.
    """

    basis: np.ndarray
    offset: np.ndarray
    kind = "affine"

    def __post_init__(self):
        offset = as_vector(self.offset, name="affine offset")
        B = np.array(self.basis, dtype=float).reshape(-1, offset.size) if np.size(self.basis) else np.zeros((0, offset.size))
        if not np.all(np.isfinite(B)):
            raise InvalidInputError("affine basis has non-finite entries")
        if B.shape[0]:
            _, s, vt = np.linalg.svd(B, full_matrices=False)
            rank = int(np.sum(s > 1e-12 * s.max())) if s.size and s.max() > 0 else 0
            B = vt[:rank]
        B = _frozen(B)
        object.__setattr__(self, "basis", B)
        object.__setattr__(self, "offset", offset)

    @property
    def dim(self):
        return self.offset.size

    def _project(self, X):
        Y = X - self.offset
        return self.offset + (Y @ self.basis.T) @ self.basis

    def to_dict(self):
        return {"type": self.kind, "basis": self.basis.tolist(), "offset": self.offset.tolist()}

    def __repr__(self):
        return f"AffineSubspace(rank={self.basis.shape[0]}, offset={_fmt(self.offset)})"


@dataclass(frozen=True, eq=False)
class Simplex(ConvexSet):
    """Standard probability simplex ``{x >= 0, sum(x) = 1}`` in R^dim."""

    dim: int
    kind = "simplex"

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise InvalidInputError(f"simplex dimension must be a positive integer, got {self.dim}")
        object.__setattr__(self, "dim", int(self.dim))

    def _project(self, X):
        # sort-and-threshold
        U = -np.sort(-X, axis=1)
        css = np.cumsum(U, axis=1) - 1.0
        ind = np.arange(1, self.dim + 1)
        rho = np.count_nonzero(U - css / ind > 0, axis=1)
        theta = css[np.arange(X.shape[0]), rho - 1] / rho
        return np.maximum(X - theta[:, None], 0.0)

    def _violation(self, X):
        return np.maximum(np.abs(X.sum(axis=1) - 1.0), np.maximum(-X.min(axis=1), 0.0))

    def to_dict(self):
        return {"type": self.kind, "dim": self.dim}

    def __repr__(self):
        return f"Simplex(dim={self.dim})"


def full_space(dim):
    """The whole of R^dim as a box with infinite bounds."""
    return Box(np.full(dim, -np.inf), np.full(dim, np.inf))


def project(s, u):
    """Metric projection of ``u`` onto the set ``s``."""
    return s.project(u)


def distance(s, u):
    """Euclidean distance from ``u`` to the set ``s``."""
    u = s._check(u)
    d = np.linalg.norm(u - s.project(u), axis=-1)
    return float(d) if np.ndim(d) == 0 else d


def sample_members(s, n, rng, center=None, scale=1.0):
    """Draw ``n`` points of ``s`` by projecting Gaussian ambient points.

    Scales are spread log-uniformly over four decades so that samples land
    both deep inside and near the boundary.
    """
    c = np.zeros(s.dim) if center is None else np.asarray(center, dtype=float)
    scales = scale * 10.0 ** rng.uniform(-3.0, 1.0, size=n)
    Y = c + rng.standard_normal((n, s.dim)) * scales[:, None]
    return s.project(Y)


def kolmogorov_residual(s, u, samples=1000, seed=0):
    """Largest sampled value of ``<u - P(u), y - P(u)>`` over members ``y``.

    For an exact projection the supremum is 0, so a correct implementation
    returns something at or below rounding level.
    """
    if samples < 1:
        raise InvalidInputError("samples must be >= 1")
    u = as_vector(u, s.dim, name="point")
    pu = s.project(u)
    g = u - pu
    if not np.any(g):
        return 0.0
    rng = np.random.default_rng(seed)
    Y = sample_members(s, samples, rng, center=pu, scale=1.0 + float(np.linalg.norm(u)))
    return float(np.max((Y - pu) @ g))


@dataclass(frozen=True)
class SetFamily:
    """Ordered list of ``m >= 2`` sets sharing a dimension, plus an optional
    point claimed to lie in all of them."""

    sets: tuple
    witness: np.ndarray | None = field(default=None)

    def __post_init__(self):
        sets = tuple(self.sets)
        if len(sets) < 2:
            raise InvalidInputError(f"a family needs at least 2 sets, got {len(sets)}")
        dims = {s.dim for s in sets}
        if len(dims) != 1:
            raise InvalidInputError(f"sets live in different dimensions: {sorted(dims)}")
        object.__setattr__(self, "sets", sets)
        if self.witness is not None:
            p = as_vector(self.witness, sets[0].dim, name="witness")
            worst = max(distance(s, p) for s in sets)
            if worst > WITNESS_TOL:
                raise InvalidInputError(
                    f"witness is at distance {worst:.3g} from the family (tolerance {WITNESS_TOL:g})"
                )
            object.__setattr__(self, "witness", p)

    @property
    def m(self):
        return len(self.sets)

    @property
    def dim(self):
        return self.sets[0].dim

    def __len__(self):
        return len(self.sets)

    def __getitem__(self, j):
        return self.sets[j]

    def __iter__(self):
        return iter(self.sets)

    def residuals(self, X):
        """``|x - P_j(x)|`` for every row of ``X`` and every set, shape ``(k, m)``."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.stack([np.linalg.norm(X - s.project(X), axis=1) for s in self.sets], axis=1)

    def max_residual(self, x):
        return float(self.residuals(x).max())

    def to_dict(self):
        out = {"sets": [s.to_dict() for s in self.sets]}
        if self.witness is not None:
            out["witness"] = self.witness.tolist()
        return out


# -- (de)serialization -------------------------------------------------------

def _bounds_out(v):
    # infinite bounds serialize as null
    return [float(t) if math.isfinite(t) else None for t in v]


def _bounds_in(v, default):
    out = []
    for t in v:
        if t is None:
            out.append(default)
        elif isinstance(t, str):
            out.append(float(_number(t)))
        else:
            out.append(float(t))
    return out


def _number(t):
    """Parse a JSON number or a ``"num/den"`` / ``"inf"`` string to float."""
    if isinstance(t, (int, float)):
        return float(t)
    t = t.strip()
    if t.lower() in ("inf", "+inf", "infinity"):
        return math.inf
    if t.lower() in ("-inf", "-infinity"):
        return -math.inf
    from fractions import Fraction

    return float(Fraction(t))


def _vec(v):
    return [_number(t) for t in v]


def set_from_dict(d):
    """Build a set from its JSON description (inverse of ``to_dict``)."""
    kind = d.get("type")
    try:
        if kind == "halfspace":
            return Halfspace(_vec(d["a"]), _number(d["beta"]))
        if kind == "hyperplane":
            return Hyperplane(_vec(d["a"]), _number(d["beta"]))
        if kind == "ball":
            return Ball(_vec(d["center"]), _number(d["radius"]))
        if kind == "box":
            return Box(_bounds_in(d["lo"], -math.inf), _bounds_in(d["hi"], math.inf))
        if kind == "affine":
            offset = _vec(d["offset"])
            return AffineSubspace([_vec(b) for b in d["basis"]] or np.zeros((0, len(offset))), offset)
        if kind == "simplex":
            return Simplex(int(d["dim"]))
    except KeyError as e:
        raise InvalidInputError(f"{kind} set is missing field {e.args[0]!r}") from None
    except (TypeError, ValueError, ZeroDivisionError) as e:
        if isinstance(e, InvalidInputError):
            raise
        raise InvalidInputError(f"bad {kind} set description: {e}") from None
    raise InvalidInputError(f"unknown set type {kind!r}")


def family_from_dict(d):
    sets = [set_from_dict(s) for s in d["sets"]]
    witness = d.get("witness")
    return SetFamily(tuple(sets), None if witness is None else _vec(witness))


def family(*sets: ConvexSet, witness: Sequence[float] | None = None) -> SetFamily:
    """Convenience constructor: ``family(C1, C2, witness=p)``."""
    return SetFamily(tuple(sets), None if witness is None else np.asarray(witness, dtype=float))
