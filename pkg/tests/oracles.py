"""Independent oracles used to freeze expected values.

Nothing here calls the package's projection formulas or rate code.
Projections are found by brute force over a grid of candidate points, rates
are re-transcribed with plain loops and ``mpmath`` for the exponential.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import mpmath
import numpy as np

GRID_H = 1e-2


# -- projection by grid search ---------------------------------------------------------
#
# If u lies outside the set, its nearest point y* lies on the boundary, and
# on the face containing y* the objective |u - y|^2 equals a constant plus
# |y - y*|^2.  So the best grid point on that face is within the grid's
# covering radius of y*, which is below 2h for every grid built here.

def _orth_complement(a):
    a = np.asarray(a, float).reshape(1, -1)
    _, _, vt = np.linalg.svd(a)
    return vt[1:]


def _lattice(k, R, h):
    """Points of ``h Z^k`` inside ``[-R, R]^k``."""
    if k == 0:
        return np.zeros((1, 0))
    ticks = np.arange(-R, R + h / 2, h)
    return np.stack(np.meshgrid(*([ticks] * k), indexing="ij"), axis=-1).reshape(-1, k)


def _best(u, Y):
    d = np.linalg.norm(Y - u, axis=1)
    return Y[int(np.argmin(d))]


def grid_halfspace(a, beta, u, h=GRID_H):
    a, u = np.asarray(a, float), np.asarray(u, float)
    if a @ u <= beta:
        return u
    return grid_hyperplane(a, beta, u, h)


def grid_hyperplane(a, beta, u, h=GRID_H):
    a, u = np.asarray(a, float), np.asarray(u, float)
    o = beta * a / (a @ a)
    V = _orth_complement(a)
    R = np.linalg.norm(u - o) + h
    T = _lattice(V.shape[0], R, h)
    return _best(u, o + T @ V)


def grid_ball(center, radius, u, h=GRID_H):
    c, u = np.asarray(center, float), np.asarray(u, float)
    if np.linalg.norm(u - c) <= radius:
        return u
    if radius == 0:
        return c
    d = c.size
    if d == 2:
        th = np.arange(0, 2 * np.pi, h / radius)
        S = np.stack([np.cos(th), np.sin(th)], axis=1)
    elif d == 3:
        pts = []
        for t in np.arange(0, np.pi + h / radius, h / radius):
            ring = max(1, int(np.ceil(2 * np.pi * radius * np.sin(t) / h)))
            ph = np.linspace(0, 2 * np.pi, ring, endpoint=False)
            pts.append(np.stack([np.sin(t) * np.cos(ph), np.sin(t) * np.sin(ph), np.full(ring, np.cos(t))], axis=1))
        S = np.vstack(pts)
    else:  # pragma: no cover
        raise ValueError("grid_ball supports dims 2 and 3")
    return _best(u, c + radius * S)


def _axis_ticks(lo, hi, uj, h):
    """Grid on one axis of a facet, both finite bounds included.

    An infinite side is replaced by ``u_j`` plus one unit of slack: the
    nearest point's coordinate there is ``u_j`` clamped to the finite side.
    """
    a = lo if math.isfinite(lo) else min(uj, hi) - 1
    b = hi if math.isfinite(hi) else max(uj, lo) + 1
    if math.isfinite(lo) and not math.isfinite(hi):
        b = max(b, lo)
    t = np.arange(a, b, h)
    return np.append(t, b)


def grid_box(lo, hi, u, h=GRID_H):
    lo, hi, u = (np.asarray(v, float) for v in (lo, hi, u))
    if np.all(lo <= u) and np.all(u <= hi):
        return u
    d = u.size
    cands = []
    for i in range(d):
        for side in (lo[i], hi[i]):
            if not math.isfinite(side):
                continue
            others = [_axis_ticks(lo[j], hi[j], u[j], h) for j in range(d) if j != i]
            G = np.stack(np.meshgrid(*others, indexing="ij"), axis=-1).reshape(-1, d - 1)
            Y = np.insert(G, i, side, axis=1)
            cands.append(_best(u, Y))
    return _best(u, np.array(cands))


def grid_affine(basis, offset, u, h=GRID_H):
    B, o, u = np.asarray(basis, float).reshape(-1, len(offset)), np.asarray(offset, float), np.asarray(u, float)
    if B.shape[0] == 0:
        return o
    Q, _ = np.linalg.qr(B.T)
    Q = Q[:, : np.linalg.matrix_rank(B)]
    R = np.linalg.norm(u - o) + h
    T = _lattice(Q.shape[1], R, h)
    return _best(u, o + T @ Q.T)


def grid_simplex(dim, u, h=GRID_H):
    u = np.asarray(u, float)
    if np.all(u >= 0) and abs(u.sum() - 1) <= 1e-12:
        return u
    K = math.ceil(math.sqrt(2) / h)
    pts = [c for c in itertools.product(range(K + 1), repeat=dim - 1) if sum(c) <= K]
    P = np.array([list(c) + [K - sum(c)] for c in pts], float) / K
    return _best(u, P)


def grid_argmin_region(inside, lo, hi, u, h):
    """Argmin of ``|u - y|`` over grid points of a box for which ``inside`` holds."""
    axes = [np.arange(a, b + h / 2, h) for a, b in zip(lo, hi)]
    G = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(lo))
    G = G[inside(G)]
    return _best(np.asarray(u, float), G)


# -- rate transcriptions ---------------------------------------------------------------

def e_bound(y):
    """``floor(e^y) + 1`` via mpmath at ample precision."""
    y = Fraction(y)
    if y == 0:
        return 1
    with mpmath.workdps(int(float(y) * 0.4343) + 40):
        v = mpmath.exp(mpmath.mpf(y.numerator) / y.denominator)
        return int(mpmath.floor(v)) + 1


def psi(B, eps, f):
    R = int(Fraction(B) // Fraction(eps))
    p = 0
    for _ in range(R):
        p = p + f(p) + 1
    return p


def phi(B, m, eps, N):
    return e_bound((Fraction((m + 1) * B) / Fraction(eps)) ** 2) * (N + 1)


def Phi(b, m, eps, N):
    return phi(b * b, m, eps, N)


def alpha(b, m, eps, f):
    return psi(b * b, (Fraction(eps) / (m - 1)) ** 2, lambda n: f(n) + m - 2)


def beta(b, eps, delta):
    r = math.ceil(Fraction(4 * b**4) / Fraction(eps) ** 2)
    xs = [Fraction(1)]
    for _ in range(r):
        s = xs[-1] ** 2 / (24 * b)
        xs.append(min(Fraction(delta(s)), s))
    phi_ = min(xs)
    return phi_**2 / (24 * b)


def orthant_mu(m, eps):
    """Largest ``k/2^64`` not above ``1/sqrt(m)``, times eps, found by bisection."""
    lo, hi = 0, 1 << 64
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if mid * mid * m <= 1 << 128:
            lo = mid
        else:
            hi = mid
    return Fraction(eps) * Fraction(lo, 1 << 64)


def theta_orthant(b, m, eps):
    """Regularity rate with the orthant modulus, transcribed directly."""
    eps = Fraction(eps)
    mu = orthant_mu(m, eps * eps / (32 * b))
    E = Phi(b, m, eps * eps / 16, 0)
    a = alpha(b, m, mu, lambda N: E * (N + 1))
    return a + E * (a + 1)


def gamma_chain_m2_b1(eps, Delta):
    """First stages of the bypass rate for ``b = 1, m = 2`` and a constant ``Delta``.

    Here ``Phi_eps(N) = E (N + 1)``, so ``alpha_bar(eta)`` iterates
    ``p -> p + E (p + 1) + 1`` from 0, ``R = floor(1/eta^2)`` times.
    Returns the first two ``beta`` iterates, the value ``A(1/24)`` and the
    iteration count needed at the second iterate.
    """
    eps = Fraction(eps)
    E = Phi(1, 2, eps * eps / 4, 0)
    s0 = Fraction(1, 24)
    R0 = int(1 / (s0 * s0))
    a0 = 0
    for _ in range(R0):
        a0 = a0 + E * (a0 + 1) + 1
    A0 = a0 + E * (a0 + 1)
    xi1 = min(eps * eps / (8 * A0), Fraction(Delta), s0)
    s1 = xi1 * xi1 / 24
    R1 = int(1 / (s1 * s1))
    return {"E": E, "R0": R0, "alpha0": a0, "A0": A0, "xi1": xi1, "R1": R1}


# -- closed forms on the desk scenarios -----------------------------------------------

def twolines_residual(n):
    """Largest residual of ``x_n`` on the two lines from ``x_0 = (1, 0)``."""
    return (1 / math.sqrt(2)) ** max(n, 1)


def twolines_regularity_witness(eps, f):
    n = 0
    while True:
        if all(twolines_residual(k) <= eps for k in range(n, n + f(n) + 1)):
            return n
        n += 1


def orthant2_iterates():
    """``x_0 = (1, 1)``: the first two projections zero one coordinate each."""
    return [np.array([1.0, 1.0]), np.array([0.0, 1.0]), np.array([0.0, 0.0])]
