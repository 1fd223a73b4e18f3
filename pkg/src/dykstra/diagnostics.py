"""Numerical certification of the identities and bounds satisfied by Dykstra traces.

Two report types come out of this module.  A :class:`CheckReport` states a
worst residual, the index where it occurs and the tolerance it was compared
against.  A :class:`WitnessReport` names the least index with a window
property (metastability, liminf, asymptotic regularity) and compares it
with a computed bound.  Every witness is re-verified by a direct
recomputation that does not reuse the scan's intermediate arrays.

Tolerances follow ``tol * (1 + magnitude)`` with the magnitude named in each
check.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from .errors import InvalidInputError
from .exact import as_pos, counterfunction, format_nat
from .rates import RateResult, evaluate, rate_alpha, rate_asymptotic_step
from .sets import WITNESS_TOL, sample_members

TOL_IDENTITY = 1e-10
TOL_INNER = 1e-9
TOL_MAIN = 1e-8
TOL_BOUND = 1e-9

CAPPED_NOTE = "bound not checkable at desk scale"


def _f(v):
    return float(v)


@dataclass
class CheckReport:
    """Worst residual of one check; ``passed`` iff ``residual <= tolerance``.

    ``applicable`` is false when the check has nothing to say (for
    instance inner products on a trace whose ``q`` vectors all vanish).
    """

    check: str
    residual: float
    tolerance: float
    worst_index: int | None = None
    params: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    details: dict = field(default_factory=dict)
    applicable: bool = True

    @property
    def passed(self):
        return bool(self.residual <= self.tolerance)

    @property
    def status(self):
        if not self.applicable:
            return "not applicable"
        return "pass" if self.passed else "fail"

    @property
    def failed(self):
        return self.applicable and not self.passed

    def to_dict(self):
        d = asdict(self)
        d["residual"] = _f(self.residual)
        d["tolerance"] = _f(self.tolerance)
        d["passed"] = self.passed
        d["status"] = self.status
        return _jsonable(d)


@dataclass
class WitnessReport:
    """Least index with a window property and how it compares with a bound.

    ``bound`` is an ``int``, ``"capped"`` or ``None`` (no bound supplied).
    ``partial`` is set when some candidate windows ran past the end of the
    trace, or the bound reaches beyond it.
    """

    check: str
    eps: float
    f: str
    witness: int | None
    bound: object = None
    scanned: tuple = (0, 0)
    partial: bool = False
    verified: bool = False
    notes: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def bound_respected(self):
        """``True``/``False`` when decidable, ``None`` otherwise."""
        if not isinstance(self.bound, int):
            return None
        if self.witness is not None:
            return self.witness <= self.bound
        # no witness: only a fully scanned range refutes the bound
        return None if self.partial else False

    @property
    def status(self):
        if self.bound == "capped":
            return "capped"
        r = self.bound_respected
        if r is None:
            return "found" if self.witness is not None else "inconclusive"
        return "pass" if r else "fail"

    @property
    def failed(self):
        return self.bound_respected is False

    def to_dict(self):
        d = asdict(self)
        d["bound"] = self.bound if self.bound is None or isinstance(self.bound, str) else format_nat(self.bound)
        d["scanned"] = list(self.scanned)
        d["bound_respected"] = self.bound_respected
        d["status"] = self.status
        return _jsonable(d)


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (WitnessReport, CheckReport)):
        return v.to_dict()
    return v


def dumps(reports):
    """Deterministic JSON for a list of reports."""
    return json.dumps([r.to_dict() for r in reports], sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _norm0(trace):
    return float(np.linalg.norm(trace.x0))


def _dykstra_only(trace, name, tol):
    if trace.algorithm != "dykstra":
        return CheckReport(name, 0.0, tol, notes=[f"{trace.algorithm} trace has no q vectors"], applicable=False)
    return None


# -- identities ------------------------------------------------------------------

def identity_residuals(trace):
    """Per-index residual norms of the two telescoping identities.

    Returns ``(r1, r2)`` with ``r1[n-1] = |x_{n-1} - x_n - (q_n - q_{n-m})|``
    for ``n = 1..T`` and ``r2[n] = |x_0 - x_n - sum_{k=n-m+1}^n q_k|`` for
    ``n = 0..T``.
    """
    xs, qs, m, T = trace.xs, trace.qs, trace.m, trace.steps
    r1 = np.linalg.norm(xs[:-1] - xs[1:] - (qs[m : T + m] - qs[:T]), axis=1)
    win = np.lib.stride_tricks.sliding_window_view(qs, m, axis=0).sum(axis=-1)
    r2 = np.linalg.norm(xs[0] - xs - win, axis=1)
    return r1, r2


def check_identities(trace, tol=TOL_IDENTITY):
    """``x_{n-1} - x_n = q_n - q_{n-m}`` and ``x_0 - x_n = sum of the last m q's``.

    Tolerance ``tol * (1 + |x_0|)``.
    """
    scaled = tol * (1 + _norm0(trace))
    skip = _dykstra_only(trace, "identities", scaled)
    if skip:
        return skip
    r1, r2 = identity_residuals(trace)
    per_n = r2.copy()
    per_n[1:] = np.maximum(per_n[1:], r1)
    worst = int(np.argmax(per_n))
    return CheckReport(
        "identities",
        float(per_n[worst]),
        scaled,
        worst,
        params={"tol": tol, "scale": "1+|x0|"},
        details={"step_identity_max": float(r1.max(initial=0.0)), "sum_identity_max": float(r2.max())},
    )


def check_inner_products(trace, samples=1000, seed=0, tol=TOL_INNER):
    """``<x_n - z, q_n> >= 0`` for sampled ``z`` in the set used at step ``n``,
    and ``<x_n - x_{n+m}, q_n> >= 0``.

    The residual is the negated minimum, compared with ``tol * (1 + |x_0|^2)``.
    """
    scaled = tol * (1 + _norm0(trace) ** 2)
    skip = _dykstra_only(trace, "inner_products", scaled)
    if skip:
        return skip
    xs, m, T = trace.xs, trace.m, trace.steps
    qn = trace.qs[m : T + m]  # q_1..q_T
    if not np.any(qn):
        return CheckReport("inner_products", 0.0, scaled, notes=["q all zero"], params={"tol": tol})
    rng = np.random.default_rng(seed)
    radius = max(float(np.linalg.norm(xs - xs[0], axis=1).max()), 1.0)
    best, where = math.inf, None
    for j, s in enumerate(trace.family):
        n = np.arange(j + 1, T + 1, m)
        if n.size == 0:
            continue
        Z = sample_members(s, samples, rng, center=xs[n[-1]], scale=radius)
        Q = trace.qs[n + m - 1]
        vals = np.einsum("ij,ij->i", xs[n], Q)[:, None] - Q @ Z.T
        k = np.unravel_index(np.argmin(vals), vals.shape)
        if vals[k] < best:
            best, where = float(vals[k]), int(n[k[0]])
    n = np.arange(1, T - m + 1)
    fourth = np.einsum("ij,ij->i", xs[n] - xs[n + m], trace.qs[n + m - 1]) if n.size else np.zeros(0)
    if fourth.size and fourth.min() < best:
        best, where = float(fourth.min()), int(n[np.argmin(fourth)])
    return CheckReport(
        "inner_products",
        -best,
        scaled,
        where,
        params={"tol": tol, "samples": samples, "seed": seed, "scale": "1+|x0|^2"},
        details={
            "min_value": best,
            "lag_min": float(fourth.min()) if fourth.size else None,
        },
    )


def main_identity_sides(trace, z, n, i):
    """Both sides of the expansion of ``|x_n - z|^2`` around index ``i``.

    Returns ``(lhs, rhs, inequality_slack)`` where the slack is
    ``|x_n - z|^2 + 2 S_n - 2 S_i - |x_i - z|^2`` with
    ``S_k = sum_{l=k-m+1}^k <x_l - z, q_l>``; it should be nonnegative.
    """
    T, m = trace.steps, trace.m
    if not 0 <= n <= i <= T:
        raise InvalidInputError(f"need 0 <= n <= i <= {T}, got n={n}, i={i}")
    z = np.asarray(z, dtype=float)
    xs = trace.xs

    def S(k):
        lo = k - m + 1
        idx = np.arange(max(lo, 0), k + 1)  # q vanishes below index 1
        return float(np.einsum("ij,ij->", xs[idx] - z, trace.qs[idx + m - 1]))

    k = np.arange(n, i)
    steps = np.sum((xs[k] - xs[k + 1]) ** 2)
    lag = k - m + 1
    ok = lag >= 1
    cross = np.einsum("ij,ij->", xs[lag[ok]] - xs[k[ok] + 1], trace.qs[lag[ok] + m - 1])
    dn = float(np.sum((xs[n] - z) ** 2))
    di = float(np.sum((xs[i] - z) ** 2))
    Sn, Si = S(n), S(i)
    lhs = dn
    rhs = di + float(steps) + 2 * float(cross) + 2 * Si - 2 * Sn
    return lhs, rhs, dn + 2 * Sn - 2 * Si - di


def check_main_identity(trace, z, n, i, tol=TOL_MAIN):
    """Two-sided evaluation of the main identity plus the derived inequality.

    The tolerance ``tol * (1 + max(|x_0|, |z|)^2)`` absorbs the size of the
    squared distances involved.
    """
    z = np.asarray(z, dtype=float)
    scale = 1 + max(_norm0(trace), float(np.linalg.norm(z))) ** 2
    lhs, rhs, slack = main_identity_sides(trace, z, n, i)
    residual = max(abs(lhs - rhs), -slack)
    return CheckReport(
        "main_identity",
        residual,
        tol * scale,
        i,
        params={"n": n, "i": i, "tol": tol, "scale": "1+max(|x0|,|z|)^2"},
        details={"lhs": lhs, "rhs": rhs, "inequality_slack": slack},
    )


def _check_witness(trace, p, b):
    p = np.asarray(p, dtype=float)
    worst = float(trace.family.residuals(p).max())
    if worst > WITNESS_TOL:
        raise InvalidInputError(f"p is at distance {worst:.3g} from the family")
    if b < float(np.linalg.norm(trace.x0 - p)) - WITNESS_TOL:
        raise InvalidInputError(f"b={b} is smaller than |x0 - p|")
    return p


def check_summability(trace, p, b, tol=TOL_BOUND):
    """``|x_n - p| <= b`` and ``sum_{k<=n} |x_k - x_{k+1}|^2 <= b^2`` for every ``n``."""
    p = _check_witness(trace, p, b)
    dist = np.linalg.norm(trace.xs - p, axis=1) - b
    sq = np.cumsum(trace.series.step_norms**2) - b * b
    both = dist.copy()
    both[: sq.size] = np.maximum(both[: sq.size], sq)
    worst = int(np.argmax(both))
    return CheckReport(
        "summability",
        float(both[worst]),
        tol,
        worst,
        params={"b": b, "tol": tol},
        details={"max_distance_excess": float(dist.max()), "max_square_sum_excess": float(sq.max(initial=-b * b))},
    )


def check_q_bound(trace, tol=TOL_BOUND):
    """``sum_{k=n-m+1}^n |q_k| <= sum_{k<n} |x_k - x_{k+1}|``."""
    skip = _dykstra_only(trace, "q_bound", tol)
    if skip:
        return skip
    s = trace.series
    lhs = np.lib.stride_tricks.sliding_window_view(s.q_norms, trace.m).sum(axis=-1)
    rhs = np.concatenate([[0.0], s.partial_sums])
    excess = lhs - rhs
    worst = int(np.argmax(excess))
    return CheckReport("q_bound", float(excess[worst]), tol, worst, params={"tol": tol})


# -- witness searches --------------------------------------------------------------

def _bound(bound):
    """Normalize a bound argument to ``int``, ``"capped"`` or ``None``."""
    if bound is None:
        return None
    if isinstance(bound, RateResult):
        return "capped" if bound.value is None else int(bound.value)
    if bound == "capped":
        return "capped"
    if int(bound) != bound or bound < 0:
        raise InvalidInputError(f"bound must be a natural number or 'capped', got {bound!r}")
    return int(bound)


def _scan_end(lo, bound, T):
    """Last index to scan and whether the bound reaches past the trace."""
    if isinstance(bound, int):
        hi = lo + bound
        return min(hi, T), hi > T
    return T, False


def _window_ok(mask_bad, lo, hi):
    """Whether ``mask_bad`` has no true entry in ``[lo, hi]``."""
    return not mask_bad[lo : hi + 1].any()


def _next_bad(bad):
    """``nb[k]`` = least ``k' >= k`` with ``bad[k']`` (``len(bad)`` if none)."""
    n = bad.size
    idx = np.where(bad, np.arange(n), n)
    return np.minimum.accumulate(idx[::-1])[::-1]


def window_diameter(W, stop_above=math.inf):
    """Largest pairwise distance of the rows of ``W``.

    Returns early (with a value above ``stop_above``) as soon as a pair
    exceeds ``stop_above``.
    """
    W = np.asarray(W, dtype=float)
    best = 0.0
    for a in range(0, len(W), 256):
        block = W[a : a + 256]
        d2 = ((block[:, None, :] - W[None, a:, :]) ** 2).sum(axis=-1)
        best = max(best, float(np.sqrt(d2.max())))
        if best > stop_above:
            break
    return best


def _diam_le(W, eps):
    r = float(np.linalg.norm(W - W[0], axis=1).max())
    if r > eps:
        return False
    if 2 * r <= eps:
        return True
    return window_diameter(W, eps) <= eps


def _describe(f):
    return str(f)


def find_metastability_witness(trace, eps, f, bound=None, *, start=0):
    """Least ``n`` in the scan range with ``|x_i - x_j| <= eps`` for all ``i, j in [n, n + f(n)]``.

    Windows running past ``x_T`` are skipped and flagged as partial; they
    are never counted as witnesses.
    """
    eps = float(eps)
    f = counterfunction(f)
    b = _bound(bound)
    T = trace.steps
    # the bound caps the witness itself, not an offset from start
    hi, partial = (min(b, T), b > T) if isinstance(b, int) else (T, False)
    witness = None
    skipped = 0
    for n in range(start, hi + 1):
        end = n + f(n)
        if end > T:
            skipped += 1
            partial = True
            if f.monotone() in (0, 1):
                break
            continue
        if _diam_le(trace.xs[n : end + 1], eps):
            witness = n
            break
    rep = WitnessReport("metastability", eps, _describe(f), witness, b, (start, hi), partial)
    if skipped:
        rep.notes.append(f"{skipped} candidate window(s) run past the trace end")
    if b == "capped":
        rep.notes.append(CAPPED_NOTE)
    if witness is not None:
        W = trace.xs[witness : witness + f(witness) + 1]
        rep.details["window_diameter"] = window_diameter(W)
        rep.verified = rep.details["window_diameter"] <= eps
    return rep


def liminf_terms(trace, n):
    """``|<x_k - x_n, q_k>|`` for ``k = n-m+1..n`` computed directly."""
    m = trace.m
    return [abs(float(np.dot(trace.x(k) - trace.x(n), trace.q(k)))) for k in range(n - m + 1, n + 1)]


def find_liminf_witness(trace, eps, N=0, bound=None):
    """Least ``n`` in ``[N, N + bound]`` with ``sum_{k=n-m+1}^n |<x_k - x_n, q_k>| <= eps``."""
    eps = float(eps)
    b = _bound(bound)
    T = trace.steps
    if not 0 <= N <= T:
        raise InvalidInputError(f"N={N} outside the trace [0, {T}]")
    hi, partial = _scan_end(N, b, T)
    ws = trace.series.window_sums
    hits = np.nonzero(ws[N : hi + 1] <= eps)[0]
    witness = int(N + hits[0]) if hits.size else None
    rep = WitnessReport("liminf", eps, "", witness, b, (N, hi), partial)
    rep.details["N"] = N
    if b == "capped":
        rep.notes.append(CAPPED_NOTE)
    if partial:
        rep.notes.append("bound reaches past the trace end")
    if witness is not None:
        rep.details["window_sum"] = sum(liminf_terms(trace, witness))
        rep.verified = rep.details["window_sum"] <= eps
    elif not partial:
        rep.notes.append("no index in the scanned range meets eps")
    return rep


def _auto_bound(fn, b, m, eps, f, name):
    try:
        e = as_pos(eps, "eps")
    except InvalidInputError:
        return None
    params = dict(b=b, eps=e, f=f) if m is None else dict(b=b, m=m, eps=e, f=f)
    r = evaluate(name, fn, params)
    return "capped" if r.capped else int(r.value)


def _regular_witness(bad, lo, hi, f, T, last):
    """Least ``n`` in ``[lo, hi]`` whose window ``[n, n + f(n)]`` avoids ``bad``."""
    nb = _next_bad(bad)
    skipped = 0
    for n in range(lo, hi + 1):
        end = n + f(n)
        if end > last:
            skipped += 1
            if f.monotone() in (0, 1):
                break
            continue
        if nb[n] > end:
            return n, skipped
    return None, skipped


def check_asymptotic_regularity(trace, eps, f, bound=None, step_bound=None):
    """Least ``n`` with every residual ``|x_k - P_j(x_k)| <= eps`` on ``[n, n + f(n)]``.

    Bounds default to ``alpha(b, m, eps, f)`` and, for the step variant
    ``|x_k - x_{k+1}| <= eps``, to ``Psi(b^2, eps^2, f)`` when the trace
    carries a bound ``b``; bounds too large to display count as capped.  The step
    variant is stored under ``details["step_variant"]``.
    """
    epsf = float(eps)
    f = counterfunction(f)
    T = trace.steps
    if bound is None and trace.bound is not None:
        bound = _auto_bound(rate_alpha, trace.bound, trace.m, eps, f, "alpha")
    if step_bound is None and trace.bound is not None:
        step_bound = _auto_bound(rate_asymptotic_step, trace.bound, None, eps, f, "Psi")
    b = _bound(bound)
    hi, partial = _scan_end(0, b, T)
    res = trace.series.residuals
    witness, skipped = _regular_witness(res.max(axis=1) > epsf, 0, hi, f, T, T)
    rep = WitnessReport("asymptotic_regularity", epsf, _describe(f), witness, b, (0, hi), partial or bool(skipped))
    if b == "capped":
        rep.notes.append(CAPPED_NOTE)
    if witness is not None:
        X = trace.xs[witness : witness + f(witness) + 1]
        worst = float(trace.family.residuals(X).max())
        rep.details["max_residual"] = worst
        rep.verified = worst <= epsf

    sb = _bound(step_bound)
    shi, spartial = _scan_end(0, sb, T - 1)
    steps = trace.series.step_norms
    sw, sskipped = _regular_witness(steps > epsf, 0, shi, f, T - 1, T - 1)
    step = WitnessReport("asymptotic_step", epsf, _describe(f), sw, sb, (0, shi), spartial or bool(sskipped))
    if sb == "capped":
        step.notes.append(CAPPED_NOTE)
    if sw is not None:
        seg = trace.xs[sw : sw + f(sw) + 2]
        worst = float(np.linalg.norm(np.diff(seg, axis=0), axis=1).max())
        step.details["max_step"] = worst
        step.verified = worst <= epsf
    rep.details["step_variant"] = step
    return rep


def cauchy_index(trace, eps):
    """Least ``n`` with ``|x_i - x_T| <= eps/2`` for every ``i >= n``.

    Within the trace this makes every window starting at ``n`` or later
    have diameter at most ``eps``.
    """
    d = np.linalg.norm(trace.xs - trace.xs[-1], axis=1)
    bad = np.nonzero(d > eps / 2)[0]
    return int(bad[-1] + 1) if bad.size else 0


# -- Koh lemmas ------------------------------------------------------------------

def _ball_points(rng, p, r, k):
    d = p.size
    v = rng.standard_normal((k, d))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return p + v * (r * rng.uniform(size=(k, 1)) ** (1.0 / d))


def check_koh_lemmas(family, b, trials=1000, seed=0, eps=0.5, tol=TOL_BOUND):
    """Sampled checks of two elementary lemmas on almost-fixed points.

    *Convexity*: for ``x_1, x_2`` in ``B_b(p)`` with residuals at most
    ``eps^2/12D`` (``D = 2b``), every ``w_t = (1-t) x_1 + t x_2`` has residual
    at most ``eps``.

    *Inner product*: for ``u, x, y`` with ``D >= |x - y|`` and
    ``|u - x|^2 <= |u - w_t|^2 + eps^2/D^2`` for all ``t`` in ``[0, 1]``,
    ``<u - x, y - x> <= eps``.  Requires ``eps <= D^2``.

    Trials whose premise fails are counted as "not applicable".  The
    residual is the largest excess of a conclusion over its bound.
    """
    if family.witness is None:
        raise InvalidInputError("check_koh_lemmas needs a family with a witness p")
    if trials < 1:
        raise InvalidInputError("trials must be >= 1")
    eps = float(eps)
    p = family.witness
    D = 2 * int(b)
    rng = np.random.default_rng(seed)
    thr = eps**2 / (12 * D)

    # convexity lemma
    worst1, na1 = -math.inf, 0
    js = rng.integers(0, family.m, size=trials)
    violate = rng.uniform(size=trials) < 0.1
    for t_i in range(trials):
        s = family[int(js[t_i])]
        pts = []
        for _ in range(2):
            y = _ball_points(rng, p, b, 1)[0]
            base = s.project(y)
            v = rng.standard_normal(p.size)
            v /= np.linalg.norm(v)
            size = eps if violate[t_i] else thr * rng.uniform()
            pts.append(base + size * v)
        x1, x2 = pts
        r = [float(np.linalg.norm(x - s.project(x))) for x in (x1, x2)]
        if max(r) > thr or max(np.linalg.norm(x1 - p), np.linalg.norm(x2 - p)) > b:
            na1 += 1
            continue
        t = rng.uniform(size=8)
        W = (1 - t)[:, None] * x1 + t[:, None] * x2
        worst1 = max(worst1, float(np.linalg.norm(W - s.project(W), axis=1).max()) - eps)

    # inner-product lemma
    worst2, na2 = -math.inf, 0
    for _ in range(trials):
        x, y = _ball_points(rng, p, b, 2)
        L = float(np.linalg.norm(y - x))
        Dl = max(1, math.ceil(L))
        if L == 0 or eps > Dl * Dl:
            na2 += 1
            continue
        e = (y - x) / L
        c = rng.uniform(-1.0, 1.5 * eps / Dl)
        w = rng.standard_normal(p.size)
        w -= np.dot(w, e) * e
        u = x + c * e + w
        A = float(np.dot(u - x, y - x))
        # max over t in [0,1] of |u-x|^2 - |u-w_t|^2 = 2tA - t^2 L^2
        gain = 0.0 if A <= 0 else (A * A / (L * L) if A < L * L else 2 * A - L * L)
        if gain > eps**2 / Dl**2:
            na2 += 1
            continue
        worst2 = max(worst2, A - eps)

    residual = max(worst1, worst2)
    applicable = math.isfinite(residual)
    return CheckReport(
        "koh_lemmas",
        residual if applicable else 0.0,
        tol,
        params={"b": b, "trials": trials, "seed": seed, "eps": eps, "tol": tol},
        details={
            "convexity_max_excess": worst1 if math.isfinite(worst1) else None,
            "convexity_not_applicable": na1,
            "inner_product_max_excess": worst2 if math.isfinite(worst2) else None,
            "inner_product_not_applicable": na2,
        },
        applicable=applicable,
    )


# -- finitization ------------------------------------------------------------------

def certify_limit(trace, eps, target, b=None, tol=TOL_INNER):
    """Certify ``|x_T - target| <= eps`` along the chain of the limit argument.

    ``target`` is an independently computed ``P_C(x_0)``.  The chain:

    1. tail index ``N0`` with ``|x_n - x_T| <= min(eps^2/8b, eps/2)`` for ``n >= N0``;
    2. ``n0 >= N0`` with signed window sum ``sum <x_k - x_n0, q_k> <= eps^2/8``;
    3. ``<c - x_n0, c - x_0> <= eps^2/8`` and ``sum <c - x_k, q_k> <= 0`` with ``c = target``;
    4. hence ``|c - x_n0| <= eps/2`` and ``|c - x_T| <= eps``.

    Each numeric link is checked with slack ``tol * (1 + |x_0|^2)``.
    """
    eps = float(eps)
    c = np.asarray(target, dtype=float)
    b = trace.bound if b is None else b
    if b is None:
        raise InvalidInputError("certify_limit needs a bound b")
    slack = tol * (1 + _norm0(trace) ** 2)
    xs, m, T = trace.xs, trace.m, trace.steps
    tail = np.linalg.norm(xs - xs[-1], axis=1)
    bad = np.nonzero(tail > min(eps * eps / (8 * b), eps / 2))[0]
    N0 = int(bad[-1] + 1) if bad.size else 0
    sw = trace.series.signed_window_sums
    hits = np.nonzero(sw[N0:] <= eps * eps / 8)[0]
    details = {"N0": N0}
    notes = []
    if not hits.size:
        return CheckReport("finitization", math.inf, eps, params={"eps": eps, "b": b}, details=details,
                           notes=["no liminf index after the tail index"])
    n0 = int(N0 + hits[0])
    ks = np.arange(max(n0 - m + 1, 1), n0 + 1)
    kolm = float(np.dot(c - xs[n0], c - xs[0]))
    qsum = float(np.einsum("ij,ij->", c - xs[ks], trace.qs[ks + m - 1])) if ks.size else 0.0
    dist_n0 = float(np.linalg.norm(c - xs[n0]))
    final = float(np.linalg.norm(c - xs[-1]))
    details.update(
        n0=n0,
        window_sum=float(sw[n0]),
        kolmogorov_term=kolm,
        q_term=qsum,
        distance_at_n0=dist_n0,
        distance_at_T=final,
        T=T,
    )
    links = kolm <= eps * eps / 8 + slack and qsum <= slack and dist_n0 <= eps / 2 + slack
    if not links:
        notes.append("a link of the chain failed")
    return CheckReport(
        "finitization",
        final if links else math.inf,
        eps,
        T,
        params={"eps": eps, "b": b, "tol": tol},
        details=details,
        notes=notes,
    )
