"""Dykstra's cyclic projections and the method of alternating projections.

Indexing follows the recursion exactly: step ``n >= 1`` projects onto set
``j_n = ((n - 1) mod m) + 1`` (0-based: ``(n - 1) % m``), and the auxiliary
vectors ``q_{-(m-1)}, ..., q_0`` start at zero.  A :class:`Trace` stores
``x_0..x_T`` and ``q_{-(m-1)}..q_T`` so every identity about the iteration
can be evaluated verbatim at any index.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import InvalidInputError, ResourceCapError
from .sets import SetFamily, as_vector

#: largest trace length accepted by the runners
MAX_STEPS = 10**6


def set_index(n, m):
    """0-based index of the set used at step ``n >= 1``."""
    return (n - 1) % m


@dataclass(frozen=True)
class DykstraState:
    """Iteration state after ``n`` steps.

    ``qbuf`` holds ``q_{n-m+1}, ..., q_n`` oldest first, so ``qbuf[0]`` is the
    correction re-injected at the next step.
    """

    n: int
    x: np.ndarray
    qbuf: tuple

    @classmethod
    def initial(cls, x0, m):
        x0 = as_vector(x0, name="x0")
        zero = np.zeros_like(x0)
        zero.setflags(write=False)
        return cls(0, x0, (zero,) * m)


def dykstra_step(state, family):
    """One application of the recursion: returns the state at ``n + 1``."""
    n1 = state.n + 1
    y = state.x + state.qbuf[0]
    x = family[set_index(n1, family.m)].project(y)
    q = y - x
    x.setflags(write=False)
    q.setflags(write=False)
    return DykstraState(n1, x, state.qbuf[1:] + (q,))


@dataclass(frozen=True, eq=False)
class Trace:
    """Complete history of a run.

    ``xs[n]`` is ``x_n`` for ``n = 0..T``; ``qs[k + m - 1]`` is ``q_k`` for
    ``k = -(m-1)..T``.  Use :meth:`x` and :meth:`q` for index-safe access.
    ``bound`` is a natural number ``b >= |x_0 - p|`` for the witness ``p``.
    """

    family: SetFamily
    xs: np.ndarray
    qs: np.ndarray
    algorithm: str = "dykstra"
    witness: np.ndarray | None = None
    bound: int | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.xs.setflags(write=False)
        self.qs.setflags(write=False)
        if self.qs.shape[0] != self.xs.shape[0] + self.m - 1:
            raise InvalidInputError("q history does not match x history length")

    @property
    def m(self):
        return self.family.m

    @property
    def steps(self):
        return self.xs.shape[0] - 1

    @property
    def x0(self):
        return self.xs[0]

    def x(self, n):
        """``x_n``; indices below zero return zero (their q partners vanish)."""
        if n < 0:
            return np.zeros(self.xs.shape[1])
        return self.xs[n]

    def q(self, k):
        return self.qs[k + self.m - 1]

    def q_window(self, n):
        """``q_{n-m+1}, ..., q_n`` as an ``(m, d)`` array."""
        return self.qs[n : n + self.m]

    def x_window(self, n):
        """``x_{n-m+1}, ..., x_n``, zero-filled below index 0."""
        lo = n - self.m + 1
        if lo >= 0:
            return self.xs[lo : n + 1]
        pad = np.zeros((-lo, self.xs.shape[1]))
        return np.vstack([pad, self.xs[: n + 1]])

    @cached_property
    def series(self):
        return series(self)

    def attach(self, witness, bound=None):
        """Return a copy with witness ``p`` and bound ``b`` (derived if omitted)."""
        p = as_vector(witness, self.xs.shape[1], name="witness")
        if bound is None:
            bound = natural_bound(self.x0, p)
        return Trace(self.family, self.xs, self.qs, self.algorithm, p, int(bound), dict(self.meta))


def natural_bound(x0, p):
    """Smallest natural ``b >= 1`` with ``b >= |x0 - p|``."""
    return max(1, math.ceil(float(np.linalg.norm(np.asarray(x0) - np.asarray(p)))))


def _check_run(family, x0, steps):
    x0 = as_vector(x0, family.dim, name="x0")
    if int(steps) != steps or steps < 0:
        raise InvalidInputError(f"steps must be a natural number, got {steps}")
    steps = int(steps)
    if steps > MAX_STEPS:
        raise ResourceCapError(f"trace of {steps} steps exceeds the cap of {MAX_STEPS}", stage="trace")
    return x0, steps


def dykstra_run(family, x0, steps):
    """Run ``steps`` iterations of Dykstra's algorithm from ``x0``."""
    x0, T = _check_run(family, x0, steps)
    m, d = family.m, family.dim
    xs = np.empty((T + 1, d))
    qs = np.zeros((T + m, d))
    xs[0] = x0
    x = x0
    for n in range(1, T + 1):
        y = x + qs[n - 1]  # q_{n-m}
        x = family[(n - 1) % m].project(y)
        xs[n] = x
        qs[n + m - 1] = y - x
    return _with_witness(Trace(family, xs, qs, "dykstra"))


def map_run(family, x0, steps, order="cyclic"):
    """Method of alternating projections, one full sweep per step.

    ``order="cyclic"`` applies ``P_1`` first and ``P_m`` last, matching the
    visiting order of :func:`dykstra_run`; ``order="composition"`` applies
    the literal composition ``P_1 P_2 ... P_m`` (``P_m`` first).
    """
    x0, T = _check_run(family, x0, steps)
    if order == "cyclic":
        sets = family.sets
    elif order == "composition":
        sets = family.sets[::-1]
    else:
        raise InvalidInputError(f"unknown sweep order {order!r}")
    m, d = family.m, family.dim
    xs = np.empty((T + 1, d))
    xs[0] = x0
    x = x0
    for n in range(1, T + 1):
        for s in sets:
            x = s.project(x)
        xs[n] = x
    return _with_witness(Trace(family, xs, np.zeros((T + m, d)), "map", meta={"order": order}))


def _with_witness(trace):
    if trace.family.witness is not None:
        return trace.attach(trace.family.witness)
    return trace


@dataclass(frozen=True, eq=False)
class DerivedSeries:
    """Per-index quantities derived from a trace.

    ``step_norms[n] = |x_n - x_{n+1}|`` and ``partial_sums[n] = s_n`` for
    ``n < T``; ``residuals[n, j] = |x_n - P_j(x_n)|``, ``window_sums[n]``
    (absolute terms) and ``signed_window_sums[n]`` for ``n <= T``.
    """

    step_norms: np.ndarray
    residuals: np.ndarray
    partial_sums: np.ndarray
    window_sums: np.ndarray
    signed_window_sums: np.ndarray
    q_norms: np.ndarray


def window_terms(trace):
    """``<x_k - x_n, q_k>`` for ``k = n-m+1..n``, shape ``(T+1, m)``.

    Column ``l`` holds the lag ``k = n - l``; terms with ``k <= 0`` vanish.
    """
    T, m = trace.steps, trace.m
    xs = trace.xs
    out = np.zeros((T + 1, m))
    for lag in range(1, m):
        n = np.arange(lag + 1, T + 1)  # k = n - lag >= 1
        if n.size == 0:
            continue
        k = n - lag
        diff = xs[k] - xs[n]
        out[n, lag] = np.einsum("ij,ij->i", diff, trace.qs[k + m - 1])
    return out


def series(trace):
    """Compute the :class:`DerivedSeries` of a trace."""
    xs = trace.xs
    steps = np.linalg.norm(np.diff(xs, axis=0), axis=1)
    terms = window_terms(trace)
    out = DerivedSeries(
        step_norms=steps,
        residuals=trace.family.residuals(xs),
        partial_sums=np.cumsum(steps),
        window_sums=np.abs(terms).sum(axis=1),
        signed_window_sums=terms.sum(axis=1),
        q_norms=np.linalg.norm(trace.qs, axis=1),
    )
    for a in vars(out).values():
        a.setflags(write=False)
    return out


# -- export ------------------------------------------------------------------

def _num(v):
    # 17 significant digits round-trip every float64 exactly
    return format(float(v), ".17g")


def _arr(v):
    return "[" + ",".join(_num(t) for t in v) + "]"


def trace_records(trace):
    """JSON-lines text, one record per index ``n = 0..T``."""
    res = trace.series.residuals
    lines = []
    for n in range(trace.steps + 1):
        lines.append(
            '{"n":%d,"x":%s,"q":%s,"residuals":%s}'
            % (n, _arr(trace.x(n)), _arr(trace.q(n)), _arr(res[n]))
        )
    return "\n".join(lines) + "\n"


def write_trace_jsonl(trace, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(trace_records(trace))


def read_trace_jsonl(path, family, algorithm="dykstra"):
    """Rebuild a :class:`Trace` from JSON-lines written by :func:`write_trace_jsonl`."""
    xs, qs = [], []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            rec = json.loads(line)
            if rec["n"] != len(xs):
                raise InvalidInputError(f"trace record out of order at line {lineno}")
            xs.append(rec["x"])
            qs.append(rec["q"])
    if not xs:
        raise InvalidInputError(f"empty trace file {path}")
    xs = np.array(xs, dtype=float)
    m = family.m
    qs = np.vstack([np.zeros((m - 1, xs.shape[1])), np.array(qs, dtype=float)])
    return _with_witness(Trace(family, xs, qs, algorithm))


def series_csv(trace):
    """CSV text with columns ``n, step_norm, residual_1..m, s_n, window_sum``.

    ``step_norm`` and ``s_n`` need ``x_{n+1}`` and are empty on the last row.
    """
    s = trace.series
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "step_norm"] + [f"residual_{j + 1}" for j in range(trace.m)] + ["s_n", "window_sum"])
    T = trace.steps
    for n in range(T + 1):
        last = n == T
        w.writerow(
            [n, "" if last else _num(s.step_norms[n])]
            + [_num(r) for r in s.residuals[n]]
            + ["" if last else _num(s.partial_sums[n]), _num(s.window_sums[n])]
        )
    return buf.getvalue()


def write_series_csv(trace, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(series_csv(trace))
