from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dykstra import AffineSubspace, Ball, Box, Halfspace, family  # noqa: E402
from dykstra.runner import build_trace  # noqa: E402
from dykstra.scenarios import builtin  # noqa: E402

# -- random instances --------------------------------------------------------------

KINDS = ("halfspace", "ball", "box", "affine")


def random_set_through(rng, p, kind):
    """A random set of the given kind that contains ``p``."""
    d = p.size
    if kind == "halfspace":
        a = rng.standard_normal(d)
        return Halfspace(a, float(a @ p) + rng.uniform(0, 1))
    if kind == "ball":
        r = rng.uniform(0.5, 2.0)
        v = rng.standard_normal(d)
        c = p + v / np.linalg.norm(v) * r * rng.uniform(0, 1)
        return Ball(c, r)
    if kind == "box":
        return Box(p - rng.uniform(0, 1.5, d), p + rng.uniform(0, 1.5, d))
    if kind == "affine":
        k = int(rng.integers(1, d))
        return AffineSubspace(rng.standard_normal((k, d)), p)
    raise ValueError(kind)


def random_instance(seed, m=None, dim=None, kinds=KINDS):
    """Seeded family with a witness ``p`` and a starting point ``x0``."""
    rng = np.random.default_rng(seed)
    d = dim or int(rng.integers(2, 4))
    m = m or int(rng.integers(2, 5))
    p = rng.standard_normal(d)
    sets = [random_set_through(rng, p, kinds[int(rng.integers(len(kinds)))]) for _ in range(m)]
    x0 = p + 3.0 * rng.standard_normal(d)
    return family(*sets, witness=p), x0


@pytest.fixture(scope="session")
def scenario_trace():
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = build_trace(builtin(name))
        return cache[name]

    return get


# -- acceptance summary ------------------------------------------------------------

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def acceptance():
    """``acceptance(k, ok, detail)`` records criterion ``k`` and asserts it."""

    def record(k, ok, detail):
        ACCEPTANCE[k] = (bool(ok), detail)
        assert ok, f"criterion {k}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"ACCEPTANCE criterion {k:>2}: {'PASS' if ok else 'FAIL'} - {detail}")
