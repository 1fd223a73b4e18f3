from __future__ import annotations

from fractions import Fraction

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import KINDS, random_instance, random_set_through
from dykstra import dykstra_run, kolmogorov_residual, rate_psi
from dykstra import diagnostics as dg

SEEDS = st.integers(0, 2**32 - 1)
FAST = settings(max_examples=60, deadline=None)


def _set_and_point(seed, kind):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(2, 5))
    p = rng.standard_normal(d)
    s = random_set_through(rng, p, kind)
    return s, rng, d


class TestProjectionProperties:
    @FAST
    @given(seed=SEEDS, kind=st.sampled_from(KINDS))
    def test_idempotent(self, seed, kind):
        s, rng, d = _set_and_point(seed, kind)
        u = 5 * rng.standard_normal(d)
        pu = s.project(u)
        assert np.linalg.norm(s.project(pu) - pu) <= 1e-12 * (1 + np.linalg.norm(u))

    @FAST
    @given(seed=SEEDS, kind=st.sampled_from(KINDS))
    def test_nonexpansive(self, seed, kind):
        s, rng, d = _set_and_point(seed, kind)
        u, v = 5 * rng.standard_normal((2, d))
        lhs = np.linalg.norm(s.project(u) - s.project(v))
        assert lhs <= np.linalg.norm(u - v) * (1 + 1e-12) + 1e-12

    @FAST
    @given(seed=SEEDS, kind=st.sampled_from(KINDS))
    def test_kolmogorov(self, seed, kind):
        s, rng, d = _set_and_point(seed, kind)
        u = 5 * rng.standard_normal(d)
        scale = 1 + float(np.linalg.norm(u)) ** 2
        assert kolmogorov_residual(s, u, samples=200, seed=seed % 1000) <= 1e-9 * scale

    @FAST
    @given(seed=SEEDS, kind=st.sampled_from(KINDS))
    def test_projection_is_member(self, seed, kind):
        s, rng, d = _set_and_point(seed, kind)
        u = 5 * rng.standard_normal(d)
        assert s.contains(s.project(u))


class TestRunProperties:
    @settings(max_examples=25, deadline=None)
    @given(seed=SEEDS, steps=st.integers(1, 120))
    def test_identities(self, seed, steps):
        fam, x0 = random_instance(seed)
        tr = dykstra_run(fam, x0, steps)
        assert dg.check_identities(tr).passed

    @settings(max_examples=25, deadline=None)
    @given(seed=SEEDS)
    def test_q_bound_and_summability(self, seed):
        fam, x0 = random_instance(seed)
        tr = dykstra_run(fam, x0, 80)
        b = float(np.linalg.norm(x0 - fam.witness)) + 1e-9
        assert dg.check_q_bound(tr).passed
        assert dg.check_summability(tr, fam.witness, b).passed

    @settings(max_examples=25, deadline=None)
    @given(seed=SEEDS)
    def test_distance_to_witness_decreases(self, seed):
        # iterates never end up farther from a common point than x0
        fam, x0 = random_instance(seed)
        tr = dykstra_run(fam, x0, 60)
        d = np.linalg.norm(tr.xs - fam.witness, axis=1)
        assert d[-1] <= d[0] + 1e-9


class TestRateProperties:
    @settings(max_examples=80, deadline=None)
    @given(
        B=st.fractions(Fraction(1, 4), 4, max_denominator=8),
        eps=st.fractions(Fraction(1, 4), 2, max_denominator=8),
        c=st.integers(0, 5),
        k=st.integers(0, 5),
    )
    def test_psi_monotone_in_f(self, B, eps, c, k):
        # f <= g pointwise gives Psi(f) <= Psi(g)
        assert rate_psi(B, eps, f"n+{c}") <= rate_psi(B, eps, f"n+{c + k}")

    @settings(max_examples=80, deadline=None)
    @given(
        B=st.fractions(Fraction(1, 4), 4, max_denominator=8),
        e1=st.fractions(Fraction(1, 4), 2, max_denominator=8),
        e2=st.fractions(Fraction(1, 4), 2, max_denominator=8),
    )
    def test_psi_antitone_in_eps(self, B, e1, e2):
        lo, hi = sorted((e1, e2))
        assert rate_psi(B, lo, "n") >= rate_psi(B, hi, "n")
