from __future__ import annotations

import numpy as np
import pytest

import oracles as orc
from conftest import random_instance
from dykstra import (
    AffineSubspace,
    Ball,
    DykstraState,
    Halfspace,
    InvalidInputError,
    ResourceCapError,
    dykstra_run,
    dykstra_step,
    family,
    map_run,
)
from dykstra.engine import (
    MAX_STEPS,
    natural_bound,
    read_trace_jsonl,
    series_csv,
    set_index,
    trace_records,
    write_trace_jsonl,
)
from dykstra.sets import full_space

LINES = family(
    AffineSubspace([[1, 0]], [0, 0]),
    AffineSubspace([[1, 1]], [0, 0]),
    witness=[0, 0],
)
HALFDISC = family(Halfspace([0, 1], 0), Ball([0, 0], 1), witness=[0, 0])


class TestStep:
    def test_first_step(self):
        fam = family(Halfspace([1, 0], 0), Ball([0, 0], 1))
        s1 = dykstra_step(DykstraState.initial([1, 1], 2), fam)
        np.testing.assert_array_equal(s1.x, [0, 1])
        np.testing.assert_array_equal(s1.qbuf[-1], [1, 0])
        # second step: (0,1) is on the unit sphere, q_0 = 0
        s2 = dykstra_step(s1, fam)
        np.testing.assert_array_equal(s2.x, [0, 1])
        np.testing.assert_array_equal(s2.qbuf[-1], [0, 0])
        assert s2.n == 2

    def test_member_is_fixed(self):
        s = dykstra_step(DykstraState.initial([0, 0], 2), HALFDISC)
        np.testing.assert_array_equal(s.x, [0, 0])
        assert not np.any(s.qbuf[-1])

    def test_ring_buffer_rotates(self):
        s = DykstraState.initial([3, 3], 2)
        for _ in range(5):
            s = dykstra_step(s, HALFDISC)
        assert len(s.qbuf) == 2
        tr = dykstra_run(HALFDISC, [3, 3], 5)
        np.testing.assert_allclose(s.x, tr.x(5))
        np.testing.assert_allclose(s.qbuf[0], tr.q(4))
        np.testing.assert_allclose(s.qbuf[1], tr.q(5))

    @pytest.mark.parametrize("n,m,j", [(1, 2, 0), (2, 2, 1), (3, 2, 0), (4, 3, 0), (6, 3, 2)])
    def test_set_index(self, n, m, j):
        assert set_index(n, m) == j


class TestRuns:
    def test_full_space_constant(self):
        fam = family(full_space(3), full_space(3))
        tr = dykstra_run(fam, [1, -2, 3], 100)
        assert np.all(tr.xs == [1, -2, 3])
        assert not np.any(tr.qs)

    def test_halfdisc_limit(self):
        tr = dykstra_run(HALFDISC, [2, 2], 5000)
        assert np.linalg.norm(tr.xs[-1] - [1, 0]) <= 1e-4

    def test_twolines(self):
        tr = dykstra_run(LINES, [1, 0], 200)
        assert np.linalg.norm(tr.xs[-1]) <= 1e-6

    def test_twolines_residual_closed_form(self):
        tr = dykstra_run(LINES, [1, 0], 60)
        res = tr.series.residuals.max(axis=1)
        expected = np.array([orc.twolines_residual(n) for n in range(61)])
        np.testing.assert_allclose(res, expected, rtol=1e-9, atol=1e-15)

    def test_negative_q_are_zero(self):
        tr = dykstra_run(HALFDISC, [2, 2], 3)
        assert tr.qs.shape == (3 + 2, 2)
        assert not np.any(tr.q(0)) and not np.any(tr.q(-1))

    def test_membership(self):
        fam, x0 = random_instance(3)
        tr = dykstra_run(fam, x0, 100)
        for n in range(1, 101):
            assert fam[set_index(n, fam.m)].violation(tr.x(n)) <= 1e-9

    def test_step_cap(self):
        with pytest.raises(ResourceCapError):
            dykstra_run(HALFDISC, [1, 1], MAX_STEPS + 1)

    def test_bad_steps(self):
        with pytest.raises(InvalidInputError):
            dykstra_run(HALFDISC, [1, 1], -1)

    def test_attach_bound(self):
        tr = dykstra_run(HALFDISC, [2, 2], 3)
        assert tr.bound == 3 == natural_bound([2, 2], [0, 0])
        assert tr.attach([0, 0], 7).bound == 7


class TestMap:
    def test_composition_order(self):
        tr = map_run(LINES, [1, 0], 1, order="composition")
        np.testing.assert_allclose(tr.xs[1], [0.5, 0])

    def test_cyclic_order(self):
        tr = map_run(LINES, [1, 0], 1)
        np.testing.assert_allclose(tr.xs[1], [0.5, 0.5])

    def test_member_constant(self):
        tr = map_run(HALFDISC, [0, -0.5], 10)
        assert np.all(tr.xs == [0, -0.5])
        assert not np.any(tr.qs)

    def test_identical_halfspaces(self):
        h = Halfspace([1, 1], 0)
        tr = map_run(family(h, h), [2, 1], 5)
        np.testing.assert_allclose(tr.xs[1], [0.5, -0.5])
        assert np.all(tr.xs[1:] == tr.xs[1])

    def test_unknown_order(self):
        with pytest.raises(InvalidInputError):
            map_run(LINES, [1, 0], 1, order="random")

    @pytest.mark.parametrize("seed", range(4))
    def test_reduction_on_affine_sets(self, seed):
        rng = np.random.default_rng(seed)
        c = rng.standard_normal(3)
        fam = family(*[AffineSubspace(rng.standard_normal((2, 3)), c) for _ in range(3)])
        x0 = c + rng.standard_normal(3)
        d = dykstra_run(fam, x0, 300)
        mp = map_run(fam, x0, 100)
        np.testing.assert_allclose(d.xs[::3], mp.xs, atol=1e-9)


class TestSeries:
    def test_constant_trace(self):
        tr = dykstra_run(HALFDISC, [0, -0.5], 20)
        s = tr.series
        assert not np.any(s.step_norms) and not np.any(s.residuals)
        assert not np.any(s.partial_sums) and not np.any(s.window_sums)

    def test_partial_sums_nondecreasing(self):
        fam, x0 = random_instance(7)
        s = dykstra_run(fam, x0, 300).series
        assert np.all(np.diff(s.partial_sums) >= 0)

    def test_halfdisc_window_sum_small(self):
        tr = dykstra_run(HALFDISC, [2, 2], 5000)
        assert tr.series.window_sums[-1] <= 1e-6

    def test_window_sum_direct(self):
        fam, x0 = random_instance(4, m=3)
        tr = dykstra_run(fam, x0, 40)
        for n in (0, 1, 2, 5, 39):
            direct = sum(abs(np.dot(tr.x(k) - tr.x(n), tr.q(k))) for k in range(n - 2, n + 1) if k >= 1)
            assert tr.series.window_sums[n] == pytest.approx(direct, abs=1e-13)

    def test_csv_columns(self):
        tr = dykstra_run(HALFDISC, [2, 2], 4)
        lines = series_csv(tr).splitlines()
        assert lines[0] == "n,step_norm,residual_1,residual_2,s_n,window_sum"
        assert len(lines) == 6
        assert lines[-1].split(",")[1] == ""


class TestExport:
    def test_jsonl_roundtrip_bit_exact(self, tmp_path):
        fam, x0 = random_instance(11)
        tr = dykstra_run(fam, x0, 50)
        path = tmp_path / "t.jsonl"
        write_trace_jsonl(tr, path)
        back = read_trace_jsonl(path, fam)
        assert np.array_equal(back.xs, tr.xs) and np.array_equal(back.qs, tr.qs)
        assert trace_records(back) == trace_records(tr)

    def test_out_of_order(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"n":1,"x":[0,0],"q":[0,0]}\n')
        with pytest.raises(InvalidInputError):
            read_trace_jsonl(path, HALFDISC)
