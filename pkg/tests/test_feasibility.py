import numpy as np
import pytest

from ringpen.benchmarks import example1, example2
from ringpen.core import ConfigurationError, consensus, penalty_value
from ringpen.dpm import DpmRun, run_dpm
from ringpen.feasibility import (
    FeasibilityProblem,
    average_violation,
    gpm_iterates,
    gpm_run,
    gpm_step,
    regularized_feasibility,
)
from ringpen.metrics import delta_p
from ringpen.oracles import Ball, Halfspace, OracleStack, SquaredNorm


def toy():
    return FeasibilityProblem([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]], [2.0, 1.0, 2.5])


def test_consensus_feasible_start_is_fixed():
    p = example1(20, 10)
    x = consensus(np.ones(10), 20)
    assert np.array_equal(gpm_step(x, 0.4, 1.0, p), x)


def test_single_block_projection():
    p = FeasibilityProblem([[1.0, 0.0]], [0.0])
    np.testing.assert_allclose(gpm_step([[1.0, 1.0]], 0.4, 1.0, p), [[0.0, 1.0]])


@pytest.mark.parametrize("alpha, tau", [(0.5, 1.0), (0.0, 1.0), (1.0, 1.5)])
def test_step_range(alpha, tau):
    with pytest.raises(ConfigurationError):
        gpm_step(np.zeros((3, 2)), alpha, tau, toy())


def test_feasible_consensus_stops_at_first_step():
    p = example1(20, 10)
    r = gpm_run(p, x0=consensus(np.ones(10), 20))
    assert r.kt == 1 and r.final["dp"] == 0.0


def test_example1_kt():
    assert gpm_run(example1(20, 10)).kt == 32


@pytest.mark.parametrize("make", [example1, example2])
def test_monotone_penalty(make):
    p = make(20, 10)
    vals = [penalty_value(s.x, 1.0) for s in gpm_iterates(p, p.start(), budget=300)]
    # x^0 = 5*1 is a consensus point outside X (p = 0); descent holds from x^1 on
    vals = vals[1:]
    assert all(b <= a + 1e-12 * (1 + a) for a, b in zip(vals, vals[1:]))


def test_inconsistent_violation_stays_positive():
    p = example2(20, 10)
    snaps = list(gpm_iterates(p, p.start(), budget=2000))
    assert average_violation(p, snaps[-1].x) > 0.1


class TestRegularized:
    def test_only_b2(self):
        with pytest.raises(ConfigurationError):
            regularized_feasibility(toy(), 1.0, b=3)

    def test_returns_squared_norm(self):
        o = regularized_feasibility(toy(), 2.0)
        assert isinstance(o, SquaredNorm) and o.tau == 2.0 and o.m == 3

    def test_common_halfspace_tends_to_zero(self):
        p = FeasibilityProblem(np.tile([1.0, 2.0], (4, 1)), np.full(4, 3.0))
        res = run_dpm(regularized_feasibility(p, 1.0), p.start(), DpmRun(budget=400))
        assert np.max(np.abs(res.x)) < 1e-3

    def test_vanishing_weight_tracks_gpm(self):
        p = toy()
        x0 = p.start()
        dpm = run_dpm(regularized_feasibility(p, 1.0), x0, DpmRun(budget=3000)).x
        gpm = list(gpm_iterates(p, x0, budget=3000))[-1].x
        assert abs(delta_p(dpm) - delta_p(gpm)) < 1e-3

    def test_bounded_set_keeps_iterates_bounded(self):
        sets = OracleStack([Ball([[0.0, 0.0]], 1.0)] + [Halfspace([[1.0, -1.0]], [0.0])] * 3)
        oracle = SquaredNorm(1.0, sets=sets)
        worst = []
        run = DpmRun(budget=10_000, hooks=[lambda s: worst.append(np.max(np.abs(s.x)))])
        run_dpm(oracle, consensus([5.0, -5.0], 4), run)
        assert max(worst[1:]) < 10.0
