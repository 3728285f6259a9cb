import numpy as np
import pytest

from ringpen.benchmarks import example1
from ringpen.core import PenaltyConfig
from ringpen.dpm import inner_step
from ringpen.feasibility import gpm_step
from ringpen.oracles import NormDistance
from ringpen.simnet import (
    NO_PERTURBATION,
    PerturbationModel,
    StageSignalBoard,
    StepLedger,
    received_from_neighbors,
    stage_protocol_tick,
    synchronous_round,
)


def prox_compute(oracle, cfg, eps):
    def compute(view):
        g = (2.0 * view.own - view.prev - view.next) / cfg.tau
        return oracle.agent(view.index).prox(view.own[None, :], g[None, :], cfg.alpha, [eps])[0]
    return compute


class TestPerturbation:
    def test_received_value(self):
        x = np.full((3, 2), 5.0)
        _, from_next = received_from_neighbors(x, PerturbationModel.deterministic())
        # agent m (index 2) receives agent 1's block from its next neighbour
        assert from_next[2, 0] == pytest.approx(5.354, abs=5e-4)
        assert from_next[2, 0] == 5.0 + 0.5 * np.sin(1.0) ** 2

    def test_none_is_identity(self, rng):
        x = rng.normal(size=(4, 3))
        assert NO_PERTURBATION.transmit(x) is x

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            PerturbationModel("gaussian")


class TestRound:
    def test_matches_inner_step(self, rng):
        oracle, cfg = NormDistance(rng.normal(size=(6, 3))), PenaltyConfig()
        x = rng.normal(size=(6, 3))
        out = synchronous_round(x, prox_compute(oracle, cfg, 0.7))
        np.testing.assert_allclose(out, inner_step(x, 0.7, cfg, oracle), rtol=0, atol=1e-15)

    def test_matches_perturbed_inner_step(self, rng):
        oracle, cfg = NormDistance(rng.normal(size=(6, 3))), PenaltyConfig()
        x, pert = rng.normal(size=(6, 3)), PerturbationModel.deterministic()
        out = synchronous_round(x, prox_compute(oracle, cfg, 0.7), perturb=pert)
        np.testing.assert_allclose(out, inner_step(x, 0.7, cfg, oracle, perturb=pert), rtol=0, atol=1e-15)

    def test_matches_gpm_step(self):
        p = example1(20, 10)
        x = p.start()
        cfg = PenaltyConfig(tau=1.0, alpha=0.4)
        out = synchronous_round(x, prox_compute(p.oracle, cfg, 0.0))
        np.testing.assert_allclose(out, gpm_step(x, 0.4, 1.0, p), rtol=0, atol=1e-12)

    def test_order_independent(self, rng):
        oracle, cfg = NormDistance(rng.normal(size=(7, 2))), PenaltyConfig()
        x = rng.normal(size=(7, 2))
        base = synchronous_round(x, prox_compute(oracle, cfg, 0.3))
        for _ in range(20):
            out = synchronous_round(x, prox_compute(oracle, cfg, 0.3), order=rng.permutation(7))
            assert np.array_equal(out, base)

    def test_locality_enforced(self, rng):
        x = rng.normal(size=(5, 2))
        with pytest.raises(PermissionError):
            synchronous_round(x, lambda v: v.block((v.index + 2) % v.m))

    def test_instrumented_reads(self, rng):
        x = rng.normal(size=(6, 2))
        reads = []

        def compute(v):
            for j in range(v.m):
                try:
                    v.block(j)
                    reads.append((v.index, j))
                except PermissionError:
                    pass
            return v.own

        synchronous_round(x, compute)
        assert all((j - i) % 6 in (0, 1, 5) for i, j in reads)
        assert len(reads) == 18

    def test_own_block_never_perturbed(self, rng):
        x = rng.normal(size=(4, 3))
        out = synchronous_round(x, lambda v: v.own, perturb=PerturbationModel.deterministic())
        assert np.array_equal(out, x)

    def test_views_read_only(self, rng):
        def compute(v):
            v.own[0] = 1.0
            return v.own

        with pytest.raises(ValueError):
            synchronous_round(rng.normal(size=(3, 2)), compute)

    def test_ledger_charged_once(self, rng):
        led = StepLedger()
        synchronous_round(rng.normal(size=(3, 2)), lambda v: v.own, ledger=led)
        assert led.basic_steps == 1


class TestProtocol:
    def test_all_flag_together(self):
        b = StageSignalBoard(4)
        assert not stage_protocol_tick(b, [True] * 4).any()
        assert stage_protocol_tick(b, [False] * 4).all()

    def test_single_flag_never_advances(self):
        b = StageSignalBoard(5)
        stage_protocol_tick(b, [True, False, False, False, False])
        for _ in range(5):
            assert not stage_protocol_tick(b, [False] * 5).any()

    def test_consecutive_flags(self):
        b = StageSignalBoard(3)
        for t in range(3):
            flags = np.zeros(3, dtype=bool)
            flags[t] = True
            assert not stage_protocol_tick(b, flags).any()
        assert stage_protocol_tick(b, np.zeros(3, dtype=bool)).all()

    def test_flags_reset_on_advance(self):
        b = StageSignalBoard(3)
        stage_protocol_tick(b, [True] * 3)
        stage_protocol_tick(b, [False] * 3)
        assert not (b.own.any() or b.from_prev.any() or b.from_next.any())


class TestLedger:
    def test_mixed_run(self):
        led = StepLedger()
        for method, m, times in (("gpm", 20, 3), ("adm", 4, 2), ("pdm", 10, 2), ("sqp", 5, 4), ("dpm", 8, 1)):
            for _ in range(times):
                led.charge_iteration(method, m)
        assert led.basic_steps == 3 + 2 * 9 + 2 * 2 + 4 + 1
        assert led.iterations == 12

    def test_negative_charge(self):
        with pytest.raises(ValueError):
            StepLedger().charge(-1)
