"""
Two-level decentralized penalty method.

Outer stages shrink the objective weight ``sigma_s`` and the inner
tolerance ``theta_s``; inside a stage every agent repeatedly solves its own
prox subproblem against the current penalty gradient (one forward-backward
step of the penalized problem per basic step).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .core import ConfigurationError, PenaltyConfig, as_blocks, penalty_value
from .metrics import Snapshot
from .oracles import as_oracle
from .simnet import NO_PERTURBATION, PerturbationModel, StageSignalBoard, received_from_neighbors, stage_protocol_tick

ALPHA_RTOL = 1e-12
DEFAULT_STAGE_CAP = 10**6


@dataclass(frozen=True)
class StageSchedule:
    """Geometric schedules ``theta_s = theta0 q1^s``, ``sigma_s = sigma0 q2^s``.

    Stage indices start at 0, so the first stage runs with ``theta0`` and
    ``sigma0``.  Every agent uses the same weight ``sigma_s``.
    """

    theta0: float = 0.5
    sigma0: float = 1.0
    q1: float = 0.1
    q2: float = 0.6

    def violations(self):
        out = []
        if not self.theta0 > 0:
            out.append("theta0 must be positive")
        if not self.sigma0 > 0:
            out.append("sigma0 must be positive")
        if not (0 < self.q1 < 1 and 0 < self.q2 < 1):
            out.append("q1 and q2 must lie in (0, 1)")
        if not self.q1 < self.q2:
            out.append("q1 < q2 is required so that theta_s / sigma_s -> 0")
        return out

    def theta(self, s):
        return self.theta0 * self.q1 ** s

    def sigma(self, s):
        return self.sigma0 * self.q2 ** s

    def ratio(self, s):
        return self.theta(s) / self.sigma(s)


def validate_config(config):
    """List every violated requirement on ``tau``, ``beta`` and ``alpha``."""
    out = []
    if not config.tau >= 1:
        out.append(f"tau must be >= 1, got {config.tau}")
    if not 0 < config.beta < 1:
        out.append(f"beta must lie in (0, 1), got {config.beta}")
    if config.tau > 0:
        bound = 1.0 / (config.beta + 2.0 / config.tau)
        if not 0 < config.alpha <= bound * (1 + ALPHA_RTOL):
            out.append(f"alpha must lie in (0, {bound:.6g}], got {config.alpha}")
    return out


@dataclass
class DpmRun:
    """Parameters of one run.

    ``stop`` is ``"global"`` (whole-state displacement against theta_s) or
    ``"local"`` (per-agent test against theta_s / sqrt(m) with neighbour
    confirmation).  ``hooks`` are called with every :class:`Snapshot`.
    """

    config: PenaltyConfig = field(default_factory=PenaltyConfig)
    schedule: StageSchedule = field(default_factory=StageSchedule)
    stop: str = "global"
    budget: int = 200
    stage_cap: int = DEFAULT_STAGE_CAP
    perturb: PerturbationModel = NO_PERTURBATION
    hooks: list = field(default_factory=list)

    def validate(self):
        v = validate_config(self.config) + self.schedule.violations()
        if self.stop not in ("global", "local"):
            v.append(f"unknown stop rule {self.stop!r}")
        if self.budget < 0:
            v.append("budget must be nonnegative")
        if v:
            if any("q1 < q2" in s for s in v):
                warnings.warn("stage schedule violates q1 < q2; refusing to run", stacklevel=3)
            raise ConfigurationError(v)


def penalized_objective(x, eps, oracle, tau):
    """``sum_i eps_i f_i(x_i) + p(x)``."""
    oracle = as_oracle(oracle)
    eps = np.broadcast_to(np.asarray(eps, dtype=float), (x.shape[0],))
    return float(np.sum(eps * oracle.value(x))) + penalty_value(x, tau)


def _gradient(x, tau, perturb):
    from_prev, from_next = received_from_neighbors(x, perturb)
    return (2.0 * x - from_next - from_prev) / tau


def inner_step(x, eps, config, oracles, order=None, perturb=NO_PERTURBATION):
    """One synchronous forward-backward step of the penalized problem.

    All gradient blocks come from the input snapshot.  With ``order`` the
    agents are processed one at a time in that order; the result is the
    same bit pattern as the batched path.
    """
    x = as_blocks(x)
    oracle = as_oracle(oracles)
    m = x.shape[0]
    eps = np.broadcast_to(np.asarray(eps, dtype=float), (m,))
    if np.any(eps < 0):
        raise ValueError("weights must be nonnegative")
    g = _gradient(x, config.tau, perturb)
    if order is None:
        return oracle.prox(x, g, config.alpha, eps)
    out = np.empty_like(x)
    for i in order:
        out[i] = oracle.agent(i).prox(x[i:i + 1], g[i:i + 1], config.alpha, eps[i:i + 1])[0]
    return out


@dataclass
class StageResult:
    u: np.ndarray
    steps: int
    complete: bool


def run_stage(u_prev, s, run, oracles, kt0=0):
    """Iterate inner steps from ``u_prev`` until the global test fires.

    The first step is always taken.  Stops early, flagged incomplete, when
    the run budget (counted from ``kt0``) or the per-stage cap is hit.
    """
    x = as_blocks(u_prev)
    theta, sigma = run.schedule.theta(s), run.schedule.sigma(s)
    steps = 0
    while kt0 + steps < run.budget and steps < run.stage_cap:
        nx = inner_step(x, sigma, run.config, oracles, perturb=run.perturb)
        steps += 1
        d = math.sqrt(float(np.sum((nx - x) ** 2)))
        x = nx
        if d <= theta:
            return StageResult(x, steps, True)
    return StageResult(x, steps, False)


def dpm_iterates(oracles, x0, run):
    """Yield a :class:`Snapshot` at kt = 0 and after every inner step.

    ``info`` holds the stage index (per agent for the local rule), the
    weights used by the step, the step displacement, the previous state
    and whether the step closed a stage.
    """
    run.validate()
    oracle = as_oracle(oracles)
    x = as_blocks(x0).copy()
    m = x.shape[0]
    sched = run.schedule
    yield Snapshot(0, 0, x.copy(), info={"stage": 0, "initial": True})
    if run.stop == "global":
        yield from _global_iterates(oracle, x, run)
    else:
        yield from _local_iterates(oracle, x, run, m, sched)


def _global_iterates(oracle, x, run):
    sched = run.schedule
    kt, s, in_stage = 0, 0, 0
    while kt < run.budget:
        eps = sched.sigma(s)
        nx = inner_step(x, eps, run.config, oracle, perturb=run.perturb)
        kt += 1
        in_stage += 1
        d = math.sqrt(float(np.sum((nx - x) ** 2)))
        end = d <= sched.theta(s)
        if in_stage >= run.stage_cap and not end:
            raise RuntimeError(f"stage {s} exceeded the cap of {run.stage_cap} steps")
        snap = Snapshot(kt, s, nx, info={"stage": s, "eps": eps, "displacement": d,
                                         "stage_end": end, "prev": x})
        x = nx
        if end:
            s += 1
            in_stage = 0
        yield snap


def _local_iterates(oracle, x, run, m, sched):
    stages = np.zeros(m, dtype=int)
    board = StageSignalBoard(m)
    kt = 0
    root_m = math.sqrt(m)
    while kt < run.budget:
        eps = sched.sigma0 * sched.q2 ** stages
        nx = inner_step(x, eps, run.config, oracle, perturb=run.perturb)
        kt += 1
        disp = np.sqrt(np.sum((nx - x) ** 2, axis=1))
        flags = disp <= sched.theta0 * sched.q1 ** stages / root_m
        advance = stage_protocol_tick(board, flags)
        snap = Snapshot(kt, int(stages.min()), nx,
                        info={"stage": stages.copy(), "eps": eps, "flags": flags,
                              "advance": advance, "displacement": float(np.sqrt(np.sum(disp ** 2))),
                              "prev": x})
        stages = stages + advance
        x = nx
        yield snap


@dataclass
class DpmResult:
    x: np.ndarray
    kt: int
    stages_completed: int
    steps_per_stage: list
    snapshots: list


def run_dpm(oracles, x0, run, record_at=()):
    """Run until the basic-step budget is spent.

    Hooks in ``run.hooks`` see every snapshot; snapshots at the step
    counts in ``record_at`` are kept in the result.
    """
    keep = set(record_at)
    kept, per_stage = [], []
    last, count = None, 0
    for snap in dpm_iterates(oracles, x0, run):
        for hook in run.hooks:
            hook(snap)
        if snap.kt in keep:
            kept.append(snap)
        if snap.kt > 0:
            count += 1
            if snap.info.get("stage_end"):
                per_stage.append(count)
                count = 0
        last = snap
    done = len(per_stage)
    if count:
        per_stage.append(count)
    return DpmResult(last.x, last.kt, done, per_stage, kept)
