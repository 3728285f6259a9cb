"""
Comparison methods: sequential projections (SQP), consensus alternating
directions (ADM) and a primal-dual ring method (PDM).

Each method is a generator of :class:`~ringpen.metrics.Snapshot` objects
whose ``kt`` follows the basic-step charges of :mod:`ringpen.simnet`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ConfigurationError, Ring, as_blocks, consensus
from .metrics import Snapshot, delta_d_adm
from .oracles import NormDistance, project_halfspace
from .simnet import NO_PERTURBATION, StepLedger, charge_for


# -- SQP ----------------------------------------------------------------------

def sqp_step(x, k, problem):
    """Agent ``k mod m`` projects the shared point onto its halfspace."""
    i = k % problem.m
    return project_halfspace(x, problem.a[i], problem.b[i])


def sqp_iterates(problem, x0, budget=1000):
    """Cyclic projections of one shared point.

    ``Snapshot.z`` is the shared point; ``Snapshot.x`` holds, per agent,
    the last point it produced (the start value before its first turn).
    ``info["cycle"]`` holds the last ``m`` shared iterates once available
    and ``info["cycle_end"]`` marks the last step of each full cycle.
    """
    m = problem.m
    x = np.asarray(x0, dtype=float).copy()
    held = consensus(x, m)
    history = []
    ledger = StepLedger()
    yield Snapshot(0, 0, held.copy(), z=x.copy(), info={"agent": None, "initial": True})
    for k in range(budget):
        x = sqp_step(x, k, problem)
        i = k % m
        held[i] = x
        ledger.charge_iteration("sqp", m)
        history.append(x)
        if len(history) > m:
            history.pop(0)
        info = {"agent": i, "cycle_end": ledger.iterations % m == 0}
        if len(history) == m:
            info["cycle"] = np.array(history)
        yield Snapshot(ledger.basic_steps, ledger.iterations, held.copy(), z=x.copy(), info=info)


# -- ADM ----------------------------------------------------------------------

@dataclass
class AdmState:
    x: np.ndarray
    u: np.ndarray
    z: np.ndarray


def adm_init(problem, x0):
    x = as_blocks(x0, problem.m, problem.n).copy()
    return AdmState(x, np.zeros_like(x), x.sum(axis=0) / problem.m)


def adm_iteration(state, problem):
    """Primal projections, central average, then dual update."""
    x = problem.project(state.z[None, :] - state.u)
    z = (x + state.u).sum(axis=0) / problem.m
    u = state.u + x - z[None, :]
    return AdmState(x, u, z)


def adm_iterates(problem, x0, budget=1000):
    """Two snapshots per iteration, 2m + 1 basic steps apart in total.

    Iteration ``k`` (1-based) occupies steps ``[(k-1)(2m+1), k(2m+1))``:
    its primal points ``x^k`` are counted at the start of that window and
    the new average ``z^k`` after ``m + 1`` further steps (collection and
    central averaging).  ``kl`` is the number of completed iterations and
    ``info["dz"]`` the latest ``||z^k - z^(k-1)||``.
    """
    m = problem.m
    per = charge_for("adm", m)
    state = adm_init(problem, x0)
    k = 0
    dz = math.nan
    while True:
        z_prev = state.z
        state = adm_iteration(state, problem)
        base = k * per
        if base > budget:
            return
        yield Snapshot(base, k, state.x, z=z_prev, info={"phase": "primal", "u": state.u, "dz": dz})
        if base + m + 1 > budget:
            return
        dz = delta_d_adm(state.z, z_prev)
        yield Snapshot(base + m + 1, k, state.x, z=state.z,
                       info={"phase": "average", "u": state.u, "z_prev": z_prev, "dz": dz})
        k += 1


# -- PDM ----------------------------------------------------------------------

@dataclass
class PdmState:
    x: np.ndarray
    w: np.ndarray
    alpha: float = 0.5
    beta: float = 0.25


def pdm_iteration(state, oracle, perturb=NO_PERTURBATION):
    """One primal-dual iteration on the ring.

    Dual ``w_i`` lives on edge ``i -> next(i)``.  Agent ``i`` uses its own
    dual and the one received from ``prev(i)``, takes a prox step with
    unit weight, extrapolates, and updates its dual from the extrapolated
    point received from ``next(i)``.
    """
    if not (state.alpha > 0 and state.beta > 0):
        raise ConfigurationError("PDM steps must be positive")
    w_recv = Ring.from_prev(perturb.transmit(state.w))
    g = state.w - w_recv
    x_new = oracle.prox(state.x, g, state.alpha, 1.0)
    xt = 2.0 * x_new - state.x
    q = xt - Ring.from_next(perturb.transmit(xt))
    return PdmState(x_new, state.w + state.beta * q, state.alpha, state.beta)


def pdm_iterates(anchors, x0, alpha=0.5, beta=0.25, budget=200, perturb=NO_PERTURBATION):
    """Snapshots after every iteration (two basic steps each)."""
    oracle = anchors if isinstance(anchors, NormDistance) else NormDistance(anchors)
    x = as_blocks(x0, oracle.m).copy()
    state = PdmState(x, np.zeros_like(x), alpha, beta)
    ledger = StepLedger()
    yield Snapshot(0, 0, state.x, info={"w": state.w, "initial": True})
    while ledger.basic_steps + charge_for("pdm", oracle.m) <= budget:
        state = pdm_iteration(state, oracle, perturb)
        ledger.charge_iteration("pdm", oracle.m)
        yield Snapshot(ledger.basic_steps, ledger.iterations, state.x, info={"w": state.w})
