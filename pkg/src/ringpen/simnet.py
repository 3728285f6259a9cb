"""
Deterministic synchronous ring network.

A round works on a snapshot: every agent's outgoing block is turned into
the (possibly perturbed) copies its two neighbours receive, and only then
do the agents compute.  Perturbations apply to transmitted data only; an
agent always sees its own block exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Ring, as_blocks

CHARGES = {"gpm": 1, "dpm": 1, "sqp": 1, "pdm": 2}


def charge_for(method, m):
    """Basic steps charged for one iteration of ``method`` on ``m`` agents."""
    if method == "adm":
        return 2 * m + 1
    return CHARGES[method]


@dataclass
class StepLedger:
    """Monotone counter of basic steps."""

    basic_steps: int = 0
    iterations: int = 0

    def charge(self, steps=1):
        if steps < 0:
            raise ValueError("charges are nonnegative")
        self.basic_steps += int(steps)
        return self.basic_steps

    def charge_iteration(self, method, m):
        self.iterations += 1
        return self.charge(charge_for(method, m))


@dataclass(frozen=True)
class PerturbationModel:
    """Transmission noise; ``kind`` is ``"none"`` or ``"deterministic"``.

    The deterministic model adds ``scale * sin(i) * sin(j)`` to component
    ``j`` of the block sent by agent ``i`` (both 1-based), identically for
    both receivers and for every round.
    """

    kind: str = "none"
    scale: float = 0.5

    def __post_init__(self):
        if self.kind not in ("none", "deterministic"):
            raise ValueError(f"unknown perturbation kind {self.kind!r}")

    @classmethod
    def deterministic(cls, scale=0.5):
        return cls("deterministic", scale)

    @property
    def active(self):
        return self.kind != "none"

    def offsets(self, m, n):
        """Additive offsets, shape (m, n); row i belongs to sender i."""
        if not self.active:
            return np.zeros((m, n))
        i = np.arange(1, m + 1, dtype=float)[:, None]
        j = np.arange(1, n + 1, dtype=float)[None, :]
        return self.scale * np.sin(i) * np.sin(j)

    def transmit(self, x):
        """What the neighbours of each sender receive."""
        if not self.active:
            return x
        return x + self.offsets(*x.shape)


NO_PERTURBATION = PerturbationModel()


def received_from_neighbors(x, perturb=NO_PERTURBATION):
    """Return ``(from_prev, from_next)``: row i is what agent i receives."""
    sent = perturb.transmit(x)
    return Ring.from_prev(sent), Ring.from_next(sent)


class NeighborView:
    """Read-only window of one agent on a round snapshot.

    Exposes the agent's own block and the blocks received from its two
    neighbours; anything else raises, so a compute function cannot read
    beyond its neighbourhood.
    """

    __slots__ = ("index", "m", "_own", "_prev", "_next")

    def __init__(self, index, m, own, prev, nxt):
        self.index = index
        self.m = m
        self._own = own
        self._prev = prev
        self._next = nxt
        for a in (own, prev, nxt):
            a.setflags(write=False)

    @property
    def own(self):
        return self._own

    @property
    def prev(self):
        return self._prev

    @property
    def next(self):
        return self._next

    def block(self, j):
        """Access by agent index, allowed only for prev, self and next."""
        ring = Ring(self.m)
        if j == self.index:
            return self._own
        if j == ring.prev(self.index):
            return self._prev
        if j == ring.next(self.index):
            return self._next
        raise PermissionError(f"agent {self.index} cannot read block {j}")


def synchronous_round(states, compute, perturb=NO_PERTURBATION, ledger=None, order=None):
    """One synchronous round of per-agent updates.

    ``compute(view)`` returns the new block of ``view.index``.  All views
    are built from the input snapshot before any compute runs and outputs
    go to disjoint rows, so ``order`` cannot change the result.
    """
    x = as_blocks(states)
    m = x.shape[0]
    snap = x.copy()
    from_prev, from_next = received_from_neighbors(snap, perturb)
    out = np.empty_like(snap)
    for i in (range(m) if order is None else order):
        view = NeighborView(i, m, snap[i].copy(), from_prev[i].copy(), from_next[i].copy())
        out[i] = compute(view)
    if ledger is not None:
        ledger.charge(1)
    return out


@dataclass
class StageSignalBoard:
    """Two-neighbour confirmation protocol for local stage changes.

    ``own[i]``: agent i has met its local stopping test in the current
    stage.  ``from_prev[i]`` / ``from_next[i]``: confirmation received from
    that neighbour.  ``outbox[i]``: signal sent this tick, delivered next
    tick (one hop per round).
    """

    m: int
    own: np.ndarray = field(init=False)
    from_prev: np.ndarray = field(init=False)
    from_next: np.ndarray = field(init=False)
    outbox: np.ndarray = field(init=False)

    def __post_init__(self):
        self.reset()

    def reset(self):
        self.own = np.zeros(self.m, dtype=bool)
        self.from_prev = np.zeros(self.m, dtype=bool)
        self.from_next = np.zeros(self.m, dtype=bool)
        self.outbox = np.zeros(self.m, dtype=bool)


def stage_protocol_tick(board, local_flags):
    """Advance the protocol by one round; return per-agent advance decisions.

    Order within a tick: deliver last round's signals, decide (own flag and
    both confirmations), reset the advancing agents, then record this
    round's local flags of the others and queue their signals.
    """
    flags = np.asarray(local_flags, dtype=bool)
    board.from_prev |= np.roll(board.outbox, 1)
    board.from_next |= np.roll(board.outbox, -1)
    advance = board.own & board.from_prev & board.from_next
    board.own[advance] = False
    board.from_prev[advance] = False
    board.from_next[advance] = False
    board.own |= flags & ~advance
    board.outbox = board.own.copy()
    return advance
