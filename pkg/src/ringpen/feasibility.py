"""
Decentralized feasibility: find a point in the intersection of halfspaces.

With ``f_i = 0`` the penalized problem is solved by the projected
gradient method; each agent projects its gradient step onto its own
halfspace.  The regularized variant adds ``||x_i||^2 / (2 tau)`` and runs
through the two-level method.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ConfigurationError, as_blocks, average_point, consensus, penalty_gradient
from .metrics import Snapshot
from .oracles import Halfspace, SquaredNorm


@dataclass(frozen=True)
class FeasibilityProblem:
    """One halfspace ``<a_i, v> <= b_i`` per agent; ``a`` has shape (m, n)."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        oracle = Halfspace(self.a, self.b)
        object.__setattr__(self, "a", oracle.a)
        object.__setattr__(self, "b", oracle.b)
        object.__setattr__(self, "_oracle", oracle)

    @property
    def m(self):
        return self.a.shape[0]

    @property
    def n(self):
        return self.a.shape[1]

    @property
    def oracle(self):
        return self._oracle

    def project(self, x):
        """Project every block onto its own halfspace."""
        return self._oracle.project(x)

    def residuals(self, v):
        """``<a_i, v> - b_i`` for every agent."""
        return self.a @ np.asarray(v, dtype=float) - self.b

    def start(self, value=5.0):
        return consensus(np.full(self.n, value), self.m)


def check_gpm_step(alpha, tau):
    v = []
    if not tau > 0:
        v.append(f"tau must be positive, got {tau}")
    elif not 0 < alpha < tau / 2:
        v.append(f"alpha must lie in (0, tau/2) = (0, {tau / 2:g}), got {alpha}")
    if v:
        raise ConfigurationError(v)


def gpm_step(x, alpha, tau, problem, check=True):
    """One synchronous projected gradient step (one basic step)."""
    if check:
        check_gpm_step(alpha, tau)
    x = as_blocks(x, problem.m, problem.n)
    return problem.project(x - alpha * penalty_gradient(x, tau))


def gpm_iterates(problem, x0, alpha=0.4, tau=1.0, budget=10_000):
    """Yield snapshots ``kt = 0, 1, ..., budget``; ``z`` is the block average."""
    check_gpm_step(alpha, tau)
    x = as_blocks(x0, problem.m, problem.n)
    yield Snapshot(0, 0, x, info={"initial": True})
    for k in range(1, budget + 1):
        x = gpm_step(x, alpha, tau, problem, check=False)
        yield Snapshot(k, k, x)


def gpm_run(problem, alpha=0.4, tau=1.0, stop=("dp", 1e-4), budget=10_000, x0=None, record_at=()):
    """Projected gradient until the gap ``stop[0]`` drops to ``stop[1]``.

    Gap names: ``"dp"`` (consensus), ``"ds"`` (violation at the average),
    ``"dd"`` (fixed-point residual).  Returns a
    :class:`ringpen.runner.RunReport`.
    """
    from .runner import drive, gpm_metrics

    x0 = problem.start() if x0 is None else x0
    return drive(gpm_iterates(problem, x0, alpha, tau, budget), gpm_metrics(problem, alpha, tau),
                 stop=stop, record_at=record_at, method="gpm")


def regularized_feasibility(problem, tau, b=2):
    """Agents with ``f_i(x_i) = ||x_i||^2 / (2 tau)`` over their halfspaces.

    Only the Euclidean squared norm (``b = 2``) is supported.
    """
    if b != 2:
        raise ConfigurationError(f"regularization exponent b={b} is not supported; only b=2")
    if not tau > 0:
        raise ConfigurationError(f"tau must be positive, got {tau}")
    return SquaredNorm(tau, sets=problem.oracle)


def average_violation(problem, x):
    """Largest violation at the block average."""
    return float(max(np.max(problem.residuals(average_point(x))), 0.0))
