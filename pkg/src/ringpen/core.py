"""
Block-vector algebra on the ring, the consensus penalty and its gradient.

A network state is stored as a float array of shape ``(m, n)``: row ``i``
is the block owned by agent ``i`` (0-based in code, 1-based in printed
formulas).  The ring couples agent ``i`` with ``i - 1`` and ``i + 1``
modulo ``m``.  The coupling matrices are never formed; everything is
computed from neighbour differences.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class InvalidInputError(ValueError):
    """Raised when a state or parameter is malformed (shape, NaN, inf)."""


class ConfigurationError(ValueError):
    """Raised when method parameters violate their admissible range."""

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


def as_blocks(x, m=None, n=None):
    """Validate and return ``x`` as a finite float array of shape (m, n)."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 2:
        raise InvalidInputError(f"block vector must be 2-D (m, n), got shape {arr.shape}")
    if m is not None and arr.shape[0] != m:
        raise InvalidInputError(f"expected {m} blocks, got {arr.shape[0]}")
    if n is not None and arr.shape[1] != n:
        raise InvalidInputError(f"expected block dimension {n}, got {arr.shape[1]}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidInputError("block vector must have m >= 1 and n >= 1")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("block vector contains non-finite entries")
    return arr


def consensus(point, m):
    """Stack ``m`` copies of ``point`` into a block vector."""
    point = np.asarray(point, dtype=float)
    return np.tile(point, (m, 1))


@dataclass(frozen=True)
class Ring:
    """Cyclic neighbour map of ``m`` agents (0-based indices).

    This is the only place where the topology is encoded; another graph
    would replace :meth:`prev` / :meth:`next` and the two shift helpers.
    """

    m: int

    def __post_init__(self):
        if self.m < 1:
            raise InvalidInputError("ring needs at least one agent")

    def prev(self, i):
        self._check(i)
        return (i - 1) % self.m

    def next(self, i):
        self._check(i)
        return (i + 1) % self.m

    def neighbors(self, i):
        return self.prev(i), self.next(i)

    def _check(self, i):
        if not 0 <= i < self.m:
            raise IndexError(f"agent index {i} out of range for m={self.m}")

    @staticmethod
    def from_prev(x):
        """Row i of the result is the block of agent prev(i)."""
        return np.roll(x, 1, axis=0)

    @staticmethod
    def from_next(x):
        """Row i of the result is the block of agent next(i)."""
        return np.roll(x, -1, axis=0)


@dataclass(frozen=True)
class PenaltyConfig:
    """Scaling ``tau``, prox step ``alpha`` and descent margin ``beta``."""

    tau: float = 1.0
    alpha: float = 0.4
    beta: float = 0.5

    @property
    def alpha_max(self):
        """Largest step keeping the descent margin: 1 / (beta + 2 / tau)."""
        return 1.0 / (self.beta + 2.0 / self.tau)


def edge_differences(x):
    """Rows ``x_i - x_{next(i)}`` for i = 0..m-1 (last row closes the ring)."""
    return x - Ring.from_next(x)


def penalty_value(x, tau):
    """Ring consensus penalty ``(2 tau)^-1 * sum_i ||x_i - x_{i+1}||^2``.

    For m = 2 both orientations of the single link are counted, so the
    value is ``||x_1 - x_2||^2 / tau``.
    """
    if not tau > 0:
        raise InvalidInputError("tau must be positive")
    x = as_blocks(x)
    d = edge_differences(x)
    return float(np.sum(d * d)) / (2.0 * tau)


def penalty_gradient(x, tau):
    """All gradient blocks at once; row i is ``(2 x_i - x_prev - x_next) / tau``."""
    x = as_blocks(x)
    return (2.0 * x - Ring.from_next(x) - Ring.from_prev(x)) / tau


def penalty_gradient_block(x, i, tau):
    """Gradient block of agent ``i``; reads only blocks prev(i), i, next(i)."""
    x = as_blocks(x)
    ring = Ring(x.shape[0])
    p, q = ring.neighbors(i)
    return (2.0 * x[i] - x[q] - x[p]) / tau


def lipschitz_bound(tau):
    """Upper bound 4 / tau on the Lipschitz constant of the penalty gradient."""
    if not tau > 0:
        raise InvalidInputError("tau must be positive")
    return 4.0 / tau


def ring_matrix(m):
    """Dense m x m ring Laplacian (2 on the diagonal, -1 to each neighbour).

    Only used for verification; solvers never materialise it.
    """
    s = 2.0 * np.eye(m)
    for i in range(m):
        s[i, (i + 1) % m] -= 1.0
        s[i, (i - 1) % m] -= 1.0
    return s


def average_point(x):
    """Mean block ``(1/m) sum_i x_i``."""
    x = as_blocks(x)
    return np.sum(x, axis=0) / x.shape[0]
