"""
Gap functions, objective values and metric traces.

Metrics observe method states after the fact; no solver reads them back.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .core import as_blocks, average_point, edge_differences, penalty_gradient


@dataclass
class Snapshot:
    """State a method exposes after ``kt`` basic steps.

    ``x`` is the block state, ``z`` the point the feasibility gap is
    measured at (the block average unless the method says otherwise), and
    ``kl`` the method's own iteration count.  ``info`` carries
    method-specific extras (stage, weights, cycle history).
    """

    kt: int
    kl: int
    x: np.ndarray
    z: np.ndarray | None = None
    info: dict = field(default_factory=dict)

    def point(self):
        return average_point(self.x) if self.z is None else self.z


def delta_s(v, a, b):
    """Largest constraint violation ``max_i [<a_i, v> - b_i]_+``."""
    v = np.asarray(v, dtype=float)
    r = np.asarray(a, dtype=float) @ v - np.asarray(b, dtype=float)
    return float(max(np.max(r), 0.0))


def delta_p(x):
    """Consensus gap ``(sum_i ||x_i - x_{i+1}||^2)^(1/2)`` around the ring."""
    d = edge_differences(as_blocks(x))
    return float(np.sqrt(np.sum(d * d)))


def delta_d_gpm(x, alpha, tau, sets):
    """Fixed-point residual ``||x - P_X[x - alpha p'(x)]||`` of projected gradient."""
    x = as_blocks(x)
    y = sets.project(x - alpha * penalty_gradient(x, tau))
    d = x - y
    return float(np.sqrt(np.sum(d * d)))


def delta_d_sqp(cycle):
    """Mean step length over one cycle of sequential projections.

    ``cycle`` holds the m iterates x^1..x^m of one cycle; the closing term
    ``||x^m - x^1||`` is included.
    """
    c = np.asarray(cycle, dtype=float)
    m = c.shape[0]
    steps = np.sqrt(np.sum(np.diff(c, axis=0) ** 2, axis=1))
    closing = np.sqrt(np.sum((c[-1] - c[0]) ** 2))
    return float((np.sum(steps) + closing) / m)


def delta_d_adm(z_k, z_prev):
    """Distance between consecutive averages."""
    d = np.asarray(z_k, dtype=float) - np.asarray(z_prev, dtype=float)
    return float(np.sqrt(d @ d))


def fermat_weber_objective(z, anchors):
    """``sum_i ||z - anchor_i||`` in agent order."""
    d = np.asarray(anchors, dtype=float) - np.asarray(z, dtype=float)
    return float(np.sum(np.sqrt(np.sum(d * d, axis=1))))


class MetricTrace:
    """Rows ``(basic_step, metric, value)``; steps strictly increase per metric."""

    def __init__(self):
        self.rows = []
        self._last = {}

    def add(self, step, name, value):
        last = self._last.get(name)
        if last is not None and step <= last:
            raise ValueError(f"step {step} for {name!r} does not increase (last {last})")
        self._last[name] = step
        self.rows.append((int(step), str(name), float(value)))

    def series(self, name):
        return [(s, v) for s, n, v in self.rows if n == name]

    def value_at(self, name, step):
        for s, v in self.series(name):
            if s == step:
                return v
        raise KeyError((name, step))

    def names(self):
        return list(dict.fromkeys(n for _, n, _ in self.rows))

    def __len__(self):
        return len(self.rows)

    def __eq__(self, other):
        return isinstance(other, MetricTrace) and self.rows == other.rows

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["step", "metric", "value"])
        for s, n, v in self.rows:
            w.writerow([s, n, repr(v)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text):
        trace = cls()
        reader = csv.reader(io.StringIO(text))
        header = next(reader)
        if header != ["step", "metric", "value"]:
            raise ValueError(f"unexpected trace header {header}")
        for s, n, v in reader:
            trace.add(int(s), n, float(v))
        return trace
