"""
Driver that turns a stream of snapshots into a run report.

Methods only produce states.  The driver evaluates the named metrics on
each snapshot, checks the stop and watch thresholds after every snapshot,
and records metric values at the requested basic-step checkpoints.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .metrics import MetricTrace, delta_d_gpm, delta_d_sqp, delta_p, delta_s, fermat_weber_objective


# -- metric suites --------------------------------------------------------------

def gpm_metrics(problem, alpha, tau):
    return {
        "dp": lambda s: delta_p(s.x),
        "ds": lambda s: delta_s(s.point(), problem.a, problem.b),
        "dd": lambda s: delta_d_gpm(s.x, alpha, tau, problem.oracle),
    }


def sqp_metrics(problem):
    """``dp`` is measured on the held blocks at completed cycles only (NaN
    in between), when every agent holds a point from the latest cycle."""
    def dd(s):
        cycle = s.info.get("cycle")
        return math.nan if cycle is None else delta_d_sqp(cycle)

    def dp(s):
        return delta_p(s.x) if s.info.get("cycle_end", True) else math.nan

    return {
        "dp": dp,
        "ds": lambda s: delta_s(s.point(), problem.a, problem.b),
        "dd": dd,
    }


def adm_metrics(problem):
    return {
        "dp": lambda s: delta_p(s.x),
        "ds": lambda s: delta_s(s.point(), problem.a, problem.b),
        "dd": lambda s: s.info.get("dz", math.nan),
    }


def fermat_weber_metrics(anchors):
    return {
        "phi": lambda s: fermat_weber_objective(s.point(), anchors),
        "dp": lambda s: delta_p(s.x),
    }


# -- report -----------------------------------------------------------------------

@dataclass
class Crossing:
    """First snapshot at which ``metric <= delta``."""

    metric: str
    delta: float
    kt: int | None = None
    kl: int | None = None
    values: dict = field(default_factory=dict)

    @property
    def met(self):
        return self.kt is not None

    def to_dict(self):
        return {"metric": self.metric, "delta": self.delta, "kt": self.kt, "kl": self.kl,
                "values": self.values}


@dataclass
class Checkpoint:
    """Metric values of the last snapshot at or before ``kt``.

    ``exact`` is False when the method had no state at exactly ``kt``
    (coarse iteration granularity or the budget ended earlier).
    """

    kt: int
    at: int
    kl: int
    values: dict

    @property
    def exact(self):
        return self.at == self.kt

    def to_dict(self):
        return {"kt": self.kt, "at": self.at, "kl": self.kl, "exact": self.exact,
                "values": self.values}


@dataclass
class RunReport:
    method: str
    config: dict = field(default_factory=dict)
    kt: int = 0
    kl: int = 0
    stop: Crossing | None = None
    watches: list = field(default_factory=list)
    checkpoints: dict = field(default_factory=dict)
    trace: MetricTrace = field(default_factory=MetricTrace)
    final: dict = field(default_factory=dict)
    z: list = field(default_factory=list)

    @property
    def met_stop(self):
        return self.stop is None or self.stop.met

    def value_at(self, kt, metric):
        return self.checkpoints[kt].values[metric]

    def to_dict(self):
        return {
            "method": self.method,
            "config": self.config,
            "kt": self.kt,
            "kl": self.kl,
            "stop": None if self.stop is None else self.stop.to_dict(),
            "watches": [w.to_dict() for w in self.watches],
            "checkpoints": [self.checkpoints[k].to_dict() for k in sorted(self.checkpoints)],
            "final": self.final,
            "z": self.z,
        }

    def to_json(self):
        """Deterministic JSON text (sorted keys, shortest round-trip floats)."""
        return json.dumps(_plain(self.to_dict()), sort_keys=True, indent=1) + "\n"


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else repr(f)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _evaluate(metrics, snap, cache):
    if cache.get("kt") != snap.kt:
        cache.clear()
        cache["kt"] = snap.kt
        cache["values"] = {}
    vals = cache["values"]
    for name, fn in metrics.items():
        if name not in vals:
            vals[name] = float(fn(snap))
    return dict(vals)


def _metric(metrics, name, snap, cache):
    if cache.get("kt") != snap.kt:
        cache.clear()
        cache["kt"] = snap.kt
        cache["values"] = {}
    vals = cache["values"]
    if name not in vals:
        vals[name] = float(metrics[name](snap))
    return vals[name]


def drive(iterates, metrics, stop=None, watch=(), record_at=(), method="", config=None, trace_every=False):
    """Consume ``iterates`` and build a :class:`RunReport`.

    ``stop`` and each entry of ``watch`` are ``(metric, delta)`` pairs;
    their first crossings are recorded.  Thresholds are tested on produced
    iterates only, never on a snapshot flagged ``info["initial"]``.  The run ends at the stop
    crossing once every watch has crossed and every checkpoint has been
    passed, or when the iterates are exhausted (budget).  Without any
    target the run always goes to the budget.
    """
    for name, _ in ([stop] if stop else []) + list(watch):
        if name not in metrics:
            raise KeyError(f"unknown metric {name!r}; available: {sorted(metrics)}")
    stop_c = Crossing(*stop) if stop else None
    watches = [Crossing(*w) for w in watch]
    pending = sorted(set(int(c) for c in record_at))
    has_target = stop_c is not None or watches or pending
    report = RunReport(method, dict(config or {}), stop=stop_c, watches=watches)
    cache, prev_cache, prev, last, stop_point = {}, {}, None, None, None
    for snap in iterates:
        while pending and snap.kt > pending[0] and prev is not None:
            c = pending.pop(0)
            report.checkpoints[c] = Checkpoint(c, prev.kt, prev.kl, _evaluate(metrics, prev, prev_cache))
        while pending and snap.kt == pending[0]:
            c = pending.pop(0)
            report.checkpoints[c] = Checkpoint(c, snap.kt, snap.kl, _evaluate(metrics, snap, cache))
        if trace_every:
            for name, v in _evaluate(metrics, snap, cache).items():
                report.trace.add(snap.kt, name, v)
        for cr in ([] if snap.info.get("initial") else ([stop_c] if stop_c else []) + watches):
            if not cr.met and _metric(metrics, cr.metric, snap, cache) <= cr.delta:
                cr.kt, cr.kl = snap.kt, snap.kl
                cr.values = _evaluate(metrics, snap, cache)
                if cr is stop_c:
                    stop_point = snap.point()
        prev = last = snap
        prev_cache = cache
        cache = {}
        if has_target and (stop_c is None or stop_c.met) and all(w.met for w in watches) and not pending:
            break
    if last is None:
        raise ValueError("no iterates produced")
    for c in pending:
        report.checkpoints[c] = Checkpoint(c, last.kt, last.kl, _evaluate(metrics, last, prev_cache))
    end = stop_c if stop_c is not None and stop_c.met else None
    report.kt = end.kt if end else last.kt
    report.kl = end.kl if end else last.kl
    report.final = end.values if end else _evaluate(metrics, last, prev_cache)
    report.z = [float(v) for v in (stop_point if end else last.point())]
    if not trace_every:
        for c in sorted(report.checkpoints):
            for name, v in report.checkpoints[c].values.items():
                report.trace.add(c, name, v)
    return report
