"""
Deterministic generators for the four test families.

All formulas use 1-based indices ``i`` (agent / row) and ``j``
(coordinate) exactly as printed; angles are in radians.

Example 1  consistent halfspace system (two distinct inequalities).
Example 2  inconsistent halfspace system.
Example 3  Fermat-Weber anchors.
Example 4  the Example 3 anchors, used with perturbed transmissions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .core import ConfigurationError
from .feasibility import FeasibilityProblem

FAMILIES = ("example1", "example2", "example3", "example4")


def _grid(m, n):
    i = np.arange(1, m + 1, dtype=float)[:, None]
    j = np.arange(1, n + 1, dtype=float)[None, :]
    return i, j


def _check_even(m, n):
    v = []
    if m % 2 or n % 2:
        v.append(f"m and n must be even, got m={m}, n={n}")
    if not m > n:
        v.append(f"m > n is required, got m={m}, n={n}")
    if v:
        raise ConfigurationError(v)


def example1(m, n):
    """Consistent system; the all-ones vector satisfies every row with equality."""
    _check_even(m, n)
    i, j = _grid(m, n)
    left = j <= n // 2
    odd = 0.2 * i * j * np.where(left, -1.0, 1.0)
    even = 0.2 * (i - 1) * (n + 1 - j) * np.where(left, 1.0, -1.0)
    a = np.where(i % 2 == 1, odd, even)
    return FeasibilityProblem(a, a.sum(axis=1))


def example2(m, n):
    """Inconsistent system: the first n rows sum to ``0 <= -5n``."""
    _check_even(m, n)
    i, j = _grid(m, n)
    a = 2.0 * np.sin(i / j) * np.cos(i * j)
    a[n - 1] = -a[: n - 1].sum(axis=0)
    shift = np.where(np.arange(1, m + 1) <= n, -5.0, 5.0)
    return FeasibilityProblem(a, a.sum(axis=1) + shift)


def example34_anchors(m, n):
    """Anchors ``5 sin(i/j) cos(ij)``, shape (m, n)."""
    if m < 1 or n < 1:
        raise ConfigurationError(f"m and n must be positive, got m={m}, n={n}")
    i, j = _grid(m, n)
    return 5.0 * np.sin(i / j) * np.cos(i * j)


@dataclass(frozen=True)
class ProblemSpec:
    """A named family at a given size."""

    family: str
    m: int
    n: int

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigurationError(f"unknown family {self.family!r}; expected one of {FAMILIES}")

    @property
    def perturbed(self):
        return self.family == "example4"

    @property
    def kind(self):
        return "feasibility" if self.family in ("example1", "example2") else "fermat-weber"

    def build(self):
        """FeasibilityProblem for Examples 1-2, anchor array for Examples 3-4."""
        if self.family == "example1":
            return example1(self.m, self.n)
        if self.family == "example2":
            return example2(self.m, self.n)
        return example34_anchors(self.m, self.n)


def problem_to_dict(spec):
    data = spec.build()
    out = {"family": spec.family, "m": spec.m, "n": spec.n}
    if spec.kind == "feasibility":
        out["a"] = data.a.tolist()
        out["b"] = data.b.tolist()
    else:
        out["anchors"] = data.tolist()
    return out


def dump_problem(spec, path):
    """Write the generated data as JSON (floats in shortest round-trip form)."""
    with open(path, "w") as fh:
        json.dump(problem_to_dict(spec), fh, indent=1)
        fh.write("\n")


def load_halfspaces(path):
    """Read a generic halfspace list.

    Accepts JSON with either ``{"a": [[...], ...], "b": [...]}`` or
    ``{"halfspaces": [{"a": [...], "b": ...}, ...]}``.
    """
    with open(path) as fh:
        data = json.load(fh)
    if "halfspaces" in data:
        rows = data["halfspaces"]
        a = [r["a"] for r in rows]
        b = [r["b"] for r in rows]
    else:
        a, b = data["a"], data["b"]
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise ConfigurationError("halfspace normals must form an (m, n) array")
    return FeasibilityProblem(a, np.asarray(b, dtype=float))
