"""
Per-agent proximal subproblem solvers.

Each agent ``i`` solves

    min_{z in X_i}  eps_i f_i(z) + <g_i, z> + ||z - x_i||^2 / (2 alpha)

where ``g_i`` is its penalty-gradient block.  An oracle object describes
*all* agents of one family at once: its parameters carry a leading agent
axis and :meth:`AgentOracle.prox` works row-wise on ``(k, n)`` arrays.
``oracle.agent(i)`` returns the single-agent view, which runs exactly the
same row code, so per-agent and batched evaluation agree bitwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import InvalidInputError

FEASIBILITY_TOL = 1e-12
OPTIMALITY_TOL = 1e-9


class DegenerateConstraintError(InvalidInputError):
    """A halfspace with zero normal vector."""


@dataclass(frozen=True)
class ProxQuery:
    """Data of one agent's subproblem."""

    x: np.ndarray
    g: np.ndarray
    alpha: float
    eps: float = 0.0

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.x, dtype=float))
        g = np.atleast_1d(np.asarray(self.g, dtype=float))
        if x.shape != g.shape or x.ndim != 1:
            raise InvalidInputError("x and g must be vectors of equal length")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(g))):
            raise InvalidInputError("query vectors must be finite")
        if not self.alpha > 0:
            raise InvalidInputError("alpha must be positive")
        if not self.eps >= 0:
            raise InvalidInputError("eps must be nonnegative")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "g", g)


def _row_norms(v):
    return np.sqrt(np.sum(v * v, axis=-1))


def _rows(v):
    return np.atleast_2d(np.asarray(v, dtype=float))


def _col(v, k):
    """Broadcast a scalar or length-k vector to a (k, 1) column."""
    v = np.asarray(v, dtype=float)
    if v.ndim == 0:
        return np.full((k, 1), float(v))
    return v.reshape(k, 1)


# -- closed forms on single blocks ------------------------------------------

def prox_free_zero(q):
    """``f = 0`` on the whole space: the prox is a plain gradient step."""
    return q.x - q.alpha * q.g


def project_halfspace(v, a, b):
    """Euclidean projection of ``v`` onto ``{u : <a, u> <= b}``."""
    v = np.asarray(v, dtype=float)
    out = _project_halfspace_rows(_rows(v), _rows(a), np.atleast_1d(b))
    return out.reshape(v.shape)


def _project_halfspace_rows(v, a, b):
    aa = np.sum(a * a, axis=1)
    if np.any(aa == 0.0):
        raise DegenerateConstraintError("halfspace normal must be nonzero")
    viol = np.maximum(np.sum(a * v, axis=1) - b, 0.0)
    return v - (viol / aa)[:, None] * a


def prox_halfspace(q, a, b):
    """``f = 0`` on a halfspace: projected gradient step."""
    return project_halfspace(q.x - q.alpha * q.g, a, b)


def _shrink_rows(x, g, alpha, eps, anchor):
    w = x - alpha * g - anchor
    nw = _row_norms(w)[:, None]
    t = alpha * eps
    safe = np.where(nw > t, nw, 1.0)
    scale = np.where(nw > t, 1.0 - t / safe, 0.0)
    return anchor + scale * w


def prox_norm_distance(q, anchor):
    """``f(z) = ||z - anchor||`` on the whole space (block soft threshold)."""
    anchor = np.asarray(anchor, dtype=float)
    out = _shrink_rows(_rows(q.x), _rows(q.g), q.alpha, q.eps, _rows(anchor))
    return out.reshape(q.x.shape)


def prox_squared_norm(q, tau, project=None):
    """``f(z) = ||z||^2 / (2 tau)`` over a set given by its projector.

    The subproblem objective is ``c/2 ||z - z0||^2 + const`` with
    ``c = 1/alpha + eps/tau`` and ``z0 = (x - alpha g) / (1 + alpha eps / tau)``,
    an isotropic quadratic, so the constrained minimiser is the projection
    of ``z0``.
    """
    if not tau > 0:
        raise InvalidInputError("tau must be positive")
    z0 = (q.x - q.alpha * q.g) / (1.0 + q.alpha * q.eps / tau)
    return z0 if project is None else project(z0)


# -- agent families -----------------------------------------------------------

class AgentOracle:
    """Base class for a family of agent subproblems.

    Subclasses implement the row-wise methods ``_prox``, ``_value`` and
    ``_project`` on arrays with ``k`` rows together with their parameter
    slice ``idx`` (an index array into the agent axis).
    """

    m = None  # number of agents described; None for agent-independent data

    def prox(self, x, g, alpha, eps):
        """Minimisers for every described agent; ``x, g`` have shape (m, n)."""
        x = _rows(x)
        return self._prox(x, _rows(g), alpha, _col(eps, x.shape[0]), self._idx(x))

    def prox_query(self, q, i=0):
        """Single-agent form taking a :class:`ProxQuery` for agent ``i``."""
        return self.agent(i).prox(q.x[None, :], q.g[None, :], q.alpha, [q.eps])[0]

    def value(self, x):
        """Per-agent objective values ``f_i(x_i)``, shape (m,)."""
        x = _rows(x)
        return self._value(x, self._idx(x))

    def project(self, x):
        """Per-agent projection onto ``X_i``."""
        x = _rows(x)
        return self._project(x, self._idx(x))

    def contains(self, x, tol=FEASIBILITY_TOL):
        """Row-wise membership test with relative tolerance."""
        x = _rows(x)
        return self._contains(x, self._idx(x), tol)

    def agent(self, i):
        return _AgentView(self, i)

    def _idx(self, x):
        return np.arange(x.shape[0])

    def _contains(self, x, idx, tol):
        return np.ones(x.shape[0], dtype=bool)

    def _project(self, x, idx):
        return x.copy()


class _AgentView(AgentOracle):
    """One agent of a family; row 0 of its inputs maps to agent ``i``."""

    def __init__(self, parent, i):
        if parent.m is not None and not 0 <= i < parent.m:
            raise IndexError(f"agent index {i} out of range")
        self.parent = parent
        self.i = i
        self.m = 1

    def _idx(self, x):
        return np.full(x.shape[0], self.i)

    def _prox(self, x, g, alpha, eps, idx):
        return self.parent._prox(x, g, alpha, eps, idx)

    def _value(self, x, idx):
        return self.parent._value(x, idx)

    def _project(self, x, idx):
        return self.parent._project(x, idx)

    def _contains(self, x, idx, tol):
        return self.parent._contains(x, idx, tol)

    def agent(self, i):
        return self.parent.agent(self.i)


class FreeSpaceZero(AgentOracle):
    """``f_i = 0`` and ``X_i = R^n`` for every agent."""

    def _prox(self, x, g, alpha, eps, idx):
        return x - alpha * g

    def _value(self, x, idx):
        return np.zeros(x.shape[0])


class Halfspace(AgentOracle):
    """``f_i = 0`` on ``X_i = {v : <a_i, v> <= b_i}``; ``a`` has shape (m, n)."""

    def __init__(self, a, b):
        self.a = _rows(a)
        self.b = np.atleast_1d(np.asarray(b, dtype=float))
        if self.b.shape[0] != self.a.shape[0]:
            raise InvalidInputError("need one offset per normal vector")
        if np.any(np.sum(self.a * self.a, axis=1) == 0.0):
            raise DegenerateConstraintError("halfspace normal must be nonzero")
        self.m = self.a.shape[0]

    def _prox(self, x, g, alpha, eps, idx):
        return _project_halfspace_rows(x - alpha * g, self.a[idx], self.b[idx])

    def _value(self, x, idx):
        return np.zeros(x.shape[0])

    def _project(self, x, idx):
        return _project_halfspace_rows(x, self.a[idx], self.b[idx])

    def _contains(self, x, idx, tol):
        b = self.b[idx]
        return np.sum(self.a[idx] * x, axis=1) <= b + tol * (1.0 + np.abs(b))


class NormDistance(AgentOracle):
    """``f_i(v) = ||v - anchor_i||`` on ``R^n``; ``anchors`` has shape (m, n)."""

    def __init__(self, anchors):
        self.anchors = _rows(anchors)
        self.m = self.anchors.shape[0]

    def _prox(self, x, g, alpha, eps, idx):
        return _shrink_rows(x, g, alpha, eps, self.anchors[idx])

    def _value(self, x, idx):
        return _row_norms(x - self.anchors[idx])


class SquaredNorm(AgentOracle):
    """``f_i(v) = ||v||^2 / (2 tau)`` over ``X_i``.

    ``sets`` is ``None`` (whole space) or another oracle whose
    ``project`` / ``contains`` describe the sets, e.g. :class:`Halfspace`.
    """

    def __init__(self, tau, sets=None):
        if not tau > 0:
            raise InvalidInputError("tau must be positive")
        self.tau = float(tau)
        self.sets = sets
        self.m = None if sets is None else sets.m

    def _prox(self, x, g, alpha, eps, idx):
        z0 = (x - alpha * g) / (1.0 + alpha * eps / self.tau)
        return z0 if self.sets is None else self.sets._project(z0, idx)

    def _value(self, x, idx):
        return np.sum(x * x, axis=1) / (2.0 * self.tau)

    def _project(self, x, idx):
        return x.copy() if self.sets is None else self.sets._project(x, idx)

    def _contains(self, x, idx, tol):
        if self.sets is None:
            return np.ones(x.shape[0], dtype=bool)
        return self.sets._contains(x, idx, tol)


class Ball(AgentOracle):
    """``f_i = 0`` on a Euclidean ball; a bounded set for coercivity checks."""

    def __init__(self, centers, radius):
        self.centers = _rows(centers)
        self.radius = np.broadcast_to(np.asarray(radius, dtype=float), (self.centers.shape[0],))
        self.m = self.centers.shape[0]

    def _prox(self, x, g, alpha, eps, idx):
        return self._project(x - alpha * g, idx)

    def _value(self, x, idx):
        return np.zeros(x.shape[0])

    def _project(self, x, idx):
        c = self.centers[idx]
        d = x - c
        r = self.radius[idx][:, None]
        nd = _row_norms(d)[:, None]
        return np.where(nd > r, c + d * (r / np.where(nd > 0, nd, 1.0)), x)

    def _contains(self, x, idx, tol):
        r = self.radius[idx]
        return _row_norms(x - self.centers[idx]) <= r + tol * (1.0 + r)


class OracleStack(AgentOracle):
    """Heterogeneous agents: one single-agent oracle per row."""

    def __init__(self, oracles):
        self.members = [_single(o) for o in oracles]
        self.m = len(self.members)

    def _prox(self, x, g, alpha, eps, idx):
        out = np.empty_like(x)
        for r, i in enumerate(idx):
            o = _single(self.members[i])
            out[r] = o._prox(x[r:r + 1], g[r:r + 1], alpha, eps[r:r + 1], o._idx(x[r:r + 1]))[0]
        return out

    def _value(self, x, idx):
        out = np.empty(x.shape[0])
        for r, i in enumerate(idx):
            o = _single(self.members[i])
            out[r] = o._value(x[r:r + 1], o._idx(x[r:r + 1]))[0]
        return out

    def _project(self, x, idx):
        out = np.empty_like(x)
        for r, i in enumerate(idx):
            o = _single(self.members[i])
            out[r] = o._project(x[r:r + 1], o._idx(x[r:r + 1]))[0]
        return out

    def _contains(self, x, idx, tol):
        out = np.empty(x.shape[0], dtype=bool)
        for r, i in enumerate(idx):
            o = _single(self.members[i])
            out[r] = o._contains(x[r:r + 1], o._idx(x[r:r + 1]), tol)[0]
        return out


def _single(o):
    if o.m is None or isinstance(o, _AgentView):
        return o
    if o.m == 1:
        return o.agent(0)
    raise InvalidInputError("stack members must describe a single agent")


def as_oracle(oracles):
    """Accept a family oracle or a list of single-agent oracles."""
    if isinstance(oracles, AgentOracle):
        return oracles
    return OracleStack(list(oracles))


def check_prox_optimality(oracle, q, z, probes, i=0):
    """Largest violation of the variational optimality condition.

    For the subproblem of agent ``i`` the returned value is

        max_p  -[ eps (f(p) - f(z)) + <g + (z - x) / alpha, p - z> ]

    over the feasible ``probes``; a value <= 1e-9 certifies that ``z``
    minimises the subproblem on the probe set.
    """
    agent = oracle.agent(i)
    probes = _rows(probes)
    if not np.all(agent.contains(probes)):
        raise InvalidInputError("probe points must be feasible")
    z = np.asarray(z, dtype=float)
    fz = agent.value(z[None, :])[0]
    fp = agent.value(probes)
    lin = q.g + (z - q.x) / q.alpha
    margins = q.eps * (fp - fz) + (probes - z) @ lin
    return float(np.max(-margins))
