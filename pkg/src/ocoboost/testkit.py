"""Independent brute-force oracles for the test and acceptance suites.

Everything here is desk-scale by construction (grids up to 401 points per
axis in at most 2 dimensions, comparator classes of at most 12 hypotheses,
horizons up to 1e5) and shares no code with the smoothing or boosting
modules: only geometry and losses may be imported.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .geometry import Simplex, as_point

MAX_GRID_POINTS = 401
MAX_GRID_DIM = 2


@dataclass
class GridSpec:
    """Regular grid over a box, at most 2-D and 401 points per axis."""

    bounds: list  # [(lo, hi)] per axis
    points: int = 201

    def __post_init__(self):
        if len(self.bounds) > MAX_GRID_DIM:
            raise ConfigError("grids support at most 2 dimensions")
        if not 2 <= self.points <= MAX_GRID_POINTS:
            raise ConfigError(f"points per axis must be in [2, {MAX_GRID_POINTS}]")
        for lo, hi in self.bounds:
            if not hi > lo:
                raise ConfigError("grid bounds must satisfy hi > lo")

    @property
    def dim(self) -> int:
        return len(self.bounds)

    @property
    def spacing(self) -> float:
        return max((hi - lo) / (self.points - 1) for lo, hi in self.bounds)

    def nodes(self) -> np.ndarray:
        axes = [np.linspace(lo, hi, self.points) for lo, hi in self.bounds]
        if self.dim == 1:
            return axes[0][:, None]
        xx, yy = np.meshgrid(axes[0], axes[1], indexing="ij")
        return np.stack([xx.ravel(), yy.ravel()], axis=1)

    def is_boundary_node(self, flat_index: int) -> bool:
        if self.dim == 1:
            return flat_index in (0, self.points - 1)
        i, j = divmod(flat_index, self.points)
        return i in (0, self.points - 1) or j in (0, self.points - 1)


def grid_moreau(g, delta: float, x, grid: GridSpec):
    """Grid minimum of g(y) + ||x - y||^2 / (2 delta).

    Returns (value, boundary_hit). The grid value over-estimates the true
    envelope by at most Lipschitz(objective) * spacing; a minimum attained
    on the grid boundary means the grid was too small.
    """
    x = as_point(x, grid.dim)
    nodes = grid.nodes()
    gv = np.array([g(y) for y in nodes])
    quad = 0.5 / delta * np.sum((nodes - x) ** 2, axis=1)
    total = gv + quad
    k = int(np.argmin(total))
    return float(total[k]), grid.is_boundary_node(k)


def finite_diff_grad(f, x, h: float = 1e-5) -> np.ndarray:
    """Central finite differences per coordinate."""
    x = as_point(x)
    out = np.empty_like(x)
    for i in range(x.shape[0]):
        e = np.zeros_like(x)
        e[i] = h
        out[i] = (f(x + e) - f(x - e)) / (2.0 * h)
    return out


def recursion_sim(c: float, horizon: int) -> np.ndarray:
    """Iterate h_{t+1} = h_t (1 - eta_t) + eta_t^2 c with eta_t = min(1, 2/t).

    Starts at h_1 = c and asserts h_t <= 4c/t at every step; a violation is
    a library bug, not an input error. Returns the sequence h_1..h_T.
    """
    if c < 0:
        raise ConfigError("c must be nonnegative")
    hs = np.empty(horizon)
    h = c
    for t in range(1, horizon + 1):
        hs[t - 1] = h
        assert h <= 4.0 * c / t, f"recursion bound violated at t={t}: {h} > {4 * c / t}"
        eta = min(1.0, 2.0 / t)
        h = h * (1.0 - eta) + eta * eta * c
    return hs


def bandit_expectation(f_t, eta: float, d: int) -> np.ndarray:
    """Exact expectation of the one-point loss estimate over its outcome space.

    Outcomes: no-exploration (prob 1-eta, zero vector) and coordinate i
    (prob eta/d each, vector with (d/eta) * f_t[i] at position i).
    """
    f_t = as_point(f_t, d)
    if not 0.0 < eta <= 1.0:
        raise ConfigError("eta must be in (0, 1]")
    acc = (1.0 - eta) * np.zeros(d)
    for i in range(d):
        outcome = np.zeros(d)
        outcome[i] = (d / eta) * f_t[i]
        acc = acc + (eta / d) * outcome
    return acc


@dataclass
class HullOptimum:
    weights: np.ndarray
    value: float
    converged: bool
    grid_value: float | None = None


def _mixture_actions(hypotheses, contexts) -> np.ndarray:
    """Stack h_j(c_t) into an array of shape (T, J, d)."""
    rows = []
    for c in contexts:
        rows.append(np.stack([as_point(h(c)) for h in hypotheses]))
    return np.stack(rows)


def _hull_objective(weights, actions, losses):
    mixes = np.tensordot(actions, weights, axes=([1], [0]))
    return sum(loss.value(mix) for loss, mix in zip(losses, mixes))


def _hull_gradient(weights, actions, losses):
    mixes = np.tensordot(actions, weights, axes=([1], [0]))
    grad = np.zeros(weights.shape[0])
    for t, loss in enumerate(losses):
        grad += actions[t] @ loss.grad(mixes[t])
    return grad


def hull_optimum(hypotheses, losses, contexts, tol: float = 1e-8,
                 max_iter: int = 20000, grid_spacing: float | None = None) -> HullOptimum:
    """Minimize w -> sum_t f_t(sum_j w_j h_j(c_t)) over the weight simplex.

    Projected gradient descent with backtracking; optionally cross-checked
    by grid search over the simplex (only for at most 4 hypotheses).
    """
    n_hyp = len(hypotheses)
    if n_hyp == 0:
        raise ConfigError("need at least one hypothesis")
    if n_hyp > 12:
        raise ConfigError("hull_optimum supports at most 12 hypotheses")
    actions = _mixture_actions(hypotheses, contexts)
    simplex = Simplex(n_hyp)

    w = np.full(n_hyp, 1.0 / n_hyp)
    fw = _hull_objective(w, actions, losses)
    step = 1.0
    converged = False
    for _ in range(max_iter):
        g = _hull_gradient(w, actions, losses)
        cand, fc = w, fw
        while step > 1e-18:
            cand = simplex.project(w - step * g)
            fc = _hull_objective(cand, actions, losses)
            move = cand - w
            if fc <= fw + g @ move + 0.5 / step * float(move @ move) + 1e-15:
                break
            step *= 0.5
        residual = float(np.linalg.norm(cand - w)) / step
        w, fw = cand, fc
        if residual <= tol:
            converged = True
            break
        step = min(step * 1.5, 1e6)

    grid_value = None
    if grid_spacing is not None:
        if n_hyp > 4:
            raise ConfigError("grid cross-check supports at most 4 hypotheses")
        grid_w = _simplex_grid(n_hyp, grid_spacing)
        best = np.inf
        for chunk in np.array_split(grid_w, max(1, grid_w.shape[0] // 2000)):
            mixes = np.einsum("tjd,gj->gtd", actions, chunk)
            for gi in range(chunk.shape[0]):
                val = sum(loss.value(mixes[gi, t])
                          for t, loss in enumerate(losses))
                if val < best:
                    best = val
        grid_value = float(best)
    return HullOptimum(weights=w, value=float(fw), converged=converged,
                       grid_value=grid_value)


def _simplex_grid(n: int, spacing: float) -> np.ndarray:
    """All weight vectors on the simplex with entries that are multiples of spacing."""
    steps = int(round(1.0 / spacing))
    if n == 1:
        return np.array([[1.0]])
    combos = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            combos.append(prefix + [remaining])
            return
        for k in range(remaining + 1):
            rec(prefix + [k], remaining - k, slots - 1)

    rec([], steps, n)
    return np.array(combos, dtype=np.float64) / steps
