"""Smoothed out-of-set extension of a convex loss.

``ExtendedLoss`` evaluates the Moreau envelope (inf-convolution with a
quadratic of radius ``delta``) of the composite ``f + kappa * Dist(., K)``.
On the set it tracks f to within ``delta * G^2 / 2``; outside, the distance
penalty makes projection onto K nearly non-increasing in value, which is
what lets the boosting loop feed scaled-up, infeasible ensemble points to
the loss machinery.

The envelope minimizer (prox point) is computed in closed form for linear
losses over any set and for quadratics over 1-D intervals; everything else
runs a proximal-gradient splitting whose nonsmooth step (the distance
penalty) is an analytic shrink toward the projection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ConfigError
from .geometry import DecisionSet, as_point, interval_bounds
from .losses import ConvexLoss, LinearLoss, QuadraticLoss, ScaledLoss, ShiftedLoss

DEFAULT_BUDGET = 200
DEFAULT_TOL = 1e-8


@dataclass(frozen=True)
class ProxInfo:
    residual: float
    iterations: int
    converged: bool


_EXACT_INFO = ProxInfo(residual=0.0, iterations=0, converged=True)


def default_delta(diameter: float, gamma: float, n_learners: int,
                  lipschitz: float | None = None, rule: str = "balanced") -> float:
    """Smoothing radius for an N-learner boosting run.

    "balanced" equalizes the smoothing and mixing error terms and needs the
    gradient bound; "stated" is the simpler diameter-only rule.
    """
    if rule == "balanced":
        if lipschitz is None or lipschitz <= 0:
            raise ConfigError("balanced delta rule needs a positive gradient bound")
        return diameter / (lipschitz * gamma * np.sqrt(n_learners))
    if rule == "stated":
        return float(np.sqrt(diameter ** 2 / (gamma * n_learners)))
    raise ConfigError(f"unknown delta rule '{rule}'")


def _as_linear(loss: ConvexLoss):
    """Direction of an (optionally shifted/scaled) linear loss, else None."""
    if isinstance(loss, LinearLoss):
        return loss.direction
    if isinstance(loss, ShiftedLoss):
        inner = _as_linear(loss.base)
        return inner
    if isinstance(loss, ScaledLoss):
        inner = _as_linear(loss.base)
        return None if inner is None else loss.factor * inner
    return None


def _as_quadratic(loss: ConvexLoss):
    """(weight, target) of an (optionally shifted/scaled) quadratic, else None."""
    if isinstance(loss, QuadraticLoss):
        return loss.weight, loss.target
    if isinstance(loss, ShiftedLoss):
        inner = _as_quadratic(loss.base)
        if inner is None:
            return None
        w, t = inner
        return w, t - loss.offset
    if isinstance(loss, ScaledLoss):
        inner = _as_quadratic(loss.base)
        if inner is None:
            return None
        w, t = inner
        return loss.factor * w, t
    return None


def _shrink_toward_projection(set_: DecisionSet, z: np.ndarray, bound: float) -> np.ndarray:
    """Prox of bound * Dist(., K) at z: move toward the projection by
    min(bound, distance)."""
    p = set_._project(z)
    d = z - p
    dist = math.sqrt(float(d @ d))
    if dist <= bound:
        return p
    return z + (bound / dist) * (p - z)


def prox(loss: ConvexLoss, set_: DecisionSet, kappa: float, delta: float, x,
         budget: int = DEFAULT_BUDGET, tol: float = DEFAULT_TOL):
    """Minimize f(y) + kappa*Dist(y,K) + ||x-y||^2/(2 delta) over y.

    Returns (minimizer, ProxInfo). When the inner solver runs out of budget
    the best iterate is returned with ``converged=False``; the caller
    decides what to do with the flagged residual.
    """
    x = as_point(x, set_.dim)
    if delta <= 0:
        raise ConfigError("delta must be positive")
    if kappa < 0:
        raise ConfigError("kappa must be nonnegative")
    return _prox_impl(loss, set_, kappa, delta, x, budget, tol)


def _prox_impl(loss, set_, kappa, delta, x, budget, tol):
    direction = _as_linear(loss)
    if direction is not None:
        y = _shrink_toward_projection(set_, x - delta * direction, delta * kappa)
        return y, _EXACT_INFO

    quad = _as_quadratic(loss)
    bounds = interval_bounds(set_) if quad is not None else None
    if quad is not None and bounds is not None:
        w, t = quad
        y = _kernels.prox_quad_interval(w, float(t[0]), bounds[0], bounds[1],
                                        kappa, delta, float(x[0]))
        return np.array([y]), _EXACT_INFO

    return _prox_iterative(loss, set_, kappa, delta, x, budget, tol)


def _prox_iterative(loss, set_, kappa, delta, x, budget, tol):
    """Proximal-gradient splitting: gradient steps on the smooth part
    f + coupling quadratic, analytic shrink steps on the distance penalty."""

    def smooth_grad(y):
        return loss.grad(y) + (y - x) / delta

    def smooth_value(y):
        d = y - x
        return loss.value(y) + float(d @ d) / (2.0 * delta)

    curvature = loss.curvature_hint
    lip_est = (curvature + 1.0 / delta) if curvature is not None else 1.0 / delta

    y = x.copy()
    residual = np.inf
    iterations = 0
    for iterations in range(1, budget + 1):
        g = smooth_grad(y)
        sv = smooth_value(y)
        while True:
            step = 1.0 / lip_est
            cand = _shrink_toward_projection(set_, y - step * g, step * kappa)
            move = cand - y
            quad_model = sv + g @ move + 0.5 * lip_est * float(move @ move)
            if smooth_value(cand) <= quad_model + 1e-14:
                break
            lip_est *= 2.0
            if lip_est > 1e18:
                break
        residual = float(np.linalg.norm(cand - y)) / step
        y = cand
        if residual <= tol:
            return y, ProxInfo(residual=residual, iterations=iterations, converged=True)
    return y, ProxInfo(residual=residual, iterations=iterations, converged=False)


class ExtendedLoss:
    """Smoothed extension of a convex loss beyond its decision set."""

    def __init__(self, base: ConvexLoss, set_: DecisionSet, delta: float,
                 kappa: float, budget: int = DEFAULT_BUDGET, tol: float = DEFAULT_TOL):
        if delta <= 0:
            raise ConfigError("delta must be positive")
        if kappa < 0:
            raise ConfigError("kappa must be nonnegative")
        self.base = base
        self.set_ = set_
        self.delta = float(delta)
        self.kappa = float(kappa)
        self.budget = int(budget)
        self.tol = float(tol)

    def composite_value(self, y) -> float:
        return self.base.value(y) + self.kappa * self.set_.distance(y)

    def evaluate(self, x):
        """Return (value, gradient, ProxInfo) at x from a single prox solve."""
        x = as_point(x, self.set_.dim)
        y, info = _prox_impl(self.base, self.set_, self.kappa, self.delta, x,
                             self.budget, self.tol)
        diff = x - y
        value = self.composite_value(y) + float(diff @ diff) / (2.0 * self.delta)
        grad = diff / self.delta
        return value, grad, info

    def value(self, x) -> float:
        return self.evaluate(x)[0]

    def grad(self, x) -> np.ndarray:
        return self.grad_with_info(x)[0]

    def grad_with_info(self, x):
        """Gradient only: skips the envelope-value arithmetic of evaluate."""
        x = np.asarray(x, dtype=np.float64)
        y, info = _prox_impl(self.base, self.set_, self.kappa, self.delta, x,
                             self.budget, self.tol)
        return (x - y) / self.delta, info
