"""Convex cost functions with values, gradients, and certified Lipschitz bounds.

The boosting loops never assume a fixed loss family; environments supply
losses per round (typically as closures over observed targets). The two
concrete families here cover the benchmark and the test suite: linear
losses and fixed-target quadratics (the 1-D case is the square loss).
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError, DimensionMismatch, NonFiniteInput
from .geometry import DecisionSet, as_point


class ConvexLoss:
    """Base class: value plus (sub)gradient, with optional regularity hints.

    ``lipschitz_hint`` bounds the gradient norm over the caller's working
    region; ``curvature_hint`` bounds the gradient's Lipschitz constant
    (smoothness). Both are None when unknown.
    """

    lipschitz_hint: float | None = None
    curvature_hint: float | None = None

    def value(self, x) -> float:
        raise NotImplementedError

    def grad(self, x) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, x) -> float:
        return self.value(x)


class LinearLoss(ConvexLoss):
    """f(x) = direction . x"""

    curvature_hint = 0.0

    def __init__(self, direction):
        self.direction = as_point(direction, name="loss direction")
        self.lipschitz_hint = float(np.linalg.norm(self.direction))

    @property
    def dim(self) -> int:
        return self.direction.shape[0]

    def value(self, x) -> float:
        x = as_point(x, self.dim)
        return float(self.direction @ x)

    def grad(self, x) -> np.ndarray:
        as_point(x, self.dim)
        return self.direction.copy()


class QuadraticLoss(ConvexLoss):
    """f(x) = weight * ||x - target||^2 (the square loss when dim == 1)."""

    def __init__(self, target, weight: float = 1.0):
        self.target = as_point(target, name="target")
        if weight <= 0 or not np.isfinite(weight):
            raise ConfigError("quadratic weight must be positive and finite")
        self.weight = float(weight)
        self.curvature_hint = 2.0 * self.weight

    @property
    def dim(self) -> int:
        return self.target.shape[0]

    def value(self, x) -> float:
        x = as_point(x, self.dim)
        d = x - self.target
        return self.weight * float(d @ d)

    def grad(self, x) -> np.ndarray:
        x = as_point(x, self.dim)
        return 2.0 * self.weight * (x - self.target)


class CallableLoss(ConvexLoss):
    """Wrap user-supplied value/gradient callables."""

    def __init__(self, fn, grad_fn, lipschitz_hint=None, curvature_hint=None):
        self._fn = fn
        self._grad_fn = grad_fn
        self.lipschitz_hint = None if lipschitz_hint is None else float(lipschitz_hint)
        self.curvature_hint = None if curvature_hint is None else float(curvature_hint)

    def value(self, x) -> float:
        x = as_point(x, name="loss input")
        v = float(self._fn(x))
        if not np.isfinite(v):
            raise NonFiniteInput("loss value is not finite")
        return v

    def grad(self, x) -> np.ndarray:
        x = as_point(x, name="loss input")
        return as_point(self._grad_fn(x), x.shape[0], "loss gradient")


class ShiftedLoss(ConvexLoss):
    """g(x) = base(x + offset); used to evaluate losses in recentered coordinates."""

    def __init__(self, base: ConvexLoss, offset):
        self.base = base
        self.offset = as_point(offset, name="offset")
        self.lipschitz_hint = base.lipschitz_hint
        self.curvature_hint = base.curvature_hint

    def value(self, x) -> float:
        x = as_point(x, self.offset.shape[0])
        return self.base.value(x + self.offset)

    def grad(self, x) -> np.ndarray:
        x = as_point(x, self.offset.shape[0])
        return self.base.grad(x + self.offset)


class ScaledLoss(ConvexLoss):
    """g(x) = factor * base(x); e.g. for rescaling a loss to unit range."""

    def __init__(self, base: ConvexLoss, factor: float):
        if factor <= 0 or not np.isfinite(factor):
            raise ConfigError("scale factor must be positive and finite")
        self.base = base
        self.factor = float(factor)
        if base.lipschitz_hint is not None:
            self.lipschitz_hint = factor * base.lipschitz_hint
        if base.curvature_hint is not None:
            self.curvature_hint = factor * base.curvature_hint

    def value(self, x) -> float:
        return self.factor * self.base.value(x)

    def grad(self, x) -> np.ndarray:
        return self.factor * self.base.grad(x)


def lipschitz_bound(loss: ConvexLoss, region: DecisionSet, inflate: float = 0.0) -> float:
    """Certified upper bound on sup of ||grad loss|| over the region.

    ``inflate`` enlarges the region by that Euclidean radius, for callers
    that evaluate gradients at points slightly outside it.
    """
    if inflate < 0:
        raise ConfigError("inflate must be nonnegative")
    if isinstance(loss, LinearLoss):
        if loss.dim != region.dim:
            raise DimensionMismatch("loss and region dimensions differ")
        return float(np.linalg.norm(loss.direction))
    if isinstance(loss, QuadraticLoss):
        if loss.dim != region.dim:
            raise DimensionMismatch("loss and region dimensions differ")
        reach = region.farthest_distance(loss.target) + inflate
        return 2.0 * loss.weight * reach
    if isinstance(loss, (ShiftedLoss, ScaledLoss)):
        factor = loss.factor if isinstance(loss, ScaledLoss) else 1.0
        shifted_region = (region.shift(loss.offset)
                          if isinstance(loss, ShiftedLoss) else region)
        return factor * lipschitz_bound(loss.base, shifted_region, inflate)
    if loss.lipschitz_hint is not None:
        return float(loss.lipschitz_hint)
    raise ConfigError(
        "cannot certify a gradient bound for this loss; construct it with a "
        "lipschitz_hint")
