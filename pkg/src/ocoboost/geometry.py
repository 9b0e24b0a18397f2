"""Convex decision sets: projection, distance, scaling, recentering.

All sets operate on 1-D float64 arrays. Projections are analytic, so the
membership tolerance is a tight ``MEMBERSHIP_TOL``. Scaling is a pure
dilation about the origin; callers that want scaling about the centroid
recenter first.

Public methods validate their inputs; the underscored ``_project`` /
``_distance`` variants skip validation and exist for the per-round inner
loops.
"""

from __future__ import annotations

import math

import numpy as np

from . import _kernels
from .errors import ConfigError, DimensionMismatch, NonFiniteInput

MEMBERSHIP_TOL = 1e-9


def as_point(x, dim=None, name="point"):
    """Validate and return a finite 1-D float64 array."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise DimensionMismatch(f"{name} must be a 1-D vector, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise DimensionMismatch(f"{name} has dimension {arr.shape[0]}, expected {dim}")
    # a finite squared norm implies finite entries (entries large enough to
    # overflow the square are rejected along with NaN/Inf)
    with np.errstate(over="ignore"):
        sq = float(arr @ arr)
    if not math.isfinite(sq):
        raise NonFiniteInput(f"{name} contains non-finite entries")
    return arr


class DecisionSet:
    """A convex body with projection, distance, diameter, and centroid."""

    dim: int

    @property
    def diameter(self) -> float:
        raise NotImplementedError

    @property
    def centroid(self) -> np.ndarray:
        raise NotImplementedError

    def project(self, x) -> np.ndarray:
        return self._project(as_point(x, self.dim))

    def _project(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def distance(self, x) -> float:
        return self._distance(as_point(x, self.dim))

    def _distance(self, x: np.ndarray) -> float:
        d = x - self._project(x)
        return math.sqrt(float(d @ d))

    def contains(self, x, tol: float = MEMBERSHIP_TOL) -> bool:
        return self.distance(x) <= tol

    def scale(self, c: float) -> "DecisionSet":
        raise NotImplementedError

    def shift(self, offset) -> "DecisionSet":
        return ShiftedSet(self, as_point(offset, self.dim, "offset"))

    def recenter(self) -> tuple["DecisionSet", np.ndarray]:
        """Return (translate with centroid at the origin, subtracted centroid)."""
        offset = self.centroid
        if np.allclose(offset, 0.0, atol=1e-15):
            return self, np.zeros(self.dim)
        return self.shift(-offset), offset

    def linear_minimizer(self, direction) -> np.ndarray:
        """A minimizer of ``direction . x`` over the set."""
        raise NotImplementedError

    def farthest_distance(self, point) -> float:
        """An upper bound on ``max_{x in set} ||x - point||`` (exact where noted)."""
        point = as_point(point, self.dim)
        return float(np.linalg.norm(point - self.centroid)) + self.diameter

    def sample(self, rng: np.random.Generator, n: int | None = None) -> np.ndarray:
        """Uniform samples from the set (used by tests and Monte-Carlo checks)."""
        raise NotImplementedError

    def _check_scale(self, c: float) -> float:
        c = float(c)
        if not np.isfinite(c) or c <= 0.0:
            raise ConfigError(f"scale factor must be positive, got {c}")
        return c


def _check_scale_positive(c):
    c = float(c)
    if not np.isfinite(c) or c <= 0.0:
        raise ConfigError(f"scale factor must be positive, got {c}")
    return c


class Ball(DecisionSet):
    """Euclidean ball of given radius, optionally centered away from the origin."""

    def __init__(self, dim: int, radius: float, center=None):
        if dim < 1:
            raise ConfigError("ball dimension must be >= 1")
        if radius <= 0:
            raise ConfigError("ball radius must be positive")
        self.dim = int(dim)
        self.radius = float(radius)
        self.center = (np.zeros(self.dim) if center is None
                       else as_point(center, self.dim, "center"))

    @property
    def diameter(self) -> float:
        return 2.0 * self.radius

    @property
    def centroid(self) -> np.ndarray:
        return self.center.copy()

    def _project(self, x: np.ndarray) -> np.ndarray:
        v = x - self.center
        norm = math.sqrt(float(v @ v))
        if norm <= self.radius:
            return x.copy()
        return self.center + v * (self.radius / norm)

    def _distance(self, x: np.ndarray) -> float:
        v = x - self.center
        return max(0.0, math.sqrt(float(v @ v)) - self.radius)

    def scale(self, c: float) -> "Ball":
        c = _check_scale_positive(c)
        return Ball(self.dim, c * self.radius, c * self.center)

    def shift(self, offset) -> "Ball":
        return Ball(self.dim, self.radius, self.center + as_point(offset, self.dim))

    def linear_minimizer(self, direction) -> np.ndarray:
        g = as_point(direction, self.dim)
        norm = np.linalg.norm(g)
        if norm == 0.0:
            return self.center.copy()
        return self.center - g * (self.radius / norm)

    def farthest_distance(self, point) -> float:
        point = as_point(point, self.dim)
        return float(np.linalg.norm(point - self.center)) + self.radius

    def sample(self, rng, n=None):
        size = 1 if n is None else n
        v = rng.standard_normal((size, self.dim))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        r = self.radius * rng.random(size) ** (1.0 / self.dim)
        pts = self.center + v * r[:, None]
        return pts[0] if n is None else pts


class Box(DecisionSet):
    """Axis-aligned box given by per-axis lower and upper bounds."""

    def __init__(self, lower, upper):
        self.lower = as_point(lower, name="lower")
        self.upper = as_point(upper, self.lower.shape[0], name="upper")
        if np.any(self.upper < self.lower):
            raise ConfigError("box upper bounds must be >= lower bounds")
        self.dim = self.lower.shape[0]

    @property
    def diameter(self) -> float:
        return float(np.linalg.norm(self.upper - self.lower))

    @property
    def centroid(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)

    def _project(self, x: np.ndarray) -> np.ndarray:
        return np.clip(x, self.lower, self.upper)

    def scale(self, c: float) -> "Box":
        c = _check_scale_positive(c)
        return type(self)(c * self.lower, c * self.upper)

    def shift(self, offset) -> "Box":
        off = as_point(offset, self.dim)
        return type(self)(self.lower + off, self.upper + off)

    def linear_minimizer(self, direction) -> np.ndarray:
        g = as_point(direction, self.dim)
        mid = self.centroid
        return np.where(g > 0, self.lower, np.where(g < 0, self.upper, mid))

    def farthest_distance(self, point) -> float:
        point = as_point(point, self.dim)
        per_axis = np.maximum(np.abs(self.lower - point), np.abs(self.upper - point))
        return float(np.linalg.norm(per_axis))

    def sample(self, rng, n=None):
        size = 1 if n is None else n
        pts = self.lower + rng.random((size, self.dim)) * (self.upper - self.lower)
        return pts[0] if n is None else pts


class Interval(Box):
    """Closed interval [lo, hi] on the real line."""

    def __init__(self, lo: float, hi: float):
        super().__init__([float(lo)], [float(hi)])

    @property
    def lo(self) -> float:
        return float(self.lower[0])

    @property
    def hi(self) -> float:
        return float(self.upper[0])

    def scale(self, c: float) -> "Interval":
        c = _check_scale_positive(c)
        return Interval(c * self.lo, c * self.hi)

    def shift(self, offset) -> "Interval":
        off = as_point(offset, 1)
        return Interval(self.lo + off[0], self.hi + off[0])


class Simplex(DecisionSet):
    """Scaled probability simplex {x >= 0, sum(x) = total}."""

    def __init__(self, dim: int, total: float = 1.0):
        if dim < 1:
            raise ConfigError("simplex dimension must be >= 1")
        if total <= 0:
            raise ConfigError("simplex total must be positive")
        self.dim = int(dim)
        self.total = float(total)

    @property
    def diameter(self) -> float:
        if self.dim == 1:
            return 0.0
        return self.total * np.sqrt(2.0)

    @property
    def centroid(self) -> np.ndarray:
        return np.full(self.dim, self.total / self.dim)

    def _project(self, x: np.ndarray) -> np.ndarray:
        return _kernels.project_simplex(x, self.total)

    def project_batch(self, points: np.ndarray) -> np.ndarray:
        points = np.ascontiguousarray(points, dtype=np.float64)
        return _kernels.project_simplex_batch(points, self.total)

    def scale(self, c: float) -> "Simplex":
        c = _check_scale_positive(c)
        return Simplex(self.dim, c * self.total)

    def linear_minimizer(self, direction) -> np.ndarray:
        g = as_point(direction, self.dim)
        out = np.zeros(self.dim)
        out[int(np.argmin(g))] = self.total
        return out

    def farthest_distance(self, point) -> float:
        point = as_point(point, self.dim)
        vertices = self.total * np.eye(self.dim)
        return float(np.max(np.linalg.norm(vertices - point, axis=1)))

    def sample(self, rng, n=None):
        size = 1 if n is None else n
        pts = self.total * rng.dirichlet(np.ones(self.dim), size=size)
        return pts[0] if n is None else pts


class ShiftedSet(DecisionSet):
    """Translate of a base set by a fixed offset."""

    def __init__(self, base: DecisionSet, offset):
        self.base = base
        self.offset = as_point(offset, base.dim, "offset")
        self.dim = base.dim

    @property
    def diameter(self) -> float:
        return self.base.diameter

    @property
    def centroid(self) -> np.ndarray:
        return self.base.centroid + self.offset

    def _project(self, x: np.ndarray) -> np.ndarray:
        return self.base._project(x - self.offset) + self.offset

    def _distance(self, x: np.ndarray) -> float:
        return self.base._distance(x - self.offset)

    def scale(self, c: float) -> "ShiftedSet":
        c = _check_scale_positive(c)
        return ShiftedSet(self.base.scale(c), c * self.offset)

    def shift(self, offset) -> "ShiftedSet":
        return ShiftedSet(self.base, self.offset + as_point(offset, self.dim))

    def linear_minimizer(self, direction) -> np.ndarray:
        return self.base.linear_minimizer(direction) + self.offset

    def farthest_distance(self, point) -> float:
        point = as_point(point, self.dim)
        return self.base.farthest_distance(point - self.offset)

    def sample(self, rng, n=None):
        return self.base.sample(rng, n) + self.offset


class CustomSet(DecisionSet):
    """User-supplied projection oracle; diameter and centroid must be given."""

    def __init__(self, dim: int, project_fn, diameter: float, centroid):
        if diameter <= 0:
            raise ConfigError("custom set diameter must be positive")
        self.dim = int(dim)
        self._project_fn = project_fn
        self._diameter = float(diameter)
        self._centroid = as_point(centroid, self.dim, "centroid")

    @property
    def diameter(self) -> float:
        return self._diameter

    @property
    def centroid(self) -> np.ndarray:
        return self._centroid.copy()

    def _project(self, x: np.ndarray) -> np.ndarray:
        return as_point(self._project_fn(x), self.dim, "projection output")

    def scale(self, c: float) -> "CustomSet":
        c = _check_scale_positive(c)
        fn = self._project_fn
        return CustomSet(self.dim, lambda x: c * fn(np.asarray(x) / c),
                         c * self._diameter, c * self._centroid)


def interval_bounds(set_: DecisionSet):
    """(lo, hi) when the set is effectively a 1-D interval, else None."""
    if set_.dim != 1:
        return None
    if isinstance(set_, Box):
        return float(set_.lower[0]), float(set_.upper[0])
    if isinstance(set_, Ball):
        c = float(set_.center[0])
        return c - set_.radius, c + set_.radius
    if isinstance(set_, ShiftedSet):
        inner = interval_bounds(set_.base)
        if inner is None:
            return None
        off = float(set_.offset[0])
        return inner[0] + off, inner[1] + off
    return None


def set_from_config(config: dict) -> DecisionSet:
    """Build a decision set from a plain config record.

    kind "ball": {dim, radius, center?}; "box": {lower, upper};
    "interval": {lo, hi}; "simplex": {dim, total?};
    "custom": {dim, project, diameter, centroid} with a callable projection.
    """
    if "kind" not in config:
        raise ConfigError("set config needs a 'kind' field")
    kind = config["kind"]
    try:
        if kind == "ball":
            return Ball(config["dim"], config["radius"], config.get("center"))
        if kind == "box":
            return Box(config["lower"], config["upper"])
        if kind == "interval":
            return Interval(config["lo"], config["hi"])
        if kind == "simplex":
            return Simplex(config["dim"], config.get("total", 1.0))
        if kind == "custom":
            return CustomSet(config["dim"], config["project"],
                             config["diameter"], config["centroid"])
    except KeyError as exc:
        raise ConfigError(f"set config for kind '{kind}' is missing {exc}") from exc
    raise ConfigError(f"unknown set kind '{kind}'")
