"""Hot numeric kernels, JIT-compiled with numba when available.

The pure-numpy implementations (``*_np``) are always importable; the
module-level names point at the numba builds unless numba is missing or
the environment variable ``OCOBOOST_NUMBA`` is set to ``0``/``false``/``off``.
``ocoboost-bench kernels`` times the two paths against each other.
"""

from __future__ import annotations

import os

import numpy as np


def _env_wants_numba() -> bool:
    return os.environ.get("OCOBOOST_NUMBA", "1").strip().lower() not in ("0", "false", "off")


try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def decorate(func):
            return func

        return decorate


NUMBA_ENABLED = HAVE_NUMBA and _env_wants_numba()


# ---------------------------------------------------------------------------
# Projection onto the scaled probability simplex {x >= 0, sum(x) = total}
# via sort-and-threshold.
# ---------------------------------------------------------------------------

def project_simplex_np(v: np.ndarray, total: float = 1.0) -> np.ndarray:
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - total
    idx = np.arange(1, v.shape[0] + 1)
    mask = u - css / idx > 0.0
    # the first entry always satisfies the condition for total > 0
    rho = idx[mask][-1]
    theta = css[mask][-1] / rho
    return np.maximum(v - theta, 0.0)


@njit(cache=True)
def _project_simplex_jit(v, total):
    n = v.shape[0]
    u = np.sort(v)[::-1]
    css = 0.0
    theta = 0.0
    for i in range(n):
        css += u[i]
        t = (css - total) / (i + 1)
        if u[i] - t > 0.0:
            theta = t
    out = np.empty(n)
    for i in range(n):
        d = v[i] - theta
        out[i] = d if d > 0.0 else 0.0
    return out


def project_simplex_batch_np(points: np.ndarray, total: float = 1.0) -> np.ndarray:
    n, d = points.shape
    u = np.sort(points, axis=1)[:, ::-1]
    css = np.cumsum(u, axis=1) - total
    idx = np.arange(1, d + 1)
    mask = u - css / idx > 0.0
    rho = d - 1 - np.argmax(mask[:, ::-1], axis=1)
    theta = css[np.arange(n), rho] / (rho + 1)
    return np.maximum(points - theta[:, None], 0.0)


@njit(cache=True)
def _project_simplex_batch_jit(points, total):
    n = points.shape[0]
    out = np.empty_like(points)
    for i in range(n):
        out[i] = _project_simplex_jit(points[i], total)
    return out


# ---------------------------------------------------------------------------
# One-dimensional composite prox: minimize over y
#   w*(y - t)^2 + kappa * max(lo - y, y - hi, 0) + (y - x)^2 / (2*delta)
# Exact: the objective is a convex piecewise quadratic with breakpoints at
# lo and hi, so the global minimum is the best of the three per-region
# clamped minimizers.
# ---------------------------------------------------------------------------

def _quad_interval_candidates(w, t, lo, hi, kappa, delta, x):
    a = 2.0 * w + 1.0 / delta
    base = 2.0 * w * t + x / delta
    y_left = min((base + kappa) / a, lo)
    y_mid = min(max(base / a, lo), hi)
    y_right = max((base - kappa) / a, hi)
    return y_left, y_mid, y_right


def _quad_interval_objective(y, w, t, lo, hi, kappa, delta, x):
    pen = max(lo - y, y - hi, 0.0)
    return w * (y - t) ** 2 + kappa * pen + (y - x) ** 2 / (2.0 * delta)


def prox_quad_interval_np(w: float, t: float, lo: float, hi: float,
                          kappa: float, delta: float, x: float) -> float:
    best_y = x
    best_val = np.inf
    for y in _quad_interval_candidates(w, t, lo, hi, kappa, delta, x):
        val = _quad_interval_objective(y, w, t, lo, hi, kappa, delta, x)
        if val < best_val:
            best_val = val
            best_y = y
    return best_y


@njit(cache=True)
def _prox_quad_interval_jit(w, t, lo, hi, kappa, delta, x):
    a = 2.0 * w + 1.0 / delta
    base = 2.0 * w * t + x / delta
    y0 = (base + kappa) / a
    if y0 > lo:
        y0 = lo
    y1 = base / a
    if y1 < lo:
        y1 = lo
    elif y1 > hi:
        y1 = hi
    y2 = (base - kappa) / a
    if y2 < hi:
        y2 = hi
    best_y = y0
    best_val = np.inf
    for y in (y0, y1, y2):
        pen = lo - y
        if y - hi > pen:
            pen = y - hi
        if pen < 0.0:
            pen = 0.0
        val = w * (y - t) ** 2 + kappa * pen + (y - x) ** 2 / (2.0 * delta)
        if val < best_val:
            best_val = val
            best_y = y
    return best_y


def prox_quad_interval_batch_np(w, t, lo, hi, kappa, delta, xs):
    a = 2.0 * w + 1.0 / delta
    base = 2.0 * w * t + xs / delta
    cand = np.stack([
        np.minimum((base + kappa) / a, lo),
        np.clip(base / a, lo, hi),
        np.maximum((base - kappa) / a, hi),
    ])
    pen = np.maximum(np.maximum(lo - cand, cand - hi), 0.0)
    vals = w * (cand - t) ** 2 + kappa * pen + (cand - xs) ** 2 / (2.0 * delta)
    return cand[np.argmin(vals, axis=0), np.arange(xs.shape[0])]


@njit(cache=True)
def _prox_quad_interval_batch_jit(w, t, lo, hi, kappa, delta, xs):
    out = np.empty_like(xs)
    for i in range(xs.shape[0]):
        out[i] = _prox_quad_interval_jit(w, t, lo, hi, kappa, delta, xs[i])
    return out


if NUMBA_ENABLED:
    project_simplex = _project_simplex_jit
    project_simplex_batch = _project_simplex_batch_jit
    prox_quad_interval = _prox_quad_interval_jit
    prox_quad_interval_batch = _prox_quad_interval_batch_jit
else:
    project_simplex = project_simplex_np
    project_simplex_batch = project_simplex_batch_np
    prox_quad_interval = prox_quad_interval_np
    prox_quad_interval_batch = prox_quad_interval_batch_np

project_simplex_jit = _project_simplex_jit
project_simplex_batch_jit = _project_simplex_batch_jit
prox_quad_interval_jit = _prox_quad_interval_jit
prox_quad_interval_batch_jit = _prox_quad_interval_batch_jit
