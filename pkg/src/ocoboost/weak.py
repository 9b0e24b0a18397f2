"""Weak contextual learners with a multiplicative edge.

Every learner maps contexts to members of its (recentered) decision set,
consumes linear losses one round at a time, and is deterministic given its
seed and input sequence. ``gamma`` is a declared configuration input, not
estimated.

The practical learners (stump, ridge, tiny MLP) are online regressors in
the gradient-boosting mold. Each keeps a full-scale internal predictor u
and plays the projection of gamma * u(c). A linear loss with direction g
is read as the gradient of a square loss at a stage point the learner can
reconstruct: the point is 0 for ``anchor="zero"`` (true for the first
ensemble slot under the centroid start rule) and u(c) for
``anchor="self"`` (the ensemble-consensus approximation, exact for a
standalone learner). The implied regression target ``anchor_point - g/2``
drives an online least-squares step. Minimizing the linear objective
directly has no equilibrium, so parameters saturate and the boosted
feedback loop destabilizes; the regression form is self-stabilizing.
``ScaledLeaderOracle`` is the exact-edge learner the test suite uses: it
tracks a finite hypothesis class on the raw linear losses and plays gamma
times the leader (or a hedged mixture).
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError, ProtocolError
from .geometry import DecisionSet, as_point
from .losses import LinearLoss


def _loss_vector(loss, dim):
    if isinstance(loss, LinearLoss):
        # already validated at construction; only the dimension can be off
        if loss.direction.shape[0] != dim:
            return as_point(loss.direction, dim, "linear loss")
        return loss.direction
    return as_point(loss, dim, "linear loss")


class WeakLearner:
    """Stateful contextual predictor updated with linear losses."""

    gamma: float = 1.0

    def __init__(self, set_: DecisionSet):
        self.set_ = set_
        self.action_dim = set_.dim
        self.rounds = 0
        self._last_context = None

    def predict(self, context) -> np.ndarray:
        raise NotImplementedError

    def update(self, loss) -> None:
        g = _loss_vector(loss, self.action_dim)
        if self._last_context is None:
            raise ProtocolError("update before any predict")
        self._apply_update(self._last_context, g)
        self.rounds += 1

    def _apply_update(self, context, g):
        raise NotImplementedError

    def reset(self) -> None:
        raise NotImplementedError

    def _remember(self, context):
        self._last_context = as_point(context, name="context")
        return self._last_context


class UniformBaseline(WeakLearner):
    """Plays the set centroid regardless of context (the uniform-guess action)."""

    def __init__(self, set_: DecisionSet, gamma: float = 1.0):
        super().__init__(set_)
        self.gamma = float(gamma)

    def predict(self, context) -> np.ndarray:
        self._remember(context)
        return self.set_.centroid

    def _apply_update(self, context, g):
        pass

    def reset(self):
        self.rounds = 0
        self._last_context = None


class ScaledLeaderOracle(WeakLearner):
    """Exact-edge learner over a finite hypothesis class.

    Tracks the cumulative linear loss of each hypothesis and plays
    gamma * h_leader(context). ``mode="ftl"`` follows the leader outright
    (ties break to the lowest index); ``mode="hedge"`` plays gamma times the
    exponentially-weighted mixture, with per-round losses normalized by
    ``scale`` (a bound on |g . h(c)|), giving the standard
    O(sqrt(T log |H|)) regret on the normalized losses.
    """

    def __init__(self, hypotheses, gamma: float, set_: DecisionSet,
                 mode: str = "ftl", scale: float = 1.0):
        super().__init__(set_)
        if not hypotheses:
            raise ConfigError("need at least one hypothesis")
        if not 0.0 < gamma <= 1.0:
            raise ConfigError("gamma must be in (0, 1]")
        if mode not in ("ftl", "hedge"):
            raise ConfigError(f"unknown oracle mode '{mode}'")
        if scale <= 0:
            raise ConfigError("scale must be positive")
        self.hypotheses = list(hypotheses)
        self.gamma = float(gamma)
        self.mode = mode
        self.scale = float(scale)
        self.cum_losses = np.zeros(len(self.hypotheses))
        self._last_actions = None

    def _actions(self, context):
        # hypotheses are trusted callables returning length-d vectors
        return np.stack([h(context) for h in self.hypotheses])

    def predict(self, context) -> np.ndarray:
        self._remember(context)
        actions = self._actions(context)
        self._last_actions = actions
        if self.mode == "ftl":
            leader = int(np.argmin(self.cum_losses))
            return self.gamma * actions[leader]
        t = self.rounds + 1
        eta = np.sqrt(8.0 * np.log(len(self.hypotheses)) / t)
        z = -eta * self.cum_losses / (2.0 * self.scale)
        z -= z.max()
        w = np.exp(z)
        w /= w.sum()
        return self.gamma * (w @ actions)

    def _apply_update(self, context, g):
        actions = self._last_actions
        if actions is None:
            actions = self._actions(context)
        self.cum_losses += actions @ g
        self._last_actions = None

    def reset(self):
        self.rounds = 0
        self._last_context = None
        self._last_actions = None
        self.cum_losses = np.zeros(len(self.hypotheses))


class DecisionStump(WeakLearner):
    """Single-feature threshold predictor over quantile bins.

    Thresholds come from a warm-up buffer (quantile bin edges per feature).
    After warm-up each (feature, bin) cell holds a leaf action; the feature
    to split on follows the leader by accumulated realized linear loss.
    During warm-up the stump plays the centroid.

    Leaf actions: with ``leaf_mode="mean"`` (default) each cell's internal
    leaf is the running mean of the targets implied by its linear losses,
    and the stump plays the projection of gamma times that leaf.
    ``leaf_mode="ftl"`` instead plays the set's minimizer of the cell's
    accumulated loss direction; on an interval that is always an endpoint,
    which destabilizes boosted regression, hence the mean-leaf default.
    """

    def __init__(self, feature_dim: int, set_: DecisionSet, gamma: float = 1.0,
                 bins: int = 16, warmup: int = 50, leaf_mode: str = "mean",
                 anchor: str = "self"):
        super().__init__(set_)
        if feature_dim < 1:
            raise ConfigError("feature_dim must be >= 1")
        if bins < 2:
            raise ConfigError("need at least 2 bins")
        if warmup < 1:
            raise ConfigError("warmup must be >= 1")
        if leaf_mode not in ("mean", "ftl"):
            raise ConfigError(f"unknown leaf_mode '{leaf_mode}'")
        if anchor not in ("self", "zero"):
            raise ConfigError(f"unknown anchor '{anchor}'")
        self.feature_dim = int(feature_dim)
        self.gamma = float(gamma)
        self.bins = int(bins)
        self.warmup = int(warmup)
        self.leaf_mode = leaf_mode
        self.anchor = anchor
        self.reset()

    def reset(self):
        self.rounds = 0
        self._last_context = None
        self._buffer = []
        self.edges = None
        self.cum_g = np.zeros((self.feature_dim, self.bins, self.action_dim))
        self.counts = np.zeros((self.feature_dim, self.bins), dtype=np.int64)
        self.leaves = np.zeros((self.feature_dim, self.bins, self.action_dim))
        self.feat_loss = np.zeros(self.feature_dim)

    def _bin_index(self, feature: int, value: float) -> int:
        return int(np.searchsorted(self.edges[feature], value, side="right"))

    def _leaf_action(self, feature: int, bin_: int) -> np.ndarray:
        if self.leaf_mode == "mean":
            return self.set_._project(self.gamma * self.leaves[feature, bin_])
        g_cell = self.cum_g[feature, bin_]
        if not np.any(g_cell):
            return self.set_.centroid
        return self.set_.linear_minimizer(g_cell)

    def predict(self, context) -> np.ndarray:
        c = self._remember(context)
        if c.shape[0] != self.feature_dim:
            raise ConfigError(
                f"context has {c.shape[0]} features, expected {self.feature_dim}")
        if self.edges is None:
            return self.set_.centroid
        j = int(np.argmin(self.feat_loss))
        b = self._bin_index(j, c[j])
        return self._leaf_action(j, b)

    def _apply_update(self, context, g):
        if self.edges is None:
            self._buffer.append((context.copy(), g.copy()))
            if len(self._buffer) >= self.warmup:
                self._finish_warmup()
            return
        self._credit(context, g)

    def _finish_warmup(self):
        data = np.stack([c for c, _ in self._buffer])
        qs = np.arange(1, self.bins) / self.bins
        self.edges = [np.quantile(data[:, j], qs) for j in range(self.feature_dim)]
        for c, g in self._buffer:
            self._credit(c, g)
        self._buffer = []

    def _credit(self, context, g):
        for j in range(self.feature_dim):
            b = self._bin_index(j, context[j])
            self.feat_loss[j] += float(g @ self._leaf_action(j, b))
            self.cum_g[j, b] += g
            if self.leaf_mode == "mean":
                self.counts[j, b] += 1
                leaf = self.leaves[j, b]
                base = leaf if self.anchor == "self" else 0.0
                target = base - 0.5 * g
                self.leaves[j, b] = leaf + (target - leaf) / self.counts[j, b]


def _step_at(step: float, power: float, rounds: int) -> float:
    """Inverse-scaling step schedule step / t^power (power=0 for constant)."""
    if power == 0.0:
        return step
    return step / (rounds + 1) ** power


class OnlineRidge(WeakLearner):
    """Linear model fit online to the targets implied by its linear losses,
    with an l2 penalty and an inverse-scaling step schedule (step/t^power)."""

    def __init__(self, feature_dim: int, set_: DecisionSet, gamma: float = 1.0,
                 step: float = 0.01, l2: float = 1e-4, power: float = 0.25,
                 anchor: str = "self"):
        super().__init__(set_)
        if anchor not in ("self", "zero"):
            raise ConfigError(f"unknown anchor '{anchor}'")
        self.feature_dim = int(feature_dim)
        self.gamma = float(gamma)
        self.step = float(step)
        self.l2 = float(l2)
        self.power = float(power)
        self.anchor = anchor
        self.reset()

    def reset(self):
        self.rounds = 0
        self._last_context = None
        self.weights = np.zeros((self.action_dim, self.feature_dim))
        self.bias = np.zeros(self.action_dim)

    def _raw(self, c):
        return self.weights @ c + self.bias

    def predict(self, context) -> np.ndarray:
        c = self._remember(context)
        return self.set_.project(self.gamma * self._raw(c))

    def _apply_update(self, context, g):
        # err = raw - implied target; with anchor "self" the raw cancels
        err = 0.5 * g if self.anchor == "self" else self._raw(context) + 0.5 * g
        lr = _step_at(self.step, self.power, self.rounds)
        self.weights -= lr * (np.outer(err, context) + self.l2 * self.weights)
        self.bias -= lr * (err + self.l2 * self.bias)


class TinyMlp(WeakLearner):
    """One-hidden-unit tanh network fit online to the targets implied by
    its linear losses, with the same inverse-scaling step schedule as the
    ridge learner."""

    def __init__(self, feature_dim: int, set_: DecisionSet, gamma: float = 1.0,
                 step: float = 0.01, hidden: int = 1, seed: int = 0,
                 power: float = 0.25, anchor: str = "self"):
        super().__init__(set_)
        if anchor not in ("self", "zero"):
            raise ConfigError(f"unknown anchor '{anchor}'")
        self.feature_dim = int(feature_dim)
        self.gamma = float(gamma)
        self.step = float(step)
        self.hidden = int(hidden)
        self.seed = int(seed)
        self.power = float(power)
        self.anchor = anchor
        self.reset()

    def reset(self):
        self.rounds = 0
        self._last_context = None
        rng = np.random.default_rng(self.seed)
        self.w1 = 0.1 * rng.standard_normal((self.hidden, self.feature_dim))
        self.b1 = np.zeros(self.hidden)
        self.w2 = 0.1 * rng.standard_normal((self.action_dim, self.hidden))
        self.b2 = np.zeros(self.action_dim)
        self._cache = None

    def _forward(self, c):
        z = np.tanh(self.w1 @ c + self.b1)
        return z, self.w2 @ z + self.b2

    def predict(self, context) -> np.ndarray:
        c = self._remember(context)
        z, raw = self._forward(c)
        self._cache = (c, z)
        return self.set_.project(self.gamma * raw)

    def _apply_update(self, context, g):
        if self._cache is None or not np.array_equal(self._cache[0], context):
            z, _ = self._forward(context)
        else:
            z = self._cache[1]
        err = 0.5 * g if self.anchor == "self" else (self.w2 @ z + self.b2) + 0.5 * g
        lr = _step_at(self.step, self.power, self.rounds)
        gz = (self.w2.T @ err) * (1.0 - z * z)
        self.w2 -= lr * np.outer(err, z)
        self.b2 -= lr * err
        self.w1 -= lr * np.outer(gz, context)
        self.b1 -= lr * gz
        self._cache = None


def empirical_gamma_regret(learner: WeakLearner, transcript, hypotheses) -> float:
    """Drive a reset learner through (context, linear loss) pairs and return
    its cumulative loss minus gamma times the best comparator's."""
    if not transcript:
        raise ConfigError("transcript is empty")
    if not hypotheses:
        raise ConfigError("need a comparator class")
    learner.reset()
    total = 0.0
    comparator = np.zeros(len(hypotheses))
    for context, loss in transcript:
        g = _loss_vector(loss, learner.action_dim)
        played = learner.predict(context)
        total += float(g @ played)
        comparator += np.array([g @ as_point(h(context), learner.action_dim)
                                for h in hypotheses])
        learner.update(loss)
    return total - learner.gamma * float(comparator.min())


def learner_from_config(config: dict, set_: DecisionSet, feature_dim: int) -> WeakLearner:
    """Build a weak learner from a plain config record.

    kind in {stump, ridge, mlp, uniform, synthetic_oracle}; synthetic_oracle
    additionally needs a 'hypotheses' entry holding callables, so it is only
    constructible programmatically.
    """
    if "kind" not in config:
        raise ConfigError("learner config needs a 'kind' field")
    kind = config["kind"]
    gamma = float(config.get("gamma", 1.0))
    if kind == "uniform":
        return UniformBaseline(set_, gamma)
    anchor = config.get("anchor", "self")
    if kind == "stump":
        return DecisionStump(feature_dim, set_, gamma,
                             bins=int(config.get("bins", 16)),
                             warmup=int(config.get("warmup", 50)),
                             leaf_mode=config.get("leaf_mode", "mean"),
                             anchor=anchor)
    if kind == "ridge":
        return OnlineRidge(feature_dim, set_, gamma,
                           step=float(config.get("step", 0.01)),
                           l2=float(config.get("l2", 1e-4)),
                           power=float(config.get("power", 0.25)),
                           anchor=anchor)
    if kind == "mlp":
        return TinyMlp(feature_dim, set_, gamma,
                       step=float(config.get("step", 0.01)),
                       hidden=int(config.get("hidden", 1)),
                       seed=int(config.get("seed", 0)),
                       power=float(config.get("power", 0.25)),
                       anchor=anchor)
    if kind == "synthetic_oracle":
        if "hypotheses" not in config:
            raise ConfigError("synthetic_oracle needs a 'hypotheses' entry")
        return ScaledLeaderOracle(config["hypotheses"], gamma, set_,
                                  mode=config.get("mode", "ftl"),
                                  scale=float(config.get("scale", 1.0)))
    raise ConfigError(f"unknown learner kind '{kind}'")
