"""Bandit linear optimization by randomized exploration over a boosting core.

Only the incurred scalar loss is observed. With probability ``explore_rate``
a round plays a uniformly random coordinate basis vector and feeds the inner
booster the sparse one-point estimate (d / explore_rate) * observed at that
coordinate; otherwise the inner booster's prediction is played and the zero
vector is fed back, so inner learners advance their round counters either
way. Over the full outcome space the estimate's expectation equals the true
loss vector exactly.

The decision set must contain the unit simplex; this is verified
constructively at construction by projecting every basis vector.
"""

from __future__ import annotations

import logging

import numpy as np

from .booster import BoosterConfig, OnlineBooster, RoundTrajectory
from .errors import ConfigError, NonFiniteInput, ProtocolError
from .geometry import DecisionSet, as_point
from .losses import LinearLoss
from .weak import learner_from_config

logger = logging.getLogger(__name__)

SIMPLEX_CONTAINMENT_TOL = 1e-9


def default_explore_rate(d: int, horizon: int, n_learners: int, gamma: float,
                         weak_regret_bound: float = 0.0) -> float:
    """Exploration probability balancing estimate quality against explore cost.

    Minimizes A/eta + eta*B over (0, 1] for A = 4 d T / (gamma sqrt(N)) +
    2 d R_W / gamma and B = T, i.e. min(1, sqrt(A / T)).
    """
    if d < 1 or horizon < 1 or n_learners < 1:
        raise ConfigError("d, horizon, and n_learners must be positive")
    if not 0.0 < gamma <= 1.0:
        raise ConfigError("gamma must be in (0, 1]")
    if weak_regret_bound < 0:
        raise ConfigError("weak_regret_bound must be nonnegative")
    a = 4.0 * d * horizon / (gamma * np.sqrt(n_learners)) \
        + 2.0 * d * weak_regret_bound / gamma
    return min(1.0, float(np.sqrt(a / horizon)))


def verify_simplex_containment(set_: DecisionSet,
                               tol: float = SIMPLEX_CONTAINMENT_TOL) -> None:
    """Require every coordinate basis vector to project to itself."""
    for i in range(set_.dim):
        e = np.zeros(set_.dim)
        e[i] = 1.0
        if set_.distance(e) > tol:
            raise ConfigError(
                f"decision set does not contain the unit simplex: basis "
                f"vector {i} is at distance {set_.distance(e):.3e}")


class BanditBooster:
    """Step/feedback wrapper around an ``OnlineBooster`` for linear bandits."""

    def __init__(self, set_: DecisionSet, learner_factory,
                 inner_config: BoosterConfig, explore_rate="auto",
                 horizon: int | None = None, seed: int = 0,
                 weak_regret_bound: float = 0.0):
        verify_simplex_containment(set_)
        self.set_ = set_
        self.dim = set_.dim
        self.inner = OnlineBooster(set_, learner_factory, inner_config)
        if explore_rate == "auto":
            if horizon is None:
                raise ConfigError("auto explore rate needs a horizon")
            explore_rate = default_explore_rate(
                self.dim, horizon, inner_config.n_learners,
                inner_config.gamma, weak_regret_bound)
        explore_rate = float(explore_rate)
        if not 0.0 <= explore_rate <= 1.0:
            raise ConfigError("explore_rate must lie in [0, 1]")
        self.explore_rate = explore_rate

        streams = np.random.SeedSequence(seed).spawn(3)
        self._bernoulli_rng = np.random.default_rng(streams[0])
        self._coordinate_rng = np.random.default_rng(streams[1])
        self._arm_rng = np.random.default_rng(streams[2])

        self.rounds_done = 0
        self._pending: tuple[bool, int | None, RoundTrajectory] | None = None
        self.round_log: list[dict] = []

    def step(self, context) -> np.ndarray:
        """Play a point: a random basis vector when exploring, else the inner
        boosted prediction. Call ``feedback`` with the observed loss next."""
        if self._pending is not None:
            raise ProtocolError("step called twice without intervening feedback")
        context = as_point(context, name="context")
        explored = bool(self._bernoulli_rng.random() < self.explore_rate)
        coordinate = (int(self._coordinate_rng.integers(self.dim))
                      if explored else None)
        prediction, traj = self.inner.predict(context)
        if explored:
            played = np.zeros(self.dim)
            played[coordinate] = 1.0
        else:
            played = prediction
        self._pending = (explored, coordinate, traj)
        return played

    def feedback(self, observed_loss: float) -> None:
        if self._pending is None:
            raise ProtocolError("feedback without a pending step")
        observed_loss = float(observed_loss)
        if not np.isfinite(observed_loss):
            raise NonFiniteInput("observed loss is not finite")
        explored, coordinate, traj = self._pending
        estimate = np.zeros(self.dim)
        if explored:
            estimate[coordinate] = (self.dim / self.explore_rate) * observed_loss
        self.inner.update(LinearLoss(estimate), traj)
        self.round_log.append({
            "t": self.rounds_done + 1,
            "explored": explored,
            "coordinate": coordinate,
            "observed": observed_loss,
            "estimate_nonzeros": int(np.count_nonzero(estimate)),
        })
        self.rounds_done += 1
        self._pending = None

    def sample_arm(self, context) -> tuple[int, np.ndarray]:
        """Multi-armed specialization: sample an arm from the played point,
        which lies on the probability simplex. Returns (arm, played point)."""
        point = self.step(context)
        probs = point
        if np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-9:
            logger.info("renormalizing arm distribution (sum=%.3e, min=%.3e)",
                        probs.sum(), probs.min())
            probs = np.maximum(probs, 0.0)
            total = probs.sum()
            probs = probs / total if total > 0 else np.full(self.dim, 1.0 / self.dim)
        arm = int(self._arm_rng.choice(self.dim, p=probs))
        return arm, point

    @classmethod
    def from_config(cls, set_: DecisionSet, config: dict,
                    feature_dim: int) -> "BanditBooster":
        """Build from a JSON-compatible record extending the booster config
        with {explore_rate or "auto", horizon (needed for auto), seed,
        weak_regret_bound?}."""
        inner_keys = dict(config)
        explore_rate = inner_keys.pop("explore_rate", "auto")
        horizon = inner_keys.pop("horizon", None)
        seed = int(inner_keys.pop("seed", 0))
        weak_regret_bound = float(inner_keys.pop("weak_regret_bound", 0.0))
        try:
            n = int(inner_keys.get("n_learners", inner_keys.get("N")))
            gamma = float(inner_keys["gamma"])
            learner_spec = dict(inner_keys["learner"])
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"bandit config is missing {exc}") from exc
        inner_config = BoosterConfig(
            n_learners=n, gamma=gamma,
            lipschitz=inner_keys.get("lipschitz"),
            delta=inner_keys.get("delta"), kappa=inner_keys.get("kappa"),
            delta_rule=inner_keys.get("delta_rule", "balanced"),
            eta_rule=inner_keys.get("eta_rule", "two_over_i"),
            x0_rule=inner_keys.get("x0_rule", "centroid"))
        learner_spec.setdefault("gamma", gamma)

        def factory(i, recentered):
            spec = dict(learner_spec)
            spec["seed"] = seed * 100003 + i
            return learner_from_config(spec, recentered, feature_dim)

        return cls(set_, factory, inner_config, explore_rate=explore_rate,
                   horizon=horizon, seed=seed,
                   weak_regret_bound=weak_regret_bound)
