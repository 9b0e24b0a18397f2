"""Full-information online boosting over N weak learners.

Each round, the booster mixes the (1/gamma)-rescaled weak-learner actions
stagewise with step sizes eta_i = min(2/i, 1), plays the projection of the
final stage point, and after observing the loss feeds every learner the
gradient of the smoothed out-of-set extension at that learner's incoming
stage point. All internal arithmetic happens in recentered coordinates;
the public API accepts and returns original coordinates.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ProtocolError
from .extension import DEFAULT_BUDGET, DEFAULT_TOL, ExtendedLoss, default_delta
from .geometry import DecisionSet, Simplex, as_point
from .losses import ConvexLoss, LinearLoss, ShiftedLoss
from .weak import learner_from_config


@dataclass
class BoosterConfig:
    """Knobs for one boosting run.

    ``lipschitz`` is the gradient bound G over the working region (the
    recentered set scaled by 1/gamma); it seeds the default smoothing
    radius and the default distance-penalty weight kappa = G. It may be
    omitted only when both delta and kappa are given explicitly.
    """

    n_learners: int
    gamma: float
    lipschitz: float | None = None
    delta: float | None = None
    kappa: float | None = None
    delta_rule: str = "balanced"
    eta_rule: str = "two_over_i"
    x0_rule: str = "centroid"
    prox_budget: int = DEFAULT_BUDGET
    prox_tol: float = DEFAULT_TOL

    def __post_init__(self):
        if self.n_learners < 1:
            raise ConfigError("n_learners must be >= 1")
        if not 0.0 < self.gamma <= 1.0:
            raise ConfigError("gamma must be in (0, 1]")
        if self.delta is not None and self.delta <= 0:
            raise ConfigError("delta must be positive")
        if self.kappa is not None and self.kappa < 0:
            raise ConfigError("kappa must be nonnegative")
        if self.lipschitz is not None and self.lipschitz <= 0:
            raise ConfigError("lipschitz must be positive")

    def etas(self) -> np.ndarray:
        if self.eta_rule == "two_over_i":
            return np.array([min(2.0 / i, 1.0)
                             for i in range(1, self.n_learners + 1)])
        if self.eta_rule == "harmonic":
            return np.array([1.0 / i for i in range(1, self.n_learners + 1)])
        raise ConfigError(f"unknown eta rule '{self.eta_rule}'")


@dataclass
class RoundTrajectory:
    """Stage points x^0..x^N of one round, kept between predict and update."""

    round_index: int
    context: np.ndarray
    stages: np.ndarray          # (N+1, d), recentered coordinates
    learner_plays: np.ndarray   # (N, d), recentered coordinates
    played_centered: np.ndarray
    played: np.ndarray          # original coordinates


@dataclass
class RoundDiagnostics:
    round_index: int
    context_hash: str
    played: np.ndarray
    loss_value: float
    prox_residual: float
    prox_flagged: bool
    grad_norms: np.ndarray


def _context_hash(context: np.ndarray) -> str:
    return hashlib.sha1(np.ascontiguousarray(context).tobytes()).hexdigest()[:16]


class OnlineBooster:
    """Predict-then-update boosting over one loss stream.

    One instance is a single logical stream: predict/update must alternate
    and are not reentrant. Distinct instances are independent; within an
    update the learner updates share no mutable state, so their result does
    not depend on execution order.
    """

    def __init__(self, set_: DecisionSet, learner_factory, config: BoosterConfig):
        self.config = config
        self.original_set = set_
        self.set_c, self.offset = set_.recenter()
        self.gamma = config.gamma
        self.n_learners = config.n_learners
        self.etas = config.etas()
        self.learners = [learner_factory(i, self.set_c)
                         for i in range(config.n_learners)]

        g_bound = config.lipschitz
        if config.delta is not None:
            self.delta = config.delta
        else:
            self.delta = default_delta(set_.diameter, config.gamma,
                                       config.n_learners, g_bound,
                                       config.delta_rule)
        if config.kappa is not None:
            self.kappa = config.kappa
        elif g_bound is not None:
            self.kappa = g_bound
        else:
            raise ConfigError("need either kappa or lipschitz to set the "
                              "distance penalty weight")

        if config.x0_rule == "centroid":
            self._x0 = np.zeros(set_.dim)
        else:
            self._x0 = as_point(config.x0_rule, set_.dim) - self.offset

        self.rounds_done = 0
        self._last_traj: RoundTrajectory | None = None
        self._realized_total = 0.0
        self.diagnostics: list[RoundDiagnostics] = []
        self.cumulative_linear_losses = np.zeros(config.n_learners)
        self._history: list[tuple[np.ndarray, ConvexLoss, np.ndarray]] = []

    # -- per-round protocol -------------------------------------------------

    def predict(self, context) -> tuple[np.ndarray, RoundTrajectory]:
        context = as_point(context, name="context")
        n, d = self.n_learners, self.set_c.dim
        stages = np.empty((n + 1, d))
        plays = np.empty((n, d))
        stages[0] = self._x0
        for i in range(n):
            plays[i] = self.learners[i].predict(context)
            eta = self.etas[i]
            stages[i + 1] = (1.0 - eta) * stages[i] + (eta / self.gamma) * plays[i]
        played_c = self.set_c._project(stages[n])
        traj = RoundTrajectory(round_index=self.rounds_done + 1,
                               context=context, stages=stages,
                               learner_plays=plays,
                               played_centered=played_c,
                               played=played_c + self.offset)
        self._last_traj = traj
        return traj.played.copy(), traj

    def update(self, loss: ConvexLoss, trajectory: RoundTrajectory) -> None:
        if trajectory is not self._last_traj:
            raise ProtocolError(
                "update requires the trajectory from the immediately "
                "preceding predict of this round")
        if trajectory.round_index != self.rounds_done + 1:
            raise ProtocolError(
                f"round {trajectory.round_index} was already updated")

        loss_c = (loss if not np.any(self.offset)
                  else ShiftedLoss(loss, self.offset))
        ext = ExtendedLoss(loss_c, self.set_c, self.delta, self.kappa,
                           budget=self.config.prox_budget,
                           tol=self.config.prox_tol)
        grad_norms = np.empty(self.n_learners)
        worst_residual = 0.0
        flagged = False
        for i in range(self.n_learners):
            g, info = ext.grad_with_info(trajectory.stages[i])
            grad_norms[i] = math.sqrt(float(g @ g))
            worst_residual = max(worst_residual, info.residual)
            flagged = flagged or not info.converged
            self.cumulative_linear_losses[i] += float(
                g @ trajectory.learner_plays[i])
            self.learners[i].update(LinearLoss(g))

        realized = loss.value(trajectory.played)
        self._realized_total += realized
        self.diagnostics.append(RoundDiagnostics(
            round_index=trajectory.round_index,
            context_hash=_context_hash(trajectory.context),
            played=trajectory.played.copy(),
            loss_value=realized,
            prox_residual=worst_residual,
            prox_flagged=flagged,
            grad_norms=grad_norms))
        self._history.append((trajectory.context, loss, trajectory.played))
        self.rounds_done += 1
        self._last_traj = None

    # -- reporting ----------------------------------------------------------

    @property
    def realized_loss(self) -> float:
        return self._realized_total

    def regret_report(self, hypotheses=None, action_sequence=None) -> float:
        """Realized cumulative loss minus the best comparator loss.

        ``hypotheses`` compares against the best convex combination of a
        finite class (minimized over the weight simplex); alternatively a
        fixed per-round ``action_sequence`` serves as the comparator.
        """
        if not self._history:
            raise ConfigError("no completed rounds to report on")
        if action_sequence is not None:
            if len(action_sequence) != len(self._history):
                raise ConfigError("action sequence length must match rounds")
            comp = sum(loss.value(as_point(a, self.original_set.dim))
                       for (_, loss, _), a in zip(self._history, action_sequence))
            return self._realized_total - comp
        if not hypotheses:
            raise ConfigError("empty comparator")
        return self._realized_total - self._hull_minimum(hypotheses)

    def _hull_minimum(self, hypotheses) -> float:
        contexts = [c for c, _, _ in self._history]
        losses = [loss for _, loss, _ in self._history]
        actions = np.stack([
            np.stack([as_point(h(c), self.original_set.dim)
                      for h in hypotheses])
            for c in contexts])  # (T, J, d)
        if all(isinstance(loss, LinearLoss) for loss in losses):
            # linear losses: the hull optimum sits at a vertex
            dirs = np.stack([loss.direction for loss in losses])  # (T, d)
            per_hyp = np.einsum("td,tjd->j", dirs, actions)
            return float(per_hyp.min())
        return _simplex_weight_minimum(actions, losses, tol=1e-8)

    def export_transcript(self) -> list[dict]:
        return [{
            "t": diag.round_index,
            "context_hash": diag.context_hash,
            "played": diag.played.tolist(),
            "loss_value": diag.loss_value,
            "prox_residual": diag.prox_residual,
        } for diag in self.diagnostics]

    @classmethod
    def from_config(cls, set_: DecisionSet, config: dict,
                    feature_dim: int) -> "OnlineBooster":
        """Build from a JSON-compatible record:
        {N, gamma, delta?, kappa?, lipschitz?, eta_rule?, x0_rule?,
         learner: {...}, seed?}.
        """
        try:
            n = int(config.get("n_learners", config.get("N")))
            gamma = float(config["gamma"])
            learner_spec = dict(config["learner"])
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"booster config is missing {exc}") from exc
        seed = int(config.get("seed", 0))
        bc = BoosterConfig(
            n_learners=n, gamma=gamma,
            lipschitz=config.get("lipschitz"),
            delta=config.get("delta"), kappa=config.get("kappa"),
            delta_rule=config.get("delta_rule", "balanced"),
            eta_rule=config.get("eta_rule", "two_over_i"),
            x0_rule=config.get("x0_rule", "centroid"))
        learner_spec.setdefault("gamma", gamma)

        def factory(i, recentered):
            spec = dict(learner_spec)
            spec["seed"] = seed * 100003 + i
            return learner_from_config(spec, recentered, feature_dim)

        return cls(set_, factory, bc)


def _simplex_weight_minimum(actions: np.ndarray, losses, tol: float,
                            max_iter: int = 20000) -> float:
    """Projected gradient descent for min over simplex weights w of
    sum_t f_t(sum_j w_j h_j(c_t))."""
    n_hyp = actions.shape[1]
    simplex = Simplex(n_hyp)
    w = np.full(n_hyp, 1.0 / n_hyp)

    def objective(weights):
        mixes = np.tensordot(actions, weights, axes=([1], [0]))
        return sum(loss.value(mix) for loss, mix in zip(losses, mixes))

    def gradient(weights):
        mixes = np.tensordot(actions, weights, axes=([1], [0]))
        out = np.zeros(n_hyp)
        for t, loss in enumerate(losses):
            out += actions[t] @ loss.grad(mixes[t])
        return out

    fw = objective(w)
    step = 1.0
    for _ in range(max_iter):
        g = gradient(w)
        cand, fc = w, fw
        while step > 1e-18:
            cand = simplex.project(w - step * g)
            fc = objective(cand)
            move = cand - w
            if fc <= fw + g @ move + 0.5 / step * float(move @ move) + 1e-15:
                break
            step *= 0.5
        residual = float(np.linalg.norm(cand - w)) / step
        w, fw = cand, fc
        if residual <= tol:
            break
        step = min(step * 1.5, 1e6)
    return float(fw)
