"""Stagewise boosting for stochastic contextual optimization.

Instead of a loss stream, the input is a sampling oracle over i.i.d.
(loss, context) pairs. Each stage wraps the oracle on the fly: a drawn loss
is smoothed and extended around the current ensemble hypothesis and emitted
as a linear loss with the same context; a weak optimizer is then trained on
that lifted distribution and mixed into the ensemble. The result is a
single hypothesis whose actions are projected into the decision set.

Internal arithmetic uses recentered coordinates; weak optimizers therefore
receive contexts plus linear losses in recentered coordinates and must
return hypotheses mapping into the recentered set. The final hypothesis
adds the centroid offset back.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError, StageError
from .extension import ExtendedLoss, default_delta
from .geometry import DecisionSet, as_point
from .losses import ConvexLoss, LinearLoss, ShiftedLoss


class SampleOracle:
    """Draws i.i.d. (ConvexLoss, context) pairs."""

    def draw(self):
        raise NotImplementedError

    def support(self):
        """[(loss, context, probability)] for finite distributions, else None."""
        return None


class FiniteSupportOracle(SampleOracle):
    def __init__(self, atoms, probs=None, seed: int = 0):
        if not atoms:
            raise ConfigError("need at least one atom")
        self.atoms = [(loss, as_point(c, name="context")) for loss, c in atoms]
        if probs is None:
            probs = np.full(len(atoms), 1.0 / len(atoms))
        self.probs = np.asarray(probs, dtype=np.float64)
        if self.probs.shape[0] != len(atoms) or np.any(self.probs < 0) \
                or abs(self.probs.sum() - 1.0) > 1e-12:
            raise ConfigError("probs must be a distribution over the atoms")
        self.seed = seed
        self._rng = np.random.default_rng(seed)

    def draw(self):
        k = int(self._rng.choice(len(self.atoms), p=self.probs))
        return self.atoms[k]

    def support(self):
        return [(loss, c, float(p))
                for (loss, c), p in zip(self.atoms, self.probs)]


class CallableSampleOracle(SampleOracle):
    def __init__(self, draw_fn):
        self._draw_fn = draw_fn

    def draw(self):
        return self._draw_fn()


class _StageOracle(SampleOracle):
    """Lift a base oracle to the linear losses of one boosting stage."""

    def __init__(self, base: SampleOracle, prev_hypothesis, set_c, offset,
                 delta, kappa, budget, tol):
        self.base = base
        self.prev = prev_hypothesis
        self.set_c = set_c
        self.offset = offset
        self.delta = delta
        self.kappa = kappa
        self.budget = budget
        self.tol = tol

    def _lift(self, loss: ConvexLoss, context):
        loss_c = loss if not np.any(self.offset) else ShiftedLoss(loss, self.offset)
        ext = ExtendedLoss(loss_c, self.set_c, self.delta, self.kappa,
                           budget=self.budget, tol=self.tol)
        g = ext.grad(self.prev(context))
        return LinearLoss(g), context

    def draw(self):
        loss, context = self.base.draw()
        return self._lift(loss, context)

    def support(self):
        base_support = self.base.support()
        if base_support is None:
            return None
        return [(*self._lift(loss, c), p) for loss, c, p in base_support]


class ConstantHypothesis:
    def __init__(self, point, name: str = "constant"):
        self.point = as_point(point)
        self.name = name

    def __call__(self, context) -> np.ndarray:
        return self.point.copy()


class ScaledHypothesis:
    """gamma * base(context); feasible because the recentered set contains 0."""

    def __init__(self, base, factor: float, name: str | None = None):
        self.base = base
        self.factor = float(factor)
        self.name = name or f"{self.factor:g}*{getattr(base, 'name', 'hypothesis')}"

    def __call__(self, context) -> np.ndarray:
        return self.factor * as_point(self.base(context))


class BoostedHypothesis:
    """Affine mixture of stage hypotheses followed by projection.

    The mixture record is exact: apply() evaluates every component and
    projects the weighted sum, rather than approximating the composition.
    """

    def __init__(self, components, set_c: DecisionSet, offset):
        self.components = list(components)  # [(coefficient, hypothesis)]
        self.set_c = set_c
        self.offset = as_point(offset, set_c.dim)

    def raw(self, context) -> np.ndarray:
        """Pre-projection mixture point in recentered coordinates."""
        out = np.zeros(self.set_c.dim)
        for coef, hyp in self.components:
            out += coef * as_point(hyp(context), self.set_c.dim)
        return out

    def __call__(self, context) -> np.ndarray:
        return self.set_c.project(self.raw(context)) + self.offset

    def to_dict(self) -> dict:
        return {
            "offset": self.offset.tolist(),
            "stages": [{"coef": float(coef),
                        "id": getattr(hyp, "name", f"stage{i}")}
                       for i, (coef, hyp) in enumerate(self.components)],
        }


class ErmWeakOptimizer:
    """Reference weak optimizer: empirical risk minimization over a finite
    class, output scaled by gamma.

    With ``exact=True`` and a finite-support oracle, expectations are
    enumerated instead of sampled, so the optimizer's slack is zero.
    """

    def __init__(self, hypotheses, gamma: float, exact: bool = False):
        if not hypotheses:
            raise ConfigError("need at least one hypothesis")
        if not 0.0 < gamma <= 1.0:
            raise ConfigError("gamma must be in (0, 1]")
        self.hypotheses = list(hypotheses)
        self.gamma = float(gamma)
        self.exact = exact

    def solve(self, oracle: SampleOracle, budget: int):
        totals = np.zeros(len(self.hypotheses))
        if self.exact:
            support = oracle.support()
            if support is None:
                raise ConfigError("exact ERM needs a finite-support oracle")
            for loss, context, p in support:
                totals += p * np.array([loss.value(h(context))
                                        for h in self.hypotheses])
        else:
            if budget < 1:
                raise ConfigError("sample budget must be >= 1")
            for _ in range(budget):
                loss, context = oracle.draw()
                totals += np.array([loss.value(h(context))
                                    for h in self.hypotheses])
        best = int(np.argmin(totals))
        base = self.hypotheses[best]
        name = f"erm[{best}]"
        return ScaledHypothesis(base, self.gamma, name=name)

    def epsilon(self, budget: int, scale: float = 1.0) -> float:
        """Optimization slack as a function of the sample budget."""
        if self.exact:
            return 0.0
        return float(scale * np.sqrt(2.0 * np.log(len(self.hypotheses)) / budget))


def _etas(n_stages: int, rule: str) -> np.ndarray:
    if rule == "two_over_i":
        return np.array([min(2.0 / i, 1.0) for i in range(1, n_stages + 1)])
    raise ConfigError(f"unknown eta rule '{rule}'")


def fit_boosted_hypothesis(oracle: SampleOracle, weak_optimizer, set_: DecisionSet,
                           n_stages: int, gamma: float, stage_budget: int,
                           delta: float | None = None, kappa: float | None = None,
                           lipschitz: float | None = None,
                           delta_rule: str = "balanced",
                           eta_rule: str = "two_over_i",
                           initial_hypothesis=None,
                           prox_budget: int = 200, prox_tol: float = 1e-8
                           ) -> BoostedHypothesis:
    """Run N boosting stages against a sampling oracle and return the
    projected mixture hypothesis. Total sample cost is n_stages * stage_budget
    (sampled weak optimizers consume a fresh budget per stage)."""
    if n_stages < 1:
        raise ConfigError("n_stages must be >= 1")
    if not 0.0 < gamma <= 1.0:
        raise ConfigError("gamma must be in (0, 1]")
    set_c, offset = set_.recenter()
    if delta is None:
        delta = default_delta(set_.diameter, gamma, n_stages, lipschitz, delta_rule)
    if kappa is None:
        if lipschitz is None:
            raise ConfigError("need either kappa or lipschitz")
        kappa = lipschitz

    if initial_hypothesis is None:
        initial_hypothesis = ConstantHypothesis(np.zeros(set_c.dim), name="centroid")
    components = [(1.0, initial_hypothesis)]
    etas = _etas(n_stages, eta_rule)

    def current(context, comps=None):
        comps = components if comps is None else comps
        out = np.zeros(set_c.dim)
        for coef, hyp in comps:
            out += coef * as_point(hyp(context), set_c.dim)
        return out

    for i in range(n_stages):
        prev_comps = list(components)
        stage_oracle = _StageOracle(
            oracle, lambda c, pc=prev_comps: current(c, pc),
            set_c, offset, delta, kappa, prox_budget, prox_tol)
        try:
            learned = weak_optimizer.solve(stage_oracle, stage_budget)
        except Exception as exc:
            raise StageError(i + 1, str(exc)) from exc
        eta = etas[i]
        components = [((1.0 - eta) * coef, hyp) for coef, hyp in components]
        components.append((eta / gamma, learned))
        components = [(coef, hyp) for coef, hyp in components if coef != 0.0]

    return BoostedHypothesis(components, set_c, offset)


def fit_from_config(oracle: SampleOracle, weak_optimizer, set_: DecisionSet,
                    config: dict) -> BoostedHypothesis:
    """Drive a fit from a JSON-compatible record:
    {N, gamma, delta?, kappa?, lipschitz?, stage_budget, seed?}. The weak
    optimizer itself holds callables, so it is passed programmatically."""
    try:
        n = int(config.get("n_stages", config.get("N")))
        gamma = float(config["gamma"])
        budget = int(config.get("stage_budget", config.get("m", 1)))
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"fit config is missing {exc}") from exc
    return fit_boosted_hypothesis(
        oracle, weak_optimizer, set_, n_stages=n, gamma=gamma,
        stage_budget=budget, delta=config.get("delta"),
        kappa=config.get("kappa"), lipschitz=config.get("lipschitz"),
        delta_rule=config.get("delta_rule", "balanced"),
        eta_rule=config.get("eta_rule", "two_over_i"))


def population_loss(hypothesis, oracle: SampleOracle, n_samples: int):
    """Monte-Carlo estimate of the expected loss of a hypothesis.

    Returns (mean, standard error).
    """
    if n_samples < 2:
        raise ConfigError("n_samples must be >= 2")
    vals = np.empty(n_samples)
    for k in range(n_samples):
        loss, context = oracle.draw()
        vals[k] = loss.value(hypothesis(context))
    return float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(n_samples))


def exact_population_loss(hypothesis, oracle: SampleOracle) -> float:
    """Exact expected loss for finite-support oracles."""
    support = oracle.support()
    if support is None:
        raise ConfigError("exact population loss needs a finite-support oracle")
    return float(sum(p * loss.value(hypothesis(context))
                     for loss, context, p in support))
