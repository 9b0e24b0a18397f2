"""Streaming regression experiments: standalone weak learners versus boosted
ensembles on the same shuffled stream, with normalized-loss tables.

Protocol per run: shuffle rows with a run-derived seed, stream examples one
at a time (predict on the features, then reveal the target), score with the
square loss over the decision interval spanned by the standardized target
range, and update. Every predictor consumes the identical stream; the
standalone learner's mean cumulative loss normalizes the table to 1.000.
All rounds count toward cumulative loss, including any warm-up phase.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from ..booster import BoosterConfig, OnlineBooster
from ..errors import ConfigError, DataError
from ..extension import default_delta
from ..geometry import Interval
from ..losses import LinearLoss, QuadraticLoss
from ..weak import learner_from_config
from .data import load_dataset

LEARNER_LABELS = {
    "stump": "Decision Stumps",
    "ridge": "Ridge Regression",
    "mlp": "Tiny MLP",
}


@dataclass
class ExperimentConfig:
    dataset: str
    learners: tuple = ("stump",)
    n_values: tuple = (2, 3, 4, 5)
    gamma: float = 0.1
    step: float = 0.01
    runs: int = 20
    seed: int = 0
    target_col: str | int | None = None
    data_dir: str | None = None
    check_streams: bool = False
    learner_params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.runs < 1:
            raise ConfigError("runs must be >= 1")
        if not 0.0 < self.gamma <= 1.0:
            raise ConfigError("gamma must be in (0, 1]")
        if self.step <= 0:
            raise ConfigError("step must be positive")
        bad = [k for k in self.learners if k not in LEARNER_LABELS]
        if bad:
            raise ConfigError(f"unknown learner kinds: {bad}")
        if any(n < 1 for n in self.n_values):
            raise ConfigError("ensemble sizes must be >= 1")


def square_loss_gradient_bound(interval: Interval, gamma: float,
                               n_learners: int) -> float:
    """Gradient bound for square losses with targets in the interval,
    taken over the recentered interval scaled by 1/gamma and inflated by
    the smoothing slack (ensemble stage points can fall outside the set)."""
    half = 0.5 * interval.diameter
    reach0 = half * (1.0 + 1.0 / gamma)
    g0 = 2.0 * reach0
    delta0 = default_delta(interval.diameter, gamma, n_learners, g0, "balanced")
    return 2.0 * (reach0 + delta0 * g0)


def _learner_spec(kind, cfg: ExperimentConfig, seed: int) -> dict:
    spec = {"kind": kind, "seed": seed, "step": cfg.step}
    spec.update(cfg.learner_params.get(kind, {}))
    return spec


class _Runner:
    """Shared bookkeeping: cumulative loss and an optional stream hash."""

    def __init__(self, check_streams: bool):
        self.cum_loss = 0.0
        self._hasher = hashlib.sha256() if check_streams else None

    def _observe(self, context, target):
        if self._hasher is not None:
            self._hasher.update(np.ascontiguousarray(context).tobytes())
            self._hasher.update(np.float64(target).tobytes())

    @property
    def stream_hash(self):
        return self._hasher.hexdigest() if self._hasher is not None else None


class _StandaloneRunner(_Runner):
    def __init__(self, kind, interval, feature_dim, cfg, seed, check_streams):
        super().__init__(check_streams)
        self.set_c, offset = interval.recenter()
        self.offset = float(offset[0])
        self.learner = learner_from_config(
            _learner_spec(kind, cfg, seed), self.set_c, feature_dim)

    def round(self, context, target):
        self._observe(context, target)
        pred = float(self.learner.predict(context)[0]) + self.offset
        err = pred - target
        self.cum_loss += err * err
        self.learner.update(LinearLoss([2.0 * err]))


class _BoostedRunner(_Runner):
    def __init__(self, kind, interval, feature_dim, n_learners, cfg, seed,
                 check_streams):
        super().__init__(check_streams)
        g_bound = square_loss_gradient_bound(interval, cfg.gamma, n_learners)
        bcfg = BoosterConfig(n_learners=n_learners, gamma=cfg.gamma,
                             lipschitz=g_bound)

        def factory(i, recentered):
            spec = _learner_spec(kind, cfg, seed * 100003 + i)
            spec["gamma"] = cfg.gamma
            # the first slot's incoming stage point is exactly the centroid
            spec["anchor"] = "zero" if i == 0 else "self"
            return learner_from_config(spec, recentered, feature_dim)

        self.booster = OnlineBooster(interval, factory, bcfg)

    def round(self, context, target):
        self._observe(context, target)
        pred, traj = self.booster.predict(context)
        err = float(pred[0]) - target
        self.cum_loss += err * err
        self.booster.update(QuadraticLoss([target]), traj)


@dataclass
class ExperimentResult:
    config: dict
    rows: list
    stream_hashes: list


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    ds = load_dataset(cfg.dataset, data_dir=cfg.data_dir,
                      target_col=cfg.target_col)
    if ds.n_rows < 10:
        raise DataError(f"dataset has only {ds.n_rows} rows; need at least 10")
    lo, hi = ds.target_range
    if hi <= lo:
        raise DataError("target range is degenerate")
    interval = Interval(lo, hi)

    n_values = tuple(cfg.n_values)
    # cum[kind][label][run]; labels are "wl" and the ensemble sizes
    cum = {kind: {label: np.zeros(cfg.runs) for label in ("wl", *n_values)}
           for kind in cfg.learners}
    stream_hashes = []

    for r in range(cfg.runs):
        run_seed = cfg.seed ^ r
        rng = np.random.default_rng(run_seed)
        perm = rng.permutation(ds.n_rows)
        stream_x = ds.features[perm]
        stream_y = ds.targets[perm]

        runners = {}
        for kind in cfg.learners:
            runners[(kind, "wl")] = _StandaloneRunner(
                kind, interval, ds.n_features, cfg,
                seed=run_seed * 100003 + 999983,
                check_streams=cfg.check_streams)
            for n in n_values:
                runners[(kind, n)] = _BoostedRunner(
                    kind, interval, ds.n_features, n, cfg,
                    seed=run_seed * 1009 + n,
                    check_streams=cfg.check_streams)

        for t in range(ds.n_rows):
            c, y = stream_x[t], float(stream_y[t])
            for runner in runners.values():
                runner.round(c, y)

        for (kind, label), runner in runners.items():
            cum[kind][label][r] = runner.cum_loss
        if cfg.check_streams:
            stream_hashes.append({f"{kind}/{label}": runner.stream_hash
                                  for (kind, label), runner in runners.items()})

    rows = []
    for kind in cfg.learners:
        wl_mean = float(cum[kind]["wl"].mean())
        normalized = {n: float(cum[kind][n].mean()) / wl_mean for n in n_values}
        per_run_ratio = {n: (cum[kind][n] / cum[kind]["wl"]).tolist()
                         for n in n_values}
        improvement = (1.0 - min(normalized.values())) * 100.0
        rows.append({
            "learner": kind,
            "wl": 1.0,
            "normalized": {f"N={n}": normalized[n] for n in n_values},
            "improvement": improvement,
            "mean_cumulative": {"wl": wl_mean,
                                **{f"N={n}": float(cum[kind][n].mean())
                                   for n in n_values}},
            "per_run_ratio": {f"N={n}": per_run_ratio[n] for n in n_values},
        })

    config_echo = {
        "dataset": str(cfg.dataset), "learners": list(cfg.learners),
        "n_values": list(n_values), "gamma": cfg.gamma, "step": cfg.step,
        "runs": cfg.runs, "seed": cfg.seed,
    }
    return ExperimentResult(config=config_echo, rows=rows,
                            stream_hashes=stream_hashes)


# -- table emission ----------------------------------------------------------

def _n_labels(result: ExperimentResult):
    return [f"N={n}" for n in result.config["n_values"]]


def emit_table(result: ExperimentResult, fmt: str = "markdown") -> str:
    if not result.rows:
        raise ConfigError("no results to emit")
    if fmt == "markdown":
        return _emit_markdown(result)
    if fmt == "csv":
        return _emit_csv(result)
    if fmt == "json":
        return _emit_json(result)
    raise ConfigError(f"unknown output format '{fmt}'")


def _emit_markdown(result: ExperimentResult) -> str:
    labels = _n_labels(result)
    header = "| Learner | WL | " + " | ".join(labels) + " | Improvement |"
    rule = "|" + "---|" * (len(labels) + 3)
    lines = [header, rule]
    for row in result.rows:
        best = min(row["normalized"].values())
        cells = [LEARNER_LABELS.get(row["learner"], row["learner"]), "1.000"]
        for lab in labels:
            v = row["normalized"][lab]
            text = f"{v:.3f}"
            if v == best:
                text = f"**{text}**"
            cells.append(text)
        cells.append(f"{row['improvement']:.1f}%")
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def _emit_csv(result: ExperimentResult) -> str:
    labels = _n_labels(result)
    lines = ["Learner,WL," + ",".join(labels) + ",Improvement"]
    for row in result.rows:
        cells = [row["learner"], "1.000"]
        cells += [f"{row['normalized'][lab]:.3f}" for lab in labels]
        cells.append(f"{row['improvement']:.1f}")
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _emit_json(result: ExperimentResult) -> str:
    payload = {
        "config": result.config,
        "rows": [{
            "learner": row["learner"],
            "wl": row["wl"],
            "normalized": row["normalized"],
            "improvement": row["improvement"],
        } for row in result.rows],
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def parse_table_csv(text: str):
    """Read an emitted CSV table back into row dicts (the inverse of
    emit_table(..., "csv") at printed precision)."""
    lines = [ln for ln in text.strip().splitlines() if ln]
    header = lines[0].split(",")
    labels = header[2:-1]
    rows = []
    for ln in lines[1:]:
        cells = ln.split(",")
        rows.append({
            "learner": cells[0],
            "wl": float(cells[1]),
            "normalized": {lab: float(v) for lab, v in zip(labels, cells[2:-1])},
            "improvement": float(cells[-1]),
        })
    return rows
