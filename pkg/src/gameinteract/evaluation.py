"""Benchmark protocols on the synthetic datasets.

* partition accuracy of the estimator against two baselines,
* error of the estimated significance against the enumeration oracle as
  training proceeds,
* instability of repeated estimates across sampling budgets,
* convergence traces of the merge probabilities.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .estimator import (
    BoundarySample,
    EstimatorConfig,
    derive_seed,
    estimate_T,
    instability_of,
    make_rng,
    optimize,
    soft_value,
)
from .exact import exact_T, pairwise_interaction
from .exceptions import DegenerateError, DomainError
from .partitions import Partition
from .synthetic import SyntheticModel, ground_truth_check

logger = logging.getLogger(__name__)

METHODS = ("ours", "baseline1", "baseline2")
PAIR_TOL = 1e-9
BASELINE1_DRAWS = 10


@dataclass
class AccuracyReport:
    method: str
    dataset: str
    rate: float
    n_models: int
    n_operations: int
    seed: int
    per_model: list[float] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "dataset": self.dataset,
            "rate": self.rate,
            "n_models": self.n_models,
            "n_operations": self.n_operations,
            "seed": self.seed,
        }


def partition_ours(model: SyntheticModel, config: EstimatorConfig) -> Partition:
    res = optimize(model.game, model.A, replace(config, direction="max"))
    return BoundarySample(res.dist.harden()).partition(model.A)


def partition_baseline1(model: SyntheticModel, rng: np.random.Generator) -> Partition:
    """Uniformly random boundary bits."""
    g = rng.integers(0, 2, size=len(model.A) - 1)
    return Partition.from_boundary(model.A, g.tolist())



def partition_baseline2(model: SyntheticModel) -> Partition:
    """Merge neighbours whose pairwise interaction is positive; chains merge transitively."""
    A = model.A
    g = [int(pairwise_interaction(model.game, A[t], A[t + 1]) > PAIR_TOL) for t in range(len(A) - 1)]
    return Partition.from_boundary(A, g)


def _model_outcomes(model: SyntheticModel, k: int, method: str, config: EstimatorConfig) -> list[list[bool]]:
    if method == "ours":
        parts = [partition_ours(model, replace(config, seed=derive_seed(config.seed, 10, k)))]
    elif method == "baseline1":
        # Several random partitions per model; the rate averages over them.
        rng = make_rng(config.seed, 11, k)
        parts = [partition_baseline1(model, rng) for _ in range(BASELINE1_DRAWS)]
    else:
        parts = [partition_baseline2(model)]
    return [[ok for _, ok in ground_truth_check(model, part)] for part in parts]


def eval_method_accuracy(dataset: list[SyntheticModel], method: str,
                         config: EstimatorConfig | None = None, n_jobs: int = 1) -> AccuracyReport:
    """Share of correctly allocated labeled operations, pooled over the dataset.

    Models are seeded by their position, and per-model results are reduced in
    dataset order, so the rate does not depend on ``n_jobs``.
    """
    if method not in METHODS:
        raise DomainError(f"unknown method {method!r}; expected one of {METHODS}")
    if not dataset:
        raise DomainError("dataset is empty")
    config = config or EstimatorConfig()
    if n_jobs == 1:
        outcomes = [_model_outcomes(m, k, method, config) for k, m in enumerate(dataset)]
    else:
        from joblib import Parallel, delayed

        outcomes = Parallel(n_jobs=n_jobs)(
            delayed(_model_outcomes)(m, k, method, config) for k, m in enumerate(dataset))
    correct = total = 0.0
    per_model = []
    for res in outcomes:
        flat = [ok for r in res for ok in r]
        correct += sum(flat) / len(res)
        total += len(flat) // len(res)
        per_model.append(float(np.mean(flat)) if flat else float("nan"))
    family = dataset[0].family
    rate = correct / total if total else float("nan")
    logger.info("%s on %s: %.4f over %d operations", method, family, rate, total)
    return AccuracyReport(method, family, rate, len(dataset), int(total), config.seed, per_model)


def accuracy_table(datasets: dict[str, list[SyntheticModel]], methods=METHODS,
                   config: EstimatorConfig | None = None, n_jobs: int = 1) -> dict[str, dict[str, AccuracyReport]]:
    return {m: {name: eval_method_accuracy(ds, m, config, n_jobs) for name, ds in datasets.items()}
            for m in methods}


@dataclass
class ErrorCurve:
    epochs: list[int]
    errors: np.ndarray
    T_truth: np.ndarray
    T_hat: np.ndarray
    game_ids: list

    @property
    def relative_errors(self) -> np.ndarray:
        return self.errors / np.maximum(np.abs(self.T_truth), 1.0)[:, None]

    def rows(self):
        """Long format ``game_id, epoch, abs_error, rel_error``."""
        rel = self.relative_errors
        for gi, gid in enumerate(self.game_ids):
            for ci, e in enumerate(self.epochs):
                yield gid, e, float(self.errors[gi, ci]), float(rel[gi, ci])


def error_vs_exact(games, config: EstimatorConfig, checkpoints=(0, 10, 25, 50, 100)) -> ErrorCurve:
    """|T_truth - T_hat| at each checkpoint epoch, T_truth by enumeration.

    ``games`` holds (game, span) pairs or SyntheticModels. One max and one min
    run of ``max(checkpoints)`` epochs are made per game; the objective at each
    checkpoint is re-estimated from that epoch's probabilities.
    """
    epochs = sorted(set(int(c) for c in checkpoints))
    if epochs[0] < 0 or any(b <= a for a, b in zip(epochs, epochs[1:])):
        raise DomainError("checkpoints must be non-negative and distinct")
    cfg = replace(config, n_epochs=max(epochs[-1], 1))
    items = [(g.game, g.A) if isinstance(g, SyntheticModel) else g for g in games]
    truth = np.empty(len(items))
    hat = np.empty((len(items), len(epochs)))
    for gi, (game, span) in enumerate(items):
        truth[gi] = exact_T(game, span, semantics=cfg.semantics, contiguous_only=True).T
        seed = derive_seed(cfg.seed, 20, gi)
        hi = optimize(game, span, replace(cfg, direction="max", seed=derive_seed(seed, 0)))
        lo = optimize(game, span, replace(cfg, direction="min", seed=derive_seed(seed, 1)))
        for ci, e in enumerate(epochs):
            vmax = soft_value(game, span, hi.trace.p[e], cfg, make_rng(seed, 2, e))
            vmin = soft_value(game, span, lo.trace.p[e], cfg, make_rng(seed, 3, e))
            hat[gi, ci] = vmax - vmin
    return ErrorCurve(epochs, np.abs(truth[:, None] - hat), truth, hat, list(range(len(items))))


@dataclass
class InstabilitySweep:
    budgets: list[int]
    medians: list[float]
    per_game: np.ndarray
    n_degenerate: list[int]

    def as_table(self) -> dict[int, float]:
        return dict(zip(self.budgets, self.medians))


def budget_config(config: EstimatorConfig, budget: int) -> EstimatorConfig:
    """Split a per-step subset-sample budget into K2 partitions x K3 subsets."""
    k2 = min(config.n_partition_samples, budget)
    return replace(config, n_partition_samples=k2, n_subset_samples=max(1, math.ceil(budget / k2)))


def instability_sweep(games, sample_budgets, repeats: int = 5,
                      config: EstimatorConfig | None = None) -> InstabilitySweep:
    """Median over games of the instability at each sampling budget.

    Games whose repeated estimates are all zero are excluded and counted.
    """
    budgets = list(sample_budgets)
    if len(budgets) < 2:
        raise DomainError("need at least two budgets")
    config = config or EstimatorConfig()
    items = [(g.game, g.A) if isinstance(g, SyntheticModel) else g for g in games]
    table = np.full((len(items), len(budgets)), np.nan)
    degenerate = []
    for bi, budget in enumerate(budgets):
        cfg = budget_config(config, budget)
        bad = 0
        for gi, (game, span) in enumerate(items):
            ts = [estimate_T(game, span, replace(cfg, seed=derive_seed(config.seed, 30, gi, r))).T
                  for r in range(repeats)]
            try:
                table[gi, bi] = instability_of(ts)
            except DegenerateError:
                bad += 1
        degenerate.append(bad)
    medians = [float(np.nanmedian(table[:, bi])) if np.isfinite(table[:, bi]).any() else float("nan")
               for bi in range(len(budgets))]
    for budget, med, bad in zip(budgets, medians, degenerate):
        logger.info("budget %d: median instability %.4f (%d degenerate)", budget, med, bad)
    return InstabilitySweep(budgets, medians, table, degenerate)


@dataclass
class ConvergenceTrace:
    p: np.ndarray
    labels: list[str]
    non_converging: list[int]

    @property
    def final(self) -> np.ndarray:
        return self.p[-1]


def boundary_labels(model: SyntheticModel) -> list[str]:
    """Ground-truth label of each boundary of the span: merge, split or ignore."""
    A = model.A
    labels = ["ignore"] * (len(A) - 1)
    pos = {a: t for t, a in enumerate(A)}
    for op in model.operations:
        inside = [v for v in op.vars if v in pos]
        if len(inside) < 2:
            continue
        for v in inside[:-1]:
            if op.label == "merge" or (op.label == "split" and op.vars == (v, v + 1)):
                labels[pos[v]] = op.label
    return labels


def convergence_trace(model: SyntheticModel, config: EstimatorConfig) -> ConvergenceTrace:
    """Merge probabilities per epoch under maximization; boundaries ending in
    (0.25, 0.75) are flagged as non-converging."""
    res = optimize(model.game, model.A, replace(config, direction="max"))
    final = res.trace.p[-1]
    flagged = [b for b, p in enumerate(final) if 0.25 < p < 0.75]
    return ConvergenceTrace(res.trace.p, boundary_labels(model), flagged)


def estimate_T_models(models, config: EstimatorConfig):
    """Estimated significance for each model, seeded per model."""
    return [estimate_T(m.game, m.A, replace(config, seed=derive_seed(config.seed, 40, k))) for k, m in enumerate(models)]
