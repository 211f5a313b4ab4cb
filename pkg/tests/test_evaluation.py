from dataclasses import replace

import numpy as np
import pytest

from conftest import additive
from gameinteract.estimator import EstimatorConfig
from gameinteract.evaluation import (
    accuracy_table,
    boundary_labels,
    budget_config,
    convergence_trace,
    error_vs_exact,
    eval_method_accuracy,
    instability_sweep,
    partition_baseline2,
)
from gameinteract.exceptions import DomainError
from gameinteract.synthetic import build_model, generate_dataset, ground_truth_check

FAST = EstimatorConfig(n_epochs=40, n_partition_samples=4, n_subset_samples=32)


def test_ground_truth_partitions_score_one():
    for fam in ("addmul", "andor", "exp"):
        for m in generate_dataset(fam, 30, seed=1):
            assert all(ok for _, ok in ground_truth_check(m, m.ground_truth()))


def test_baseline1_near_half():
    ds = generate_dataset("andor", 200, seed=0)
    rep = eval_method_accuracy(ds, "baseline1", EstimatorConfig(seed=0))
    assert 0.45 <= rep.rate <= 0.55
    assert rep.n_models == 200


@pytest.mark.parametrize("family", ["addmul", "andor", "exp"])
def test_ours_and_baseline2_small(family):
    ds = generate_dataset(family, 15, seed=2)
    assert eval_method_accuracy(ds, "ours", FAST).rate >= 0.95
    assert eval_method_accuracy(ds, "baseline2").rate >= 0.95


def test_baseline2_chains_merges():
    m = build_model("addmul", [1, 3, 1], (0, 3))
    assert partition_baseline2(m).to_lists() == [[0], [1, 2, 3], [4]]


def test_accuracy_errors():
    with pytest.raises(DomainError):
        eval_method_accuracy(generate_dataset("addmul", 2, 0), "baseline3")
    with pytest.raises(DomainError):
        eval_method_accuracy([], "ours")


def test_accuracy_independent_of_workers():
    ds = generate_dataset("exp", 6, seed=4)
    one = eval_method_accuracy(ds, "baseline1", FAST, n_jobs=1)
    two = eval_method_accuracy(ds, "baseline1", FAST, n_jobs=2)
    assert one.rate == two.rate and one.per_model == two.per_model


def test_accuracy_table_layout():
    ds = {"addmul": generate_dataset("addmul", 4, 0), "andor": generate_dataset("andor", 4, 0)}
    table = accuracy_table(ds, ["baseline2"])
    assert list(table) == ["baseline2"] and list(table["baseline2"]) == ["addmul", "andor"]
    assert 0 <= table["baseline2"]["andor"].rate <= 1


def test_error_curve_additive_zero():
    curve = error_vs_exact([(additive(6), [1, 2, 3, 4])], FAST, checkpoints=[0, 5, 10])
    assert curve.epochs == [0, 5, 10]
    assert np.allclose(curve.errors, 0)
    rows = list(curve.rows())
    assert rows[0][:2] == (0, 0) and len(rows) == 3


def test_error_curve_checkpoints_validated():
    with pytest.raises(DomainError):
        error_vs_exact([(additive(4), [0, 1])], FAST, checkpoints=[-1, 3])


def test_error_curve_decreases():
    games = generate_dataset("andor", 4, seed=21)
    curve = error_vs_exact(games, replace(FAST, semantics="exclusive"), checkpoints=[0, 40])
    med = np.median(curve.relative_errors, axis=0)
    assert med[0] > med[1]


def test_budget_config():
    cfg = budget_config(EstimatorConfig(), 2000)
    assert cfg.n_partition_samples == 8 and cfg.n_subset_samples == 250
    cfg = budget_config(EstimatorConfig(), 5)
    assert cfg.n_partition_samples == 5 and cfg.n_subset_samples == 1


def test_instability_sweep_small():
    games = generate_dataset("andor", 3, seed=6)
    sweep = instability_sweep(games, [50, 400], repeats=3, config=replace(FAST, n_epochs=10))
    assert sweep.per_game.shape == (3, 2)
    assert len(sweep.medians) == 2
    with pytest.raises(DomainError):
        instability_sweep(games, [100], repeats=3)


def test_instability_sweep_counts_degenerate():
    sweep = instability_sweep([(additive(5), [1, 2, 3])], [20, 40], repeats=2, config=replace(FAST, n_epochs=2))
    assert sweep.n_degenerate == [1, 1]
    assert all(np.isnan(sweep.medians))


def test_convergence_trace_labels():
    # x0 + x1*x2 + x3, span x1..x3: mul boundary then add boundary
    m = build_model("addmul", [1, 2, 1], (1, 3))
    assert boundary_labels(m) == ["merge", "ignore"]
    tr = convergence_trace(m, FAST)
    assert tr.p.shape == (FAST.n_epochs + 1, 2)
    assert tr.final[0] > 0.9
    assert tr.non_converging == [1]
    m = build_model("andor", [1, 1, 1], (0, 3))
    tr = convergence_trace(m, FAST)
    assert boundary_labels(m) == ["split", "split"]
    assert np.all(tr.final < 0.1)
