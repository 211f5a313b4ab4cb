import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from conftest import product_pairs, random_table
from gameinteract.exact import shapley_exact
from gameinteract.exceptions import DomainError
from gameinteract.explainers import ExactInteraction, InteractionSignificance, ShapleyExplainer


def test_params_roundtrip():
    est = InteractionSignificance(n_epochs=7, random_state=3)
    assert est.get_params()["n_epochs"] == 7
    assert clone(est).get_params() == est.get_params()
    est.set_params(learning_rate=0.2)
    assert est.make_config().learning_rate == 0.2


def test_shapley_explainer(rng):
    g = random_table(6, rng)
    exp = ShapleyExplainer().fit(g)
    assert exp.method_ == "exact"
    assert np.allclose(exp.transform(), shapley_exact(g).phi)
    sampled = ShapleyExplainer(method="permutation", n_permutations=50).fit(g)
    assert sampled.phi_.shape == (6,) and np.all(sampled.stderr_ >= 0)
    with pytest.raises(NotFittedError):
        ShapleyExplainer().transform()
    with pytest.raises(DomainError):
        ShapleyExplainer(method="kernel").fit(g)


def test_exact_interaction():
    est = ExactInteraction(components=True).fit(product_pairs())
    assert est.T_ == pytest.approx(2)
    assert sum(est.components_.values()) == pytest.approx(est.B_)
    assert est.fit_predict(product_pairs(), [0, 1]).n_blocks == 1


def test_interaction_significance_accepts_json():
    est = InteractionSignificance(n_epochs=10, n_partition_samples=2, n_subset_samples=16)
    est.fit(product_pairs().to_json(), span=[0, 1, 2, 3])
    assert est.span_ == [0, 1, 2, 3] and est.n_evaluations_ > 0
    with pytest.raises(DomainError):
        est.fit(product_pairs(), span=[0, 2])
    with pytest.raises(TypeError):
        est.fit("not a game")
