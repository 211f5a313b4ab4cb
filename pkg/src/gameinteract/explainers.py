"""scikit-learn style front ends.

Hyperparameters live in ``__init__`` (so ``get_params``/``set_params``/``clone``
work); ``fit(game, span)`` computes and stores results in trailing-underscore
attributes.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .estimator import EPS, EstimatorConfig, estimate_T, make_rng, shapley_sampled
from .exact import EXACT_MAX_PLAYERS, exact_T, shapley_exact
from .exceptions import DomainError
from .utils.validation import check_contiguous, check_game, check_players, check_seed


class ShapleyExplainer(BaseEstimator):
    """Shapley values of every player, exact or by permutation sampling.

    Parameters
    ----------
    method : {"exact", "permutation", "auto"}
        ``auto`` enumerates when the game has at most ``max_players`` players.
    n_permutations : int
        Permutations drawn by the sampling method.
    random_state : int or None
    """

    def __init__(self, method="auto", n_permutations=10000, max_players=EXACT_MAX_PLAYERS, random_state=0):
        self.method = method
        self.n_permutations = n_permutations
        self.max_players = max_players
        self.random_state = random_state

    def fit(self, game, y=None):
        game = check_game(game)
        if self.method not in ("auto", "exact", "permutation"):
            raise DomainError(f"unknown method {self.method!r}")
        method = self.method
        if method == "auto":
            method = "exact" if game.n <= self.max_players else "permutation"
        if method == "exact":
            sv = shapley_exact(game, self.max_players)
            self.stderr_ = np.zeros(game.n)
        else:
            sv = shapley_sampled(game, self.n_permutations, make_rng(check_seed(self.random_state)))
            self.stderr_ = sv.stderr
        self.phi_ = sv.phi
        self.method_ = method
        self.n_players_ = game.n
        return self

    def transform(self, game=None):
        check_is_fitted(self, "phi_")
        return self.phi_


class ExactInteraction(BaseEstimator):
    """Interaction B, extremal partition values and significance T by enumeration."""

    def __init__(self, semantics="exclusive", contiguous_only=True, components=False,
                 max_players=EXACT_MAX_PLAYERS):
        self.semantics = semantics
        self.contiguous_only = contiguous_only
        self.components = components
        self.max_players = max_players

    def fit(self, game, span=None):
        game = check_game(game)
        members = check_players(game, span)
        rep = exact_T(game, members, semantics=self.semantics, contiguous_only=self.contiguous_only,
                      components=self.components, max_players=self.max_players)
        self.report_ = rep
        self.B_, self.B_max_, self.B_min_, self.T_ = rep.B, rep.B_max, rep.B_min, rep.T
        self.omega_max_, self.omega_min_ = rep.omega_max, rep.omega_min
        self.components_ = rep.components
        self.span_ = members
        return self

    def fit_predict(self, game, span=None):
        """Partition attaining the maximum."""
        return self.fit(game, span).omega_max_


class InteractionSignificance(BaseEstimator):
    """Sampling estimate of the interaction significance T of a contiguous span.

    Learns merge probabilities of the span's boundaries twice, once maximizing
    and once minimizing the summed coalition Shapley values; ``T_`` is the
    difference of the two re-estimated objectives.

    Parameters
    ----------
    n_epochs, n_partition_samples, n_subset_samples : int
        Gradient steps and per-step boundary / subset draws.
    learning_rate : float
    semantics : {"exclusive", "unit"}
    random_state : int or None
    """

    def __init__(self, n_epochs=100, n_partition_samples=8, n_subset_samples=256, learning_rate=0.1,
                 semantics="exclusive", eps=EPS, final_partition_samples=None, exact_below=0,
                 random_state=0):
        self.n_epochs = n_epochs
        self.n_partition_samples = n_partition_samples
        self.n_subset_samples = n_subset_samples
        self.learning_rate = learning_rate
        self.semantics = semantics
        self.eps = eps
        self.final_partition_samples = final_partition_samples
        self.exact_below = exact_below
        self.random_state = random_state

    def make_config(self) -> EstimatorConfig:
        return EstimatorConfig(
            n_epochs=self.n_epochs,
            n_partition_samples=self.n_partition_samples,
            n_subset_samples=self.n_subset_samples,
            learning_rate=self.learning_rate,
            seed=check_seed(self.random_state),
            semantics=self.semantics,
            eps=self.eps,
            final_partition_samples=self.final_partition_samples,
            exact_below=self.exact_below,
        )

    def fit(self, game, span=None):
        game = check_game(game)
        members = check_contiguous(check_players(game, span, min_size=2))
        rep = estimate_T(game, members, self.make_config())
        self.report_ = rep
        self.T_ = rep.T
        self.L_max_, self.L_min_ = rep.L_max, rep.L_min
        self.p_max_, self.p_min_ = rep.p_max, rep.p_min
        self.partition_max_, self.partition_min_ = rep.partition_max, rep.partition_min
        self.n_evaluations_ = rep.n_evaluations
        self.span_ = members
        return self

    def fit_predict(self, game, span=None):
        """Hardened partition learned under maximization."""
        return self.fit(game, span).partition_max_
