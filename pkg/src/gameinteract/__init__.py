"""Shapley-value interaction analysis of black-box functions.

Exact enumeration of coalition interactions and their significance, a
sampling estimator that scales polynomially in the number of players, and
the synthetic benchmarks used to check both.
"""

from .estimator import EstimatorConfig, estimate_T, instability, shapley_sampled
from .exact import (
    coalition_interaction,
    context_salience,
    elementary_components,
    exact_T,
    pairwise_interaction,
    partition_value,
    shapley_exact,
)
from .exceptions import CapacityError, DegenerateError, DomainError, FormatError, GameInteractError
from .explainers import ExactInteraction, InteractionSignificance, ShapleyExplainer
from .game import ExpressionModel, FunctionGame, Game, TableGame, contract, load_model, model_from_json, restrict
from .partitions import Partition
from .playerset import PlayerSet

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "DegenerateError",
    "DomainError",
    "EstimatorConfig",
    "ExactInteraction",
    "ExpressionModel",
    "FormatError",
    "FunctionGame",
    "Game",
    "GameInteractError",
    "InteractionSignificance",
    "Partition",
    "PlayerSet",
    "ShapleyExplainer",
    "TableGame",
    "coalition_interaction",
    "context_salience",
    "contract",
    "elementary_components",
    "estimate_T",
    "exact_T",
    "instability",
    "load_model",
    "model_from_json",
    "pairwise_interaction",
    "partition_value",
    "restrict",
    "shapley_exact",
    "shapley_sampled",
]
