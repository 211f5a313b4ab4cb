"""Input validation shared by the estimator classes and the CLI."""

from __future__ import annotations

import numbers

import numpy as np

from ..exceptions import DomainError
from ..game import Game, model_from_json
from ..playerset import PlayerSet, as_mask, indices


def check_game(game) -> Game:
    """Accept a Game or a JSON model dict; return a Game."""
    if isinstance(game, Game):
        return game
    if isinstance(game, dict):
        return model_from_json(game.get("model", game))
    raise TypeError(f"expected a Game or a JSON model dict, got {type(game).__name__}")


def check_players(game: Game, players, min_size: int = 1) -> list[int]:
    """Sorted player indices of ``players`` (None means all players)."""
    if players is None:
        members = list(range(game.n))
    elif isinstance(players, (PlayerSet, numbers.Integral)) and not isinstance(players, bool):
        members = indices(as_mask(players, game.n))
    else:
        members = sorted(set(int(i) for i in np.asarray(list(players)).ravel()))
        as_mask(members, game.n)
    if len(members) < min_size:
        raise DomainError(f"need at least {min_size} players, got {len(members)}")
    return members


def check_contiguous(members: list[int]) -> list[int]:
    if members and members[-1] - members[0] != len(members) - 1:
        raise DomainError(f"span must be a run of consecutive players, got {members}")
    return members


def check_seed(random_state) -> int:
    """Integer seed from ``random_state`` (None draws fresh entropy)."""
    if random_state is None:
        return int(np.random.SeedSequence().generate_state(1, np.uint64)[0])
    if isinstance(random_state, numbers.Integral) and not isinstance(random_state, bool):
        if random_state < 0:
            raise DomainError("seed must be non-negative")
        return int(random_state)
    raise TypeError(f"random_state must be an int or None, got {type(random_state).__name__}")
