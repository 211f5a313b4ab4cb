"""Cooperative games: set functions v(S) normalized so that v(empty) = 0.

Every game evaluates batches of subset masks through :meth:`Game.values`.
Concrete games implement ``_raw``; the base class subtracts the raw value of
the empty coalition, memoizes, and counts queries. Coalition contraction and
player restriction produce :class:`DerivedGame` views that map their own
players onto unions of players of a root game, so analysis code only ever
deals with ordinary games.
"""

from __future__ import annotations

import json
from collections.abc import Callable, Sequence

import numpy as np

from . import expression as ex
from .exceptions import CapacityError, DegenerateError, DomainError, FormatError
from .playerset import MAX_PLAYERS, as_mask, bit_matrix, full_mask, indices, mask_array, subset_lattice

TABLE_CACHE_MAX_PLAYERS = 16
DICT_CACHE_MAX_PLAYERS = 24
TABLE_MAX_PLAYERS = 26


class Game:
    """Base class. Subclasses implement ``_raw(masks) -> float array``."""

    def __init__(self, n: int, cache: bool = True):
        if not isinstance(n, (int, np.integer)) or not 0 <= n <= MAX_PLAYERS:
            raise DomainError(f"player count must be in [0, {MAX_PLAYERS}], got {n!r}")
        self.n = int(n)
        self.cache = bool(cache)
        self.n_queries = 0
        self._offset: float | None = None
        self._table: np.ndarray | None = None
        self._memo: dict[int, float] = {}

    def _raw(self, masks: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @property
    def offset(self) -> float:
        """Raw value of the empty coalition, subtracted from every evaluation."""
        if self._offset is None:
            self._offset = float(self._checked_raw(np.zeros(1, dtype=np.int64))[0])
        return self._offset

    def _checked_raw(self, masks: np.ndarray) -> np.ndarray:
        out = np.asarray(self._raw(masks), dtype=float)
        if out.shape != masks.shape:
            raise FormatError(f"game returned shape {out.shape} for {masks.shape} masks")
        if not np.all(np.isfinite(out)):
            raise DomainError("game produced a non-finite value")
        return out

    def _normalized(self, masks: np.ndarray) -> np.ndarray:
        if not self.cache or self.n > DICT_CACHE_MAX_PLAYERS:
            return self._checked_raw(masks) - self.offset
        if self.n <= TABLE_CACHE_MAX_PLAYERS:
            if self._table is None:
                all_masks = np.arange(1 << self.n, dtype=np.int64)
                self._table = self._checked_raw(all_masks) - self.offset
            return self._table[masks]
        uniq, inverse = np.unique(masks, return_inverse=True)
        missing = np.array([m for m in uniq.tolist() if m not in self._memo], dtype=np.int64)
        if missing.size:
            vals = self._checked_raw(missing) - self.offset
            # Racing writers store identical values, so plain assignment is safe.
            self._memo.update(zip(missing.tolist(), vals.tolist()))
        return np.array([self._memo[m] for m in uniq.tolist()])[inverse]

    def values(self, masks) -> np.ndarray:
        """Normalized values for a batch of subset masks."""
        masks = mask_array(masks)
        if self.n < 64 and masks.size and (masks.min() < 0 or masks.max() >> self.n):
            raise DomainError(f"subset mask outside the {self.n} players of this game")
        self.n_queries += masks.size
        return self._normalized(masks)

    def eval(self, S) -> float:
        """v(S) - v_raw(empty) for one subset."""
        return float(self.values([as_mask(S, self.n)])[0])

    __call__ = eval

    def table(self) -> np.ndarray:
        """Values of all 2**n subsets indexed by bit pattern."""
        if self.n > TABLE_MAX_PLAYERS:
            raise CapacityError(f"cannot tabulate a game with {self.n} players")
        return self.values(np.arange(1 << self.n, dtype=np.int64))

    def __neg__(self) -> Game:
        return FunctionGame(lambda m: -self.values(m), self.n)

    def __rmul__(self, c: float) -> Game:
        return FunctionGame(lambda m: c * self.values(m), self.n)

    def __add__(self, other: Game) -> Game:
        if other.n != self.n:
            raise DomainError("cannot add games over different player counts")
        return FunctionGame(lambda m: self.values(m) + other.values(m), self.n)


class FunctionGame(Game):
    """Game backed by a vectorized callable ``masks -> values``."""

    def __init__(self, fn: Callable[[np.ndarray], np.ndarray], n: int, cache: bool = True):
        super().__init__(n, cache)
        self.fn = fn

    def _raw(self, masks):
        return self.fn(masks)


class TableGame(Game):
    def __init__(self, values: Sequence[float], cache: bool = True):
        vals = np.asarray(values, dtype=float).ravel()
        size = vals.size
        if size == 0 or size & (size - 1):
            raise FormatError(f"table length must be a power of two, got {size}")
        super().__init__(size.bit_length() - 1, cache)
        self.raw_values = vals

    def _raw(self, masks):
        return self.raw_values[masks]


def from_table(values: Sequence[float]) -> TableGame:
    """Game with ``eval(S) = values[S] - values[0]``."""
    return TableGame(values)


class ExpressionModel(Game):
    """Expression over variables; present players take ``presence`` values,
    absent players ``baseline`` values (defaults 1 and 0)."""

    def __init__(self, tree, n: int, presence=None, baseline=None, cache: bool = True):
        super().__init__(n, cache)
        if isinstance(tree, dict):
            tree = ex.parse(tree)
        bad = [i for i in tree.variables() if i >= n]
        if bad:
            raise DomainError(f"expression references variables {sorted(bad)} outside 0..{n - 1}")
        self.tree = tree
        self.presence = np.ones(n) if presence is None else np.asarray(presence, dtype=float)
        self.baseline = np.zeros(n) if baseline is None else np.asarray(baseline, dtype=float)
        if self.presence.shape != (n,) or self.baseline.shape != (n,):
            raise FormatError("presence and baseline need one value per variable")

    def _raw(self, masks):
        bits = bit_matrix(masks, self.n)
        x = np.where(bits, self.presence[None, :], self.baseline[None, :])
        return ex.evaluate(self.tree, x)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "type": "expression",
            "ast": self.tree.to_json(),
            "presence": self.presence.tolist(),
            "baseline": self.baseline.tolist(),
        }

    def __repr__(self) -> str:
        return f"ExpressionModel({self.tree}, n={self.n})"


class VectorGame:
    """Vector-valued set function ``masks -> (batch, d)`` with fixed d."""

    def __init__(self, n: int):
        if not 0 <= n <= MAX_PLAYERS:
            raise DomainError(f"player count must be in [0, {MAX_PLAYERS}], got {n}")
        self.n = n

    def evaluate_vec(self, masks) -> np.ndarray:
        raise NotImplementedError


class VectorTableGame(VectorGame):
    def __init__(self, values):
        vals = np.asarray(values, dtype=float)
        if vals.ndim != 2:
            raise FormatError("vector table must be a 2-d array (2**n rows, d columns)")
        size = vals.shape[0]
        if size == 0 or size & (size - 1):
            raise FormatError(f"vector table needs a power-of-two row count, got {size}")
        super().__init__(size.bit_length() - 1)
        self.table_values = vals

    def evaluate_vec(self, masks):
        return self.table_values[mask_array(masks)]


class FunctionVectorGame(VectorGame):
    def __init__(self, fn: Callable[[np.ndarray], np.ndarray], n: int):
        super().__init__(n)
        self.fn = fn

    def evaluate_vec(self, masks):
        return np.asarray(self.fn(mask_array(masks)), dtype=float)


class ProjectedGame(Game):
    """Scalar game ``<f_N, f_S> / ||f_N||`` of a vector game."""

    def __init__(self, vg: VectorGame, cache: bool = True):
        super().__init__(vg.n, cache)
        self.vector_game = vg
        f_full = np.asarray(vg.evaluate_vec([full_mask(vg.n)]), dtype=float)
        if f_full.ndim != 2 or f_full.shape[0] != 1:
            raise FormatError("evaluate_vec must return one row per mask")
        norm = float(np.linalg.norm(f_full[0]))
        if norm == 0.0:
            raise DegenerateError("feature of the full player set has zero norm")
        self.direction = f_full[0] / norm

    def _raw(self, masks):
        f = np.asarray(self.vector_game.evaluate_vec(masks), dtype=float)
        if f.ndim != 2 or f.shape[1] != self.direction.size:
            raise FormatError("vector game output dimension changed between subsets")
        return f @ self.direction


def project_vector(vg: VectorGame) -> ProjectedGame:
    return ProjectedGame(vg)


class DerivedGame(Game):
    """Game whose player ``k`` stands for the set ``units[k]`` of a root game.

    Root players not covered by any unit are permanently absent.
    """

    def __init__(self, source: Game, units: Sequence[int]):
        units = [int(u) for u in units]
        covered = 0
        for u in units:
            if u == 0:
                raise DomainError("derived players must stand for non-empty sets")
            if covered & u:
                raise DomainError("derived players must stand for disjoint sets")
            covered |= u
        super().__init__(len(units), cache=False)
        self.source = source
        self.units = units
        self._unit_arr = mask_array(units)
        self._offset = 0.0

    def _normalized(self, masks):
        src = np.zeros_like(masks)
        for k, u in enumerate(self._unit_arr):
            src |= np.where((masks >> k) & 1 == 1, u, 0)
        return self.source.values(src)

    def table(self) -> np.ndarray:
        if self.n > TABLE_MAX_PLAYERS:
            raise CapacityError(f"cannot tabulate a game with {self.n} players")
        src, _ = subset_lattice(self.units)
        self.n_queries += src.size
        return self.source.values(src)


def _as_root(game: Game, units: list[int]) -> DerivedGame:
    if isinstance(game, DerivedGame):
        composed = []
        for u in units:
            m = 0
            for k in indices(u):
                m |= game.units[k]
            composed.append(m)
        return DerivedGame(game.source, composed)
    return DerivedGame(game, units)


def contract(game: Game, C) -> DerivedGame:
    """Merge the players of ``C`` into a single player placed at C's lowest index."""
    c = as_mask(C, game.n)
    if c == 0:
        raise DomainError("cannot contract an empty coalition")
    low = indices(c)[0]
    units = []
    for i in range(game.n):
        if i == low:
            units.append(c)
        elif not c >> i & 1:
            units.append(1 << i)
    return _as_root(game, units)


def restrict(game: Game, alive) -> DerivedGame:
    """Keep only the players in ``alive``; the rest stay at their baseline."""
    a = as_mask(alive, game.n)
    if a == 0:
        raise DomainError("restriction needs at least one alive player")
    return _as_root(game, [1 << i for i in indices(a)])


def coalition_game(game: Game, units: Sequence) -> DerivedGame:
    """Game over the given disjoint coalitions of ``game``'s players."""
    return _as_root(game, [as_mask(u, game.n) for u in units])


def model_from_json(obj: dict) -> Game:
    """Build a game from the JSON model format (expression, table, vector_table)."""
    if not isinstance(obj, dict):
        raise FormatError("model must be a JSON object")
    kind = obj.get("type", "expression")
    if kind == "expression":
        if "n" not in obj or "ast" not in obj:
            raise FormatError("expression model needs 'n' and 'ast'")
        return ExpressionModel(ex.parse(obj["ast"]), int(obj["n"]), obj.get("presence"), obj.get("baseline"))
    if kind == "table":
        game = TableGame(obj["values"])
    elif kind == "vector_table":
        game = project_vector(VectorTableGame(obj["values"]))
    else:
        raise FormatError(f"unknown model type {kind!r}")
    if "n" in obj and int(obj["n"]) != game.n:
        raise FormatError(f"'n'={obj['n']} disagrees with table size for n={game.n}")
    return game


def load_model(path) -> Game:
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as err:
            raise FormatError(f"{path}: invalid JSON ({err})") from err
    if "model" in obj:
        obj = obj["model"]
    return model_from_json(obj)
