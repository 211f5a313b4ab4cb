"""Enumeration-based interaction analysis.

Everything here tabulates the game once (2**n evaluations) and then works on
the table. A "unit" is a set of players that joins or leaves coalitions as
one; Shapley values of units are computed over the lattice of unions of the
units in play.

Two context semantics are supported when scoring a partition of the target
set A:

``exclusive``
    each coalition C is valued with the players outside A plus C itself; the
    other coalitions of the partition are absent.
``unit``
    all coalitions of the partition play at once, alongside the players
    outside A.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import CapacityError, DomainError
from .game import Game
from .partitions import Partition, contiguous_partitions, set_partitions
from .playerset import as_mask, indices, popcount, subset_lattice

SEMANTICS = ("exclusive", "unit")
EXACT_MAX_PLAYERS = 20
COMPONENT_MAX_SIZE = 16
CONTIGUOUS_MAX_SPAN = 12
GENERAL_MAX_SPAN = 10


@dataclass
class ShapleyVector:
    phi: np.ndarray
    game_n: int
    stderr: np.ndarray | None = None

    def __getitem__(self, i):
        return self.phi[i]

    def __len__(self):
        return self.game_n

    def sum(self) -> float:
        return float(self.phi.sum())


@dataclass
class ExactInteractionReport:
    A: int
    semantics: str
    contiguous_only: bool
    B: float
    B_max: float
    B_min: float
    T: float
    omega_max: Partition
    omega_min: Partition
    baseline: float
    n_partitions: int
    components: dict[int, float] | None = None
    n_queries: int = 0

    @property
    def members(self) -> list[int]:
        return indices(self.A)

    def to_json(self) -> dict:
        def part(p: Partition):
            out = {"blocks": p.to_lists()}
            if p.is_contiguous(self.members):
                out["boundary"] = list(p.boundary(self.members))
            return out

        rec = {
            "A": self.members,
            "semantics": self.semantics,
            "contiguous_only": self.contiguous_only,
            "B": self.B,
            "B_max": self.B_max,
            "B_min": self.B_min,
            "T": self.T,
            "omega_max": part(self.omega_max),
            "omega_min": part(self.omega_min),
            "n_partitions": self.n_partitions,
            "n_queries": self.n_queries,
        }
        if self.components is not None:
            rec["components"] = {str(k): v for k, v in sorted(self.components.items())}
            rec["components_sum"] = float(sum(self.components.values()))
            rec["components_identity_error"] = abs(rec["components_sum"] - self.B)
        return rec


def shapley_weights(u: int) -> np.ndarray:
    """Weight |S|!(u-|S|-1)!/u! of a marginal contribution, indexed by |S|."""
    return np.array([1.0 / (u * math.comb(u - 1, s)) for s in range(u)])


def _shapley_all(vals: np.ndarray, u: int, sizes: np.ndarray) -> np.ndarray:
    w = shapley_weights(u)
    idx = np.arange(1 << u, dtype=np.int64)
    phi = np.empty(u)
    for i in range(u):
        sel = idx[(idx >> i) & 1 == 0]
        phi[i] = np.dot(w[sizes[sel]], vals[sel | (1 << i)] - vals[sel])
    return phi


def _unit_phi(table: np.ndarray, others: list[int], target: int) -> float:
    """Shapley value of the unit ``target`` among ``others`` + ``target``."""
    masks, sizes = subset_lattice(others)
    w = shapley_weights(len(others) + 1)
    return float(np.dot(w[sizes], table[masks | target] - table[masks]))


def _check_n(game: Game, max_players: int) -> None:
    if game.n > max_players:
        raise CapacityError(f"exact enumeration capped at {max_players} players, game has {game.n}")


def _table(game: Game, max_players: int = EXACT_MAX_PLAYERS) -> np.ndarray:
    _check_n(game, max_players)
    return game.table()


def shapley_exact(game: Game, max_players: int = EXACT_MAX_PLAYERS) -> ShapleyVector:
    """Shapley value of every player by full subset enumeration."""
    table = _table(game, max_players)
    n = game.n
    if n == 0:
        return ShapleyVector(np.zeros(0), 0)
    _, sizes = subset_lattice([1 << i for i in range(n)])
    return ShapleyVector(_shapley_all(table, n, sizes), n)


def _outside_units(n: int, a: int) -> list[int]:
    return [1 << k for k in range(n) if not a >> k & 1]


def _solo_sum(table: np.ndarray, n: int, a: int) -> float:
    """Sum over i in A of phi(i | N minus A plus {i})."""
    out = _outside_units(n, a)
    return sum(_unit_phi(table, out, 1 << i) for i in indices(a))


def _coalition_interaction(table: np.ndarray, n: int, a: int) -> float:
    return _unit_phi(table, _outside_units(n, a), a) - _solo_sum(table, n, a)


def coalition_interaction(game: Game, A, max_players: int = EXACT_MAX_PLAYERS) -> float:
    """Reward of A acting as one player minus the solo rewards of its members."""
    a = as_mask(A, game.n)
    if popcount(a) < 2:
        raise DomainError("interaction needs a coalition of at least two players")
    return _coalition_interaction(_table(game, max_players), game.n, a)


def pairwise_interaction(game: Game, i: int, j: int, max_players: int = EXACT_MAX_PLAYERS) -> float:
    if i == j:
        raise DomainError("pairwise interaction needs two distinct players")
    a = as_mask([i, j], game.n)
    table = _table(game, max_players)
    out = _outside_units(game.n, a)
    pair = _unit_phi(table, out, a)
    return pair - (_unit_phi(table, out, 1 << i) + _unit_phi(table, out, 1 << j))


def _mobius(values: np.ndarray, m: int) -> np.ndarray:
    """Inverse zeta transform over the subset lattice of m elements."""
    out = values.copy()
    for k in range(m):
        bit = 1 << k
        idx = np.arange(1 << m)
        has = (idx & bit) != 0
        out[has] -= out[idx[has] ^ bit]
    return out


def elementary_components(
    game: Game, A, max_size: int = COMPONENT_MAX_SIZE, max_players: int = EXACT_MAX_PLAYERS
) -> dict[int, float]:
    """Elementary interaction of every sub-coalition of A with two or more members.

    Obtained by Mobius inversion of the coalition interactions of all subsets
    of A (singletons and the empty set count as zero), so the components of
    A sum to its coalition interaction.
    """
    a = as_mask(A, game.n)
    members = indices(a)
    m = len(members)
    if m > max_size:
        raise CapacityError(f"component enumeration capped at |A| <= {max_size}, got {m}")
    table = _table(game, max_players)
    local_to_mask, sizes = subset_lattice([1 << i for i in members])
    b = np.zeros(1 << m)
    for k in range(1 << m):
        if sizes[k] >= 2:
            b[k] = _coalition_interaction(table, game.n, int(local_to_mask[k]))
    comp = _mobius(b, m)
    return {int(local_to_mask[k]): float(comp[k]) for k in range(1 << m) if sizes[k] >= 2}


def _check_partition(a: int, omega: Partition) -> None:
    if omega.support != a:
        raise DomainError("partition does not cover exactly the target set")


class _PartitionScorer:
    """Scores partitions of A under a fixed semantics, caching per-block work."""

    def __init__(self, table: np.ndarray, n: int, a: int, semantics: str):
        if semantics not in SEMANTICS:
            raise DomainError(f"semantics must be one of {SEMANTICS}, got {semantics!r}")
        self.table = table
        self.n = n
        self.a = a
        self.semantics = semantics
        self.outside = _outside_units(n, a)
        self._excl: dict[int, float] = {}

    def block_value(self, c: int) -> float:
        if c not in self._excl:
            self._excl[c] = _unit_phi(self.table, self.outside, c)
        return self._excl[c]

    def __call__(self, omega: Partition) -> float:
        if self.semantics == "exclusive":
            return sum(self.block_value(c) for c in omega.blocks)
        units = self.outside + list(omega.blocks)
        masks, sizes = subset_lattice(units)
        phi = _shapley_all(self.table[masks], len(units), sizes)
        return float(phi[len(self.outside):].sum())


def partition_value(game: Game, A, omega: Partition, semantics: str = "exclusive",
                    max_players: int = EXACT_MAX_PLAYERS) -> float:
    """Sum of the coalitions' Shapley values under the chosen semantics."""
    a = as_mask(A, game.n)
    _check_partition(a, omega)
    return _PartitionScorer(_table(game, max_players), game.n, a, semantics)(omega)


def exact_T(game: Game, A, semantics: str = "exclusive", contiguous_only: bool = True,
            components: bool = False, max_players: int = EXACT_MAX_PLAYERS) -> ExactInteractionReport:
    """Extremal partition values of A and the significance T = B_max - B_min.

    Both bounds are reported relative to the all-singletons partition scored
    under the same semantics, and B is the all-in-one partition on that scale;
    under ``exclusive`` these coincide with the solo-reward definitions.
    Ties go to the partition with fewest blocks, then to the smallest
    boundary vector (restricted growth string for non-contiguous search).
    """
    a = as_mask(A, game.n)
    members = indices(a)
    m = len(members)
    if m < 1:
        raise DomainError("target set must be non-empty")
    cap = CONTIGUOUS_MAX_SPAN if contiguous_only else GENERAL_MAX_SPAN
    if m > cap:
        raise CapacityError(f"partition enumeration capped at |A| <= {cap}, got {m}")
    q0 = game.n_queries
    table = _table(game, max_players)
    score = _PartitionScorer(table, game.n, a, semantics)
    enum = contiguous_partitions(members) if contiguous_only else set_partitions(members)

    best = worst = None
    count = 0
    for code, omega in enum:
        count += 1
        val = score(omega)
        key = (omega.n_blocks, code)
        if best is None:
            best = worst = (val, key, omega)
            continue
        tol = 1e-12 * max(1.0, abs(val))
        if val > best[0] + tol or (abs(val - best[0]) <= tol and key < best[1]):
            best = (val, key, omega)
        if val < worst[0] - tol or (abs(val - worst[0]) <= tol and key < worst[1]):
            worst = (val, key, omega)

    baseline = score(Partition.singletons(members))
    B = score(Partition.grand(members)) - baseline
    comps = elementary_components(game, a, max_players=max_players) if components else None
    return ExactInteractionReport(
        A=a,
        semantics=semantics,
        contiguous_only=contiguous_only,
        B=B,
        B_max=best[0] - baseline,
        B_min=worst[0] - baseline,
        T=best[0] - worst[0],
        omega_max=best[2],
        omega_min=worst[2],
        baseline=baseline,
        n_partitions=count,
        components=comps,
        n_queries=game.n_queries - q0,
    )


@dataclass
class SalienceMap:
    weights: np.ndarray
    interaction: float
    n_contexts: int
    exhaustive: bool
    empty: bool = field(default=False)


def context_salience(game: Game, i: int, j: int, budget: int = 4096, rng_seed=0,
                     max_players: int = EXACT_MAX_PLAYERS) -> SalienceMap:
    """Weighted average of contexts that reinforce the pair's interaction.

    Contexts S avoid i and j and are kept when the pair's local interaction
    delta has the same sign as the pair interaction. Enumerates all contexts
    when they fit in ``budget``; otherwise samples uniformly and rescales to
    estimate the full sum.
    """
    if i == j:
        raise DomainError("salience needs two distinct players")
    if budget < 1:
        raise DomainError("budget must be at least 1")
    n = game.n
    as_mask([i, j], n)
    B = pairwise_interaction(game, i, j, max_players=max_players)
    rest = [k for k in range(n) if k not in (i, j)]
    n_all = 1 << len(rest)
    if n_all <= budget:
        ctx, _ = subset_lattice([1 << k for k in rest])
        scale, exhaustive = 1.0, True
    else:
        rng = np.random.default_rng(rng_seed)
        pick = rng.random((budget, len(rest))) < 0.5
        ctx = (pick * (np.int64(1) << np.array(rest, dtype=np.int64))).sum(axis=1).astype(np.int64)
        scale, exhaustive = n_all / budget, False
    bi, bj = np.int64(1) << i, np.int64(1) << j
    dv = game.values(ctx | bi | bj) - game.values(ctx | bi) - game.values(ctx | bj) + game.values(ctx)
    keep = dv * B > 0
    weights = np.zeros(n)
    members = ((ctx[keep][:, None] >> np.arange(n)) & 1).astype(float)
    weights += scale * (np.abs(dv[keep])[:, None] * members).sum(axis=0)
    return SalienceMap(weights, B, int(ctx.size), exhaustive, empty=(B == 0))

