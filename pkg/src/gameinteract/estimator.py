"""Sampling estimator of interaction significance over contiguous partitions.

The target span A (consecutive players ``a_0 .. a_{m-1}``) is partitioned by
boundary bits ``g`` drawn independently with merge probabilities ``p``. The
objective is the expected sum of the coalitions' Shapley values, estimated by
Monte Carlo and optimized over ``p`` with plain projected gradient steps.

Subset sampling. Every draw assigns i.i.d. uniform keys to all players and
picks a member ``i`` of A. The coalition ``C_i`` containing ``i`` takes the key
of ``i``; any other coalition takes the key of its first member. The context S
is every unit whose key is below that of ``C_i``, which makes ``|S|`` uniform
over ``0..units-1`` and S uniform given its size, i.e. the Shapley sampling
distribution. The weight ``1/|C_i|`` makes each coalition count once. Draws are
stratified over ``i`` when there are at least ``m`` of them.

Gradient. The objective is multilinear in ``p``, so its derivative in ``p_b``
is the difference of the expectations with ``g_b`` clamped to 1 and to 0. For
each sampled ``g`` the estimator evaluates ``g`` and its ``m - 1`` single-bit
flips on the same draws (common random numbers), costing ``O(m K3)`` queries
per sample.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .exact import SEMANTICS, ShapleyVector, exact_T
from .exceptions import DegenerateError, DomainError
from .game import Game
from .partitions import Partition
from .playerset import as_mask, indices

EPS = 1e-3


def derive_seed(seed: int, *keys: int) -> int:
    """Independent 64-bit seed for the stream named by ``keys``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, np.uint64)[0])


def make_rng(seed: int, *keys: int) -> np.random.Generator:
    """Counter-based (Philox) generator for a named substream of ``seed``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.Philox(ss))


@dataclass
class EstimatorConfig:
    """Knobs of the sampling estimator.

    ``n_epochs`` (K1) gradient steps, each averaging ``n_partition_samples``
    (K2) boundary draws with ``n_subset_samples`` (K3) subset draws apiece.
    ``final_partition_samples`` boundary draws (default ``4 * K2``) re-estimate
    the objective after training. Spans with at most ``exact_below`` members
    are solved by enumeration instead.
    """

    n_epochs: int = 100
    n_partition_samples: int = 8
    n_subset_samples: int = 256
    learning_rate: float = 0.1
    direction: str = "max"
    seed: int = 0
    semantics: str = "exclusive"
    eps: float = EPS
    final_partition_samples: int | None = None
    exact_below: int = 0

    def __post_init__(self):
        for name in ("n_epochs", "n_partition_samples", "n_subset_samples"):
            val = getattr(self, name)
            if not isinstance(val, (int, np.integer)) or val < 1:
                raise DomainError(f"{name} must be a positive integer, got {val!r}")
        if not self.learning_rate > 0:
            raise DomainError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.direction not in ("max", "min"):
            raise DomainError(f"direction must be 'max' or 'min', got {self.direction!r}")
        if self.semantics not in SEMANTICS:
            raise DomainError(f"semantics must be one of {SEMANTICS}, got {self.semantics!r}")
        if not 0 < self.eps < 0.5:
            raise DomainError("eps must lie in (0, 0.5)")
        if self.final_partition_samples is not None and self.final_partition_samples < 1:
            raise DomainError("final_partition_samples must be positive")

    @property
    def n_final(self) -> int:
        return self.final_partition_samples or 4 * self.n_partition_samples

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class PartitionDistribution:
    """Independent merge probabilities for the ``m - 1`` boundaries of a span."""

    p: np.ndarray
    eps: float = EPS

    def __post_init__(self):
        self.p = np.clip(np.asarray(self.p, dtype=float), self.eps, 1 - self.eps)

    @classmethod
    def uniform(cls, m: int, eps: float = EPS) -> PartitionDistribution:
        return cls(np.full(max(m - 1, 0), 0.5), eps)

    def harden(self) -> np.ndarray:
        return (self.p > 0.5).astype(np.int8)


@dataclass
class BoundarySample:
    g: np.ndarray

    def partition(self, members) -> Partition:
        return Partition.from_boundary(list(members), [int(b) for b in self.g])


def lambda_weights(g) -> np.ndarray:
    """Per-position weight ``1 / |C_i|`` of the partition induced by boundary bits ``g``."""
    g = np.asarray(g, dtype=bool)
    return 1.0 / _blocks(g, 0)[2]


def check_span(game: Game, A) -> list[int]:
    """Sorted members of A; A must be a non-empty run of consecutive players."""
    members = indices(as_mask(A, game.n))
    if not members:
        raise DomainError("target span must be non-empty")
    if members[-1] - members[0] != len(members) - 1:
        raise DomainError(f"target span must be contiguous, got {members}")
    return members


def sample_partition(dist: PartitionDistribution, rng: np.random.Generator) -> BoundarySample:
    return BoundarySample((rng.random(dist.p.size) < dist.p).astype(np.int8))


def _blocks(G: np.ndarray, a0: int):
    """Per-position block structure of boundary arrays ``G`` (..., m-1).

    Returns first-member position, block mask and block size, each (..., m).
    """
    G = G.astype(bool)
    lead = G.shape[:-1]
    m = G.shape[-1] + 1
    pos = np.broadcast_to(np.arange(m), lead + (m,))
    one = np.ones(lead + (1,), dtype=bool)
    start = np.concatenate([one, ~G], axis=-1)
    end = np.concatenate([~G, one], axis=-1)
    first = np.maximum.accumulate(np.where(start, pos, 0), axis=-1)
    last = np.flip(np.minimum.accumulate(np.flip(np.where(end, pos, m), -1), axis=-1), -1)
    size = last - first + 1
    mask = ((np.int64(1) << size.astype(np.int64)) - 1) << (first + a0).astype(np.int64)
    return first, mask, size


class _SpanSampler:
    """Vectorized estimates of the partition objective for one game and span."""

    def __init__(self, game: Game, members: list[int], semantics: str):
        self.game = game
        self.members = members
        self.m = len(members)
        self.a0 = members[0]
        self.semantics = semantics
        span = set(members)
        self.outside = np.array([j for j in range(game.n) if j not in span], dtype=np.int64)

    def draw(self, rng: np.random.Generator, rows: int, k3: int):
        keys = rng.random((rows, k3, self.game.n))
        m = self.m
        if k3 >= m:
            targets = np.broadcast_to(np.arange(k3) % m, (rows, k3))
            counts = np.bincount(np.arange(k3) % m, minlength=m)
            q = np.broadcast_to(1.0 / counts[np.arange(k3) % m], (rows, k3))
        else:
            targets = rng.integers(0, m, size=(rows, k3))
            q = np.full((rows, k3), m / k3)
        return keys, targets, q

    def objective(self, G: np.ndarray, draws) -> np.ndarray:
        """Objective estimates for boundary arrays ``G`` of shape (V, rows, m-1)."""
        keys, targets, q = draws
        V, rows = G.shape[:2]
        k3 = keys.shape[1]
        first, bmask, bsize = _blocks(G, self.a0)
        tgt = np.broadcast_to(targets, (V, rows, k3))
        c_mask = np.take_along_axis(bmask, tgt, axis=-1)
        lam = 1.0 / np.take_along_axis(bsize, tgt, axis=-1)
        k_target = np.take_along_axis(keys, (targets + self.a0)[..., None], axis=-1)[..., 0]
        out = self.outside
        s_out = ((keys[..., out] < k_target[..., None]).astype(np.int64) << out).sum(axis=-1)

        if self.semantics == "exclusive":
            v_s = self.game.values(s_out.ravel()).reshape(rows, k3)
            v_sc = self.game.values((s_out[None] | c_mask).ravel()).reshape(V, rows, k3)
            delta = v_sc - v_s[None]
        else:
            m = self.m
            k_span = keys[..., self.a0:self.a0 + m]
            unit_key = np.take_along_axis(
                np.broadcast_to(k_span, (V, rows, k3, m)),
                np.broadcast_to(first[:, :, None, :], (V, rows, k3, m)),
                axis=-1,
            )
            tgt_first = np.take_along_axis(first, tgt, axis=-1)
            other_block = first[:, :, None, :] != tgt_first[..., None]
            in_s = other_block & (unit_key < k_target[None, ..., None])
            shifts = np.arange(self.a0, self.a0 + m, dtype=np.int64)
            s_full = s_out[None] | (in_s.astype(np.int64) << shifts).sum(axis=-1)
            v_s = self.game.values(s_full.ravel()).reshape(V, rows, k3)
            v_sc = self.game.values((s_full | c_mask).ravel()).reshape(V, rows, k3)
            delta = v_sc - v_s
        return (q[None] * lam * delta).sum(axis=-1)

    def flip_variants(self, G: np.ndarray) -> np.ndarray:
        """Stack ``G`` (rows, m-1) with each of its single-bit flips: (m, rows, m-1)."""
        k = G.shape[1]
        variants = np.repeat(G[None].astype(bool), k + 1, axis=0)
        for b in range(k):
            variants[b + 1, :, b] = ~variants[b + 1, :, b]
        return variants


def estimate_L(game: Game, A, g, n_subset_samples: int, rng: np.random.Generator,
               semantics: str = "exclusive") -> float:
    """Monte Carlo estimate of the summed coalition Shapley values for one partition."""
    members = check_span(game, A)
    g = np.asarray(g, dtype=bool).reshape(1, 1, -1)
    if g.shape[-1] != len(members) - 1:
        raise DomainError(f"boundary vector needs {len(members) - 1} bits")
    sampler = _SpanSampler(game, members, semantics)
    draws = sampler.draw(rng, 1, n_subset_samples)
    return float(sampler.objective(g, draws)[0, 0])


def _grad(sampler: _SpanSampler, p: np.ndarray, rows: int, k3: int, rng: np.random.Generator):
    G = rng.random((rows, p.size)) < p
    draws = sampler.draw(rng, rows, k3)
    L = sampler.objective(sampler.flip_variants(G), draws)
    base, flipped = L[0], L[1:]
    diff = np.where(G.T, base[None] - flipped, flipped - base[None])
    return diff.mean(axis=1), float(base.mean())


def grad_p(game: Game, A, dist: PartitionDistribution, n_partition_samples: int,
           n_subset_samples: int, rng: np.random.Generator, semantics: str = "exclusive") -> np.ndarray:
    """Estimate of the objective's derivative in each merge probability."""
    members = check_span(game, A)
    if dist.p.size != len(members) - 1:
        raise DomainError("distribution size does not match the span")
    sampler = _SpanSampler(game, members, semantics)
    return _grad(sampler, dist.p, n_partition_samples, n_subset_samples, rng)[0]


@dataclass
class EstimateTrace:
    L: np.ndarray
    p: np.ndarray
    value: float
    n_evaluations: int
    direction: str
    seed: int

    def to_rows(self) -> list[list[float]]:
        """``epoch, L, p_1..p_{m-1}`` rows; epoch 0 has no objective estimate."""
        rows = [[0, float("nan"), *self.p[0].tolist()]]
        for e, (l, p) in enumerate(zip(self.L, self.p[1:]), start=1):
            rows.append([e, float(l), *p.tolist()])
        return rows


@dataclass
class OptimizeResult:
    dist: PartitionDistribution
    value: float
    trace: EstimateTrace


def soft_value(game: Game, A, p, config: EstimatorConfig, rng: np.random.Generator) -> float:
    """Fresh estimate of the expected objective under merge probabilities ``p``."""
    members = check_span(game, A)
    sampler = _SpanSampler(game, members, config.semantics)
    p = np.asarray(p, dtype=float)
    G = rng.random((config.n_final, p.size)) < p
    draws = sampler.draw(rng, config.n_final, config.n_subset_samples)
    return float(sampler.objective(G[None], draws)[0].mean())


def optimize(game: Game, A, config: EstimatorConfig) -> OptimizeResult:
    """Gradient ascent (``max``) or descent (``min``) of the objective over ``p``."""
    members = check_span(game, A)
    sampler = _SpanSampler(game, members, config.semantics)
    m = len(members)
    q0 = game.n_queries
    dist = PartitionDistribution.uniform(m, config.eps)
    sign = 1.0 if config.direction == "max" else -1.0
    rng = make_rng(config.seed, 0)
    L_hist = np.empty(config.n_epochs)
    p_hist = np.empty((config.n_epochs + 1, m - 1))
    p_hist[0] = dist.p
    for epoch in range(config.n_epochs):
        if m > 1:
            grad, L_hist[epoch] = _grad(sampler, dist.p, config.n_partition_samples,
                                        config.n_subset_samples, rng)
            dist.p = np.clip(dist.p + sign * config.learning_rate * grad, config.eps, 1 - config.eps)
        else:
            draws = sampler.draw(rng, config.n_partition_samples, config.n_subset_samples)
            G = np.zeros((1, config.n_partition_samples, 0), dtype=bool)
            L_hist[epoch] = float(sampler.objective(G, draws)[0].mean())
        p_hist[epoch + 1] = dist.p
    value = soft_value(game, A, dist.p, config, make_rng(config.seed, 1))
    trace = EstimateTrace(L_hist, p_hist, value, game.n_queries - q0, config.direction, config.seed)
    return OptimizeResult(dist, value, trace)


@dataclass
class InteractionReport:
    """Estimated extremal objectives, their difference T, and diagnostics."""

    A: list[int]
    T: float
    L_max: float
    L_min: float
    p_max: np.ndarray
    p_min: np.ndarray
    partition_max: Partition
    partition_min: Partition
    n_evaluations: int
    config: EstimatorConfig
    seeds: dict = field(default_factory=dict)
    trace_max: EstimateTrace | None = None
    trace_min: EstimateTrace | None = None
    method: str = "sampling"

    def to_json(self) -> dict:
        def part(pt: Partition):
            return {"blocks": pt.to_lists(), "boundary": list(pt.boundary(self.A))}

        return {
            "A": self.A,
            "method": self.method,
            "T": self.T,
            "L_max": self.L_max,
            "L_min": self.L_min,
            "p_max": self.p_max.tolist(),
            "p_min": self.p_min.tolist(),
            "partition_max": part(self.partition_max),
            "partition_min": part(self.partition_min),
            "n_evaluations": self.n_evaluations,
            "seeds": self.seeds,
            "config": self.config.to_dict(),
        }


def _exact_report(game: Game, members: list[int], config: EstimatorConfig) -> InteractionReport:
    q0 = game.n_queries
    rep = exact_T(game, members, semantics=config.semantics, contiguous_only=True)
    gmax = np.array(rep.omega_max.boundary(members), dtype=float)
    gmin = np.array(rep.omega_min.boundary(members), dtype=float)
    return InteractionReport(
        A=members, T=rep.T, L_max=rep.B_max + rep.baseline, L_min=rep.B_min + rep.baseline,
        p_max=gmax, p_min=gmin, partition_max=rep.omega_max, partition_min=rep.omega_min,
        n_evaluations=game.n_queries - q0, config=config, method="exact",
    )


def estimate_T(game: Game, A, config: EstimatorConfig | None = None) -> InteractionReport:
    """Maximize and minimize the objective from independent seeds; T = difference."""
    config = config or EstimatorConfig()
    members = check_span(game, A)
    if len(members) < 2:
        raise DomainError("interaction significance needs at least two players in the span")
    if len(members) <= config.exact_below:
        return _exact_report(game, members, config)
    seeds = {"max": derive_seed(config.seed, 0), "min": derive_seed(config.seed, 1)}
    hi = optimize(game, members, replace(config, direction="max", seed=seeds["max"]))
    lo = optimize(game, members, replace(config, direction="min", seed=seeds["min"]))
    return InteractionReport(
        A=members,
        T=hi.value - lo.value,
        L_max=hi.value,
        L_min=lo.value,
        p_max=hi.dist.p,
        p_min=lo.dist.p,
        partition_max=BoundarySample(hi.dist.harden()).partition(members),
        partition_min=BoundarySample(lo.dist.harden()).partition(members),
        n_evaluations=hi.trace.n_evaluations + lo.trace.n_evaluations,
        config=config,
        seeds=seeds,
        trace_max=hi.trace,
        trace_min=lo.trace,
    )


def instability_of(values) -> float:
    """Mean pairwise absolute disagreement over mean absolute value."""
    t = np.asarray(values, dtype=float)
    if t.size < 2:
        raise DomainError("instability needs at least two repeats")
    scale = np.abs(t).mean()
    if scale == 0:
        raise DegenerateError("all repeated estimates are zero; instability undefined")
    diffs = np.abs(t[:, None] - t[None, :])
    pairwise = diffs.sum() / (t.size * (t.size - 1))
    return float(pairwise / scale)


def instability(games, A, config: EstimatorConfig, repeats: int = 5) -> float:
    """Disagreement of repeated T estimates with distinct seeds.

    ``games`` may be one game or a list of (game, span) pairs, in which case
    the per-game instabilities are averaged.
    """
    if repeats < 2:
        raise DomainError("instability needs at least two repeats")
    items = [(games, A)] if isinstance(games, Game) else list(games)
    per_game = []
    for gi, (game, span) in enumerate(items):
        ts = [estimate_T(game, span, replace(config, seed=derive_seed(config.seed, 2, gi, r))).T
              for r in range(repeats)]
        per_game.append(instability_of(ts))
    return float(np.mean(per_game))


def shapley_sampled(game: Game, permutations: int, rng: np.random.Generator) -> ShapleyVector:
    """Permutation-sampling Shapley estimate with per-player standard errors."""
    if permutations < 1:
        raise DomainError("need at least one permutation")
    n = game.n
    if n == 0:
        return ShapleyVector(np.zeros(0), 0, np.zeros(0))
    order = np.argsort(rng.random((permutations, n)), axis=1)
    bits = np.int64(1) << order.astype(np.int64)
    prefix = np.concatenate([np.zeros((permutations, 1), dtype=np.int64), np.cumsum(bits, axis=1)], axis=1)
    vals = game.values(prefix.ravel()).reshape(permutations, n + 1)
    marg = np.empty((permutations, n))
    np.put_along_axis(marg, order, np.diff(vals, axis=1), axis=1)
    phi = marg.mean(axis=0)
    if permutations > 1:
        stderr = marg.std(axis=0, ddof=1) / np.sqrt(permutations)
    else:
        stderr = np.full(n, np.nan)
    return ShapleyVector(phi, n, stderr)

