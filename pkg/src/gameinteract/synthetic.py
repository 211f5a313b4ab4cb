"""Synthetic models with known interaction structure.

Each model is a chain of terms over consecutive binary variables. A term is
either a single variable or a group (product, AND, or base-exponent power).
Groups must end up inside one coalition (label ``merge``); the junction
between two neighbouring terms is an ``add`` (ignored) or an ``or`` (the two
variables it joins must be split). The target span is a run of whole terms,
so no operation is cut by the span boundary.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import expression as ex
from .game import ExpressionModel, TableGame
from .partitions import Partition

FAMILIES = ("addmul", "andor", "exp")
LABELS = {"mul": "merge", "and": "merge", "pow": "merge", "or": "split", "add": "ignore"}
_GROUP_OP = {"addmul": "mul", "andor": "and", "exp": "pow"}
_JUNCTION_OP = {"addmul": "add", "andor": "or", "exp": "add"}


@dataclass(frozen=True)
class Operation:
    kind: str
    vars: tuple[int, ...]

    @property
    def label(self) -> str:
        return LABELS[self.kind]


@dataclass
class SyntheticModel:
    family: str
    n: int
    terms: list[tuple[int, ...]]
    operations: list[Operation]
    A: list[int]
    seed: int | None = None
    index: int | None = None
    _game: ExpressionModel | None = field(default=None, repr=False, compare=False)

    @property
    def tree(self):
        group = {"addmul": ex.mul, "andor": ex.and_, "exp": ex.pow_}[self.family]
        join = ex.or_ if self.family == "andor" else ex.add
        leaves = [ex.var(t[0]) if len(t) == 1 else group(*map(ex.var, t)) for t in self.terms]
        return leaves[0] if len(leaves) == 1 else join(*leaves)

    @property
    def game(self) -> ExpressionModel:
        if self._game is None:
            self._game = ExpressionModel(self.tree, self.n)
        return self._game

    def ground_truth(self) -> Partition:
        """Merge every group, split every junction (ignored ones included)."""
        g = [0] * (len(self.A) - 1)
        pos = {a: t for t, a in enumerate(self.A)}
        for op in self.operations:
            if op.label == "merge" and all(v in pos for v in op.vars):
                for v in op.vars[:-1]:
                    g[pos[v]] = 1
        return Partition.from_boundary(self.A, g)

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "seed": self.seed,
            "index": self.index,
            "model": self.game.to_json(),
            "terms": [list(t) for t in self.terms],
            "operations": [{"kind": op.kind, "vars": list(op.vars)} for op in self.operations],
            "A": self.A,
        }

    @classmethod
    def from_json(cls, obj: dict) -> SyntheticModel:
        return cls(
            family=obj["family"],
            n=int(obj["model"]["n"]),
            terms=[tuple(t) for t in obj["terms"]],
            operations=[Operation(o["kind"], tuple(o["vars"])) for o in obj["operations"]],
            A=list(obj["A"]),
            seed=obj.get("seed"),
            index=obj.get("index"),
        )


def operations_of(family: str, terms: list[tuple[int, ...]]) -> list[Operation]:
    ops = []
    for k, t in enumerate(terms):
        if len(t) > 1:
            ops.append(Operation(_GROUP_OP[family], t))
        if k + 1 < len(terms):
            ops.append(Operation(_JUNCTION_OP[family], (t[-1], terms[k + 1][0])))
    return ops


def build_model(family: str, term_sizes, A_terms: tuple[int, int] | None = None, **meta) -> SyntheticModel:
    """Model from a list of term sizes; ``A_terms=(s, e)`` spans terms s..e-1."""
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")
    terms, nxt = [], 0
    for size in term_sizes:
        if family == "exp" and size not in (1, 2):
            raise ValueError("exponential terms are single variables or base-exponent pairs")
        terms.append(tuple(range(nxt, nxt + size)))
        nxt += size
    s, e = A_terms if A_terms is not None else (0, len(terms))
    A = [v for t in terms[s:e] for v in t]
    return SyntheticModel(family, nxt, terms, operations_of(family, terms), A, **meta)


def _labeled_inside(sizes, s, e, family) -> bool:
    if any(k > 1 for k in sizes[s:e]):
        return True
    return family == "andor" and e - s >= 2


def _generate(family, rng, n_range, ops_range, max_span, arity3_prob, max_tries=1000) -> SyntheticModel:
    for _ in range(max_tries):
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        n_groups = int(rng.integers(ops_range[0], ops_range[1] + 1))
        sizes = []
        for _ in range(n_groups):
            three = family != "exp" and rng.random() < arity3_prob
            sizes.append(3 if three else 2)
        if sum(sizes) > n:
            continue
        sizes += [1] * (n - sum(sizes))
        sizes = [sizes[i] for i in rng.permutation(len(sizes))]
        starts = np.concatenate([[0], np.cumsum(sizes)])
        windows = []
        for s in range(len(sizes)):
            for e in range(s + 2, len(sizes) + 1):
                if e - s == len(sizes) or starts[e] - starts[s] > max_span:
                    continue
                if _labeled_inside(sizes, s, e, family):
                    windows.append((s, e))
        if not windows:
            continue
        s, e = windows[int(rng.integers(len(windows)))]
        return build_model(family, sizes, (s, e))
    raise RuntimeError("could not generate a model with the requested shape")


def gen_addmul(rng, n_range=(6, 10), ops_range=(2, 4), max_span=8, arity3_prob=0.0) -> SyntheticModel:
    """Sum of singletons and products over consecutive variables."""
    return _generate("addmul", rng, n_range, ops_range, max_span, arity3_prob)


def gen_andor(rng, n_range=(6, 10), ops_range=(2, 4), max_span=8, arity3_prob=0.0) -> SyntheticModel:
    """OR of singletons and AND groups over consecutive variables."""
    return _generate("andor", rng, n_range, ops_range, max_span, arity3_prob)


def gen_exponential(rng, n_range=(6, 10), ops_range=(2, 4), max_span=8) -> SyntheticModel:
    """Sum of singletons and ``x_i ** x_{i+1}`` powers (0 ** 0 == 1)."""
    return _generate("exp", rng, n_range, ops_range, max_span, 0.0)


GENERATORS = {"addmul": gen_addmul, "andor": gen_andor, "exp": gen_exponential}


def generate_dataset(family: str, count: int, seed: int, **kwargs) -> list[SyntheticModel]:
    """``count`` models, model k drawn from its own substream of ``seed``."""
    if family not in GENERATORS:
        raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")
    out = []
    for k in range(count):
        rng = np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(k,)))
        model = GENERATORS[family](rng, **kwargs)
        model.seed, model.index = int(seed), k
        out.append(model)
    return out


def ground_truth_check(model: SyntheticModel, partition: Partition) -> list[tuple[Operation, bool]]:
    """Correctness of each labeled operation with two or more variables in A."""
    span = set(model.A)
    if partition.support != sum(1 << a for a in span):
        raise ValueError("partition must cover exactly the model's span")
    results = []
    for op in model.operations:
        if op.label == "ignore":
            continue
        inside = [v for v in op.vars if v in span]
        if len(inside) < 2:
            continue
        blocks = {partition.block_of(v) for v in inside}
        ok = len(blocks) == 1 if op.label == "merge" else len(blocks) == len(inside)
        results.append((op, ok))
    return results


def correctness_rate(model: SyntheticModel, partition: Partition) -> float:
    res = ground_truth_check(model, partition)
    return float(np.mean([ok for _, ok in res])) if res else float("nan")


def write_manifest(models, path) -> None:
    with open(path, "w") as fh:
        for m in models:
            fh.write(json.dumps(m.to_json(), sort_keys=True) + "\n")


def read_manifest(path) -> list[SyntheticModel]:
    with open(path) as fh:
        return [SyntheticModel.from_json(json.loads(line)) for line in fh if line.strip()]


def random_table_game(n: int, rng: np.random.Generator) -> TableGame:
    """Game with i.i.d. standard normal values on every subset."""
    return TableGame(rng.standard_normal(1 << n))


def random_dividend_game(n: int, rng: np.random.Generator, max_order: int = 3, decay: float = 0.5) -> TableGame:
    """Game whose Harsanyi dividends are normal with scale ``decay ** (order - 1)``
    up to ``max_order`` and zero above."""
    dividends = np.zeros(1 << n)
    sizes = np.array([bin(k).count("1") for k in range(1 << n)])
    for k in range(1, max_order + 1):
        sel = sizes == k
        dividends[sel] = rng.standard_normal(sel.sum()) * decay ** (k - 1)
    values = dividends.copy()
    for i in range(n):
        idx = np.arange(1 << n)
        has = (idx >> i) & 1 == 1
        values[has] += values[idx[has] ^ (1 << i)]
    return TableGame(values)
