"""Partitions of a target set into coalitions.

A contiguous partition of the sorted members ``a_0 < ... < a_{m-1}`` is
encoded by a boundary vector ``g`` of length ``m - 1``: ``g[t] == 1`` puts
``a_t`` and ``a_{t+1}`` in the same coalition.
"""

from __future__ import annotations

from collections.abc import Iterator, Sequence
from dataclasses import dataclass

from .exceptions import DomainError
from .playerset import indices, mask_of


@dataclass(frozen=True)
class Partition:
    """Disjoint non-empty blocks (bit masks) sorted by their lowest member."""

    blocks: tuple[int, ...]

    def __post_init__(self):
        seen = 0
        for b in self.blocks:
            if b <= 0:
                raise DomainError("partition blocks must be non-empty")
            if seen & b:
                raise DomainError("partition blocks overlap")
            seen |= b
        ordered = tuple(sorted(self.blocks, key=lambda b: (b & -b)))
        object.__setattr__(self, "blocks", ordered)

    @classmethod
    def from_lists(cls, blocks: Sequence[Sequence[int]]) -> Partition:
        return cls(tuple(mask_of(b) for b in blocks))

    @classmethod
    def from_boundary(cls, members: Sequence[int], g: Sequence[int]) -> Partition:
        members = sorted(members)
        if len(g) != max(len(members) - 1, 0):
            raise DomainError(f"boundary vector of length {len(g)} for {len(members)} members")
        blocks, cur = [], [members[0]] if members else []
        for t, bit in enumerate(g):
            if bit:
                cur.append(members[t + 1])
            else:
                blocks.append(cur)
                cur = [members[t + 1]]
        if cur:
            blocks.append(cur)
        return cls.from_lists(blocks)

    @classmethod
    def singletons(cls, members: Sequence[int]) -> Partition:
        return cls.from_lists([[i] for i in members])

    @classmethod
    def grand(cls, members: Sequence[int]) -> Partition:
        return cls.from_lists([list(members)])

    @property
    def support(self) -> int:
        out = 0
        for b in self.blocks:
            out |= b
        return out

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)

    def to_lists(self) -> list[list[int]]:
        return [indices(b) for b in self.blocks]

    def is_contiguous(self, members: Sequence[int] | None = None) -> bool:
        """Whether every block is a run of consecutive members."""
        members = sorted(members) if members is not None else indices(self.support)
        pos = {a: t for t, a in enumerate(members)}
        for b in self.blocks:
            idx = [pos[i] for i in indices(b)]
            if idx[-1] - idx[0] != len(idx) - 1:
                return False
        return True

    def boundary(self, members: Sequence[int] | None = None) -> tuple[int, ...]:
        members = sorted(members) if members is not None else indices(self.support)
        if not self.is_contiguous(members):
            raise DomainError("only contiguous partitions have a boundary vector")
        block_of = {}
        for k, b in enumerate(self.blocks):
            for i in indices(b):
                block_of[i] = k
        return tuple(int(block_of[members[t]] == block_of[members[t + 1]]) for t in range(len(members) - 1))

    def growth_string(self, members: Sequence[int] | None = None) -> tuple[int, ...]:
        """Restricted growth string: block number of each member in order."""
        members = sorted(members) if members is not None else indices(self.support)
        label = {}
        for k, b in enumerate(self.blocks):
            for i in indices(b):
                label[i] = k
        return tuple(label[a] for a in members)

    def block_of(self, player: int) -> int:
        for b in self.blocks:
            if b >> player & 1:
                return b
        raise DomainError(f"player {player} is not covered by the partition")


def contiguous_partitions(members: Sequence[int]) -> Iterator[tuple[tuple[int, ...], Partition]]:
    """All contiguous partitions in boundary-vector binary-counting order.

    Boundary ``t`` is the most significant bit, so the order is
    lexicographic in ``g``.
    """
    members = sorted(members)
    k = len(members) - 1
    for code in range(1 << k):
        g = tuple((code >> (k - 1 - t)) & 1 for t in range(k))
        yield g, Partition.from_boundary(members, g)


def set_partitions(members: Sequence[int]) -> Iterator[tuple[tuple[int, ...], Partition]]:
    """All partitions as (restricted growth string, partition), lexicographic."""
    members = sorted(members)
    m = len(members)
    if m == 0:
        return
    rgs = [0] * m

    def emit():
        blocks: dict[int, list[int]] = {}
        for a, lbl in zip(members, rgs):
            blocks.setdefault(lbl, []).append(a)
        return tuple(rgs), Partition.from_lists(list(blocks.values()))

    def rec(t, top):
        if t == m:
            yield emit()
            return
        for lbl in range(top + 2):
            rgs[t] = lbl
            yield from rec(t + 1, max(top, lbl))

    rgs[0] = 0
    yield from rec(1, 0)
