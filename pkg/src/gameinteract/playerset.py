"""Subsets of players encoded as bit masks.

Masks are plain Python ints at the API boundary and ``int64`` arrays inside
vectorized code. Bit 63 maps onto the sign bit of ``int64``, which is harmless
for the and/or/shift arithmetic used here.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError

MAX_PLAYERS = 64


def full_mask(n: int) -> int:
    return (1 << n) - 1


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def indices(mask: int) -> list[int]:
    """Sorted player indices contained in ``mask``."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def mask_of(players: Iterable[int]) -> int:
    mask = 0
    for i in players:
        i = int(i)
        if i < 0:
            raise DomainError(f"negative player index {i}")
        mask |= 1 << i
    return mask


def as_mask(players, n: int | None = None) -> int:
    """Coerce a PlayerSet, int mask or iterable of indices to an int mask.

    When ``n`` is given the mask is checked to lie within ``0..n-1``.
    """
    if isinstance(players, PlayerSet):
        mask = players.bits
    elif isinstance(players, (int, np.integer)):
        mask = int(players)
        if mask < 0:
            raise DomainError("player mask must be non-negative")
    else:
        mask = mask_of(players)
    if n is not None and mask >> n:
        raise DomainError(f"player index out of range for n={n}: {indices(mask >> n << n)}")
    return mask


def to_signed(mask: int) -> int:
    """Map a 64-bit unsigned mask to the int64 value with the same bits."""
    return mask - (1 << 64) if mask >= 1 << 63 else mask


def mask_array(masks) -> np.ndarray:
    """Convert masks (ints or an array) to a 1-d ``int64`` array."""
    if isinstance(masks, np.ndarray):
        if masks.dtype == np.uint64:
            return masks.view(np.int64).ravel()
        return masks.astype(np.int64, copy=False).ravel()
    if isinstance(masks, (int, np.integer)):
        masks = [masks]
    return np.array([to_signed(int(m)) for m in masks], dtype=np.int64)


def bit_matrix(masks: np.ndarray, n: int) -> np.ndarray:
    """Boolean (len(masks), n) membership matrix."""
    shifts = np.arange(n, dtype=np.int64)
    return ((masks[:, None] >> shifts[None, :]) & 1).astype(bool)


def subset_lattice(units: list[int]) -> tuple[np.ndarray, np.ndarray]:
    """All unions of ``units`` in binary-counting order.

    Entry ``k`` is the union of the units whose bit is set in ``k``; the
    second array holds how many units each union uses.
    """
    masks = np.zeros(1, dtype=np.int64)
    sizes = np.zeros(1, dtype=np.int64)
    for u in units:
        u = to_signed(u)
        masks = np.concatenate([masks, masks | u])
        sizes = np.concatenate([sizes, sizes + 1])
    return masks, sizes


@dataclass(frozen=True)
class PlayerSet:
    """A subset of ``{0, ..., n-1}`` stored as a bit vector."""

    bits: int
    n: int

    def __post_init__(self):
        if not 0 <= self.n <= MAX_PLAYERS:
            raise DomainError(f"player count must be in [0, {MAX_PLAYERS}], got {self.n}")
        if self.bits < 0 or self.bits >> self.n:
            raise DomainError(f"bits outside 0..{self.n - 1}")

    @classmethod
    def of(cls, players: Iterable[int], n: int) -> PlayerSet:
        return cls(as_mask(list(players), n), n)

    @classmethod
    def full(cls, n: int) -> PlayerSet:
        return cls(full_mask(n), n)

    @classmethod
    def empty(cls, n: int) -> PlayerSet:
        return cls(0, n)

    def _other(self, other) -> int:
        if isinstance(other, PlayerSet) and other.n != self.n:
            raise DomainError("player sets over different n")
        return as_mask(other, self.n)

    def __or__(self, other) -> PlayerSet:
        return PlayerSet(self.bits | self._other(other), self.n)

    def __and__(self, other) -> PlayerSet:
        return PlayerSet(self.bits & self._other(other), self.n)

    def __sub__(self, other) -> PlayerSet:
        return PlayerSet(self.bits & ~self._other(other), self.n)

    def __invert__(self) -> PlayerSet:
        return PlayerSet(full_mask(self.n) & ~self.bits, self.n)

    def __contains__(self, i: int) -> bool:
        return 0 <= i < self.n and bool(self.bits >> i & 1)

    def __iter__(self) -> Iterator[int]:
        return iter(indices(self.bits))

    def __len__(self) -> int:
        return popcount(self.bits)

    def __int__(self) -> int:
        return self.bits

    def issubset(self, other) -> bool:
        return self.bits & ~self._other(other) == 0

    def __repr__(self) -> str:
        return f"PlayerSet({indices(self.bits)}, n={self.n})"
