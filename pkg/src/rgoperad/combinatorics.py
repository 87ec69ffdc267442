"""Set partitions, subsets and permutations of ``{1..n}``.

Everything here is 1-based, matching the index conventions used by the
composition formulas downstream.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations
from typing import Iterable, Iterator


@dataclass(frozen=True)
class Permutation:
    """A bijection of ``{1..n}``, stored as its sequence of images."""

    images: tuple[int, ...]

    def __post_init__(self):
        images = tuple(self.images)
        object.__setattr__(self, "images", images)
        if sorted(images) != list(range(1, len(images) + 1)):
            raise ValueError(f"not a permutation of 1..{len(images)}: {images}")

    @property
    def n(self) -> int:
        return len(self.images)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    def __call__(self, i: int) -> int:
        return self.images[i - 1]

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, s in enumerate(self.images, start=1):
            inv[s - 1] = i
        return Permutation(tuple(inv))

    def compose(self, other: "Permutation") -> "Permutation":
        """Function composition ``self o other``: ``i -> self(other(i))``."""
        if other.n != self.n:
            raise ValueError("permutation sizes differ")
        return Permutation(tuple(self.images[j - 1] for j in other.images))

    def is_identity(self) -> bool:
        return all(s == i for i, s in enumerate(self.images, start=1))

    def __repr__(self):
        return f"Permutation{self.images}"


def all_permutations(n: int) -> Iterator[Permutation]:
    for p in permutations(range(1, n + 1)):
        yield Permutation(p)


def block_permutation(sigma: Permutation, i: int, j: int) -> Permutation:
    """Expand position ``i`` of ``sigma`` into a block of ``j`` consecutive slots.

    This is the permutation appearing in the equivariance law
    ``act(a, sigma) o_i b == act(a o_{sigma^-1(i)} b, block_permutation(sigma, i, j))``.
    """
    images: list[int] = []
    for s in sigma.images:
        if s < i:
            images.append(s)
        elif s == i:
            images.extend(range(i, i + j))
        else:
            images.append(s + j - 1)
    return Permutation(tuple(images))


def shifted_permutation(tau: Permutation, i: int, n: int) -> Permutation:
    """Act by ``tau`` on the block of slots ``i..i+|tau|-1`` inside ``{1..n+|tau|-1}``."""
    j = tau.n
    images = list(range(1, i))
    images.extend(i - 1 + t for t in tau.images)
    images.extend(range(i + j, n + j))
    return Permutation(tuple(images))


@dataclass(frozen=True)
class SetPartition:
    """A partition of ``{1..n}`` in canonical order.

    Each block is increasing and blocks are sorted by their minima.
    """

    n: int
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        blocks = tuple(tuple(b) for b in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        if self.n < 1:
            raise ValueError("partitions need n >= 1")
        seen = [x for b in blocks for x in b]
        if sorted(seen) != list(range(1, self.n + 1)):
            raise ValueError(f"blocks do not partition 1..{self.n}: {blocks}")
        if any(not b for b in blocks):
            raise ValueError("empty block")
        for b in blocks:
            if any(x >= y for x, y in zip(b, b[1:])):
                raise ValueError(f"block not increasing: {b}")
        mins = [b[0] for b in blocks]
        if any(x >= y for x, y in zip(mins, mins[1:])):
            raise ValueError("blocks not ordered by their minima")

    def __len__(self) -> int:
        return len(self.blocks)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)

    def __repr__(self):
        inner = ",".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks)
        return "{" + inner + "}"


@lru_cache(maxsize=None)
def _partitions(n: int) -> tuple[SetPartition, ...]:
    out = []
    # restricted growth strings in lexicographic order
    labels = [0] * n

    def rec(pos: int, top: int):
        if pos == n:
            blocks: list[list[int]] = [[] for _ in range(top + 1)]
            for x, lab in enumerate(labels, start=1):
                blocks[lab].append(x)
            out.append(SetPartition(n, tuple(map(tuple, blocks))))
            return
        for lab in range(top + 2):
            labels[pos] = lab
            rec(pos + 1, max(top, lab))

    labels[0] = 0
    rec(1, 0)
    return tuple(out)


def enumerate_set_partitions(n: int) -> list[SetPartition]:
    """All partitions of ``{1..n}``, canonical, in restricted-growth-string order."""
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    return list(_partitions(n))


def canonicalize_partition(blocks: Iterable[Iterable[int]], n: int | None = None) -> SetPartition:
    blocks = [sorted(set(b)) for b in blocks]
    if any(not b for b in blocks):
        raise ValueError("empty block")
    flat = [x for b in blocks for x in b]
    if len(flat) != len(set(flat)):
        raise ValueError("overlapping blocks")
    if n is None:
        n = max(flat)
    if sorted(flat) != list(range(1, n + 1)):
        raise ValueError(f"blocks do not cover 1..{n}")
    blocks.sort(key=lambda b: b[0])
    return SetPartition(n, tuple(map(tuple, blocks)))


def partition_permutation(p: SetPartition) -> Permutation:
    """The block-reading permutation: concatenate the blocks in canonical order."""
    return Permutation(tuple(x for b in p.blocks for x in b))


def partition_from_subset(J: Iterable[int], n: int) -> SetPartition:
    """Singletons outside ``J`` plus ``J`` itself as one block."""
    J = set(J)
    if not J:
        raise ValueError("J must be nonempty")
    if not J <= set(range(1, n + 1)):
        raise ValueError(f"J is not a subset of 1..{n}")
    rest = [[x] for x in range(1, n + 1) if x not in J]
    return canonicalize_partition(rest + [sorted(J)], n)


def nonempty_subsets(n: int, min_size: int = 1, max_size: int | None = None) -> Iterator[tuple[int, ...]]:
    if max_size is None:
        max_size = n
    for size in range(min_size, max_size + 1):
        yield from combinations(range(1, n + 1), size)
