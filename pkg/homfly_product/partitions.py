"""
Partitions, partition vectors and symmetric group characters.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cache, reduce
from itertools import product
from math import factorial, gcd, prod


class SizeMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Partition:
    """A Young diagram, parts weakly decreasing. The empty partition is allowed."""

    parts: tuple[int, ...] = ()

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        if any(p <= 0 for p in parts):
            raise ValueError(f"Partition parts must be positive: {parts}")
        if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
            raise ValueError(f"Partition parts must be weakly decreasing: {parts}")
        object.__setattr__(self, "parts", parts)

    @property
    def size(self) -> int:
        return sum(self.parts)

    @property
    def length(self) -> int:
        return len(self.parts)

    def sort_key(self) -> tuple:
        # Reverse lexicographic within a fixed size
        return (self.size, tuple(-p for p in self.parts))

    def __lt__(self, other: Partition) -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        return ",".join(str(p) for p in self.parts) if self.parts else "-"

    @classmethod
    def parse(cls, text: str) -> Partition:
        text = text.strip()
        if text == "-":
            return cls()
        try:
            parts = tuple(int(p) for p in text.split(","))
        except ValueError:
            raise ValueError(f"Invalid partition '{text}'")
        return cls(parts)

    def multiplicities(self) -> dict[int, int]:
        counts: dict[int, int] = {}
        for p in self.parts:
            counts[p] = counts.get(p, 0) + 1
        return counts


@dataclass(frozen=True)
class PartitionVector:
    """An L-tuple of partitions, one per link component"""

    entries: tuple[Partition, ...]

    def __post_init__(self):
        if len(self.entries) < 1:
            raise ValueError("A partition vector needs at least one component")
        object.__setattr__(self, "entries", tuple(self.entries))

    @classmethod
    def of(cls, *parts: tuple[int, ...] | Partition) -> PartitionVector:
        """PartitionVector.of((2, 1), ()) builds ((2,1), empty)"""
        return cls(tuple(p if isinstance(p, Partition) else Partition(p) for p in parts))

    @property
    def components(self) -> int:
        return len(self.entries)

    @property
    def size(self) -> int:
        return sum(p.size for p in self.entries)

    @property
    def length(self) -> int:
        return sum(p.length for p in self.entries)

    @property
    def shape(self) -> tuple[int, ...]:
        """Sizes of the component partitions"""
        return tuple(p.size for p in self.entries)

    def sort_key(self) -> tuple:
        # Larger leading components first, then reverse lexicographic per component
        return (self.size, tuple((-p.size, tuple(-x for x in p.parts)) for p in self.entries))

    def __lt__(self, other: PartitionVector) -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        return "|".join(str(p) for p in self.entries)

    @classmethod
    def parse(cls, text: str) -> PartitionVector:
        return cls(tuple(Partition.parse(p) for p in text.strip().split("|")))

    def scale(self, d: int) -> PartitionVector:
        return PartitionVector(tuple(scale(p, d) for p in self.entries))

    def divide(self, d: int) -> PartitionVector:
        if any(part % d for p in self.entries for part in p.parts):
            raise ValueError(f"{self} is not divisible by {d}")
        return PartitionVector(
            tuple(Partition(tuple(part // d for part in p.parts)) for p in self.entries)
        )

    def conjugate(self) -> PartitionVector:
        return PartitionVector(tuple(conjugate(p) for p in self.entries))

    def union(self, other: PartitionVector) -> PartitionVector:
        """Componentwise union of parts, so that p_self * p_other = p_union"""
        if self.components != other.components:
            raise ValueError("Cannot join partition vectors of different lengths")
        return PartitionVector(
            tuple(
                Partition(tuple(sorted(a.parts + b.parts, reverse=True)))
                for a, b in zip(self.entries, other.entries)
            )
        )

    def divisors(self) -> list[int]:
        return divisors_of_parts([part for p in self.entries for part in p.parts])


@cache
def enumerate_partitions(n: int) -> tuple[Partition, ...]:
    """
    All partitions of n in reverse lexicographic order.

    >>> [str(p) for p in enumerate_partitions(3)]
    ['3', '2,1', '1,1,1']
    """
    if n < 0:
        raise ValueError(f"Cannot partition a negative number: {n}")

    def build(remaining: int, largest: int):
        if remaining == 0:
            yield ()
            return
        for first in range(min(remaining, largest), 0, -1):
            for rest in build(remaining - first, first):
                yield (first,) + rest

    return tuple(Partition(parts) for parts in build(n, n))


def partition_vectors(components: int, n: int) -> list[PartitionVector]:
    """All partition vectors of L components with total size n, sorted"""
    vectors = []
    for shape in _compositions(n, components):
        vectors.extend(vectors_of_shape(shape))
    return sorted(vectors, key=PartitionVector.sort_key)


def partition_vectors_upto(components: int, degree: int) -> list[PartitionVector]:
    """All nonempty partition vectors with total size 1..degree"""
    return [v for n in range(1, degree + 1) for v in partition_vectors(components, n)]


def vectors_of_shape(shape: tuple[int, ...]) -> list[PartitionVector]:
    return [
        PartitionVector(entries)
        for entries in product(*(enumerate_partitions(n) for n in shape))
    ]


def _compositions(n: int, parts: int):
    if parts == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in _compositions(n - first, parts - 1):
            yield (first,) + rest


def z_order(mu: Partition | PartitionVector) -> int:
    """
    Order of the centraliser of a permutation of cycle type mu, prod_j j^m_j m_j!

    >>> z_order(Partition((2, 1)))
    2
    """
    if isinstance(mu, PartitionVector):
        return prod(z_order(p) for p in mu.entries)
    return prod(j**m * factorial(m) for j, m in mu.multiplicities().items())


@cache
def _murnaghan_nakayama(shape: tuple[int, ...], cycles: tuple[int, ...]) -> int:
    if not cycles:
        return 1 if not shape else 0
    r, rest = cycles[0], cycles[1:]

    # Rim hooks of length r are moves b -> b - r on the beta-set of the shape
    n = len(shape)
    beta = [part + n - 1 - i for i, part in enumerate(shape)]
    occupied = set(beta)
    total = 0
    for b in beta:
        target = b - r
        if target < 0 or target in occupied:
            continue
        height = sum(1 for c in beta if target < c < b)
        moved = sorted((target if c == b else c for c in beta), reverse=True)
        remaining = tuple(
            part for part in (c - (n - 1 - i) for i, c in enumerate(moved)) if part > 0
        )
        total += (-1) ** height * _murnaghan_nakayama(remaining, rest)
    return total


def mn_character(shape: Partition, mu: Partition) -> int:
    """
    The irreducible character chi_shape evaluated on the class of cycle type mu.
    :raises SizeMismatch: if |shape| != |mu|
    """
    if shape.size != mu.size:
        raise SizeMismatch(f"|{shape}| = {shape.size} but |{mu}| = {mu.size}")
    return _murnaghan_nakayama(shape.parts, mu.parts)


def vector_character(shape: PartitionVector, mu: PartitionVector) -> int:
    """Product of component characters; zero when the component sizes differ"""
    if shape.shape != mu.shape:
        return 0
    return prod(mn_character(a, m) for a, m in zip(shape.entries, mu.entries))


def conjugate(shape: Partition) -> Partition:
    """
    >>> str(conjugate(Partition((5, 4, 2, 1))))
    '4,3,2,2,1'
    """
    if not shape.parts:
        return shape
    return Partition(
        tuple(sum(1 for p in shape.parts if p > i) for i in range(shape.parts[0]))
    )


def scale(mu: Partition, d: int) -> Partition:
    if d < 1:
        raise ValueError(f"Scale factor must be positive, got {d}")
    return Partition(tuple(p * d for p in mu.parts))


def divisors_of_parts(parts: list[int] | tuple[int, ...]) -> list[int]:
    if not parts:
        return [1]
    common = reduce(gcd, parts)
    return [d for d in range(1, common + 1) if common % d == 0]


def divisors(mu: Partition) -> list[int]:
    """
    All d with every part of mu divisible by d.

    >>> divisors(Partition((4, 2)))
    [1, 2]
    """
    return divisors_of_parts(mu.parts)


@cache
def mobius(n: int) -> int:
    if n < 1:
        raise ValueError(f"Mobius function is defined on positive integers, got {n}")
    result, m, p = 1, n, 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            result = -result
        p += 1
    if m > 1:
        result = -result
    return result
