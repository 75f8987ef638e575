"""Spherically homogeneous rooted trees: shapes, vertices and cone sets.

A tree is described by an eventually periodic arity sequence. Vertices are
finite words, letter ``i`` ranging over ``range(arity(i))``, and are ordered
graded-lexicographically (shorter words first, then lexicographically).
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from functools import reduce
from itertools import product
from operator import mul
from typing import Iterable, Iterator, Sequence

import config
from errors import InvalidVertexError, LevelCapError, ShapeMismatchError

logger = logging.getLogger(__name__)

ALPHABET = "0123456789abcdefghijklmnopqrstuvwxyz"
ROOT_SYMBOLS = ("ε", '""', "")


def _minimal_period(seq: tuple[int, ...], multiple_of: int = 1) -> tuple[int, ...]:
    """Shortest prefix of ``seq`` whose repetition gives ``seq``.

    The returned length is restricted to multiples of ``multiple_of``.
    """
    n = len(seq)
    for p in range(multiple_of, n + 1, multiple_of):
        if n % p == 0 and seq[:p] * (n // p) == seq:
            return seq[:p]
    return seq


def _absorb_tail(pre: tuple[int, ...], cycle: tuple[int, ...]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Move trailing pre-period letters into the cycle (rotating it)."""
    while pre and pre[-1] == cycle[-1]:
        pre = pre[:-1]
        cycle = (cycle[-1],) + cycle[:-1]
    return pre, cycle


@dataclass(frozen=True)
class TreeShape:
    """Eventually periodic arity sequence ``pre_period + period^ω``.

    Stored canonically (minimal period, shortest pre-period), so two shapes are
    equal exactly when their arity sequences agree.
    """

    pre_period: tuple[int, ...]
    period: tuple[int, ...]

    def __post_init__(self) -> None:
        pre = tuple(int(x) for x in self.pre_period)
        per = tuple(int(x) for x in self.period)
        if not per:
            raise ValueError("period must be non-empty")
        bad = [x for x in pre + per if x < 2]
        if bad:
            raise ValueError(f"alphabet sizes must be >= 2, got {bad[0]}")
        if max(pre + per) > len(ALPHABET):
            raise ValueError(f"alphabet sizes above {len(ALPHABET)} have no text syntax")
        pre, per = _absorb_tail(pre, _minimal_period(per))
        object.__setattr__(self, "pre_period", pre)
        object.__setattr__(self, "period", per)

    @classmethod
    def regular(cls, arity: int) -> TreeShape:
        """The ``arity``-regular tree."""
        return cls((), (arity,))

    def arity(self, depth: int) -> int:
        """Alphabet size below depth ``depth`` (the size of X_{depth+1})."""
        if depth < 0:
            raise ValueError(f"depth must be non-negative, got {depth}")
        if depth < len(self.pre_period):
            return self.pre_period[depth]
        return self.period[(depth - len(self.pre_period)) % len(self.period)]

    @property
    def is_regular(self) -> bool:
        return not self.pre_period and len(self.period) == 1

    @property
    def class_count(self) -> int:
        """Number of depth classes (pre-period depths plus one per period slot)."""
        return len(self.pre_period) + len(self.period)

    def depth_class(self, depth: int) -> int:
        """Index of the depth class that ``depth`` belongs to."""
        if depth < len(self.pre_period):
            return depth
        return len(self.pre_period) + (depth - len(self.pre_period)) % len(self.period)

    def next_class(self, cls: int) -> int:
        """Depth class one level below a depth of class ``cls``."""
        nxt = cls + 1
        if nxt < self.class_count:
            return nxt
        return len(self.pre_period)

    def class_depth(self, cls: int) -> int:
        """Smallest depth belonging to class ``cls``."""
        return cls

    def level_size(self, n: int) -> int:
        """Number of vertices at depth ``n``."""
        return reduce(mul, (self.arity(k) for k in range(n)), 1)

    def subtree_size(self, depth: int, n: int) -> int:
        """Number of depth-``n`` descendants of a depth-``depth`` vertex."""
        return reduce(mul, (self.arity(k) for k in range(depth, n)), 1)

    def shifted(self, k: int) -> TreeShape:
        """Shape of the subtree hanging from any depth-``k`` vertex."""
        seq = [self.arity(d) for d in range(k, k + max(len(self.pre_period) - k, 0))]
        start = k + len(seq)
        offset = (start - len(self.pre_period)) % len(self.period)
        per = self.period[offset:] + self.period[:offset]
        return TreeShape(tuple(seq), per)

    def check_level(self, n: int, cap: int | None = None) -> int:
        """Return the size of level ``n``; raise if it exceeds the cap."""
        cap = config.LEVEL_SIZE_CAP if cap is None else cap
        size = self.level_size(n)
        if size > cap:
            raise LevelCapError(f"level {n} has {size} vertices, above the cap of {cap}")
        return size

    def __str__(self) -> str:
        if self.is_regular:
            return f"arity={self.period[0]}"
        period = ",".join(str(x) for x in self.period)
        if not self.pre_period:
            return f"period={period}"
        pre = ",".join(str(x) for x in self.pre_period)
        return f"pre={pre} period={period}"


@dataclass(frozen=True)
class Vertex:
    """A vertex of the tree as a word of letters; the empty word is the root."""

    word: tuple[int, ...] = ()

    @property
    def depth(self) -> int:
        return len(self.word)

    @property
    def is_root(self) -> bool:
        return not self.word

    @property
    def parent(self) -> Vertex:
        if not self.word:
            raise ValueError("the root has no parent")
        return Vertex(self.word[:-1])

    def child(self, letter: int) -> Vertex:
        return Vertex(self.word + (letter,))

    def prefix(self, n: int) -> Vertex:
        return Vertex(self.word[:n])

    def is_prefix_of(self, other: Vertex) -> bool:
        """True when ``other`` lies in the subtree of ``self`` (inclusive)."""
        return other.word[: len(self.word)] == self.word

    def sort_key(self) -> tuple[int, tuple[int, ...]]:
        """Graded lexicographic key."""
        return (len(self.word), self.word)

    def __lt__(self, other: Vertex) -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        if not self.word:
            return "ε"
        return "".join(ALPHABET[x] for x in self.word)


ROOT = Vertex()


def make_vertex(shape: TreeShape, letters: Iterable[int]) -> Vertex:
    """Build a vertex, checking each letter against its depth's alphabet."""
    word = tuple(int(x) for x in letters)
    for depth, letter in enumerate(word):
        if not 0 <= letter < shape.arity(depth):
            raise InvalidVertexError(
                f"letter {letter} at depth {depth} is outside range(0, {shape.arity(depth)})"
            )
    return Vertex(word)


def vertex_rank(shape: TreeShape, v: Vertex) -> int:
    """Position of ``v`` among the vertices of its level (mixed radix)."""
    rank = 0
    for depth, letter in enumerate(v.word):
        rank = rank * shape.arity(depth) + letter
    return rank


def vertex_at_rank(shape: TreeShape, n: int, rank: int) -> Vertex:
    """Inverse of :func:`vertex_rank` on level ``n``."""
    letters = []
    for depth in reversed(range(n)):
        rank, letter = divmod(rank, shape.arity(depth))
        letters.append(letter)
    return Vertex(tuple(reversed(letters)))


class ConeRelation(enum.Enum):
    EQUAL = "equal"
    A_INSIDE_B = "a_inside_b"
    B_INSIDE_A = "b_inside_a"
    DISJOINT = "disjoint"


@dataclass(frozen=True)
class ConeAddr:
    """The cone set C_v of all boundary rays through ``vertex``."""

    shape: TreeShape
    vertex: Vertex

    def __post_init__(self) -> None:
        make_vertex(self.shape, self.vertex.word)

    def __str__(self) -> str:
        return f"C({self.vertex})" if self.vertex.word else "C(ε)"


def arity(shape: TreeShape, depth: int) -> int:
    """Alphabet size below depth ``depth``."""
    return shape.arity(depth)


def iter_level(shape: TreeShape, n: int, below: Vertex = ROOT) -> Iterator[Vertex]:
    """Depth-``n`` descendants of ``below`` in lex order, without a cap check."""
    ranges = [range(shape.arity(d)) for d in range(below.depth, n)]
    for tail in product(*ranges):
        yield Vertex(below.word + tail)


def level_vertices(shape: TreeShape, n: int, *, cap: int | None = None) -> list[Vertex]:
    """All depth-``n`` vertices in lexicographic order."""
    shape.check_level(n, cap)
    return list(iter_level(shape, n))


def cone_relation(a: ConeAddr, b: ConeAddr) -> ConeRelation:
    """Compare two cones; cones are always nested or disjoint."""
    if a.shape != b.shape:
        raise ShapeMismatchError(f"cones over different shapes: {a.shape} vs {b.shape}")
    if a.vertex == b.vertex:
        return ConeRelation.EQUAL
    if b.vertex.is_prefix_of(a.vertex):
        return ConeRelation.A_INSIDE_B
    if a.vertex.is_prefix_of(b.vertex):
        return ConeRelation.B_INSIDE_A
    return ConeRelation.DISJOINT


def incomparable(u: Vertex, v: Vertex) -> bool:
    """Neither vertex is a descendant of the other."""
    return not (u.is_prefix_of(v) or v.is_prefix_of(u))


def sort_vertices(vertices: Sequence[Vertex]) -> list[Vertex]:
    return sorted(vertices, key=Vertex.sort_key)
