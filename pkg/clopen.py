"""Clopen subsets of the tree boundary in canonical cone-antichain form.

A clopen is stored as a graded-lex sorted antichain of cone vertices in which
no complete sibling family occurs. That form is unique per boundary set, so
structural equality of :class:`Clopen` values is set equality.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Sequence, TYPE_CHECKING

from errors import LevelCapError, PreconditionError, ShapeMismatchError
from tree import (
    ROOT,
    ConeAddr,
    ConeRelation,
    TreeShape,
    Vertex,
    cone_relation,
    iter_level,
    make_vertex,
    vertex_rank,
)

if TYPE_CHECKING:
    from stone import Ray

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Clopen:
    """Element of Bool(∂T). Build through :func:`normalize` or the helpers."""

    shape: TreeShape
    cones: tuple[Vertex, ...]

    @classmethod
    def zero(cls, shape: TreeShape) -> Clopen:
        return cls(shape, ())

    @classmethod
    def one(cls, shape: TreeShape) -> Clopen:
        return cls(shape, (ROOT,))

    @classmethod
    def cone(cls, shape: TreeShape, letters: Iterable[int]) -> Clopen:
        """The single cone C_v for ``v`` given by ``letters``."""
        return cls(shape, (make_vertex(shape, letters),))

    @property
    def is_zero(self) -> bool:
        return not self.cones

    @property
    def is_one(self) -> bool:
        return self.cones == (ROOT,)

    @property
    def max_depth(self) -> int:
        return max((v.depth for v in self.cones), default=0)

    def cone_addrs(self) -> list[ConeAddr]:
        return [ConeAddr(self.shape, v) for v in self.cones]

    def __and__(self, other: Clopen) -> Clopen:
        return meet(self, other)

    def __or__(self, other: Clopen) -> Clopen:
        return join(self, other)

    def __invert__(self) -> Clopen:
        return complement(self)

    def __le__(self, other: Clopen) -> bool:
        return leq(self, other)

    def __str__(self) -> str:
        if not self.cones:
            return "0"
        if self.is_one:
            return "1"
        return " | ".join(f"C({v})" for v in self.cones)


def _check_same(a: Clopen, b: Clopen) -> None:
    if a.shape != b.shape:
        raise ShapeMismatchError(f"clopens over different shapes: {a.shape} vs {b.shape}")


def _normalize_vertices(shape: TreeShape, vertices: Iterable[Vertex]) -> tuple[Vertex, ...]:
    # Drop cones nested inside kept ones, shallowest first
    kept: set[tuple[int, ...]] = set()
    for v in sorted(set(vertices), key=Vertex.sort_key):
        if any(v.word[:i] in kept for i in range(v.depth + 1)):
            continue
        kept.add(v.word)

    # Merge complete sibling families, deepest level first, to a fixed point
    by_depth: dict[int, set[tuple[int, ...]]] = defaultdict(set)
    for word in kept:
        by_depth[len(word)].add(word)
    depth = max(by_depth, default=0)
    while depth > 0:
        families: dict[tuple[int, ...], set[int]] = defaultdict(set)
        for word in by_depth.get(depth, ()):
            families[word[:-1]].add(word[-1])
        full = shape.arity(depth - 1)
        for parent, letters in families.items():
            if len(letters) == full:
                by_depth[depth] -= {parent + (x,) for x in letters}
                by_depth[depth - 1].add(parent)
        depth -= 1

    result = [Vertex(w) for words in by_depth.values() for w in words]
    return tuple(sorted(result, key=Vertex.sort_key))


def normalize(cones: Sequence[ConeAddr], shape: TreeShape | None = None) -> Clopen:
    """Canonical clopen equal to the union of ``cones``.

    ``shape`` is required when ``cones`` is empty.
    """
    shapes = {c.shape for c in cones}
    if shape is not None:
        shapes.add(shape)
    if len(shapes) > 1:
        raise ShapeMismatchError("cones over different shapes cannot be normalized together")
    if not shapes:
        raise ValueError("normalize needs a shape when the cone list is empty")
    (the_shape,) = shapes
    return Clopen(the_shape, _normalize_vertices(the_shape, (c.vertex for c in cones)))


def from_vertices(shape: TreeShape, vertices: Iterable[Vertex]) -> Clopen:
    """Canonical clopen equal to the union of the cones at ``vertices``."""
    checked = [make_vertex(shape, v.word) for v in vertices]
    return Clopen(shape, _normalize_vertices(shape, checked))


def meet(a: Clopen, b: Clopen) -> Clopen:
    """Intersection, computed cone by cone."""
    _check_same(a, b)
    out: list[Vertex] = []
    for u in a.cones:
        for w in b.cones:
            rel = cone_relation(ConeAddr(a.shape, u), ConeAddr(b.shape, w))
            if rel in (ConeRelation.EQUAL, ConeRelation.A_INSIDE_B):
                out.append(u)
            elif rel is ConeRelation.B_INSIDE_A:
                out.append(w)
    return Clopen(a.shape, _normalize_vertices(a.shape, out))


def join(a: Clopen, b: Clopen) -> Clopen:
    """Union."""
    _check_same(a, b)
    return Clopen(a.shape, _normalize_vertices(a.shape, a.cones + b.cones))


def complement(a: Clopen) -> Clopen:
    """Boundary minus ``a``, by recursive sibling subtraction from the root."""
    cones = {v.word for v in a.cones}
    # Proper prefixes of the cones: the vertices that must be split further
    partial = {v.word[:i] for v in a.cones for i in range(v.depth)}
    out: list[Vertex] = []
    stack = [()]
    while stack:
        word = stack.pop()
        if word in cones:
            continue
        if word not in partial:
            out.append(Vertex(word))
            continue
        stack.extend(word + (x,) for x in range(a.shape.arity(len(word))))
    return Clopen(a.shape, _normalize_vertices(a.shape, out))


def difference(a: Clopen, b: Clopen) -> Clopen:
    return meet(a, complement(b))


def leq(a: Clopen, b: Clopen) -> bool:
    """Set inclusion a ⊆ b."""
    return meet(a, b) == a


def refine_to_level(a: Clopen, n: int, *, cap: int | None = None) -> int:
    """Indicator bitset of ``a`` over the level-``n`` vertices.

    Bit ``r`` is set when the vertex of lex rank ``r`` has its cone inside
    ``a``. Only meant as a finite oracle for tests and verification suites.
    """
    if n < a.max_depth:
        raise PreconditionError(f"level {n} is above the deepest cone (depth {a.max_depth})")
    try:
        a.shape.check_level(n, cap)
    except LevelCapError:
        logger.warning("refine_to_level(%s, %d) refused by level cap", a, n)
        raise
    bits = 0
    for v in a.cones:
        width = a.shape.subtree_size(v.depth, n)
        bits |= ((1 << width) - 1) << (vertex_rank(a.shape, v) * width)
    return bits


def contains_ray(a: Clopen, ray: Ray) -> bool:
    """Whether the boundary point ``ray`` lies in ``a``."""
    if a.shape != ray.shape:
        raise ShapeMismatchError(f"ray and clopen over different shapes: {ray.shape} vs {a.shape}")
    return any(ray.prefix(v.depth) == v for v in a.cones)


def cone_vertices_at(a: Clopen, n: int) -> list[Vertex]:
    """Level-``n`` vertices whose cones lie inside ``a`` (lex order)."""
    if n < a.max_depth:
        raise PreconditionError(f"level {n} is above the deepest cone (depth {a.max_depth})")
    out: list[Vertex] = []
    for v in a.cones:
        out.extend(iter_level(a.shape, n, below=v))
    return sorted(out, key=Vertex.sort_key)
