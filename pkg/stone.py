"""Stone duality for Bool(∂T) at finite depth.

Boundary rays, two-valued maps (characteristic homomorphisms and arbitrary
query-budgeted oracles), ideal and homomorphism checks on finite closed
subalgebras, reconstruction of rays from homomorphisms, and the passage
between tree automorphisms and automorphisms of the clopen algebra.
"""

from __future__ import annotations

import enum
import logging
import math
import threading
from dataclasses import dataclass
from itertools import combinations_with_replacement
from typing import TYPE_CHECKING, Callable, Collection, Iterable, Iterator, Mapping

import config
from clopen import Clopen, complement, contains_ray, from_vertices, join, meet
from errors import (
    HomomorphismViolation,
    InvalidVertexError,
    LevelCapError,
    NotAnIdealError,
    NotTreeInducedError,
    OracleBudgetExhausted,
    PreconditionError,
    ShapeMismatchError,
    UniverseNotClosedError,
)
from tree import ROOT, TreeShape, Vertex, _absorb_tail, _minimal_period, level_vertices

if TYPE_CHECKING:
    from autgrp import TreeAut

logger = logging.getLogger(__name__)

# Largest level whose full power set is enumerated as a subalgebra
MAX_SUBALGEBRA_LEVEL_SIZE = 16


@dataclass(frozen=True)
class Ray:
    """Eventually periodic boundary point ``pre · cycle^ω``.

    Stored canonically: shortest cycle (a multiple of the shape's period
    length) and shortest pre-period, so equal rays compare equal.
    """

    shape: TreeShape
    pre: tuple[int, ...]
    cycle: tuple[int, ...]

    def __post_init__(self) -> None:
        pre = tuple(int(x) for x in self.pre)
        cycle = tuple(int(x) for x in self.cycle)
        if not cycle:
            raise ValueError("ray cycle must be non-empty")
        step = len(self.shape.period)
        if len(cycle) % step:
            raise InvalidVertexError(
                f"cycle length {len(cycle)} is not a multiple of the shape period {step}"
            )
        object.__setattr__(self, "pre", pre)
        object.__setattr__(self, "cycle", cycle)
        horizon = max(len(pre), len(self.shape.pre_period)) + math.lcm(len(cycle), step)
        for depth in range(horizon):
            letter = self.letter(depth)
            if not 0 <= letter < self.shape.arity(depth):
                raise InvalidVertexError(
                    f"ray letter {letter} at depth {depth} is outside range(0, {self.shape.arity(depth)})"
                )
        pre, cycle = _absorb_tail(pre, _minimal_period(cycle, step))
        object.__setattr__(self, "pre", pre)
        object.__setattr__(self, "cycle", cycle)

    def letter(self, depth: int) -> int:
        if depth < len(self.pre):
            return self.pre[depth]
        return self.cycle[(depth - len(self.pre)) % len(self.cycle)]

    def prefix(self, n: int) -> Vertex:
        """The depth-``n`` vertex the ray passes through."""
        return Vertex(tuple(self.letter(k) for k in range(n)))

    def __str__(self) -> str:
        return f"{_letters(self.pre)}({_letters(self.cycle)})*"


def _letters(word: Iterable[int]) -> str:
    return "".join(str(Vertex((x,))) for x in word)


class Bit(enum.IntEnum):
    """The two-element Boolean algebra, 0 ≤ 1."""

    ZERO = 0
    ONE = 1

    def __and__(self, other: int) -> Bit:
        return Bit(int(self) & int(other))

    def __or__(self, other: int) -> Bit:
        return Bit(int(self) | int(other))

    def __invert__(self) -> Bit:
        return Bit(1 - int(self))


class TwoValuedMap:
    """Deterministic oracle assigning a :class:`Bit` to each clopen.

    Answers are cached, so repeated queries are free; each distinct query
    consumes one unit of ``budget``. Safe to share between threads.
    """

    def __init__(
        self,
        rule: Callable[[Clopen], int],
        shape: TreeShape,
        *,
        budget: int | None = None,
        name: str = "f",
    ) -> None:
        self._rule = rule
        self.shape = shape
        self.budget = config.ORACLE_BUDGET if budget is None else budget
        if self.budget < 0:
            raise ValueError("oracle budget must be >= 0")
        self.name = name
        self.queries = 0
        self._cache: dict[Clopen, Bit] = {}
        self._lock = threading.Lock()

    @classmethod
    def from_table(
        cls, shape: TreeShape, table: Mapping[Clopen, int], *, budget: int | None = None, name: str = "table"
    ) -> TwoValuedMap:
        """Oracle backed by an explicit finite table; unlisted clopens are an error."""
        frozen = dict(table)

        def rule(a: Clopen) -> int:
            if a not in frozen:
                raise PreconditionError(f"oracle {name!r} has no value for {a}")
            return frozen[a]

        return cls(rule, shape, budget=budget, name=name)

    def __call__(self, a: Clopen) -> Bit:
        if a.shape != self.shape:
            raise ShapeMismatchError(f"oracle over {self.shape} queried with a clopen over {a.shape}")
        with self._lock:
            cached = self._cache.get(a)
            if cached is not None:
                return cached
            if self.queries >= self.budget:
                raise OracleBudgetExhausted(f"oracle {self.name!r} exhausted its budget of {self.budget} queries")
            self.queries += 1
            value = Bit(1 if self._rule(a) else 0)
            self._cache[a] = value
            return value

    def __repr__(self) -> str:
        return f"TwoValuedMap({self.name!r}, queries={self.queries}/{self.budget})"


def phi_gamma(ray: Ray, *, budget: int | None = None) -> TwoValuedMap:
    """Characteristic map A ↦ [ray ∈ A]."""
    return TwoValuedMap(lambda a: contains_ray(a, ray), ray.shape, budget=budget, name=f"phi[{ray}]")


class DepthSubalgebra:
    """All clopens whose cones have depth ≤ ``n``; closed under every operation."""

    def __init__(self, shape: TreeShape, n: int) -> None:
        size = shape.level_size(n)
        if size > MAX_SUBALGEBRA_LEVEL_SIZE:
            raise LevelCapError(
                f"depth-{n} subalgebra has 2^{size} elements; enumeration stops at 2^{MAX_SUBALGEBRA_LEVEL_SIZE}"
            )
        self.shape = shape
        self.n = n
        self._level = level_vertices(shape, n)
        self._elements: list[Clopen] | None = None

    def elements(self) -> list[Clopen]:
        if self._elements is None:
            self._elements = [
                from_vertices(self.shape, (v for i, v in enumerate(self._level) if mask >> i & 1))
                for mask in range(1 << len(self._level))
            ]
        return self._elements

    def __iter__(self) -> Iterator[Clopen]:
        return iter(self.elements())

    def __len__(self) -> int:
        return 1 << len(self._level)

    def __contains__(self, a: object) -> bool:
        return isinstance(a, Clopen) and a.shape == self.shape and a.max_depth <= self.n


def depth_subalgebra(shape: TreeShape, n: int) -> DepthSubalgebra:
    return DepthSubalgebra(shape, n)


def _universe(universe: Collection[Clopen]) -> list[Clopen]:
    """Materialize a finite universe, checking closure unless it is closed by construction."""
    if isinstance(universe, DepthSubalgebra):
        return universe.elements()
    elems = list(dict.fromkeys(universe))
    members = set(elems)
    for a in elems:
        if complement(a) not in members:
            raise UniverseNotClosedError(f"complement of {a} is missing from the universe")
    for a, b in combinations_with_replacement(elems, 2):
        if meet(a, b) not in members or join(a, b) not in members:
            raise UniverseNotClosedError(f"universe is not closed under meet/join at ({a}, {b})")
    return elems


def is_ideal(ideal: Iterable[Clopen], universe: Collection[Clopen]) -> bool:
    """Non-empty, join-closed, and absorbing under meets with the universe."""
    elems = _universe(universe)
    members = set(ideal)
    if not members:
        return False
    outside = members - set(elems)
    if outside:
        raise PreconditionError(f"{next(iter(outside))} is not in the universe")
    for a, b in combinations_with_replacement(list(members), 2):
        if join(a, b) not in members:
            logger.debug("ideal check failed: %s | %s not in set", a, b)
            return False
    for a in members:
        for u in elems:
            if meet(a, u) not in members:
                logger.debug("ideal check failed: %s & %s not in set", a, u)
                return False
    return True


def is_maximal_ideal(ideal: Iterable[Clopen], universe: Collection[Clopen]) -> bool:
    """Exactly one of ``a`` and its complement lies in the ideal, for every ``a``."""
    members = set(ideal)
    if not is_ideal(members, universe):
        raise NotAnIdealError("maximality is only defined for ideals")
    return all((a in members) != (complement(a) in members) for a in _universe(universe))


def kernel(f: TwoValuedMap, universe: Collection[Clopen]) -> frozenset[Clopen]:
    """Elements of the universe sent to 0."""
    return frozenset(a for a in _universe(universe) if f(a) == Bit.ZERO)


def homomorphism_violation(f: TwoValuedMap, universe: Collection[Clopen]) -> HomomorphismViolation | None:
    """First violated law (zero, one, meet, join) with witnesses, or None."""
    elems = _universe(universe)
    zero, one = Clopen.zero(f.shape), Clopen.one(f.shape)
    if zero in elems and f(zero) != Bit.ZERO:
        return HomomorphismViolation("zero", [zero], f"f(0) = 1 for {f.name}")
    if one in elems and f(one) != Bit.ONE:
        return HomomorphismViolation("one", [one], f"f(1) = 0 for {f.name}")
    for a, b in combinations_with_replacement(elems, 2):
        fa, fb = f(a), f(b)
        if f(meet(a, b)) != (fa & fb):
            return HomomorphismViolation("meet", [a, b], f"f({a} & {b}) != f({a}) & f({b})")
        if f(join(a, b)) != (fa | fb):
            return HomomorphismViolation("join", [a, b], f"f({a} | {b}) != f({a}) | f({b})")
    return None


def is_homomorphism(f: TwoValuedMap, universe: Collection[Clopen]) -> bool:
    """Whether ``f`` preserves 0, 1, meets and joins on the universe."""
    violation = homomorphism_violation(f, universe)
    if violation is not None:
        logger.info("%s is not a homomorphism: %s", f.name, violation)
    return violation is None


def reconstruct_ray(f: TwoValuedMap, depth: int) -> Vertex:
    """Depth-``depth`` prefix of the unique ray ``γ`` with ``f = phi_gamma(γ)``.

    Descends level by level into the one child cone sent to 1.
    """
    shape = f.shape
    if f(Clopen.one(shape)) != Bit.ONE:
        raise HomomorphismViolation("one", [Clopen.one(shape)], "f(1) = 0, no ray can be reconstructed")
    if f(Clopen.zero(shape)) != Bit.ZERO:
        raise HomomorphismViolation("zero", [Clopen.zero(shape)], "f(0) = 1, no ray can be reconstructed")
    v = ROOT
    for k in range(depth):
        children = [v.child(x) for x in range(shape.arity(k))]
        hits = [c for c in children if f(Clopen(shape, (c,))) == Bit.ONE]
        if not hits:
            raise HomomorphismViolation(
                "join",
                [Clopen(shape, (c,)) for c in children],
                f"no child cone of C({v}) maps to 1 although their join does",
            )
        if len(hits) > 1:
            raise HomomorphismViolation(
                "meet",
                [Clopen(shape, (c,)) for c in hits[:2]],
                f"sibling cones C({hits[0]}) and C({hits[1]}) both map to 1, forcing f(0) = 1",
            )
        v = hits[0]
    return v


class AlgebraMap:
    """A map Bool(∂T) → Bool(∂T), applied cone-wise when tree-induced."""

    def __init__(self, shape: TreeShape, func: Callable[[Clopen], Clopen], name: str = "α") -> None:
        self.shape = shape
        self._func = func
        self.name = name

    def __call__(self, a: Clopen) -> Clopen:
        if a.shape != self.shape:
            raise ShapeMismatchError(f"map over {self.shape} applied to a clopen over {a.shape}")
        return self._func(a)

    def then(self, other: AlgebraMap) -> AlgebraMap:
        """Apply ``self`` first, then ``other``."""
        return AlgebraMap(self.shape, lambda a: other(self(a)), f"{self.name};{other.name}")

    def __repr__(self) -> str:
        return f"AlgebraMap({self.name})"


def induced_algebra_map(g: TreeAut) -> AlgebraMap:
    """The automorphism C ↦ C^g of Bool(∂T) induced by ``g``."""
    from autgrp import act

    shape = g.shape

    def image(a: Clopen) -> Clopen:
        return from_vertices(shape, (act(g, v) for v in a.cones))

    return AlgebraMap(shape, image, name=str(g))


def identity_algebra_map(shape: TreeShape) -> AlgebraMap:
    return AlgebraMap(shape, lambda a: a, name="id")


def reconstruct_vertex_map(alpha: AlgebraMap, depth: int) -> dict[Vertex, Vertex]:
    """Level-``depth`` permutation v ↦ w read off from α(C_v) = C_w.

    Every cone of depth ≤ ``depth`` must go to a single cone of the same depth.
    """
    shape = alpha.shape
    mapping: dict[Vertex, Vertex] = {ROOT: ROOT}
    for n in range(1, depth + 1):
        mapping = {}
        for v in level_vertices(shape, n):
            img = alpha(Clopen(shape, (v,)))
            if len(img.cones) != 1 or img.cones[0].depth != n:
                raise NotTreeInducedError(
                    f"not tree-induced at depth {n}: C({v}) is sent to {img}"
                )
            mapping[v] = img.cones[0]
        if len(set(mapping.values())) != len(mapping):
            raise NotTreeInducedError(f"not tree-induced at depth {n}: level map is not injective")
    return mapping
