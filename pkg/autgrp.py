"""Finite-state tree automorphisms and the groups they generate.

Elements are words over the states of an automaton system, acting on the
right (``v^(gh) = (v^g)^h``). Identity is decided on the product automaton
of a word; finite shadows of a group on one level are ``sympy``
permutation groups carrying a stabilizer chain.
"""

from __future__ import annotations

import logging
import random
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property, lru_cache, partial
from itertools import combinations
from types import MappingProxyType
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from sympy.combinatorics import Permutation, PermutationGroup

import config
from clopen import Clopen, from_vertices
from errors import (
    DegreeLimitError,
    IdentityUndecidedError,
    InvalidVertexError,
    PreconditionError,
    ShapeMismatchError,
)
from tree import TreeShape, Vertex, iter_level, make_vertex, vertex_at_rank, vertex_rank

logger = logging.getLogger(__name__)

IDENTITY = "e"
# Product-automaton cap used while probing state orders
ORDER_SEARCH_STATE_CAP = 10_000

Letter = tuple[str, int]
Word = tuple[Letter, ...]


@dataclass(frozen=True)
class StateRule:
    """One wreath-recursion clause: root permutation plus a successor per letter."""

    perm: tuple[int, ...]
    successors: tuple[str, ...]
    inverse: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if sorted(self.perm) != list(range(len(self.perm))):
            raise InvalidVertexError(f"{self.perm} is not a permutation of range({len(self.perm)})")
        if len(self.successors) != len(self.perm):
            raise InvalidVertexError(
                f"{len(self.successors)} successors given for an alphabet of size {len(self.perm)}"
            )
        inverse = [0] * len(self.perm)
        for x, y in enumerate(self.perm):
            inverse[y] = x
        object.__setattr__(self, "inverse", tuple(inverse))

    @property
    def is_trivial_perm(self) -> bool:
        return all(x == y for x, y in enumerate(self.perm))

    @classmethod
    def trivial(cls, arity: int, successor: str = IDENTITY) -> StateRule:
        return cls(tuple(range(arity)), (successor,) * arity)


@dataclass(frozen=True, eq=False)
class AutSystem:
    """Named states with one :class:`StateRule` per depth class of ``shape``.

    A state given a single rule uses it at every depth class. The identity
    state is added when absent. Systems compare by identity. Each keeps its
    state orders and bounded ``lru_cache`` memos of identity decisions and
    level permutation blocks (``config.MEMO_SIZE`` entries each).
    """

    shape: TreeShape
    rules: Mapping[str, tuple[StateRule, ...]]
    identity: str = IDENTITY
    name: str = ""
    _decide: Callable[[Word, int, int], bool] = field(init=False, repr=False)
    _block: Callable[[Word, int, int], tuple[int, ...]] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        classes = self.shape.class_count
        rules: dict[str, tuple[StateRule, ...]] = {}
        for state, clauses in self.rules.items():
            clauses = tuple(clauses)
            if len(clauses) == 1:
                clauses *= classes
            if len(clauses) != classes:
                raise InvalidVertexError(
                    f"state {state!r} has {len(clauses)} clauses, the shape has {classes} depth classes"
                )
            for cls, rule in enumerate(clauses):
                if len(rule.perm) != self.shape.arity(cls):
                    raise InvalidVertexError(
                        f"state {state!r}: clause {cls} acts on {len(rule.perm)} letters, "
                        f"depth class {cls} has arity {self.shape.arity(cls)}"
                    )
            rules[state] = clauses
        if self.identity not in rules:
            rules[self.identity] = tuple(
                StateRule.trivial(self.shape.arity(cls), self.identity) for cls in range(classes)
            )
        for state, clauses in rules.items():
            for rule in clauses:
                missing = [s for s in rule.successors if s not in rules]
                if missing:
                    raise InvalidVertexError(f"state {state!r} refers to unknown state {missing[0]!r}")
        for rule in rules[self.identity]:
            if not rule.is_trivial_perm or set(rule.successors) != {self.identity}:
                raise InvalidVertexError(f"identity state {self.identity!r} must act trivially")
        object.__setattr__(self, "rules", MappingProxyType(rules))
        object.__setattr__(self, "_decide", lru_cache(maxsize=config.MEMO_SIZE)(partial(_decide_trivial, self)))
        object.__setattr__(self, "_block", lru_cache(maxsize=config.MEMO_SIZE)(partial(_level_block, self)))

    @property
    def states(self) -> tuple[str, ...]:
        """State names other than the identity, in definition order."""
        return tuple(s for s in self.rules if s != self.identity)

    def rule(self, state: str, cls: int) -> StateRule:
        return self.rules[state][cls]

    def element(self, *names: str) -> TreeAut:
        """Product of the named states, left to right."""
        for name in names:
            if name not in self.rules:
                raise InvalidVertexError(f"unknown state {name!r}")
        return TreeAut(self, tuple((name, 1) for name in names))

    def one(self) -> TreeAut:
        return TreeAut(self, ())

    def state_orders(self) -> Mapping[str, int]:
        """Orders of states, searched up to ``config.STATE_ORDER_LIMIT``; unknown orders are omitted."""
        return self._orders

    @cached_property
    def _orders(self) -> Mapping[str, int]:
        orders = {}
        for state in self.states:
            order = _find_order(self, state)
            if order is not None:
                orders[state] = order
        logger.debug("state orders for %s: %s", self.name or "system", orders)
        return MappingProxyType(orders)

    def __repr__(self) -> str:
        return f"AutSystem({self.name or '?'}, {self.shape}, states={list(self.states)})"


@dataclass(frozen=True)
class TreeAut:
    """Word in states and their formal inverses, acting on the subtree at ``depth``."""

    system: AutSystem
    word: Word
    depth: int = 0

    @property
    def shape(self) -> TreeShape:
        return self.system.shape.shifted(self.depth)

    def __mul__(self, other: TreeAut) -> TreeAut:
        if other.system is not self.system or other.depth != self.depth:
            raise ShapeMismatchError("automorphisms of different systems or subtrees cannot be multiplied")
        return TreeAut(self.system, self.word + other.word, self.depth)

    def inverse(self) -> TreeAut:
        return TreeAut(self.system, tuple((s, -e) for s, e in reversed(self.word)), self.depth)

    def __pow__(self, k: int) -> TreeAut:
        base = self if k >= 0 else self.inverse()
        return TreeAut(self.system, base.word * abs(k), self.depth)

    def conjugate(self, h: TreeAut) -> TreeAut:
        """``h^-1 · self · h``."""
        return h.inverse() * self * h

    def commutator(self, h: TreeAut) -> TreeAut:
        """``[self, h] = self^-1 · h^-1 · self · h``."""
        return self.inverse() * h.inverse() * self * h

    def reduced(self) -> TreeAut:
        return TreeAut(self.system, _reduce(self.system, self.word, self.system.state_orders()), self.depth)

    def __str__(self) -> str:
        if not self.word:
            return "1"
        short = all(len(s) == 1 for s, _ in self.word)
        tokens = [s if e == 1 else f"{s}^-1" for s, e in self.word]
        return ("" if short and all(e == 1 for _, e in self.word) else " ").join(tokens)


def _reduce(system: AutSystem, word: Iterable[Letter], orders: Mapping[str, int] | None = None) -> Word:
    """Drop identity states, cancel freely, and reduce exponents modulo known orders."""
    runs: list[list] = []
    for state, exp in word:
        if state == system.identity:
            continue
        if runs and runs[-1][0] == state:
            runs[-1][1] += exp
        else:
            runs.append([state, exp])
        order = orders.get(state) if orders else None
        if order:
            e = runs[-1][1] % order
            runs[-1][1] = e - order if e > order // 2 else e
        if runs[-1][1] == 0:
            runs.pop()
    out: list[Letter] = []
    for state, exp in runs:
        out.extend([(state, 1 if exp > 0 else -1)] * abs(exp))
    return tuple(out)


def _step(system: AutSystem, word: Word, cls: int, x: int) -> tuple[int, Word]:
    """Image of letter ``x`` under ``word`` at depth class ``cls``, with the section there."""
    section: list[Letter] = []
    for state, exp in word:
        rule = system.rules[state][cls]
        if exp > 0:
            section.append((rule.successors[x], 1))
            x = rule.perm[x]
        else:
            y = rule.inverse[x]
            section.append((rule.successors[y], -1))
            x = y
    return x, tuple(section)


def _root_trivial(system: AutSystem, word: Word, cls: int) -> bool:
    return all(_step(system, word, cls, x)[0] == x for x in range(system.shape.arity(cls)))


def _trivial(
    system: AutSystem,
    word: Word,
    cls: int,
    *,
    orders: Mapping[str, int] | None,
    cap: int,
) -> bool:
    """Level-synchronous search of the product automaton reachable from ``(word, cls)``."""
    shape = system.shape
    start = (_reduce(system, word, orders), cls)
    seen = {start}
    frontier = [start]
    depth = 0
    while frontier:
        nxt = []
        for w, c in frontier:
            if not w:
                continue
            if not _root_trivial(system, w, c):
                logger.debug("nontrivial composite state at depth %d: %s", depth, w)
                return False
            child_cls = shape.next_class(c)
            for x in range(shape.arity(c)):
                sec = (_reduce(system, _step(system, w, c, x)[1], orders), child_cls)
                if sec not in seen:
                    seen.add(sec)
                    nxt.append(sec)
            if len(seen) > cap:
                raise IdentityUndecidedError(depth)
        frontier = nxt
        depth += 1
    logger.debug("product automaton closed with %d composite states", len(seen))
    return True


def _find_order(system: AutSystem, state: str) -> int | None:
    for k in range(1, config.STATE_ORDER_LIMIT + 1):
        word = ((state, 1),) * k
        try:
            if all(
                _trivial(system, word, cls, orders=None, cap=ORDER_SEARCH_STATE_CAP)
                for cls in range(system.shape.class_count)
            ):
                return k
        except IdentityUndecidedError:
            return None
    return None


def is_identity(g: TreeAut, *, cap: int | None = None) -> bool:
    """Exact triviality test on the product automaton of ``g``.

    Raises :class:`IdentityUndecidedError` when more than ``cap`` composite
    states are reached; the error records the depth verified so far.
    """
    cap = config.PRODUCT_STATE_CAP if cap is None else cap
    system = g.system
    orders = system.state_orders()
    cls = system.shape.depth_class(g.depth)
    return system._decide(_reduce(system, g.word, orders), cls, cap)


def _decide_trivial(system: AutSystem, word: Word, cls: int, cap: int) -> bool:
    return _trivial(system, word, cls, orders=system.state_orders(), cap=cap)


def _check_vertex(g: TreeAut, v: Vertex) -> None:
    make_vertex(g.shape, v.word)


def act(g: TreeAut, v: Vertex) -> Vertex:
    """The image ``v^g``."""
    _check_vertex(g, v)
    system, shape = g.system, g.system.shape
    orders = system.state_orders()
    word = g.word
    image = []
    for k, x in enumerate(v.word):
        cls = shape.depth_class(g.depth + k)
        y, sec = _step(system, word, cls, x)
        image.append(y)
        word = _reduce(system, sec, orders)
    return Vertex(tuple(image))


def section(g: TreeAut, v: Vertex) -> TreeAut:
    """The automorphism ``g|_v`` of the subtree below ``v``."""
    _check_vertex(g, v)
    system, shape = g.system, g.system.shape
    orders = system.state_orders()
    word = _reduce(system, g.word, orders)
    for k, x in enumerate(v.word):
        _, sec = _step(system, word, shape.depth_class(g.depth + k), x)
        word = _reduce(system, sec, orders)
    return TreeAut(system, word, g.depth + v.depth)


def moves(g: TreeAut, v: Vertex) -> bool:
    return act(g, v) != v


def level_permutation(g: TreeAut, n: int) -> tuple[int, ...]:
    """Image array of ``g`` on the level-``n`` vertices of its subtree, by lex rank."""
    system = g.system
    return system._block(_reduce(system, g.word, system.state_orders()), g.depth, g.depth + n)


def _level_block(system: AutSystem, word: Word, depth: int, target: int) -> tuple[int, ...]:
    """Image array of ``word``, sitting at ``depth``, on the level ``target`` vertices below it."""
    shape = system.shape
    if depth == target:
        return (0,)
    if not word:
        return tuple(range(shape.subtree_size(depth, target)))
    cls = shape.depth_class(depth)
    block = shape.subtree_size(depth + 1, target)
    out = [0] * (block * shape.arity(depth))
    for x in range(shape.arity(depth)):
        y, sec = _step(system, word, cls, x)
        sub = system._block(_reduce(system, sec, system.state_orders()), depth + 1, target)
        for i, j in enumerate(sub):
            out[x * block + i] = y * block + j
    return tuple(out)


@dataclass(frozen=True)
class Subgroup:
    """Subgroup of Aut T given by a non-empty list of generators."""

    system: AutSystem
    generators: tuple[TreeAut, ...]
    name: str = ""

    def __post_init__(self) -> None:
        gens = tuple(self.generators)
        if not gens:
            raise PreconditionError("a subgroup needs at least one generator (the identity is allowed)")
        if any(g.system is not self.system or g.depth != 0 for g in gens):
            raise ShapeMismatchError("all generators must come from the subgroup's system at the root")
        object.__setattr__(self, "generators", gens)

    @classmethod
    def of(cls, system: AutSystem, gens: Iterable[TreeAut], name: str = "") -> Subgroup:
        gens = tuple(gens) or (system.one(),)
        return cls(system, gens, name)

    @property
    def shape(self) -> TreeShape:
        return self.system.shape

    def conjugate(self, h: TreeAut) -> Subgroup:
        return Subgroup(self.system, tuple(g.conjugate(h) for g in self.generators), f"{self.name}^{h}")

    def join(self, other: Subgroup) -> Subgroup:
        """Subgroup generated by both generating sets."""
        if other.system is not self.system:
            raise ShapeMismatchError("subgroups of different systems")
        return Subgroup(self.system, self.generators + other.generators, f"<{self.name},{other.name}>")

    def __iter__(self) -> Iterator[TreeAut]:
        return iter(self.generators)

    def __str__(self) -> str:
        return self.name or "<" + ", ".join(str(g) for g in self.generators) + ">"


def random_word(G: Subgroup, length: int, rng: random.Random) -> TreeAut:
    """Random product of ``length`` generators and inverses."""
    g = G.system.one()
    for _ in range(length):
        h = rng.choice(G.generators)
        g = g * (h if rng.random() < 0.5 else h.inverse())
    return g


def _identity_group(degree: int) -> PermutationGroup:
    return PermutationGroup([Permutation(degree - 1)])


@dataclass(frozen=True)
class LevelPermGroup:
    """Finite shadow of a group acting on the level-``level`` vertices.

    Point ``r`` is the level vertex of lex rank ``r``. ``approximation`` is
    ``"truncated"`` when the group only bounds a rigid stabilizer from above.
    """

    shape: TreeShape
    level: int
    group: PermutationGroup
    generator_words: tuple[TreeAut, ...] = ()
    approximation: str | None = None
    index: int | None = None

    @property
    def degree(self) -> int:
        return self.group.degree

    def order(self) -> int:
        return int(self.group.order())

    @property
    def is_trivial(self) -> bool:
        return all(p.is_Identity for p in self.group.generators)

    def permutation(self, g: TreeAut) -> Permutation:
        return Permutation(list(level_permutation(g, self.level)))

    def contains(self, g: TreeAut | Permutation) -> bool:
        perm = g if isinstance(g, Permutation) else self.permutation(g)
        return bool(self.group.contains(perm))

    def point(self, v: Vertex) -> int:
        if v.depth != self.level:
            raise PreconditionError(f"{v} is not on level {self.level}")
        return vertex_rank(self.shape, v)

    def vertex(self, point: int) -> Vertex:
        return vertex_at_rank(self.shape, self.level, point)

    def orbit(self, v: Vertex) -> set[Vertex]:
        return {self.vertex(p) for p in self.group.orbit(self.point(v))}

    def moved_vertices(self) -> list[Vertex]:
        moved = sorted({i for p in self.group.generators for i in p.support()})
        return [self.vertex(i) for i in moved]

    def support(self) -> Clopen:
        """Union of the cones at the level vertices this group moves."""
        return from_vertices(self.shape, self.moved_vertices())

    def stabilizer_chain(self, base: Sequence[int] | None = None) -> tuple[list[int], list[Permutation]]:
        """Base and strong generating set by incremental Schreier–Sims."""
        base, strong = self.group.schreier_sims_incremental(base=list(base) if base else None)
        logger.debug("level %d chain: base of length %d, %d strong generators", self.level, len(base), len(strong))
        return base, strong

    def chain_order(self, base: Sequence[int] | None = None) -> int:
        """Group order as the product of basic orbit lengths."""
        chain_base, strong = self.stabilizer_chain(base)
        if not strong:
            return 1
        order = 1
        for i, point in enumerate(chain_base):
            fixed = chain_base[:i]
            gens = [g for g in strong if all(g.array_form[b] == b for b in fixed)]
            if gens:
                order *= len(PermutationGroup(gens).orbit(point))
        return order

    def independent_order(self) -> int:
        """Order from a second chain built on the reversed point order."""
        return self.chain_order(list(reversed(range(self.degree))))


def truncate(G: Subgroup, n: int, *, cap: int | None = None) -> LevelPermGroup:
    """The permutation group induced by ``G`` on level ``n``."""
    degree = G.shape.check_level(n, cap)
    perms = [Permutation(list(level_permutation(g, n))) for g in G.generators]
    group = PermutationGroup(perms) if perms else _identity_group(degree)
    logger.debug("truncated %s to level %d (%d points)", G, n, degree)
    return LevelPermGroup(G.shape, n, group, G.generators)


def orbit(G: Subgroup, v: Vertex, *, cap: int | None = None) -> set[Vertex]:
    """Orbit of ``v`` by breadth-first closure under the generators."""
    make_vertex(G.shape, v.word)
    G.shape.check_level(v.depth, cap)
    seen = {v}
    queue = deque([v])
    while queue:
        u = queue.popleft()
        for g in G.generators:
            w = act(g, u)
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return seen


def is_level_transitive(G: Subgroup, up_to: int, *, cap: int | None = None) -> tuple[bool, int | None]:
    """Whether ``G`` is transitive on levels 1..``up_to``, with the first failing level."""
    for n in range(1, up_to + 1):
        size = G.shape.check_level(n, cap)
        first = Vertex((0,) * n)
        if len(orbit(G, first, cap=cap)) != size:
            logger.info("%s is not transitive on level %d", G, n)
            return False, n
    return True, None


def _transversal(G: Subgroup, v: Vertex) -> dict[Vertex, TreeAut]:
    """Words sending ``v`` to each vertex of its orbit."""
    transversal: dict[Vertex, TreeAut] = {v: G.system.one()}
    queue = deque([v])
    while queue:
        u = queue.popleft()
        for g in G.generators:
            w = act(g, u)
            if w not in transversal:
                transversal[w] = transversal[u] * g
                queue.append(w)
    return transversal


def vertex_stabilizer(G: Subgroup, v: Vertex, n: int, *, cap: int | None = None) -> LevelPermGroup:
    """Stabilizer of ``v`` in ``truncate(G, n)`` with Schreier generators as words in ``G``."""
    if v.depth > n:
        raise PreconditionError(f"vertex {v} lies below level {n}")
    G.shape.check_level(n, cap)
    transversal = _transversal(G, v)

    words: list[TreeAut] = []
    perms: dict[tuple[int, ...], None] = {}
    for u, rep in transversal.items():
        for g in G.generators:
            schreier = rep * g * transversal[act(g, u)].inverse()
            image = level_permutation(schreier, n)
            if image == tuple(range(len(image))) or image in perms:
                continue
            perms[image] = None
            words.append(schreier)
    degree = G.shape.level_size(n)
    group = PermutationGroup([Permutation(list(p)) for p in perms]) if perms else _identity_group(degree)
    logger.debug("stabilizer of %s at level %d: orbit %d, %d Schreier generators", v, n, len(transversal), len(words))
    return LevelPermGroup(G.shape, n, group, tuple(words), index=len(transversal))


def _check_degree(P: LevelPermGroup, limit: int | None) -> None:
    limit = config.DEGREE_LIMIT if limit is None else limit
    if P.degree > limit:
        raise DegreeLimitError(f"degree {P.degree} exceeds the backtrack limit of {limit}")


def rigid_stabilizer(
    G: Subgroup, v: Vertex, n: int, *, cap: int | None = None, degree_limit: int | None = None
) -> LevelPermGroup:
    """Pointwise stabilizer in ``truncate(G, n)`` of every level-``n`` vertex outside ``C_v``.

    Contains the level-``n`` image of rist_G(v); the result is flagged as a
    truncated approximation.
    """
    if v.depth >= n:
        raise PreconditionError(f"vertex {v} must lie above level {n}")
    make_vertex(G.shape, v.word)
    P = truncate(G, n, cap=cap)
    _check_degree(P, degree_limit)
    if v.is_root:
        return LevelPermGroup(P.shape, n, P.group, P.generator_words, approximation="truncated")
    inside = {vertex_rank(G.shape, w) for w in iter_level(G.shape, n, below=v)}
    outside = [p for p in range(P.degree) if p not in inside]
    group = P.group.pointwise_stabilizer(outside)
    logger.debug("rigid stabilizer of %s at level %d has order %d", v, n, group.order())
    return LevelPermGroup(P.shape, n, group, approximation="truncated")


def factors_commute(factors: Sequence[LevelPermGroup]) -> bool:
    """Whether generators taken from distinct factors commute pairwise."""
    for P, Q in combinations(factors, 2):
        for p in P.group.generators:
            for q in Q.group.generators:
                if p * q != q * p:
                    return False
    return True


def rist_level(
    G: Subgroup, n: int, trunc: int, *, cap: int | None = None, degree_limit: int | None = None
) -> LevelPermGroup:
    """Product of the truncated rigid stabilizers of all level-``n`` vertices, on level ``trunc``."""
    if n == 0:
        P = truncate(G, trunc, cap=cap)
        return LevelPermGroup(P.shape, trunc, P.group, P.generator_words, approximation="truncated")
    if n >= trunc:
        raise PreconditionError(f"level {n} must lie above the truncation level {trunc}")
    factors = [
        rigid_stabilizer(G, u, trunc, cap=cap, degree_limit=degree_limit)
        for u in iter_level(G.shape, n)
    ]
    if not factors_commute(factors):
        logger.warning("rigid stabilizer factors on level %d do not commute", n)
    gens = [p for P in factors for p in P.group.generators if not p.is_Identity]
    degree = G.shape.level_size(trunc)
    group = PermutationGroup(gens) if gens else _identity_group(degree)
    return LevelPermGroup(G.shape, trunc, group, approximation="truncated")


def derived_subgroup(P: LevelPermGroup, k: int, *, degree_limit: int | None = None) -> LevelPermGroup:
    """The ``k``-th derived subgroup; ``k = 0`` returns ``P``."""
    if k < 0:
        raise ValueError("k must be non-negative")
    _check_degree(P, degree_limit)
    group = P.group
    for _ in range(k):
        if all(p.is_Identity for p in group.generators):
            break
        group = group.derived_subgroup()
    if k == 0:
        return P
    return LevelPermGroup(P.shape, P.level, group, approximation=P.approximation)


def truncated_intersection(
    P: LevelPermGroup, Q: LevelPermGroup, *, degree_limit: int | None = None
) -> LevelPermGroup:
    """``P ∩ Q`` on a common level, by backtrack subgroup search."""
    if P.shape != Q.shape or P.level != Q.level:
        raise ShapeMismatchError("truncations live on different levels or shapes")
    _check_degree(P, degree_limit)
    group = P.group.subgroup_search(lambda p: Q.group.contains(p))
    return LevelPermGroup(P.shape, P.level, group, approximation=P.approximation or Q.approximation)


def leemann_constant(
    G: Subgroup,
    n: int,
    max_N: int,
    *,
    window: int | None = None,
    cap: int | None = None,
    degree_limit: int | None = None,
) -> int | None:
    """Least ``N ≤ max_N`` with Rist_G(n) level-transitive on the subtrees at level ``n + N``.

    Transitivity on each subtree ``T_w`` is tested on its vertices ``window``
    levels below ``w``, inside the truncated rigid stabilizer of the level-``n``
    ancestor of ``w``. Returns None when no such ``N`` is found.
    """
    window = config.LEEMANN_WINDOW if window is None else window
    if n < 1:
        raise PreconditionError("the level n must be at least 1")
    for N in range(1, max_N + 1):
        depth = n + N + window
        ok = True
        for u in iter_level(G.shape, n):
            R = rigid_stabilizer(G, u, depth, cap=cap, degree_limit=degree_limit)
            for w in iter_level(G.shape, n + N, below=u):
                points = [vertex_rank(G.shape, x) for x in iter_level(G.shape, depth, below=w)]
                if not set(points) <= R.group.orbit(points[0]):
                    ok = False
                    break
            if not ok:
                break
        logger.debug("Leemann search at level %d: N=%d %s", n, N, "holds" if ok else "fails")
        if ok:
            return N
    logger.info("no Leemann constant <= %d found at level %d", max_N, n)
    return None


@dataclass(frozen=True)
class LevelEvidence:
    level: int
    transitive: bool
    index: int
    rist_nontrivial: bool


@dataclass(frozen=True)
class BranchEvidence:
    """Per-level finite evidence of branchness at truncation level ``trunc``."""

    trunc: int
    levels: tuple[LevelEvidence, ...]

    @property
    def transitive(self) -> bool:
        return all(e.transitive for e in self.levels)

    @property
    def weakly_branch(self) -> bool:
        return all(e.rist_nontrivial for e in self.levels)


def is_branch_evidence(
    G: Subgroup, up_to: int, *, trunc: int | None = None, cap: int | None = None
) -> BranchEvidence:
    """Transitivity, rist index and rist nontriviality for each level ``1..up_to``."""
    trunc = up_to + config.LEEMANN_WINDOW if trunc is None else trunc
    if trunc <= up_to:
        raise PreconditionError(f"truncation level {trunc} must exceed {up_to}")
    whole = truncate(G, trunc, cap=cap).order()
    levels = []
    for k in range(1, up_to + 1):
        transitive = len(orbit(G, Vertex((0,) * k), cap=cap)) == G.shape.level_size(k)
        R = rist_level(G, k, trunc, cap=cap)
        order = R.order()
        levels.append(LevelEvidence(k, transitive, whole // order, order > 1))
    return BranchEvidence(trunc, tuple(levels))


def conjugate_count(G: Subgroup, v: Vertex, level: int | None = None, *, cap: int | None = None) -> int:
    """Number of distinct conjugates of rist_G(v).

    Without ``level`` this is the size of the orbit of ``v``. With it, the
    conjugates of ``rigid_stabilizer(G, v, level)`` inside ``truncate(G, level)``
    are built and compared as permutation groups.
    """
    if level is None:
        return len(orbit(G, v, cap=cap))
    R = rigid_stabilizer(G, v, level, cap=cap)
    distinct: list[PermutationGroup] = []
    for rep in _transversal(G, v).values():
        p = R.permutation(rep)
        conj = PermutationGroup([~p * r * p for r in R.group.generators])
        if not any(H.order() == conj.order() and all(H.contains(r) for r in conj.generators) for H in distinct):
            distinct.append(conj)
    logger.debug("rist(%s) at level %d has %d distinct conjugates", v, level, len(distinct))
    return len(distinct)

