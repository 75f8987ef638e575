"""Supports of subgroups and the structure lattice represented by clopens.

A structure class is identified with the support of any of its members, so
meets, joins, complements and conjugation of classes are done on clopens.
Subgroups are only ever touched through their generators.
"""

from __future__ import annotations

import enum
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Any

import config
from autgrp import (
    Subgroup,
    TreeAut,
    derived_subgroup,
    is_identity,
    moves,
    orbit,
    rigid_stabilizer,
    section,
    truncate,
)
from catalog import rist_generators_builtin
from clopen import Clopen, complement, from_vertices, join, meet
from errors import (
    AmbientMismatchError,
    LevelCapError,
    PreconditionError,
    ShapeMismatchError,
    SupportNotClopenError,
)
from stone import Ray, induced_algebra_map
from tree import ROOT, Vertex, iter_level

logger = logging.getLogger(__name__)


class Verdict(enum.Enum):
    CLOPEN = "clopen"
    OPEN_NOT_CLOPEN_EVIDENCE = "open_not_clopen_evidence"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class FrontierEntry:
    vertex: Vertex
    sections: tuple[str, ...]

    def to_dict(self) -> dict[str, Any]:
        return {"vertex": str(self.vertex), "sections": list(self.sections)}


@dataclass(frozen=True)
class SupportResult:
    """Level-by-level classification of the boundary against Supp(H).

    ``determined_in``, ``determined_out`` and the cones at the frontier
    vertices partition the boundary.
    """

    determined_in: Clopen
    determined_out: Clopen
    frontier: tuple[FrontierEntry, ...]
    depth_used: int
    verdict: Verdict
    evidence_ray: Ray | None = None

    @property
    def clopen(self) -> Clopen | None:
        return self.determined_in if self.verdict is Verdict.CLOPEN else None

    def to_dict(self) -> dict[str, Any]:
        return {
            "verdict": self.verdict.value,
            "depth": self.depth_used,
            "determined_in": [str(v) for v in self.determined_in.cones],
            "determined_out": [str(v) for v in self.determined_out.cones],
            "frontier": [f.to_dict() for f in self.frontier],
            "evidence_ray": str(self.evidence_ray) if self.evidence_ray else None,
        }


@dataclass
class _Path:
    """Frontier vertex with the section keys seen along its path from the root."""

    vertex: Vertex
    sections: tuple[TreeAut, ...]
    keys: list[tuple] = field(default_factory=list)
    # per depth: whether a sibling branching off there was not inert
    active: list[bool] = field(default_factory=list)


def _key(sections: tuple[TreeAut, ...], cls: int) -> tuple:
    return tuple(s.reduced().word for s in sections) + (cls,)


def _periodic_ray(path: _Path, H: Subgroup) -> Ray | None:
    """Ray through ``path.vertex`` whose section pattern provably repeats, if any."""
    current = path.keys[-1]
    depth = len(path.keys) - 1
    for d0 in range(depth - 1, -1, -1):
        if path.keys[d0] == current and any(path.active[d0 + 1 : depth + 1]):
            word = path.vertex.word
            return Ray(H.shape, word[:d0], word[d0:])
    return None


def support(
    H: Subgroup, depth: int | None = None, *, cap: int | None = None, level_cap: int | None = None
) -> SupportResult:
    """Classify vertices down to ``depth`` as inside, outside or undetermined for Supp(H).

    ``cap`` bounds the product automata of identity decisions, ``level_cap`` the
    number of undetermined vertices carried from one level to the next.
    """
    depth = config.DEPTH_BOUND if depth is None else depth
    level_cap = config.LEVEL_SIZE_CAP if level_cap is None else level_cap
    shape = H.shape
    gens = H.generators
    inside: list[Vertex] = []
    outside: list[Vertex] = []
    if all(is_identity(g, cap=cap) for g in gens):
        outside.append(ROOT)
        frontier: list[_Path] = []
    else:
        root = _Path(ROOT, gens)
        root.keys.append(_key(gens, shape.depth_class(0)))
        root.active.append(True)
        frontier = [root]

    level = 0
    evidence: Ray | None = None
    while frontier and level < depth:
        nxt: list[_Path] = []
        for path in frontier:
            v = path.vertex
            children = []
            for x in range(shape.arity(v.depth)):
                child = v.child(x)
                if any(moves(s, Vertex((x,))) for s in path.sections):
                    inside.append(child)
                    children.append((child, None))
                    continue
                secs = tuple(section(s, Vertex((x,))) for s in path.sections)
                if all(is_identity(s, cap=cap) for s in secs):
                    outside.append(child)
                    children.append((child, None))
                else:
                    children.append((child, secs))
            for child, secs in children:
                if secs is None:
                    continue
                branch = any(other is not child and (s is not None or other in inside) for other, s in children)
                nxt.append(
                    _Path(
                        child,
                        secs,
                        path.keys + [_key(secs, shape.depth_class(child.depth))],
                        path.active + [branch],
                    )
                )
        if len(nxt) > level_cap:
            raise LevelCapError(
                f"support frontier at depth {level + 1} has {len(nxt)} vertices, above the cap of {level_cap}"
            )
        frontier = nxt
        level += 1
        logger.debug("support of %s: level %d, %d frontier vertices", H, level, len(frontier))

    if not frontier:
        verdict = Verdict.CLOPEN
    else:
        for path in frontier:
            evidence = _periodic_ray(path, H)
            if evidence is not None:
                break
        verdict = Verdict.OPEN_NOT_CLOPEN_EVIDENCE if evidence else Verdict.INCONCLUSIVE
    result = SupportResult(
        from_vertices(shape, inside),
        from_vertices(shape, outside),
        tuple(FrontierEntry(p.vertex, tuple(str(s) for s in p.sections)) for p in frontier),
        level,
        verdict,
        evidence,
    )
    logger.info("support of %s at depth %d: %s", H, level, verdict.value)
    return result


def moved_vertices(H: Subgroup, n: int) -> set[Vertex]:
    """Level-``n`` vertices moved by some generator of ``H``."""
    return {v for v in iter_level(H.shape, n) if any(moves(g, v) for g in H.generators)}


def phi(H: Subgroup, depth: int | None = None) -> Clopen:
    """Supp(H) as a canonical clopen; raises unless the support verdict is clopen."""
    result = support(H, depth)
    if result.verdict is not Verdict.CLOPEN:
        raise SupportNotClopenError(result)
    return result.determined_in


@dataclass(frozen=True)
class StructureClass:
    """Element of the structure lattice of ``group``, held by its clopen.

    ``realization`` is an optional concrete subgroup in the class; it is
    evidence only and does not take part in equality.
    """

    group: Subgroup
    clopen: Clopen
    realization: Subgroup | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.clopen.shape != self.group.shape:
            raise ShapeMismatchError("class clopen and ambient group live on different trees")

    def __str__(self) -> str:
        return f"[{self.clopen}]"


def phi_inverse(G: Subgroup, C: Clopen, *, realize: bool = False) -> StructureClass:
    """The class of the product of rist_G(v) over the cones of ``C``.

    With ``realize`` the class carries a concrete subgroup generated by the
    builtin rist generators of every cone vertex.
    """
    if C.shape != G.shape:
        raise ShapeMismatchError("clopen and group live on different trees")
    realization = None
    if realize:
        gens = [g for v in C.cones for g in rist_generators_builtin(G, v).generators]
        realization = Subgroup.of(G.system, gens, f"rist[{C}]")
    return StructureClass(G, C, realization)


@dataclass(frozen=True)
class Equivalence:
    """Answer of :func:`equivalent` with the supports it compared."""

    equivalent: bool
    support_h: Clopen
    support_k: Clopen
    exactness: str = (
        "exact for members of the structure lattice; "
        "for arbitrary subgroups only equality of supports is tested"
    )

    def __bool__(self) -> bool:
        return self.equivalent


def equivalent(H: Subgroup, K: Subgroup, depth: int | None = None) -> Equivalence:
    sh, sk = phi(H, depth), phi(K, depth)
    return Equivalence(sh == sk, sh, sk)


def _same_ambient(x: StructureClass, y: StructureClass) -> None:
    gx, gy = x.group, y.group
    if gx.system is not gy.system or [g.word for g in gx.generators] != [g.word for g in gy.generators]:
        raise AmbientMismatchError(f"classes over {x.group} and {y.group}")


def class_meet(x: StructureClass, y: StructureClass) -> StructureClass:
    _same_ambient(x, y)
    return StructureClass(x.group, meet(x.clopen, y.clopen))


def class_join(x: StructureClass, y: StructureClass) -> StructureClass:
    _same_ambient(x, y)
    return StructureClass(x.group, join(x.clopen, y.clopen))


def class_complement(x: StructureClass) -> StructureClass:
    return StructureClass(x.group, complement(x.clopen))


def conjugate_class(x: StructureClass, g: TreeAut) -> StructureClass:
    """``[H]^g``: the clopen moved by the algebra map induced by ``g``."""
    if g.system is not x.group.system:
        raise ShapeMismatchError("conjugating element comes from another system")
    realization = x.realization.conjugate(g) if x.realization is not None else None
    return StructureClass(x.group, induced_algebra_map(g)(x.clopen), realization)


@dataclass(frozen=True)
class ClassOrbit:
    classes: tuple[StructureClass, ...]
    complete: bool


def class_orbit(x: StructureClass, max_size: int = 1024) -> ClassOrbit:
    """Conjugates of ``x`` under the ambient generators, up to ``max_size`` of them."""
    maps = [induced_algebra_map(g) for g in x.group.generators]
    seen = {x.clopen: None}
    queue = deque([x.clopen])
    while queue:
        c = queue.popleft()
        for alpha in maps:
            image = alpha(c)
            if image in seen:
                continue
            if len(seen) >= max_size:
                logger.warning("orbit of %s exceeds %d classes; truncated", x, max_size)
                return ClassOrbit(tuple(StructureClass(x.group, c) for c in seen), False)
            seen[image] = None
            queue.append(image)
    return ClassOrbit(tuple(StructureClass(x.group, c) for c in seen), True)


def join_support_law(H: Subgroup, K: Subgroup, depth: int | None = None) -> bool:
    """Supp(<H, K>) = Supp(H) ∨ Supp(K)."""
    return phi(H.join(K), depth) == join(phi(H, depth), phi(K, depth))


def contains_derived_rist(
    H: Subgroup, v: Vertex, k: int, level: int, ambient: Subgroup, *, cap: int | None = None
) -> bool:
    """Whether the ``k``-th derived truncated rist of ``v`` lies in ``truncate(H, level)``.

    A necessary condition for ``H`` being ``k``-subnormal in ``ambient``.
    """
    if ambient.system is not H.system:
        raise AmbientMismatchError("H is not a subgroup of the given ambient group")
    if len(orbit(H, v, cap=cap)) == 1:
        raise PreconditionError(f"vertex {v} is not moved by {H}")
    R = derived_subgroup(rigid_stabilizer(ambient, v, level, cap=cap), k)
    P = truncate(H, level, cap=cap)
    return all(P.contains(p) for p in R.group.generators)
