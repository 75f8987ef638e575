"""Shipped automaton systems and their rigid stabilizer recursions.

A system counts as a builtin when its states and rules coincide with one of
the shipped ones, however it was loaded, so a user spec file describing the
Grigorchuk group gets the exact rist generators too.
"""

from __future__ import annotations

import logging
from functools import lru_cache
from pathlib import Path

from autgrp import IDENTITY, AutSystem, StateRule, Subgroup, TreeAut
from errors import PreconditionError, UnknownBuiltinError
from parsing import ParsedSpec, load_spec, parse_spec
from tree import ALPHABET, TreeShape, Vertex, iter_level, make_vertex

logger = logging.getLogger(__name__)

SPEC_DIR = Path(__file__).resolve().parent / "specs"
GRIGORCHUK = "grigorchuk"
GUPTA_SIDKI = "gupta-sidki"

# Lysenok substitution; psi(sigma(w)) = (u(w), w) with K inside ker u
_SIGMA = {"a": ("a", "c", "a"), "b": ("d",), "c": ("b",), "d": ("c",)}
# Normal generators of K = <(ab)^2>^G, a finite-index branching subgroup
_K_GENERATORS = ("abab", "abadabad", "badabada")


@lru_cache(maxsize=None)
def grigorchuk() -> ParsedSpec:
    return load_spec(SPEC_DIR / "grigorchuk.aut")


def gupta_sidki_text(p: int = 3) -> str:
    """Spec text of the Gupta–Sidki ``p``-group (``p`` an odd prime)."""
    if p < 3 or any(p % q == 0 for q in range(2, p)):
        raise PreconditionError(f"Gupta-Sidki groups need an odd prime, got {p}")
    letters = [ALPHABET[i] for i in range(p)]
    trivial = ", ".join([IDENTITY] * p)
    t_successors = ["a", "A"] + [IDENTITY] * (p - 3) + ["t"]
    return "\n".join(
        [
            f"tree arity={p}",
            f"state a = perm({' '.join(letters)}) -> {trivial}",
            f"state A = perm({' '.join(reversed(letters))}) -> {trivial}",
            f"state t = perm() -> {', '.join(t_successors)}",
            "group G = a, t",
        ]
    )


@lru_cache(maxsize=None)
def gupta_sidki(p: int = 3) -> ParsedSpec:
    return parse_spec(gupta_sidki_text(p), name=f"{GUPTA_SIDKI}-{p}")


def full_automorphisms(arity: int, depth: int) -> Subgroup:
    """Finite-state generators whose truncations to levels ≤ ``depth`` are all of Aut T.

    One transposition state (and for ``arity > 2`` one cycle state) per vertex
    of depth below ``depth``, each acting only at its vertex.
    """
    shape = TreeShape.regular(arity)
    kinds = {"t": (1, 0) + tuple(range(2, arity))}
    if arity > 2:
        kinds["r"] = tuple(range(1, arity)) + (0,)
    rules: dict[str, tuple[StateRule, ...]] = {}
    names: list[str] = []
    for kind, perm in kinds.items():
        for k in range(depth):
            for v in iter_level(shape, k):
                name = _vertex_state(kind, v)
                if v.is_root:
                    rule = StateRule(perm, (IDENTITY,) * arity)
                else:
                    successors = [IDENTITY] * arity
                    successors[v.word[0]] = _vertex_state(kind, Vertex(v.word[1:]))
                    rule = StateRule(tuple(range(arity)), tuple(successors))
                rules[name] = (rule,)
                names.append(name)
    system = AutSystem(shape, rules, name=f"aut-{arity}-{depth}")
    return Subgroup(system, tuple(system.element(n) for n in names), f"Aut(T{arity})|{depth}")


def _vertex_state(kind: str, v: Vertex) -> str:
    return kind + "_" + "".join(ALPHABET[x] for x in v.word)


def _same_rules(system: AutSystem, reference: AutSystem) -> bool:
    return system.shape == reference.shape and dict(system.rules) == dict(reference.rules)


def builtin_id(system: AutSystem) -> str | None:
    """Name of the shipped system ``system`` coincides with, if any."""
    if _same_rules(system, grigorchuk().system):
        return GRIGORCHUK
    arity = system.shape.period[0]
    if system.shape.is_regular and arity % 2 == 1:
        try:
            reference = gupta_sidki(arity).system
        except PreconditionError:
            return None
        if _same_rules(system, reference):
            return f"{GUPTA_SIDKI}-{arity}"
    return None


def _word(system: AutSystem, letters: str) -> TreeAut:
    return system.element(*letters)


def _sigma(g: TreeAut) -> TreeAut:
    word = tuple((s2, e) for s, e in g.word for s2 in _SIGMA[s])
    return TreeAut(g.system, word)


def _lift_grigorchuk(g: TreeAut, v: Vertex) -> TreeAut:
    """Copy of ``g`` ∈ K acting below ``v`` and trivially elsewhere."""
    a = _word(g.system, "a")
    for x in reversed(v.word):
        g = _sigma(g)
        if x == 0:
            g = a * g * a
    return g


def _gupta_sidki_rist(system: AutSystem, v: Vertex) -> tuple[TreeAut, ...]:
    p = system.shape.period[0]
    a, t = system.element("a"), system.element("t")
    if v.is_root:
        return (a, t)
    if v.depth > 1:
        raise UnknownBuiltinError(
            f"rigid stabilizer generators for {GUPTA_SIDKI}-{p} are shipped down to depth 1, not {v}"
        )

    def s(j: int) -> TreeAut:
        return t.conjugate(a ** (j % p))

    if p == 3:
        base, home = s(0).commutator(s(1)).commutator(s(2).commutator(s(0))), 2
    else:
        base, home = s(0).commutator(s(1)), 0
    i = v.word[0]
    e_i = base.conjugate(a ** ((i - home) % p))
    gens = [e_i]
    # s_i acts as a below i, s_{i+1} as t; both fix level 1
    for h in (s(i), s(i + 1)):
        for m in range(1, p):
            gens.append(e_i.conjugate(h**m))
    return tuple(gens)


def rist_generators_builtin(G: Subgroup, v: Vertex) -> Subgroup:
    """Finite generating set of a finite-index subgroup of rist_G(v) for a builtin system."""
    system = G.system
    make_vertex(system.shape, v.word)
    which = builtin_id(system)
    if which == GRIGORCHUK:
        gens = tuple(_lift_grigorchuk(_word(system, w), v) for w in _K_GENERATORS)
    elif which is not None and which.startswith(GUPTA_SIDKI):
        gens = _gupta_sidki_rist(system, v)
    else:
        raise UnknownBuiltinError(f"no shipped rist recursion for system {system.name or '?'}")
    logger.debug("rist generators at %s for %s: %d words", v, which, len(gens))
    return Subgroup(system, gens, f"rist({v})")


def rist_depth_limit(G: Subgroup) -> int | None:
    """Deepest vertex with shipped rist generators for ``G``'s system, None when unbounded."""
    which = builtin_id(G.system)
    if which == GRIGORCHUK:
        return None
    if which is not None and which.startswith(GUPTA_SIDKI):
        return 1
    raise UnknownBuiltinError(f"no shipped rist recursion for system {G.system.name or '?'}")
