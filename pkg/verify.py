"""Randomized verification suites run by ``cli verify``.

Each suite draws its cases from a seeded ``random.Random`` and checks one
family of laws against an independent finite oracle.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from typing import Callable

from autgrp import Subgroup, is_identity, random_word, truncate, truncated_intersection
from catalog import rist_depth_limit, rist_generators_builtin
from clopen import Clopen, complement, from_vertices, join, meet, refine_to_level
from lattice import join_support_law, phi, phi_inverse
from stone import (
    Bit,
    Ray,
    TwoValuedMap,
    depth_subalgebra,
    homomorphism_violation,
    induced_algebra_map,
    is_maximal_ideal,
    kernel,
    phi_gamma,
    reconstruct_ray,
)
from tree import TreeShape, Vertex, incomparable, iter_level

logger = logging.getLogger(__name__)

SUITES = ("boolean-laws", "stone-roundtrip", "phi-iso", "equivariance", "rist-commute")


def _rist_depth(G: Subgroup, wanted: int) -> int:
    """``wanted``, lowered to the deepest vertex with shipped rist generators."""
    limit = rist_depth_limit(G)
    return wanted if limit is None else min(wanted, limit)


@dataclass
class SuiteResult:
    name: str
    trials: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def check(self, ok: bool, what: str) -> None:
        self.trials += 1
        if not ok:
            logger.warning("suite %s: %s failed", self.name, what)
            self.failures.append(what)


def random_vertex(shape: TreeShape, depth: int, rng: random.Random) -> Vertex:
    return Vertex(tuple(rng.randrange(shape.arity(k)) for k in range(depth)))


def random_clopen(shape: TreeShape, max_depth: int, rng: random.Random, max_cones: int = 4) -> Clopen:
    """Union of up to ``max_cones`` random cones of depth ≤ ``max_depth``."""
    cones = [random_vertex(shape, rng.randint(0, max_depth), rng) for _ in range(rng.randint(0, max_cones))]
    return from_vertices(shape, cones)


def random_ray(shape: TreeShape, rng: random.Random, max_pre: int = 4, max_cycle: int = 3) -> Ray:
    step = len(shape.period)
    pre_len = len(shape.pre_period) + rng.randint(0, max_pre)
    cycle_len = step * rng.randint(1, max_cycle)
    letters = [rng.randrange(shape.arity(k)) for k in range(pre_len + cycle_len)]
    return Ray(shape, tuple(letters[:pre_len]), tuple(letters[pre_len:]))


def boolean_laws(trials: int, rng: random.Random, *, max_depth: int = 8, level: int = 10) -> SuiteResult:
    """Lattice laws on random clopens, compared as bitsets on one level."""
    result = SuiteResult("boolean-laws")
    for shape, lvl in ((TreeShape.regular(2), level), (TreeShape.regular(3), min(level, max_depth))):
        depth = min(max_depth, lvl)
        full = (1 << shape.level_size(lvl)) - 1
        for _ in range(trials):
            a, b, c = (random_clopen(shape, depth, rng) for _ in range(3))

            def bits(x: Clopen) -> int:
                return refine_to_level(x, lvl)

            A, B, C = bits(a), bits(b), bits(c)
            result.check(bits(meet(a, join(b, c))) == A & (B | C), f"distributivity at {a}, {b}, {c}")
            result.check(bits(complement(join(a, b))) == full & ~(A | B), f"de Morgan at {a}, {b}")
            result.check(join(a, complement(a)).is_one and meet(a, complement(a)).is_zero, f"complement at {a}")
            result.check(join(a, meet(a, b)) == a, f"absorption at {a}, {b}")
    return result


def stone_roundtrip(trials: int, rng: random.Random, *, depth: int = 10) -> SuiteResult:
    """Ray reconstruction from characteristic maps, and maximality of their kernels."""
    result = SuiteResult("stone-roundtrip")
    for shape in (TreeShape.regular(2), TreeShape.regular(3), TreeShape((3,), (2,))):
        for _ in range(trials):
            ray = random_ray(shape, rng)
            n = rng.randint(0, depth)
            result.check(reconstruct_ray(phi_gamma(ray), n) == ray.prefix(n), f"reconstruction of {ray} at {n}")
    binary = TreeShape.regular(2)
    universe = depth_subalgebra(binary, 2)
    for ray in (Ray(binary, (), (0,)), Ray(binary, (0,), (1,)), Ray(binary, (1,), (0,)), Ray(binary, (), (1,))):
        result.check(is_maximal_ideal(kernel(phi_gamma(ray), universe), universe), f"kernel of {ray} is maximal")
    both = TwoValuedMap(lambda a: bool(a.cones), binary, name="nonzero")
    violation = homomorphism_violation(both, universe)
    result.check(violation is not None and violation.law == "meet", "nonzero indicator breaks the meet law")
    constant = TwoValuedMap(lambda a: Bit.ONE, binary, name="constant")
    violation = homomorphism_violation(constant, universe)
    result.check(violation is not None and violation.law == "zero", "constant map breaks the zero law")
    return result


def phi_iso(G: Subgroup, trials: int, rng: random.Random, *, depth: int = 8, cone_depth: int = 3) -> SuiteResult:
    """Round trip through Φ⁻¹ and Φ, the join law, and the meet law on truncations."""
    result = SuiteResult("phi-iso")
    cone_depth = _rist_depth(G, cone_depth)
    for _ in range(trials):
        C = random_clopen(G.shape, cone_depth, rng)
        realized = phi_inverse(G, C, realize=True).realization
        result.check(phi(realized, depth) == C, f"phi(phi_inverse({C})) == {C}")
    for _ in range(trials):
        u = random_vertex(G.shape, rng.randint(0, cone_depth), rng)
        w = random_vertex(G.shape, rng.randint(0, cone_depth), rng)
        H, K = rist_generators_builtin(G, u), rist_generators_builtin(G, w)
        result.check(join_support_law(H, K, depth), f"join law for rist({u}), rist({w})")
    level = 4
    for _ in range(max(1, trials // 10)):
        u = random_vertex(G.shape, rng.randint(0, min(2, cone_depth)), rng)
        w = random_vertex(G.shape, rng.randint(0, min(2, cone_depth)), rng)
        P = truncate(rist_generators_builtin(G, u), level)
        Q = truncate(rist_generators_builtin(G, w), level)
        expected = meet(Clopen(G.shape, (u,)), Clopen(G.shape, (w,)))
        result.check(truncated_intersection(P, Q).support() == expected, f"truncated meet at {u}, {w}")
    return result


def equivariance(G: Subgroup, trials: int, rng: random.Random, *, depth: int = 8, word_length: int = 12) -> SuiteResult:
    """phi(rist(v)^g) equals the image of C_v under the map induced by g."""
    result = SuiteResult("equivariance")
    max_vertex_depth = _rist_depth(G, 3)
    for _ in range(trials):
        g = random_word(G, rng.randint(0, word_length), rng)
        v = random_vertex(G.shape, rng.randint(0, max_vertex_depth), rng)
        conj = rist_generators_builtin(G, v).conjugate(g)
        expected = induced_algebra_map(g)(Clopen(G.shape, (v,)))
        result.check(phi(conj, depth) == expected, f"equivariance for g={g}, v={v}")
    return result


def rist_commute(G: Subgroup, max_depth: int = 2) -> SuiteResult:
    """Rist generators at incomparable vertices commute."""
    result = SuiteResult("rist-commute")
    max_depth = _rist_depth(G, max_depth)
    vertices = [v for k in range(1, max_depth + 1) for v in iter_level(G.shape, k)]
    rists = {v: rist_generators_builtin(G, v) for v in vertices}
    for i, u in enumerate(vertices):
        for w in vertices[i + 1 :]:
            if not incomparable(u, w):
                continue
            for g in rists[u].generators:
                for h in rists[w].generators:
                    result.check(is_identity(g.commutator(h)), f"[rist({u}), rist({w})] = 1")
    return result


def run_suite(name: str, G: Subgroup, trials: int, seed: int) -> list[SuiteResult]:
    """Run one suite, or every suite for ``all``, with a fresh generator per suite."""
    runners: dict[str, Callable[[random.Random], SuiteResult]] = {
        "boolean-laws": lambda rng: boolean_laws(trials, rng),
        "stone-roundtrip": lambda rng: stone_roundtrip(trials, rng),
        "phi-iso": lambda rng: phi_iso(G, trials, rng),
        "equivariance": lambda rng: equivariance(G, trials, rng),
        "rist-commute": lambda rng: rist_commute(G),
    }
    names = SUITES if name == "all" else (name,)
    results = []
    for suite in names:
        if suite not in runners:
            raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)} or all")
        logger.info("running suite %s (trials=%d, seed=%d)", suite, trials, seed)
        results.append(runners[suite](random.Random(seed)))
    return results
