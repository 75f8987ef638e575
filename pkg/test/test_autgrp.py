"""Pytest tests for automaton elements, identity decisions and level truncations."""

import random

import pytest
from hypothesis import given, settings
from sympy.combinatorics.named_groups import SymmetricGroup

import config
from autgrp import (
    AutSystem,
    LevelPermGroup,
    StateRule,
    Subgroup,
    TreeAut,
    act,
    conjugate_count,
    derived_subgroup,
    is_branch_evidence,
    is_identity,
    is_level_transitive,
    leemann_constant,
    level_permutation,
    moves,
    orbit,
    random_word,
    rigid_stabilizer,
    rist_level,
    section,
    truncate,
    truncated_intersection,
    vertex_stabilizer,
)
from catalog import full_automorphisms
from clopen import Clopen
from errors import (
    DegreeLimitError,
    IdentityUndecidedError,
    InvalidVertexError,
    LevelCapError,
    PreconditionError,
    ShapeMismatchError,
)
from tree import TreeShape, Vertex, iter_level, level_vertices, vertex_at_rank, vertex_rank

from .strategies import words


def V(word):
    return Vertex(tuple(int(ch) for ch in word))


def fixing_outside(elements, shape, v, n):
    """Image arrays fixing every level-``n`` vertex outside the cone at ``v``."""
    inside = {vertex_rank(shape, w) for w in iter_level(shape, n, below=v)}
    return [p for p in elements if all(p[i] == i for i in range(len(p)) if i not in inside)]


@pytest.fixture(scope="module")
def full2():
    return full_automorphisms(2, 4)


class TestSystem:
    def test_identity_state_added(self, grig):
        """The identity state e is added to every system."""
        assert grig.system.states == ("a", "b", "c", "d")
        assert "e" in grig.system.rules

    def test_state_orders(self, grig):
        """All four Grigorchuk generators have order 2."""
        assert dict(grig.system.state_orders()) == {"a": 2, "b": 2, "c": 2, "d": 2}

    def test_rule_rejects_non_permutation(self):
        """Root permutations must be bijections."""
        with pytest.raises(InvalidVertexError):
            StateRule((0, 0), ("e", "e"))

    def test_rule_rejects_successor_count(self):
        """One successor per letter is required."""
        with pytest.raises(InvalidVertexError):
            StateRule((1, 0), ("e",))

    def test_unknown_successor(self):
        """Successors must name a state of the system."""
        rules = {"x": (StateRule((1, 0), ("e", "y")),)}
        with pytest.raises(InvalidVertexError):
            AutSystem(TreeShape.regular(2), rules)

    def test_arity_checked_per_class(self):
        """Each clause must match the arity of its depth class."""
        rules = {"x": (StateRule((1, 0), ("e", "e")), StateRule((0, 1), ("e", "e")))}
        with pytest.raises(InvalidVertexError):
            AutSystem(TreeShape((), (2, 3)), rules)

    def test_unknown_element_name(self, grig):
        """Elements can only be built from known states."""
        with pytest.raises(InvalidVertexError):
            grig.system.element("z")


class TestWords:
    def test_str(self, grig):
        """Words print as letters, with exponents for inverses."""
        a, b = grig.system.element("a"), grig.system.element("b")
        assert str(a * b) == "ab"
        assert str(b.inverse()) == "b^-1"
        assert str(grig.system.one()) == "1"

    def test_reduced_cancels(self, grig):
        """Reduction cancels inverses and uses state orders."""
        a, b = grig.system.element("a"), grig.system.element("b")
        assert str((a * a.inverse() * b).reduced()) == "b"
        assert str((a * a * b).reduced()) == "b"

    def test_mixed_systems_rejected(self, grig, gs3):
        """Elements of different systems cannot be multiplied."""
        with pytest.raises(ShapeMismatchError):
            grig.system.element("a") * gs3.system.element("a")

    def test_random_word_is_seeded(self, G):
        """Random words depend only on the seed."""
        w1 = random_word(G, 10, random.Random(3))
        w2 = random_word(G, 10, random.Random(3))
        assert w1.word == w2.word
        assert len(w1.word) == 10


class TestAction:
    """Wreath recursion a = (1,1)σ, b = (a,c), c = (a,d), d = (1,b)."""

    def test_act(self, grig):
        """Images of vertices under single generators."""
        assert act(grig.system.element("a"), V("01")) == V("11")
        assert act(grig.system.element("b"), V("00")) == V("01")
        assert act(grig.system.element("b"), V("10")) == V("10")

    def test_right_action(self, grig):
        """v^(ab) is (v^a)^b."""
        a, b = grig.system.element("a"), grig.system.element("b")
        v = V("000")
        assert act(a * b, v) == act(b, act(a, v))

    def test_section(self, grig):
        """Sections follow the wreath recursion."""
        b, d = grig.system.element("b"), grig.system.element("d")
        assert str(section(b, V("1"))) == "c"
        assert is_identity(section(d, V("0")))
        assert section(b, V("1")).depth == 1

    def test_moves(self, grig):
        """moves reports whether a vertex changes."""
        assert moves(grig.system.element("a"), V("0"))
        assert not moves(grig.system.element("d"), V("11"))

    def test_invalid_vertex(self, grig):
        """Vertices outside the tree are rejected."""
        with pytest.raises(InvalidVertexError):
            act(grig.system.element("a"), V("2"))

    def test_level_permutation(self, grig):
        """Level permutations list images by lex rank."""
        assert level_permutation(grig.system.element("a"), 1) == (1, 0)
        assert level_permutation(grig.system.element("b"), 2) == (1, 0, 2, 3)

    @settings(max_examples=40, deadline=None)
    @given(words(["a", "b", "c", "d"]), words(["a", "b", "c", "d"]))
    def test_level_permutation_composes(self, grig, u, w):
        """Level permutations compose left to right and agree with act."""
        g, h = TreeAut(grig.system, tuple(u)), TreeAut(grig.system, tuple(w))
        pg, ph, pgh = (level_permutation(x, 3) for x in (g, h, g * h))
        assert pgh == tuple(ph[i] for i in pg)
        shape = grig.system.shape
        for v in level_vertices(shape, 3):
            assert vertex_at_rank(shape, 3, pg[vertex_rank(shape, v)]) == act(g, v)

    @settings(max_examples=40, deadline=None)
    @given(words(["a", "b", "c", "d"]), words(["a", "b", "c", "d"]))
    def test_section_cocycle(self, grig, u, w):
        """(g*h)|_v equals g|_v * h|_{v^g}."""
        g, h = TreeAut(grig.system, tuple(u)), TreeAut(grig.system, tuple(w))
        for depth in (1, 2):
            for v in level_vertices(grig.system.shape, depth):
                lhs = section(g * h, v)
                rhs = section(g, v) * section(h, act(g, v))
                assert is_identity(lhs * rhs.inverse())


class TestIdentity:
    @pytest.mark.parametrize("names", [("a", "a"), ("b", "c", "d"), ("d", "c", "b"), ("b", "b")])
    def test_trivial_words(self, grig, names):
        """Relators of the Grigorchuk group are trivial."""
        assert is_identity(grig.system.element(*names))

    def test_ab_has_order_16(self, grig):
        """ab has order exactly 16."""
        ab = grig.system.element("a", "b")
        assert is_identity(ab**16)
        assert not is_identity(ab**8)

    def test_nontrivial(self, grig):
        """Generators and short words are detected as nontrivial."""
        assert not is_identity(grig.system.element("b"))
        assert not is_identity(grig.system.element("a", "d"))

    def test_cap_leaves_undecided(self, grig):
        """A product-state cap of 1 leaves the decision open at depth 0."""
        system = AutSystem(grig.system.shape, {s: grig.system.rules[s] for s in grig.system.states}, name="fresh")
        with pytest.raises(IdentityUndecidedError) as exc:
            is_identity(system.element("b"), cap=1)
        assert exc.value.details() == {"depth": 0}

    @settings(max_examples=40, deadline=None)
    @given(words(["a", "b", "c", "d"]))
    def test_identity_iff_truncations_trivial(self, grig, w):
        """Short words are trivial exactly when they fix levels 1 to 7."""
        g = TreeAut(grig.system, tuple(w))
        trivial = all(level_permutation(g, n) == tuple(range(2**n)) for n in range(1, 8))
        assert is_identity(g) == trivial

    def test_memos_are_bounded(self, grig, monkeypatch):
        """Identity and level-permutation memos keep at most MEMO_SIZE entries."""
        monkeypatch.setattr(config, "MEMO_SIZE", 4)
        system = AutSystem(grig.system.shape, {s: grig.system.rules[s] for s in grig.system.states}, name="small")
        for names in (("a", "a"), ("b", "c", "d"), ("a", "b"), ("a", "c"), ("a", "d"), ("b",)):
            is_identity(system.element(*names))
        level_permutation(system.element("a", "b"), 5)
        assert level_permutation(system.element("b"), 2) == (1, 0, 2, 3)
        assert system._decide.cache_info().maxsize == 4
        assert system._decide.cache_info().currsize <= 4
        assert system._block.cache_info().currsize <= 4


class TestTruncation:
    @pytest.mark.parametrize("n,order", [(1, 2), (2, 8), (3, 128), (4, 4096)])
    def test_grigorchuk_orders(self, G, n, order):
        """Truncation orders 2, 8, 128, 4096 from three order computations."""
        P = truncate(G, n)
        assert P.order() == order
        assert P.chain_order() == order
        assert P.independent_order() == order

    def test_order_matches_brute_force(self, G, gs3, closure):
        """Truncation orders match a brute-force closure."""
        for group in (G, gs3.group()):
            perms = [level_permutation(g, 3) for g in group.generators]
            assert truncate(group, 3).order() == len(closure(perms))

    def test_cap(self, G):
        """Truncating to a level over the cap raises."""
        with pytest.raises(LevelCapError):
            truncate(G, 6, cap=32)

    def test_orbit(self, G):
        """The orbit of a level-3 vertex is the whole level."""
        assert orbit(G, V("010")) == set(level_vertices(G.shape, 3))

    def test_level_transitive(self, G, grig):
        """Cyclic subgroups fail transitivity at the expected level."""
        assert is_level_transitive(G, 5) == (True, None)
        only_a = Subgroup.of(grig.system, [grig.system.element("a")])
        assert is_level_transitive(only_a, 3) == (False, 2)
        only_b = Subgroup.of(grig.system, [grig.system.element("b")])
        assert is_level_transitive(only_b, 3) == (False, 1)

    def test_level_transitive_to_level_ten(self, G):
        """The Grigorchuk group is transitive on all 1024 vertices of level 10."""
        assert is_level_transitive(G, 10) == (True, None)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_orbit_stabilizer(self, G, gs3, n):
        """|orbit(v)| * |st(v)| = |truncation| for every vertex of level n."""
        for group in (G, gs3.group()):
            order = truncate(group, n).order()
            for v in level_vertices(group.shape, n):
                assert len(orbit(group, v)) * vertex_stabilizer(group, v, n).order() == order

    def test_vertex_stabilizer(self, G):
        """Stabilizer of 00 has index 4 and Schreier words that fix 00."""
        P = vertex_stabilizer(G, V("00"), 2)
        assert P.index == 4
        assert P.order() == 2
        assert all(act(w, V("00")) == V("00") for w in P.generator_words)

    def test_vertex_stabilizer_below_level(self, G):
        """The vertex must lie on or above the level."""
        with pytest.raises(PreconditionError):
            vertex_stabilizer(G, V("000"), 2)

    def test_conjugate_count(self, G):
        """Conjugates of rist(v) are counted by the orbit of v."""
        assert conjugate_count(G, V("0")) == 2
        assert conjugate_count(G, V("101")) == 8

    def test_contains(self, G, grig):
        """Membership of words in truncations."""
        P = truncate(G, 3)
        assert P.contains(grig.system.element("a", "c", "a"))
        Q = vertex_stabilizer(G, V("0"), 3)
        assert not Q.contains(grig.system.element("a"))

    def test_empty_subgroup_rejected(self, grig):
        """Subgroups need a generator; Subgroup.of supplies the identity."""
        with pytest.raises(PreconditionError):
            Subgroup(grig.system, ())
        assert str(Subgroup.of(grig.system, []).generators[0]) == "1"


class TestRigidStabilizers:
    """Finite-depth shadows, checked on the full automorphism group."""

    def test_full_truncation(self, full2):
        """Full automorphisms give the order-128 wreath product on level 3."""
        assert truncate(full2, 3).order() == 128

    def test_rigid_stabilizer_order(self, full2):
        """The rigid stabilizer of 0 on level 2 is a single swap."""
        R = rigid_stabilizer(full2, V("0"), 2)
        assert R.order() == 2
        assert R.approximation == "truncated"
        assert R.support() == Clopen.cone(full2.shape, [0])

    def test_root_rigid_stabilizer_is_truncation(self, full2):
        """At the root the rigid stabilizer is the whole truncation."""
        assert rigid_stabilizer(full2, Vertex(), 3).order() == 128

    def test_rigid_stabilizer_level_check(self, full2):
        """The vertex must lie above the level."""
        with pytest.raises(PreconditionError):
            rigid_stabilizer(full2, V("01"), 2)

    def test_rist_level(self, full2):
        """Rist of level 1 on level 2 has order 4."""
        assert rist_level(full2, 1, 2).order() == 4
        with pytest.raises(PreconditionError):
            rist_level(full2, 2, 2)

    def test_branch_evidence(self, full2):
        """Full automorphisms give finite indices and weakly branch evidence."""
        evidence = is_branch_evidence(full2, 2, trunc=4)
        assert [e.index for e in evidence.levels] == [2, 8]
        assert evidence.transitive
        assert evidence.weakly_branch

    def test_branch_evidence_needs_deeper_trunc(self, full2):
        """The truncation must reach deeper than the inspected levels."""
        with pytest.raises(PreconditionError):
            is_branch_evidence(full2, 2, trunc=2)

    def test_leemann_full_group(self, full2):
        """Full Aut T has Leemann constant 1 at level 1."""
        assert leemann_constant(full2, 1, 3) == 1

    def test_leemann_grigorchuk(self, G):
        """A Leemann constant of at most 4 is found for Grigorchuk."""
        N = leemann_constant(G, 1, 4, window=2)
        assert N is not None and 1 <= N <= 4


    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_rigid_stabilizer_matches_brute_force(self, full2, G, closure, n):
        """Truncated rigid stabilizers are the pointwise stabilizers of the outside."""
        for group in (full2, G):
            elements = closure([level_permutation(g, n) for g in group.generators])
            for depth in range(n):
                for v in level_vertices(group.shape, depth):
                    assert rigid_stabilizer(group, v, n).order() == len(fixing_outside(elements, group.shape, v, n))

    def test_grigorchuk_rigid_stabilizers_at_depth_three(self, G, closure):
        """Every depth-3 vertex against the level-4 closure."""
        elements = closure([level_permutation(g, 4) for g in G.generators])
        for v in level_vertices(G.shape, 3):
            assert rigid_stabilizer(G, v, 4).order() == len(fixing_outside(elements, G.shape, v, 4))

    def test_leemann_grigorchuk_is_stable(self, G):
        """The constant found does not change when two more levels are inspected."""
        N = leemann_constant(G, 1, 4, window=2)
        assert N is not None and N <= 4
        assert leemann_constant(G, 1, 4, window=4) == N

    def test_conjugate_count_on_truncations(self, full2, G):
        """Conjugates of truncated rigid stabilizers are counted as groups."""
        assert conjugate_count(full2, V("0"), 3) == 2
        assert conjugate_count(full2, V("01"), 3) == 4
        assert conjugate_count(G, V("0"), 2) == 2

    def test_leemann_level_check(self, G):
        """Level 0 is rejected."""
        with pytest.raises(PreconditionError):
            leemann_constant(G, 0, 2)

    def test_degree_limit(self, G):
        """Pointwise stabilizers above the degree limit are refused."""
        with pytest.raises(DegreeLimitError):
            rigid_stabilizer(G, V("0"), 5, degree_limit=16)


class TestPermGroupHelpers:
    def test_derived_series_of_s4(self):
        """Derived series of S4 has orders 24, 12, 4, 1."""
        P = LevelPermGroup(TreeShape.regular(4), 1, SymmetricGroup(4))
        assert derived_subgroup(P, 0) is P
        assert derived_subgroup(P, 1).order() == 12
        assert derived_subgroup(P, 2).order() == 4
        assert derived_subgroup(P, 3).order() == 1

    def test_derived_degree_limit(self):
        """Derived subgroups above the degree limit are refused."""
        P = LevelPermGroup(TreeShape.regular(4), 1, SymmetricGroup(4))
        with pytest.raises(DegreeLimitError):
            derived_subgroup(P, 1, degree_limit=3)

    def test_intersection(self, G):
        """Intersection of a truncation with a stabilizer."""
        P = truncate(G, 2)
        Q = vertex_stabilizer(G, V("00"), 2)
        assert truncated_intersection(P, Q).order() == 2

    def test_intersection_level_mismatch(self, G):
        """Truncations of different levels cannot be intersected."""
        with pytest.raises(ShapeMismatchError):
            truncated_intersection(truncate(G, 2), truncate(G, 3))
