"""Pytest tests for supports and the clopen structure lattice."""

import random

import pytest

import config
from autgrp import Subgroup, moves, random_word
from catalog import rist_generators_builtin
from clopen import Clopen
from errors import (
    AmbientMismatchError,
    LevelCapError,
    PreconditionError,
    ShapeMismatchError,
    SupportNotClopenError,
)
from lattice import (
    StructureClass,
    Verdict,
    class_complement,
    class_join,
    class_meet,
    class_orbit,
    conjugate_class,
    contains_derived_rist,
    equivalent,
    join_support_law,
    moved_vertices,
    phi,
    phi_inverse,
    support,
)
from parsing import parse_spec
from tree import Vertex, level_vertices


def V(word):
    return Vertex(tuple(int(ch) for ch in word))


def C(shape, *words):
    out = Clopen.zero(shape)
    for w in words:
        out = out | Clopen.cone(shape, [int(ch) for ch in w])
    return out


def cyclic(grig, name):
    return Subgroup.of(grig.system, [grig.system.element(name)], name=f"<{name}>")


class TestSupport:
    def test_support_of_b_is_not_clopen(self, grig):
        """Supp(<b>) at depth 9 shows the periodic pattern and evidence ray (1)*."""
        result = support(cyclic(grig, "b"), 9)
        shape = grig.system.shape
        assert result.determined_in == C(shape, "0", "10", "1110", "11110", "1111110", "11111110")
        assert result.determined_out == C(shape, "110", "111110", "111111110")
        assert [str(f.vertex) for f in result.frontier] == ["111111111"]
        assert result.verdict is Verdict.OPEN_NOT_CLOPEN_EVIDENCE
        assert str(result.evidence_ray) == "(1)*"
        assert result.clopen is None

    def test_partition_of_boundary(self, grig):
        """Inside, outside and frontier cones partition the boundary."""
        result = support(cyclic(grig, "d"), 6)
        shape = grig.system.shape
        frontier = C(shape, *[str(f.vertex) for f in result.frontier])
        assert (result.determined_in & result.determined_out).is_zero
        assert (result.determined_in | result.determined_out | frontier).is_one

    def test_shallow_depth_is_inconclusive(self, grig):
        """Depth 1 is too shallow to decide <b>."""
        result = support(cyclic(grig, "b"), 1)
        assert result.verdict is Verdict.INCONCLUSIVE
        assert result.depth_used == 1

    def test_identity_has_empty_support(self, grig):
        """The trivial group has support 0 at depth 0."""
        result = support(Subgroup.of(grig.system, []), 4)
        assert result.verdict is Verdict.CLOPEN
        assert result.clopen.is_zero
        assert result.depth_used == 0

    def test_to_dict(self, grig):
        """Support results serialize vertices as strings."""
        data = support(cyclic(grig, "b"), 2).to_dict()
        assert data["verdict"] == "inconclusive"
        assert data["determined_in"] == ["0"]
        assert [f["vertex"] for f in data["frontier"]] == ["10", "11"]
        assert data["evidence_ray"] is None

    def test_repeat_found_after_one_period(self, grig):
        """Evidence for <b> appears once the section cycle repeats."""
        result = support(cyclic(grig, "b"), 3)
        assert result.verdict is Verdict.OPEN_NOT_CLOPEN_EVIDENCE
        assert result.determined_in == C(grig.system.shape, "0", "10")

    def test_moved_vertices(self, grig):
        """b moves exactly 00 and 01 on level 2."""
        assert moved_vertices(cyclic(grig, "b"), 2) == {V("00"), V("01")}

    def test_frontier_over_level_cap(self, monkeypatch):
        """A frontier wider than the level cap stops the classification."""
        lines = ["tree arity=2", "state s0 = perm(0 1) -> e, e"]
        lines += [f"state s{k} = perm() -> s{k - 1}, s{k - 1}" for k in range(1, 11)]
        chain = parse_spec("\n".join(lines + ["group G = s10"]) + "\n").group()
        with pytest.raises(LevelCapError):
            support(chain, 12, level_cap=64)
        monkeypatch.setattr(config, "LEVEL_SIZE_CAP", 64)
        with pytest.raises(LevelCapError):
            support(chain, 12)

    def test_generators_suffice_for_moved_vertices(self, G):
        """Vertices moved by random products are moved by some generator."""
        rng = random.Random(5)
        for n in (2, 3, 4):
            moved = moved_vertices(G, n)
            for _ in range(10):
                g = random_word(G, 12, rng)
                assert {v for v in level_vertices(G.shape, n) if moves(g, v)} <= moved


class TestPhi:
    def test_whole_group(self, G):
        """The Grigorchuk group has support 1."""
        assert phi(G, 4).is_one

    def test_rist_of_vertex(self, G):
        """phi(rist(0)) is C(0)."""
        assert phi(rist_generators_builtin(G, V("0")), 6) == Clopen.cone(G.shape, [0])

    def test_not_clopen_raises(self, grig):
        """phi raises with the support report attached."""
        with pytest.raises(SupportNotClopenError) as exc:
            phi(cyclic(grig, "b"), 6)
        assert exc.value.details()["support"]["verdict"] == "open_not_clopen_evidence"

    def test_equivalent(self, G, grig):
        """Equivalence compares supports."""
        assert equivalent(G, cyclic(grig, "a"), 4)
        result = equivalent(cyclic(grig, "a"), rist_generators_builtin(G, V("0")), 6)
        assert not result
        assert result.support_k == Clopen.cone(G.shape, [0])

    def test_join_law(self, G):
        """Support of a join is the join of supports."""
        left, right = rist_generators_builtin(G, V("0")), rist_generators_builtin(G, V("10"))
        assert join_support_law(left, right, 6)

    @pytest.mark.parametrize("depth", [0, 1, 2, 3])
    def test_rist_support_is_cone(self, G, depth):
        """Rigid stabilizers of vertices of depth at most 3 have the vertex cone as support."""
        for v in level_vertices(G.shape, depth):
            assert phi(rist_generators_builtin(G, v), 10) == Clopen(G.shape, (v,))


class TestStructureClasses:
    def test_phi_inverse_roundtrip(self, G):
        """Realized classes have the requested support."""
        target = C(G.shape, "0", "11")
        cls = phi_inverse(G, target, realize=True)
        assert cls.clopen == target
        assert phi(cls.realization, 8) == target

    def test_phi_inverse_without_realization(self, G):
        """Without realize no subgroup is built."""
        assert phi_inverse(G, Clopen.one(G.shape)).realization is None

    def test_phi_inverse_shape_check(self, G, gs3):
        """Clopens from another tree are rejected."""
        with pytest.raises(ShapeMismatchError):
            phi_inverse(G, Clopen.one(gs3.system.shape))

    def test_lattice_operations(self, G):
        """Class meet, join and complement act on clopens."""
        x = phi_inverse(G, C(G.shape, "0"))
        y = phi_inverse(G, C(G.shape, "1"))
        assert class_meet(x, y).clopen.is_zero
        assert class_join(x, y).clopen.is_one
        assert class_complement(x) == y
        assert str(x) == "[C(0)]"

    def test_ambient_mismatch(self, G, grig):
        """Classes over different ambients cannot be combined."""
        x = StructureClass(G, C(G.shape, "0"))
        y = StructureClass(cyclic(grig, "a"), C(G.shape, "1"))
        with pytest.raises(AmbientMismatchError):
            class_meet(x, y)

    def test_renamed_ambient_is_the_same(self, G):
        """Ambients with the same generators agree whatever their names."""
        renamed = Subgroup(G.system, G.generators, "renamed")
        x = StructureClass(G, C(G.shape, "0"))
        y = StructureClass(renamed, C(G.shape, "01"))
        assert class_join(x, y).clopen == C(G.shape, "0")

    def test_conjugate_class(self, G, grig):
        """Conjugating moves the class along the induced map."""
        x = phi_inverse(G, C(G.shape, "00"), realize=True)
        conj = conjugate_class(x, grig.system.element("a"))
        assert conj.clopen == C(G.shape, "10")
        assert phi(conj.realization, 8) == conj.clopen

    def test_orbit_is_level(self, G):
        """The orbit of [C(00)] is the four level-2 cone classes."""
        orbit = class_orbit(phi_inverse(G, C(G.shape, "00")))
        assert orbit.complete
        assert {str(x) for x in orbit.classes} == {"[C(00)]", "[C(01)]", "[C(10)]", "[C(11)]"}

    def test_orbit_truncated(self, G):
        """Orbits stop at max_size and say so."""
        orbit = class_orbit(phi_inverse(G, C(G.shape, "00")), max_size=2)
        assert not orbit.complete
        assert len(orbit.classes) == 2


class TestDerivedRist:
    def test_whole_group_contains_its_rist(self, G):
        """G contains the derived rist at 0."""
        assert contains_derived_rist(G, V("0"), 0, 3, G)

    def test_cyclic_group_does_not(self, G, grig):
        """<a> contains no rist."""
        assert not contains_derived_rist(cyclic(grig, "a"), V("0"), 0, 3, G)

    def test_fixed_vertex_rejected(self, G, grig):
        """Vertices fixed by H are rejected."""
        with pytest.raises(PreconditionError):
            contains_derived_rist(cyclic(grig, "d"), V("0"), 1, 3, G)

    def test_other_system_rejected(self, G, gs3):
        """H and G must share a system."""
        with pytest.raises(AmbientMismatchError):
            contains_derived_rist(gs3.group(), V("0"), 0, 2, G)
