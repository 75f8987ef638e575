"""Hypothesis strategies for tree objects."""

from hypothesis import strategies as st

from clopen import from_vertices
from stone import Ray
from tree import TreeShape, Vertex


def vertices(shape: TreeShape, max_depth: int):
    return st.integers(0, max_depth).flatmap(
        lambda d: st.tuples(*[st.integers(0, shape.arity(k) - 1) for k in range(d)]).map(Vertex)
    )


def clopens(shape: TreeShape, max_depth: int, max_cones: int = 5):
    return st.lists(vertices(shape, max_depth), max_size=max_cones).map(lambda vs: from_vertices(shape, vs))


def rays(shape: TreeShape, max_pre: int = 4, max_cycle: int = 3):
    step = len(shape.period)

    def build(lengths):
        extra, reps = lengths
        pre_len = len(shape.pre_period) + extra
        total = pre_len + step * reps
        letters = st.tuples(*[st.integers(0, shape.arity(k) - 1) for k in range(total)])
        return letters.map(lambda ls: Ray(shape, ls[:pre_len], ls[pre_len:]))

    return st.tuples(st.integers(0, max_pre), st.integers(1, max_cycle)).flatmap(build)


def words(names, max_length: int = 8):
    """Generator words as lists of (state, ±1) letters."""
    return st.lists(st.tuples(st.sampled_from(names), st.sampled_from([1, -1])), max_size=max_length)
