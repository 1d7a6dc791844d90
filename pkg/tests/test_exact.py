from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from krtoeplitz.errors import DimensionMismatchError, KRError, UnsupportedDimensionError
from krtoeplitz.exact import (
    affine_dim,
    convex_coefficients,
    diameter,
    fmt_rat,
    hull_vertices,
    in_hull,
    lp_minimize,
    maxnorm_distance,
    rank,
    rat,
)

fracs = st.fractions(min_value=-3, max_value=3, max_denominator=12)


def pts(dim, min_size=1, max_size=7):
    return st.lists(st.tuples(*[fracs] * dim), min_size=min_size, max_size=max_size)


def chain_hull(points):
    """Andrew's monotone chain with strict turns: the 2-D vertex oracle."""
    p = sorted(set(points))
    if len(p) <= 2:
        return p

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for q in p:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], q) <= 0:
            lower.pop()
        lower.append(q)
    for q in reversed(p):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], q) <= 0:
            upper.pop()
        upper.append(q)
    return sorted(set(lower[:-1] + upper[:-1]))


def test_rat_parsing():
    assert rat("3/4") == F(3, 4)
    assert rat(" 2 ") == 2
    assert rat(F(1, 3)) == F(1, 3)
    assert fmt_rat(F(6, 8)) == "3/4"
    assert fmt_rat(F(4, 2)) == "2"
    with pytest.raises(KRError):
        rat("abc")
    with pytest.raises(KRError):
        rat(0.5)


def test_hull_examples():
    assert hull_vertices([(F(0),), (F(1),), (F(1, 2),)]) == [(0,), (1,)]
    assert hull_vertices([(0, 0), (1, 0), (0, 1), (F(1, 4), F(1, 4))]) == [(0, 0), (0, 1), (1, 0)]
    assert hull_vertices([(F(1, 2),), (F(1, 2),)]) == [(F(1, 2),)]


def test_affine_dim_examples():
    assert affine_dim([(F(1, 3),)]) == 0
    assert affine_dim([(0,), (1,)]) == 1
    assert affine_dim([(0, 0), (1, 0), (0, 1)]) == 2
    assert affine_dim([(0, 0), (1, 1), (2, 2)]) == 1


def test_dimension_errors():
    with pytest.raises(DimensionMismatchError):
        hull_vertices([(0,), (0, 1)])
    with pytest.raises(DimensionMismatchError):
        affine_dim([(0,), (0, 1)])
    with pytest.raises(UnsupportedDimensionError):
        hull_vertices([(0,) * 5, (1,) * 5])


def test_lp_small():
    # min x + y  s.t. x + 2y = 4, x, y >= 0  -> y = 2
    value, x = lp_minimize([1, 1], [[1, 2]], [4])
    assert value == 2 and x == [0, 2]
    assert lp_minimize([1], [[1]], [-1]) is None


def test_maxnorm_distance_examples():
    square = [(0, 0), (1, 0), (0, 1), (1, 1)]
    assert maxnorm_distance((F(1, 2), F(1, 2)), square) == 0
    assert maxnorm_distance((2, F(1, 2)), square) == 1
    assert maxnorm_distance((3, 3), square) == 2


def test_rank():
    assert rank([[1, 2], [2, 4]]) == 1
    assert rank([[1, 0], [0, 1], [1, 1]]) == 2


@given(pts(1))
def test_hull_1d_is_min_max(p):
    v = hull_vertices(p)
    assert v == sorted({min(p), max(p)})


@settings(max_examples=60, deadline=None)
@given(pts(2))
def test_hull_2d_matches_monotone_chain(p):
    assert hull_vertices(p) == chain_hull(p)


@settings(max_examples=60, deadline=None)
@given(pts(3, max_size=6))
def test_hull_vertices_reconstruct_every_point(p):
    v = hull_vertices(p)
    for q in p:
        w = convex_coefficients(q, v)
        assert w is not None
        assert sum(w) == 1 and all(x >= 0 for x in w)
        assert tuple(sum(wi * vi[k] for wi, vi in zip(w, v)) for k in range(3)) == q
    for i, q in enumerate(v):
        assert not in_hull(q, v[:i] + v[i + 1:])


@settings(max_examples=60, deadline=None)
@given(pts(1, min_size=1, max_size=5), fracs)
def test_maxnorm_distance_1d(p, x):
    lo, hi = min(p)[0], max(p)[0]
    expect = max(lo - x, x - hi, 0)
    assert maxnorm_distance((x,), p) == expect


@settings(max_examples=40, deadline=None)
@given(pts(2, min_size=1, max_size=5), st.tuples(fracs, fracs))
def test_maxnorm_distance_zero_iff_inside(p, x):
    assert (maxnorm_distance(x, p) == 0) == in_hull(x, p)


@given(pts(2, min_size=1, max_size=6))
def test_affine_dim_bounds(p):
    d = affine_dim(p)
    assert 0 <= d <= min(2, len(set(p)) - 1)


@given(pts(2, min_size=2, max_size=6))
def test_diameter_is_max_pairwise(p):
    best = max(max(abs(a[0] - b[0]), abs(a[1] - b[1])) for a in p for b in p)
    assert diameter(p) == best
