from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from krtoeplitz import coder
from krtoeplitz.builder import BuildParams, TargetSpec, build
from krtoeplitz.diagram import CellRef, append_level, new_root
from krtoeplitz.errors import KRError, UndefinedAtRootError

LEVEL1 = [[1, 1, 1, 2], [1, 2, 2, 2], [1, 1, 2, 2]]


@pytest.fixture
def d1():
    return append_level(new_root(), LEVEL1)


@pytest.fixture
def d2(d1):
    return append_level(d1, [[1, 2, 3, 3], [1, 2, 2, 3], [1, 1, 2, 3]])


def test_column_words(d1, d2):
    assert coder.column_word(d1, 1, 1) == "0001"
    assert coder.column_word(d1, 0, 1) == "0"
    assert coder.column_word(d2, 2, 1).startswith("000101110011")
    assert coder.column_word(d2, 2, 1) == "0001" + "0111" + "0011" * 2


def test_window_level1(d1):
    w = coder.window(d1, 1)
    assert w.letters == "00110001" and w.origin == 4
    assert w.at(0) == "0" and w.at(-1) == "1"
    assert w.render() == "origin=4\n00110001\n"
    with pytest.raises(UndefinedAtRootError):
        coder.window(d1, 0)


def test_window_nesting(d2):
    a, b = coder.window(d2, 1), coder.window(d2, 2)
    lo = b.origin - a.origin
    assert b.letters[lo:lo + len(a.letters)] == a.letters
    assert all(r["ok"] for r in coder.window_nesting_certificate(d2, 2))


def test_skeleton_level1(d1):
    s = coder.skeleton(d1, 1)
    assert s.filled == {0: "0", 3: "1"} and s.density == F(1, 2)
    assert s.to_json() == {"level": 1, "filled": {"0": "0", "3": "1"}, "density": "1/2"}
    assert coder.skeleton_density(d1, 1) == F(1, 2)


def test_skeleton_lifts(d2):
    s1, s2 = coder.skeleton(d2, 1).filled, coder.skeleton(d2, 2).filled
    for r, c in s1.items():
        for q in range(0, 16, 4):
            assert s2[r + q] == c


def test_fill_report_small(d2):
    fills = coder.fill_report(d2, 2)
    assert fills[0] == 1 and fills[-1] == 1
    assert all(fills[p] is not None and fills[p] <= 2 for p in range(-4, 4))
    assert all(r["ok"] for r in coder.quasiperiodicity_certificate(d2, 2))


def test_vershik(d1):
    assert coder.vershik_successor(d1, CellRef(1, 1, 1)) == CellRef(1, 1, 2)
    assert coder.vershik_successor(d1, CellRef(1, 1, 3)) is coder.TOP_REACHED
    with pytest.raises(KRError):
        coder.vershik_successor(d1, CellRef(1, 1, 4))
    assert coder.orbit_letters(d1, 1, 2) == "0111"


def test_smallest_period():
    assert coder.smallest_period("abab") == 2
    assert coder.smallest_period("0001") == 4
    assert coder.smallest_period("") == 0


def test_word_cap(d1):
    with pytest.raises(KRError):
        coder.column_word(d1, 1, 1, max_len=3)


@pytest.fixture(scope="module")
def built():
    return build(TargetSpec(("1/4", "3/4")), BuildParams(depth=3))


def test_filled_letter_matches_skeleton(built):
    for n in (1, 2):
        s = coder.skeleton(built, n).filled
        for r in range(built.height(n)):
            assert coder.filled_letter(built, n, r) == s.get(r)


def test_agree_count_matches_materialized(built):
    for n in (1, 2):
        assert coder.agree_count(built, n) == len(coder.skeleton(built, n).filled)


def test_origin_letter(built):
    for n in range(1, 4):
        assert coder.origin_letter(built, n) == "0"
    assert coder.window(built, 2).at(0) == "0"


@st.composite
def small_diagrams(draw):
    d = new_root()
    for _ in range(draw(st.integers(1, 3))):
        k = d.top.k
        base = list(range(1, k + 1))
        L = k + draw(st.integers(2, 3))
        comps = {tuple(sorted(base + [1] * (L - k))), tuple(sorted(base + [k] * (L - k))),
                 tuple(sorted(base + [1] + [k] * (L - k - 1)))}
        for _ in range(draw(st.integers(0, 2))):
            extra = draw(st.lists(st.integers(1, k), min_size=L - k, max_size=L - k))
            comps.add(tuple(sorted(base + extra)))
        d = append_level(d, sorted(comps))
    return d


@settings(max_examples=40, deadline=None)
@given(small_diagrams())
def test_words_are_traces_and_skeletons_lift(d):
    for n in range(1, d.depth + 1):
        for i in range(1, d.level(n).k + 1):
            assert coder.column_word(d, n, i) == coder.orbit_letters(d, n, i)
        assert coder.agree_count(d, n) == len(coder.skeleton(d, n).filled)
    for n in range(1, d.depth):
        s, s2 = coder.skeleton(d, n).filled, coder.skeleton(d, n + 1).filled
        h = d.height(n)
        assert all(s2.get(r + q) == c for r, c in s.items() for q in range(0, d.height(n + 1), h))
        assert coder.skeleton_density(d, n) <= coder.skeleton_density(d, n + 1)
    cert = coder.quasiperiodicity_certificate(d, d.depth)
    if d.depth >= 2 and all(r["ok"] for r in cert):
        fills = coder.fill_report(d, d.depth)
        for n in range(2, d.depth + 1):
            h = d.height(n - 1)
            assert all(fills[p] is not None and fills[p] <= n for p in range(-h, h))
