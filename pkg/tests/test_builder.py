from fractions import Fraction as F

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from krtoeplitz.builder import (
    BuildParams,
    TargetSpec,
    apportion,
    build,
    comp_length,
    overshoot,
    plan_level,
    tracking_error_bound,
)
from krtoeplitz.diagram import (
    incidence_matrix,
    letter_frequencies,
    new_root,
    tracking_columns,
)
from krtoeplitz.errors import BracketingError, ConfigError, InfeasibleApportionError
from krtoeplitz.io import diagram_to_json


def value(m, f):
    return sum(a * b for a, b in zip(m, f)) / sum(m)


def test_apportion_examples():
    assert apportion([F(1), F(0)], F(1, 2), 4) == [2, 2]
    assert apportion([F(1), F(0)], F(1, 3), 3) == [1, 2]
    m = apportion([F(3, 4), F(1, 4), F(1, 2)], F(2, 3), 12)
    assert m == [9, 1, 2] and value(m, [F(3, 4), F(1, 4), F(1, 2)]) == F(2, 3)


def test_apportion_errors():
    with pytest.raises(BracketingError):
        apportion([F(1, 4), F(3, 4)], F(7, 8), 8)
    with pytest.raises(InfeasibleApportionError):
        apportion([F(1), F(0), F(1, 2)], F(1, 2), 2)


def test_target_spec_validation():
    assert TargetSpec(("1/4", "3/4")).margin == F(1, 4)
    for bad in [(), ("0",), ("1",), ("1/2", "1/2"), ("3/2",)]:
        with pytest.raises(ConfigError):
            TargetSpec(bad)
    with pytest.raises(ConfigError):
        BuildParams(depth=-1)
    with pytest.raises(ConfigError):
        BuildParams(depth=2, L_floor=1)


def test_plan_level_single_target():
    w = plan_level(new_root(), TargetSpec(("1/2",)), BuildParams(1), L=4)
    got = {p.role: p.counts(2) for p in w.protos}
    assert got == {"sentinel_low": (1, 3), "tracking:1": (2, 2), "sentinel_high": (3, 1)}


def test_plan_level_two_targets_overshoot():
    t = TargetSpec(("1/4", "3/4"))
    w = plan_level(new_root(), t, BuildParams(1), L=8)
    reps = {p.role: p.repartition(2) for p in w.protos}
    d = overshoot(1, t)
    assert reps["tracking:1"][0] == F(1, 4) - d
    assert reps["tracking:2"][0] == F(3, 4) + d
    assert reps["filler"][0] == F(1, 2)
    assert len(set(w.heights())) == 1 and len(set(reps.values())) == 3


def test_comp_length_respects_floor_and_bound():
    t = TargetSpec(("1/4", "3/4"))
    assert comp_length(0, 2, t, BuildParams(1, L_floor=2)) == 32
    assert comp_length(0, 2, t, BuildParams(1, L_floor=100)) == 100
    assert comp_length(0, 40, t, BuildParams(1, L_floor=2)) >= 80


def test_build_depth_zero_and_one():
    t = TargetSpec(("1/4", "3/4"))
    assert build(t, BuildParams(0)).depth == 0
    d = build(t, BuildParams(1))
    tr = tracking_columns(d.top)
    f = letter_frequencies(d, 1)
    assert f[tr[1] - 1] < F(1, 4) < F(3, 4) < f[tr[2] - 1]


def test_single_target_within_bound_each_level():
    t = TargetSpec(("1/2",))
    d = build(t, BuildParams(3))
    for n in (1, 2, 3):
        f = letter_frequencies(d, n)[tracking_columns(d.level(n))[1] - 1]
        assert abs(f - F(1, 2)) <= tracking_error_bound(d, n)


def test_determinism():
    t = TargetSpec(("1/8", "1/2", "7/8"))
    assert diagram_to_json(build(t, BuildParams(4))) == diagram_to_json(build(t, BuildParams(4)))


fracs01 = st.fractions(min_value=0, max_value=1, max_denominator=16)


@given(fracs01, fracs01, st.fractions(min_value=0, max_value=1, max_denominator=30),
       st.integers(2, 40))
def test_apportion_two_columns_optimal(a, b, p, L):
    assume(a != b and min(a, b) <= p <= max(a, b))
    f = [a, b]
    vals = [value([m, L - m], f) for m in range(1, L)]
    m = apportion(f, p, L, "nearest")
    assert sum(m) == L and min(m) >= 1
    assert abs(value(m, f) - p) == min(abs(v - p) for v in vals)
    down = [v for v in vals if v <= p]
    up = [v for v in vals if v >= p]
    if down:
        assert value(apportion(f, p, L, "down"), f) == max(down)
    if up:
        assert value(apportion(f, p, L, "up"), f) == min(up)


@given(st.lists(fracs01, min_size=2, max_size=5, unique=True), st.data())
def test_apportion_rounding_direction(f, data):
    p = data.draw(st.fractions(min_value=min(f), max_value=max(f), max_denominator=40))
    L = data.draw(st.integers(len(f), 80))
    for mode, ok in (("down", lambda v: v <= p), ("up", lambda v: v >= p)):
        try:
            m = apportion(f, p, L, mode)
        except InfeasibleApportionError:
            continue
        assert sum(m) == L and min(m) >= 1 and ok(value(m, f))


targets = st.lists(st.fractions(min_value=F(1, 16), max_value=F(15, 16), max_denominator=16),
                   min_size=1, max_size=3, unique=True)


@settings(max_examples=25, deadline=None)
@given(targets, st.integers(1, 4))
def test_build_brackets_and_recounts(p, depth):
    t = TargetSpec(tuple(p))
    d = build(t, BuildParams(depth))
    vec = [1, 0]
    for n in range(1, depth + 1):
        vec = [sum(a * b for a, b in zip(row, vec)) for row in incidence_matrix(d, n)]
        f = letter_frequencies(d, n)
        assert f == [F(a, d.height(n)) for a in vec]
        assert all(min(f) <= x <= max(f) for x in t.p)
        tr = tracking_columns(d.level(n))
        assert sorted(tr) == list(range(1, t.m + 1))
        # overshoot halves each level; rounding costs at most 1/L, and with two
        # targets the columns are twice the apportioned length
        step = F(2, d.level(n).columns[0].length)
        for j, x in enumerate(t.p, start=1):
            assert abs(f[tr[j] - 1] - x) <= overshoot(n, t) + step
