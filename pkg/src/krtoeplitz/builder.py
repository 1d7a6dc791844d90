"""Construction driver: grow a diagram whose tracking columns approach prescribed
letter frequencies.

Every new level has one tracking column per target.  Each tracking column is
mostly made of copies of its own predecessor, with one copy of every other
column and a few correction copies chosen by :func:`apportion`.  The tracking
columns for the smallest and largest targets deliberately overshoot by
``margin / 2**(n+1)`` so that every target stays bracketed by the current
letter frequencies; the overshoot halves at every level.  With two targets a
filler column (the two trackers stacked) keeps the column count at three;
with one target two sentinel columns play the overshooting role.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .diagram import Diagram, letter_frequencies, new_root
from .engine import (
    ProtoColumn,
    WorkingLevel,
    eliminate_twins,
    equalize_heights,
    finalize_level,
)
from .errors import BracketingError, ConfigError, InfeasibleApportionError
from .exact import affine_dim, rat


@dataclass(frozen=True)
class TargetSpec:
    p: tuple

    def __post_init__(self):
        p = tuple(rat(x) for x in self.p)
        object.__setattr__(self, "p", p)
        if not p:
            raise ConfigError("at least one target is required")
        for x in p:
            if not 0 < x < 1:
                raise ConfigError(f"target {x} is not in the open interval (0, 1)")
        if len(set(p)) != len(p):
            raise ConfigError("targets must be pairwise distinct")

    @property
    def m(self) -> int:
        return len(self.p)

    @property
    def margin(self) -> Fraction:
        return min(1 - max(self.p), min(self.p))


@dataclass(frozen=True)
class BuildParams:
    depth: int
    L_floor: int = 8
    anchor_level: int = 1

    def __post_init__(self):
        if self.depth < 0:
            raise ConfigError("depth must be >= 0")
        if self.L_floor < 2:
            raise ConfigError("L_floor must be >= 2")
        if self.anchor_level < 0:
            raise ConfigError("anchor_level must be >= 0")


def apportion(f: Sequence[Fraction], p: Fraction, L: int, rounding: str = "nearest") -> list:
    """Multiplicities ``m_i >= 1`` summing to ``L`` with ``sum m_i f_i / L`` near ``p``.

    Every column gets one copy; the remaining ``L - k`` copies are split
    between the columns bracketing ``p``.  The exact split is used when it is
    an integer.  ``rounding`` is ``"nearest"`` (error at most ``1/(2L)``),
    ``"down"`` (result ``<= p``) or ``"up"`` (result ``>= p``).
    """
    f = [Fraction(x) for x in f]
    p = Fraction(p)
    k = len(f)
    if L < k:
        raise InfeasibleApportionError(f"comp length {L} < column count {k}")
    if not min(f) <= p <= max(f):
        raise BracketingError(f"target {p} outside [{min(f)}, {max(f)}]")
    R = L - k
    S = sum(f)
    lo = max(range(k), key=lambda i: (f[i], -i) if f[i] <= p else (Fraction(-1), 0))
    hi = min(range(k), key=lambda i: (f[i], i) if f[i] >= p else (Fraction(2), 0))
    mult = [1] * k
    if f[lo] == f[hi]:
        # a column sits exactly on p; correct the baseline with a neighbour
        need = k * p - S
        if need == 0:
            mult[lo] += R
            return mult
        if need < 0:
            below = [i for i in range(k) if f[i] < p]
            if not below:
                mult[lo] += R
                return _checked(mult, f, p, L, rounding)
            lo = max(below, key=lambda i: (f[i], -i))
        else:
            above = [i for i in range(k) if f[i] > p]
            if not above:
                mult[hi] += R
                return _checked(mult, f, p, L, rounding)
            hi = min(above, key=lambda i: (f[i], i))
    x = (p * L - S - R * f[lo]) / (f[hi] - f[lo])
    if x.denominator == 1:
        e = x.numerator
    elif rounding == "down":
        e = math.floor(x)
    elif rounding == "up":
        e = math.ceil(x)
    else:
        e = math.floor(x + Fraction(1, 2))
    e = max(0, min(R, e))
    mult[hi] += e
    mult[lo] += R - e
    return _checked(mult, f, p, L, rounding)


def _checked(mult, f, p, L, rounding):
    v = sum(m * x for m, x in zip(mult, f)) / L
    if rounding == "down" and v > p:
        raise InfeasibleApportionError(f"cannot reach {p} from below with L = {L} (best {v})")
    if rounding == "up" and v < p:
        raise InfeasibleApportionError(f"cannot reach {p} from above with L = {L} (best {v})")
    return mult


def comp_length(n: int, k: int, t: TargetSpec, params: BuildParams) -> int:
    """Composition length for level ``n + 1`` grown on a level with ``k`` columns."""
    bound = math.ceil(Fraction(k * 2 ** (n + 2)) / t.margin)
    return max(params.L_floor, 2 * k, bound)


def overshoot(n: int, t: TargetSpec) -> Fraction:
    """Overshoot of the outermost columns at level ``n``."""
    return t.margin / 2 ** n


def _level_targets(t: TargetSpec, level: int):
    """(role, target, rounding) for every apportioned column of ``level``."""
    delta = overshoot(level, t)
    if t.m == 1:
        p = t.p[0]
        return [("sentinel_low", p - delta, "down"), ("tracking:1", p, "nearest"),
                ("sentinel_high", p + delta, "up")]
    lo = min(range(t.m), key=lambda j: t.p[j])
    hi = max(range(t.m), key=lambda j: t.p[j])
    out = []
    for j, p in enumerate(t.p):
        if j == lo:
            out.append((f"tracking:{j + 1}", p - delta, "down"))
        elif j == hi:
            out.append((f"tracking:{j + 1}", p + delta, "up"))
        else:
            out.append((f"tracking:{j + 1}", p, "nearest"))
    return out


def _unit_swap(mult: list, f: list) -> list:
    """Move one copy from the heaviest column to its nearest-frequency neighbour."""
    out = list(mult)
    i = max(range(len(out)), key=lambda a: (out[a], -a))
    j = min((a for a in range(len(out)) if a != i), key=lambda a: (abs(f[a] - f[i]), a))
    out[i] -= 1
    out[j] += 1
    return out


def plan_level(d: Diagram, t: TargetSpec, params: BuildParams, L: Optional[int] = None) -> WorkingLevel:
    """Working level for the next level of ``d`` (equal heights, full support, twin-free)."""
    n = d.top.index
    k = d.top.k
    f = letter_frequencies(d, n)
    if L is None:
        L = comp_length(n, k, t, params)
    mults, roles = [], []
    for role, target, rounding in _level_targets(t, n + 1):
        mults.append(apportion(f, target, L, rounding))
        roles.append(role)
    # twins among apportioned columns are repaired by unit swaps
    for i in range(len(mults)):
        guard = 0
        while any(mults[i] == mults[j] for j in range(i)):
            mults[i] = _unit_swap(mults[i], f)
            guard += 1
            if guard > L:
                break
    if t.m >= 3 and n + 1 == params.anchor_level + 1:
        mults = _separate(mults, roles, f)
    protos = [ProtoColumn(tuple(p for p, c in enumerate(m, start=1) for _ in range(c)), (), 1, r)
              for m, r in zip(mults, roles)]
    if t.m == 2:
        protos.append(ProtoColumn(protos[0].unit + protos[1].unit, (), 1, "filler"))
    w = WorkingLevel(tuple(protos), k)
    w = eliminate_twins(w)
    return equalize_heights(w)


def _separate(mults, roles, f):
    """Unit swaps until the tracking columns' signatures are affinely independent."""
    idx = [i for i, r in enumerate(roles) if r.startswith("tracking:")]
    m = len(idx)
    for _ in range(4 * len(f) * m):
        pts = [tuple(Fraction(v) for v in mults[i]) for i in idx]
        if affine_dim(pts) == m - 1:
            return mults
        worst = idx[-1]
        mults[worst] = _unit_swap(mults[worst], f)
    return mults


def build(t: TargetSpec, params: BuildParams) -> Diagram:
    d = new_root()
    for _ in range(params.depth):
        d = finalize_level(d, plan_level(d, t, params))
    return d


def tracking_error_bound(d: Diagram, n: int) -> Fraction:
    """sum_{nu <= n} 1 / (2 L_nu) with L_nu the composition length of level nu."""
    return sum((Fraction(1, 2 * d.level(v).columns[0].length) for v in range(1, n + 1)),
               Fraction(0))
