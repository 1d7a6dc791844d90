"""Cut-and-stack surgeries on working (not yet finalized) partitions.

A :class:`WorkingLevel` refines the top level of a diagram: every proto column
is a stack of whole copies of parent columns.  Protos store a ``unit``
composition repeated ``reps`` times so that height equalization never has to
materialize long compositions.

Markers follow individual parent cells through the surgeries; they are how
``balance_pair`` and ``split_clopen_equal`` are checked.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import lcm

from .diagram import CellSet, Diagram, Level, append_counts
from .errors import (
    InfeasibleSurgeryError,
    KRError,
    NeedsDeeperLevelError,
    NotDominatedError,
    SurgeryPreconditionError,
    UnbalancedPairError,
)


@dataclass(frozen=True)
class Marker:
    """One tracked parent cell: ``tag`` names the clopen, ``slot`` is the
    constituent index inside the proto unit, ``row`` the row inside that
    parent column, ``copy`` the chain of copy indices picked up by cuts."""

    tag: str
    slot: int
    row: int
    copy: tuple = ()


@dataclass(frozen=True)
class ProtoColumn:
    unit: tuple
    markers: tuple = ()
    reps: int = 1
    role: str = "filler"

    @property
    def comp(self) -> tuple:
        return self.unit * self.reps

    @property
    def height(self) -> int:
        return len(self.unit) * self.reps

    def counts(self, parent_count: int) -> tuple:
        c = Counter(self.unit)
        return tuple(c.get(p, 0) * self.reps for p in range(1, parent_count + 1))

    def repartition(self, parent_count: int) -> tuple:
        h = self.height
        return tuple(Fraction(v, h) for v in self.counts(parent_count))

    def support(self) -> set:
        return set(self.unit)

    def marker_count(self, tag: str) -> int:
        return sum(1 for m in self.markers if m.tag == tag) * self.reps

    def expanded(self) -> "ProtoColumn":
        """Same column with ``reps`` folded into the unit."""
        if self.reps == 1:
            return self
        n = len(self.unit)
        marks = tuple(replace(m, slot=m.slot + r * n, copy=m.copy + (r + 1,))
                      for r in range(self.reps) for m in self.markers)
        return ProtoColumn(self.unit * self.reps, marks, 1, self.role)


@dataclass(frozen=True)
class WorkingLevel:
    protos: tuple
    parent_count: int
    notes: tuple = field(default=(), compare=False)

    def __post_init__(self):
        for i, p in enumerate(self.protos, start=1):
            if not p.unit:
                raise KRError(f"proto {i} is empty")
            bad = [x for x in set(p.unit) if not 1 <= x <= self.parent_count]
            if bad:
                raise KRError(f"proto {i} references invalid parents {sorted(bad)}")

    @classmethod
    def from_comps(cls, comps, parent_count: int, roles=None) -> "WorkingLevel":
        roles = roles or ["filler"] * len(comps)
        return cls(tuple(ProtoColumn(tuple(c), (), 1, r) for c, r in zip(comps, roles)),
                   parent_count)

    @classmethod
    def identity(cls, level: Level) -> "WorkingLevel":
        return cls.from_comps([[i] for i in range(1, level.k + 1)], level.k)

    @property
    def comps(self) -> list:
        return [p.comp for p in self.protos]

    def heights(self) -> list:
        return [p.height for p in self.protos]

    def repartitions(self) -> list:
        return [p.repartition(self.parent_count) for p in self.protos]

    def _with(self, protos, note=None) -> "WorkingLevel":
        notes = self.notes + ((note,) if note else ())
        return WorkingLevel(tuple(protos), self.parent_count, notes)


def _check_index(w: WorkingLevel, i: int) -> None:
    if not 1 <= i <= len(w.protos):
        raise KRError(f"proto index {i} out of range 1..{len(w.protos)}")


def cut_column(w: WorkingLevel, i: int, q: int) -> WorkingLevel:
    """Replace proto ``i`` by ``q`` equal slices of itself."""
    _check_index(w, i)
    if q < 1:
        raise KRError("cut count must be >= 1")
    if q == 1:
        return w
    p = w.protos[i - 1]
    copies = [replace(p, markers=tuple(replace(m, copy=m.copy + (c,)) for m in p.markers))
              for c in range(1, q + 1)]
    return w._with(w.protos[:i - 1] + tuple(copies) + w.protos[i:])


def _concat(lower: ProtoColumn, upper: ProtoColumn) -> ProtoColumn:
    lo, up = lower.expanded(), upper.expanded()
    off = len(lo.unit)
    marks = lo.markers + tuple(replace(m, slot=m.slot + off) for m in up.markers)
    return ProtoColumn(lo.unit + up.unit, marks, 1, lower.role)


def stack(w: WorkingLevel, lower: int, upper: int) -> WorkingLevel:
    """Stack proto ``upper`` on top of proto ``lower``; the result takes ``lower``'s place."""
    _check_index(w, lower)
    _check_index(w, upper)
    if lower == upper:
        raise KRError("cannot stack a proto onto itself")
    merged = _concat(w.protos[lower - 1], w.protos[upper - 1])
    protos = list(w.protos)
    protos[lower - 1] = merged
    del protos[upper - 1]
    return w._with(protos)


def self_stack(p: ProtoColumn, n: int) -> ProtoColumn:
    """Cut into ``n`` slices and stack them (repartition unchanged)."""
    out = p
    for _ in range(n - 1):
        out = _concat(out, p)
    if n > 1:
        # mark which slice every marker came from
        e = p.expanded()
        size = len(e.markers)
        marks = tuple(replace(m, copy=m.copy + (k // size + 1,))
                      for k, m in enumerate(out.markers)) if size else ()
        out = replace(out, markers=marks)
    return out


def _smallest_cut(h_c: int, h_d: int) -> int:
    n = 1
    while n * h_c <= h_d:
        n *= 2
    return n


def _distinct_reps(w: WorkingLevel) -> int:
    return len(set(w.repartitions()))


def ensure_all_copies(w: WorkingLevel) -> WorkingLevel:
    """Make every proto contain at least one copy of every parent column.

    A deficient proto ``D`` is cut into ``N`` slices which are stacked, and a
    copy of a full-support proto is put on top; ``N`` is the smallest power of
    two with ``N * h(D) > h(target)``, doubled further if that would leave all
    protos twins.  When no full-support proto exists one is assembled from
    slices of protos that jointly cover every parent.
    """
    full = set(range(1, w.parent_count + 1))
    if all(p.support() == full for p in w.protos):
        return w
    if _distinct_reps(w) < 2:
        raise SurgeryPreconditionError("all protos are twins")
    protos = list(w.protos)
    note = None
    target = next((p for p in protos if p.support() == full), None)
    if target is None:
        covered, chosen = set(), []
        for p in protos:
            if not p.support() <= covered:
                chosen.append(p)
                covered |= p.support()
        if covered != full:
            raise InfeasibleSurgeryError(
                f"parents {sorted(full - covered)} appear in no proto; no stacking target")
        target = chosen[0]
        for p in chosen[1:]:
            target = _concat(target, p)
        target = replace(target, role="filler")
        protos.append(target)
        note = "assembled a full-support stacking target from slices of covering protos"
    for idx, p in enumerate(protos):
        if p.support() == full:
            continue
        n = _smallest_cut(p.height, target.height)
        while True:
            cand = _concat(self_stack(p, n), target)
            trial = protos[:idx] + [cand] + protos[idx + 1:]
            reps = {q.repartition(w.parent_count) for q in trial}
            if len(reps) >= 2:
                break
            n *= 2
        protos[idx] = cand
    return w._with(protos, note)


def _twin_groups(w: WorkingLevel) -> list:
    seen = {}
    for i, r in enumerate(w.repartitions()):
        seen.setdefault(r, []).append(i)
    return [g for g in seen.values() if len(g) > 1]


def eliminate_twins(w: WorkingLevel) -> WorkingLevel:
    """Perturb twins until all repartitions are pairwise distinct.

    The first proto ``C`` having a twin is cut into ``N`` slices which are
    restacked, then a copy of the first proto ``D`` that is not its twin goes
    on top.  ``N`` is the smallest power of two with ``N * h(C) > h(D)`` whose
    resulting repartition differs from every other proto.
    """
    if not _twin_groups(w):
        return w
    if _distinct_reps(w) < 2:
        raise SurgeryPreconditionError("all protos are pairwise twins")
    protos = list(w.protos)
    pc = w.parent_count
    while True:
        cur = WorkingLevel(tuple(protos), pc)
        groups = _twin_groups(cur)
        if not groups:
            break
        ci = min(g[0] for g in groups)
        C = protos[ci]
        rc = C.repartition(pc)
        di = next(i for i, p in enumerate(protos) if p.repartition(pc) != rc)
        D = protos[di]
        others = {p.repartition(pc) for i, p in enumerate(protos) if i != ci}
        n = _smallest_cut(C.height, D.height)
        while True:
            cand = _concat(self_stack(C, n), D)
            if cand.repartition(pc) not in others:
                break
            n *= 2
        protos[ci] = replace(cand, role=C.role)
    return w._with(protos)


def equalize_heights(w: WorkingLevel) -> WorkingLevel:
    """Self-stack every proto up to the lcm of the heights."""
    hs = w.heights()
    q = lcm(*hs)
    if all(h == q for h in hs):
        return w
    protos = [replace(p, reps=p.reps * (q // p.height)) for p in w.protos]
    return w._with(protos)


def repetition_factors(w: WorkingLevel) -> list:
    q = lcm(*w.heights())
    return [q // h for h in w.heights()]


def check_finalizable(w: WorkingLevel) -> None:
    """Raise the diagram error ``finalize_level`` would hit, without mutating anything."""
    from .errors import ColumnCountError, HeightError, SimplicityError, TwinError

    k = len(w.protos)
    if k < 3:
        raise ColumnCountError(f"{k} protos, at least 3 required")
    hs = w.heights()
    if len(set(hs)) != 1:
        raise HeightError(f"unequal heights {hs}")
    groups = _twin_groups(w)
    if groups:
        g = groups[0]
        raise TwinError(f"protos {[i + 1 for i in g]} are twins", [i + 1 for i in g])
    full = set(range(1, w.parent_count + 1))
    bad = [i for i, p in enumerate(w.protos, start=1) if p.support() != full]
    if bad:
        raise SimplicityError(f"protos {bad} miss some parent", bad)


def finalize_level(d: Diagram, w: WorkingLevel) -> Diagram:
    """Sort every proto (copies of parent 1 first) and append it as a level."""
    if w.parent_count != d.top.k:
        raise KRError(f"working level has {w.parent_count} parents, top level has {d.top.k} columns")
    check_finalizable(w)
    counts = [p.counts(w.parent_count) for p in w.protos]
    return append_counts(d, counts, [p.role for p in w.protos])


def refine(w: WorkingLevel) -> WorkingLevel:
    """ensure_all_copies -> eliminate_twins -> equalize_heights."""
    return equalize_heights(eliminate_twins(ensure_all_copies(w)))


# -- clopen bookkeeping ---------------------------------------------------------

def _level_cellset(level: Level, U: CellSet) -> None:
    if len(U.rows) != level.k:
        raise KRError(f"cell set has {len(U.rows)} columns, level has {level.k}")
    U.validate(level.height)


def find_equal_subset(level: Level, U: CellSet, V: CellSet) -> CellSet:
    """``W`` inside ``V`` with the same per-column counts as ``U`` (lowest rows)."""
    _level_cellset(level, U)
    _level_cellset(level, V)
    bad = [i for i, (a, b) in enumerate(zip(U.counts, V.counts), start=1) if a > b]
    if bad:
        raise NotDominatedError(
            f"U has more cells than V in columns {bad}; deepen the diagram and retry")
    rows = [frozenset(sorted(v)[:u]) for u, v in zip(U.counts, V.rows)]
    return CellSet(level.index, tuple(rows))


def mark(w: WorkingLevel, level: Level, U: CellSet, tag: str) -> WorkingLevel:
    """Attach a marker for every copy of every ``U`` cell inside ``w``'s protos."""
    _level_cellset(level, U)
    protos = []
    for p in w.protos:
        extra = tuple(Marker(tag, s, t) for s, par in enumerate(p.unit)
                      for t in sorted(U.rows[par - 1]))
        protos.append(replace(p, markers=p.markers + extra))
    return w._with(protos)


def lift(w: WorkingLevel, level: Level, U: CellSet) -> list:
    """Rows (within each proto) occupied by copies of ``U``'s cells."""
    h = level.height
    out = []
    for p in w.protos:
        rows = set()
        for s, par in enumerate(p.comp):
            rows.update(s * h + t for t in U.rows[par - 1])
        out.append(frozenset(rows))
    return out


def split_clopen_equal(d: Diagram, n: int, U: CellSet, q: int):
    """Split ``U`` into ``q`` parts of equal measure for every compatible measure.

    Returns ``(working_level, parts)``; the parts' rows index the protos of the
    returned working level.  If every column count is divisible by ``q`` the
    working level is the identity refinement; otherwise every column is
    replaced by its ``q``-fold self-stack and part ``r`` takes the ``r``-th copy.
    """
    level = d.level(n)
    _level_cellset(level, U)
    if q < 1:
        raise KRError("q must be >= 1")
    if all(c % q == 0 for c in U.counts):
        w = WorkingLevel.identity(level)
        parts = []
        for r in range(q):
            rows = []
            for col in U.rows:
                srt = sorted(col)
                size = len(srt) // q
                rows.append(frozenset(srt[r * size:(r + 1) * size]))
            parts.append(CellSet(n, tuple(rows)))
        return w, parts
    w = WorkingLevel.from_comps([[i] * q for i in range(1, level.k + 1)], level.k)
    h = level.height
    parts = [CellSet(n, tuple(frozenset(r * h + t for t in col) for col in U.rows))
             for r in range(q)]
    return w, parts


def balance_pair(level: Level, U: CellSet, V: CellSet) -> WorkingLevel:
    """Refine ``level`` so every proto holds as many ``U`` cells as ``V`` cells.

    Per-column matched pairs cancel; columns left meeting neither residual
    stay as they are; every column with ``n_U`` residual ``U`` cells is paired
    with one with ``n_V`` residual ``V`` cells by stacking ``n_V`` copies of
    the first onto ``n_U`` copies of the second.
    """
    _level_cellset(level, U)
    _level_cellset(level, V)
    if sum(U.counts) != sum(V.counts):
        raise UnbalancedPairError(f"|U| = {sum(U.counts)} but |V| = {sum(V.counts)}")
    if level.k < 3:
        raise NeedsDeeperLevelError("balancing needs a level with at least 3 columns")
    excess = [u - v for u, v in zip(U.counts, V.counts)]
    pos = [i for i, e in enumerate(excess, start=1) if e > 0]
    neg = [i for i, e in enumerate(excess, start=1) if e < 0]
    comps = [[i] for i, e in enumerate(excess, start=1) if e == 0]
    if pos:
        pairs = [(pos[0], neg[0])]
        pairs += [(p, neg[0]) for p in pos[1:]]
        pairs += [(pos[0], j) for j in neg[1:]]
        for i, j in pairs:
            comps.append([i] * (-excess[j - 1]) + [j] * excess[i - 1])
    comps.sort(key=lambda c: (c[0], c))
    w = WorkingLevel.from_comps(comps, level.k)
    w = mark(w, level, U, "U")
    w = mark(w, level, V, "V")
    bad = [i for i, p in enumerate(w.protos, 1) if p.marker_count("U") != p.marker_count("V")]
    if bad:
        raise NeedsDeeperLevelError(f"protos {bad} left unbalanced")
    return w


def is_balanced(w: WorkingLevel) -> bool:
    return all(p.marker_count("U") == p.marker_count("V") for p in w.protos)


def shrink_caps(d: Diagram) -> WorkingLevel:
    """Working level whose bases and tops sit in copies of the first and last columns.

    Column 1 is cut into two slices; one slice is kept apart as ``[1, k]`` so
    that two non-twins exist, every column ``j`` is capped below by a slice of
    column 1 and above by a slice of column ``k``.  :func:`refine` then makes
    the result finalizable.
    """
    top = d.top
    k = top.k
    if k < 2:
        raise InfeasibleSurgeryError("shrinking caps needs at least two columns")
    comps = [[1, j, k] for j in range(1, k + 1)] + [[1, k]]
    w = refine(WorkingLevel.from_comps(comps, k))
    bad = [i for i, p in enumerate(w.protos, 1) if p.unit[0] != 1 or p.unit[-1] != k]
    if bad:
        raise InfeasibleSurgeryError(f"protos {bad} do not start in column 1 and end in column {k}")
    return w


__all__ = [
    "Marker", "ProtoColumn", "WorkingLevel", "cut_column", "stack", "self_stack",
    "ensure_all_copies", "eliminate_twins", "equalize_heights", "repetition_factors",
    "check_finalizable", "finalize_level", "refine", "find_equal_subset", "mark", "lift",
    "split_clopen_equal", "balance_pair", "is_balanced", "shrink_caps",
]
