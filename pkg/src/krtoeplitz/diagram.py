"""Finalized refining sequences of KR-partitions as left-ordered Bratteli diagrams.

Level 0 is the root partition ``{A, B}``.  A column at level ``n >= 1`` is a
sorted composition over the columns of level ``n - 1``; since it is sorted it
is stored as a multiplicity vector and expanded on demand.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .errors import (
    ColumnCountError,
    HeightError,
    KRError,
    OrderError,
    SimplicityError,
    TwinError,
    UndefinedAtRootError,
)

ROOT_ROLES = ("root_A", "root_B")


@dataclass(frozen=True)
class Column:
    counts: tuple  # multiplicity of each parent column; empty for root columns
    role: str = "filler"

    @property
    def length(self) -> int:
        return sum(self.counts)

    @property
    def comp(self) -> tuple:
        """The sorted composition (1-based parent indices)."""
        return tuple(p for p, c in enumerate(self.counts, start=1) for _ in range(c))

    def parent_at(self, slot: int) -> int:
        """Parent index of constituent ``slot`` without expanding the comp."""
        if not 0 <= slot < self.length:
            raise KRError(f"constituent {slot} out of range")
        for p, c in enumerate(self.counts, start=1):
            if slot < c:
                return p
            slot -= c
        raise AssertionError("unreachable")

    @property
    def first(self) -> int:
        return next(p for p, c in enumerate(self.counts, start=1) if c)

    @property
    def last(self) -> int:
        return max(p for p, c in enumerate(self.counts, start=1) if c)


@dataclass(frozen=True)
class Level:
    index: int
    height: int
    columns: tuple
    parent_count: int = 0

    @property
    def k(self) -> int:
        return len(self.columns)

    def column(self, i: int) -> Column:
        if not 1 <= i <= len(self.columns):
            raise KRError(f"column {i} out of range 1..{len(self.columns)} at level {self.index}")
        return self.columns[i - 1]

    def roles(self) -> list:
        return [c.role for c in self.columns]


@dataclass(frozen=True)
class Diagram:
    levels: tuple
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    @property
    def top(self) -> Level:
        return self.levels[-1]

    def level(self, n: int) -> Level:
        if not 0 <= n < len(self.levels):
            raise KRError(f"level {n} out of range 0..{self.depth}")
        return self.levels[n]

    def height(self, n: int) -> int:
        return self.level(n).height

    def __len__(self):
        return len(self.levels)


@dataclass(frozen=True)
class CellRef:
    level: int
    column: int
    row: int


@dataclass(frozen=True)
class CellSet:
    """A clopen set at ``level``: per column, the set of selected rows."""

    level: int
    rows: tuple  # tuple[frozenset[int], ...], one entry per column

    @classmethod
    def from_rows(cls, level: int, rows) -> "CellSet":
        return cls(level, tuple(frozenset(r) for r in rows))

    @classmethod
    def empty(cls, level: int, k: int) -> "CellSet":
        return cls(level, tuple(frozenset() for _ in range(k)))

    @property
    def counts(self) -> tuple:
        return tuple(len(r) for r in self.rows)

    def validate(self, height: int) -> None:
        for i, r in enumerate(self.rows, start=1):
            bad = [t for t in r if not 0 <= t < height]
            if bad:
                raise KRError(f"rows {sorted(bad)} out of range in column {i}")


def new_root() -> Diagram:
    root = Level(0, 1, (Column((), "root_A"), Column((), "root_B")), 0)
    return Diagram((root,))


def _check_comps(comps: Sequence[Sequence[int]], parent_count: int, n: int) -> list:
    """Validate compositions for a new level ``n``; returns count vectors."""
    k = len(comps)
    if k < 3:
        raise ColumnCountError(f"level {n} has {k} columns, at least 3 required")
    for i, comp in enumerate(comps, start=1):
        if not comp:
            raise SimplicityError(f"column {i} has an empty composition", [i])
        bad = [p for p in comp if not (isinstance(p, int) and 1 <= p <= parent_count)]
        if bad:
            raise SimplicityError(f"column {i} references invalid parents {bad}", [i])
        if any(a > b for a, b in zip(comp, comp[1:])):
            raise OrderError(f"column {i} composition is not sorted ascending", [i])
    lengths = {len(c) for c in comps}
    if len(lengths) != 1:
        by_len = Counter(len(c) for c in comps)
        common = by_len.most_common(1)[0][0]
        odd = [i for i, c in enumerate(comps, start=1) if len(c) != common]
        raise HeightError(
            f"unequal composition lengths {[len(c) for c in comps]} (columns {odd})", odd)
    counts = []
    for comp in comps:
        cnt = Counter(comp)
        counts.append(tuple(cnt.get(p, 0) for p in range(1, parent_count + 1)))
    return _check_counts(counts, n)


def _check_counts(counts: list, n: int) -> list:
    seen = {}
    for i, c in enumerate(counts, start=1):
        if c in seen:
            raise TwinError(f"columns {seen[c]} and {i} are twins (equal repartition)", [seen[c], i])
        seen[c] = i
    missing = {}
    for i, c in enumerate(counts, start=1):
        gone = [p for p, v in enumerate(c, start=1) if v == 0]
        if gone:
            missing[i] = gone
    if missing:
        desc = "; ".join(f"column {i} misses parents {g}" for i, g in missing.items())
        raise SimplicityError(desc, list(missing))
    return counts


def append_level(d: Diagram, comps, roles: Optional[Sequence[str]] = None) -> Diagram:
    """Validate ``comps`` against the top level of ``d`` and append it."""
    parent = d.top
    n = parent.index + 1
    comps = [tuple(c) for c in comps]
    counts = _check_comps(comps, parent.k, n)
    return _append_counts(d, counts, roles)


def append_counts(d: Diagram, counts, roles: Optional[Sequence[str]] = None) -> Diagram:
    """Like :func:`append_level` but takes multiplicity vectors (always sorted)."""
    n = d.top.index + 1
    counts = [tuple(int(v) for v in c) for c in counts]
    if len(counts) < 3:
        raise ColumnCountError(f"level {n} has {len(counts)} columns, at least 3 required")
    for i, c in enumerate(counts, start=1):
        if len(c) != d.top.k or any(v < 0 for v in c):
            raise SimplicityError(f"column {i} has a malformed multiplicity vector", [i])
    lengths = [sum(c) for c in counts]
    if len(set(lengths)) != 1:
        raise HeightError(f"unequal composition lengths {lengths}",
                          [i for i, v in enumerate(lengths, 1) if v != lengths[0]])
    _check_counts(counts, n)
    return _append_counts(d, counts, roles)


def _append_counts(d: Diagram, counts, roles) -> Diagram:
    parent = d.top
    if roles is None:
        roles = ["filler"] * len(counts)
    if len(roles) != len(counts):
        raise KRError("one role per column required")
    L = sum(counts[0])
    cols = tuple(Column(tuple(c), r) for c, r in zip(counts, roles))
    level = Level(parent.index + 1, parent.height * L, cols, parent.k)
    return Diagram(d.levels + (level,))


def repartition(level: Level, i: int) -> tuple:
    if level.index == 0:
        raise UndefinedAtRootError("repartition is undefined at the root level")
    col = level.column(i)
    L = col.length
    return tuple(Fraction(c, L) for c in col.counts)


def incidence_matrix(d: Diagram, n: int) -> list:
    if n == 0:
        raise UndefinedAtRootError("no incidence matrix at the root level")
    return [list(c.counts) for c in d.level(n).columns]


def _descend(d: Diagram, c: CellRef, stop: int) -> CellRef:
    lvl = d.level(c.level)
    lvl.column(c.column)  # index check
    if not 0 <= c.row < lvl.height:
        raise KRError(f"row {c.row} out of range at level {c.level}")
    n, i, t = c.level, c.column, c.row
    while n > stop:
        h_prev = d.levels[n - 1].height
        s, t = divmod(t, h_prev)
        i = d.levels[n].columns[i - 1].parent_at(s)
        n -= 1
    return CellRef(n, i, t)


def ancestor(d: Diagram, c: CellRef, n: int) -> CellRef:
    """The level-``n`` cell containing ``c``."""
    if not 0 <= n <= c.level:
        raise KRError(f"ancestor level {n} not in 0..{c.level}")
    return _descend(d, c, n)


def cell_trace(d: Diagram, c: CellRef) -> str:
    """``'A'`` or ``'B'``: which root atom the cell is a copy of."""
    root = _descend(d, c, 0)
    return "A" if root.column == 1 else "B"


def signature_matrix(d: Diagram, n: int, anchor: int) -> list:
    """Rows: anchor signatures of every level-``n`` column over level ``anchor``."""
    if not 0 <= anchor < n:
        raise KRError(f"anchor level {anchor} must satisfy 0 <= anchor < {n}")
    key = ("sig", n, anchor)
    hit = d._cache.get(key)
    if hit is not None:
        return hit
    if n == anchor + 1:
        rows = [repartition(d.level(n), i) for i in range(1, d.level(n).k + 1)]
    else:
        prev = signature_matrix(d, n - 1, anchor)
        rows = []
        for col in d.level(n).columns:
            L = col.length
            acc = [Fraction(0)] * len(prev[0])
            for p, cnt in enumerate(col.counts):
                if cnt:
                    for q, v in enumerate(prev[p]):
                        acc[q] += cnt * v
            rows.append(tuple(x / L for x in acc))
    d._cache[key] = rows
    return rows


def anchor_signature(d: Diagram, n: int, i: int, anchor: int) -> tuple:
    """Fraction of rows of column ``i`` at level ``n`` lying in each level-``anchor`` column."""
    d.level(n).column(i)
    return signature_matrix(d, n, anchor)[i - 1]


def letter_frequencies(d: Diagram, n: int) -> list:
    """Frequency of the letter 0 (atom A) in each column word of level ``n``."""
    if n == 0:
        return [Fraction(1), Fraction(0)]
    return [row[0] for row in signature_matrix(d, n, 0)]


def roles_index(level: Level) -> dict:
    return {c.role: i for i, c in enumerate(level.columns, start=1)}


def tracking_columns(level: Level) -> dict:
    """Map target index j -> column index for columns with role ``tracking:j``."""
    out = {}
    for i, c in enumerate(level.columns, start=1):
        if c.role.startswith("tracking:"):
            out[int(c.role.split(":", 1)[1])] = i
    return out
