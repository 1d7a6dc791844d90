"""Coding of the distinguished point: column words, windows, skeletons.

The emitted sequence is the coding of the point lying in every base (the
path through first constituents).  Its position 0 is the start of column 1's
word and position -1 is the end of the last column's word, so the level-n
window is ``word(k_n) + word(1)`` with origin ``h_n``.

Column words are only materialized up to ``MAX_WORD``; skeleton density and
the quasiperiodicity certificate work on the block structure instead and are
exact at any depth.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .diagram import CellRef, Diagram, cell_trace
from .errors import KRError, UndefinedAtRootError
from .exact import fmt_rat

MAX_WORD = 1 << 22


class _TopReached:
    def __repr__(self):
        return "TOP_REACHED"


TOP_REACHED = _TopReached()


@dataclass(frozen=True)
class Window:
    level: int
    letters: str
    origin: int

    def at(self, p: int) -> str:
        """Letter at position ``p`` of the bi-infinite sequence."""
        return self.letters[self.origin + p]

    def render(self) -> str:
        return f"origin={self.origin}\n{self.letters}\n"


@dataclass(frozen=True)
class SkeletonReport:
    level: int
    filled: dict  # residue -> letter
    density: Fraction

    def to_json(self) -> dict:
        return {"level": self.level,
                "filled": {str(r): c for r, c in sorted(self.filled.items())},
                "density": fmt_rat(self.density)}


def column_word(d: Diagram, n: int, i: int, max_len: int = MAX_WORD) -> str:
    lvl = d.level(n)
    col = lvl.column(i)
    if lvl.height > max_len:
        raise KRError(f"level {n} words have length {lvl.height} > {max_len}")
    key = ("word", n, i)
    w = d._cache.get(key)
    if w is None:
        if n == 0:
            w = "0" if i == 1 else "1"
        else:
            w = "".join(column_word(d, n - 1, p, max_len) * c
                        for p, c in enumerate(col.counts, start=1) if c)
        d._cache[key] = w
    return w


def window(d: Diagram, n: int, max_len: int = MAX_WORD) -> Window:
    if n == 0:
        raise UndefinedAtRootError("the root level has no first/last column ordering")
    lvl = d.level(n)
    letters = column_word(d, n, lvl.k, max_len) + column_word(d, n, 1, max_len)
    return Window(n, letters, lvl.height)


def skeleton(d: Diagram, n: int, max_len: int = MAX_WORD) -> SkeletonReport:
    """Residues mod ``h_n`` where all level-``n`` column words agree."""
    lvl = d.level(n)
    words = [column_word(d, n, i, max_len) for i in range(1, lvl.k + 1)]
    filled = {}
    for r in range(lvl.height):
        c = words[0][r]
        if all(w[r] == c for w in words[1:]):
            filled[r] = c
    return SkeletonReport(n, filled, Fraction(len(filled), lvl.height))


def filled_letter(d: Diagram, n: int, r: int) -> Optional[str]:
    """Common letter of all level-``n`` words at residue ``r``, or None."""
    lvl = d.level(n)
    if not 0 <= r < lvl.height:
        raise KRError(f"residue {r} out of range at level {n}")
    cols = set(range(1, lvl.k + 1))
    t, m = r, n
    while len(cols) > 1 and m > 0:
        s, t = divmod(t, d.levels[m - 1].height)
        cols = {d.levels[m].columns[c - 1].parent_at(s) for c in cols}
        m -= 1
    if len(cols) != 1:
        return None
    c = cols.pop()
    return "0" if cell_trace(d, CellRef(m, c, t)) == "A" else "1"


def _breaks(d: Diagram, n: int, cols) -> list:
    """Constituent boundaries where the tuple of parents of ``cols`` may change."""
    cuts = {0}
    for c in cols:
        acc = 0
        for v in d.levels[n].columns[c - 1].counts:
            acc += v
            cuts.add(acc)
    return sorted(cuts)


def agree_count(d: Diagram, n: int, cols=None) -> int:
    """Number of residues mod ``h_n`` where the words of ``cols`` all agree."""
    lvl = d.level(n)
    cols = frozenset(cols if cols is not None else range(1, lvl.k + 1))
    if len(cols) == 1:
        return lvl.height
    if n == 0:
        return 0
    key = ("agree", n, cols)
    hit = d._cache.get(key)
    if hit is not None:
        return hit
    total = 0
    cuts = _breaks(d, n, cols)
    for a, b in zip(cuts, cuts[1:]):
        if a == b:
            continue
        parents = frozenset(d.levels[n].columns[c - 1].parent_at(a) for c in cols)
        total += (b - a) * agree_count(d, n - 1, parents)
    d._cache[key] = total
    return total


def skeleton_density(d: Diagram, n: int) -> Fraction:
    return Fraction(agree_count(d, n), d.level(n).height)


def fill_level(d: Diagram, p: int, N: int) -> Optional[int]:
    """Least level ``n <= N`` whose skeleton contains ``p mod h_n``."""
    for n in range(1, N + 1):
        if filled_letter(d, n, p % d.levels[n].height) is not None:
            return n
    return None


def fill_report(d: Diagram, N: int, max_len: int = MAX_WORD) -> dict:
    """Fill level of every position of ``window(N)`` (None when unfilled)."""
    h = d.level(N).height
    if 2 * h > max_len:
        raise KRError(f"window({N}) has {2 * h} positions > {max_len}")
    skels = [None] + [set(skeleton(d, n, max_len).filled) for n in range(1, N + 1)]
    heights = [d.levels[n].height for n in range(N + 1)]
    out = {}
    for p in range(-h, h):
        out[p] = next((n for n in range(1, N + 1) if p % heights[n] in skels[n]), None)
    return out


def quasiperiodicity_certificate(d: Diagram, N: int) -> list:
    """Check, for every ``2 <= n <= N``, that all ``|p| < h_{n-1}`` are filled by level ``n``.

    Positions ``0 <= p < h_{n-1}`` fall in constituent 0 of every level-``n``
    column and ``-h_{n-1} <= p < 0`` in the last one (residue ``h_n + p``); the
    claim holds for every such position at once exactly when all columns share
    their first constituent and all share their last one.  Returns one record
    per level with the two constituent sets and the verdict.
    """
    out = []
    for n in range(2, N + 1):
        cols = d.levels[n].columns
        firsts = sorted({c.first for c in cols})
        lasts = sorted({c.last for c in cols})
        out.append({"level": n, "first_parents": firsts, "last_parents": lasts,
                    "positions": 2 * d.levels[n - 1].height - 1,
                    "ok": len(firsts) == 1 and len(lasts) == 1})
    return out


def window_nesting_certificate(d: Diagram, N: int) -> list:
    """Symbolic check that ``window(n)`` is the centered subword of ``window(n+1)``.

    ``word(k_{n+1})`` ends with the word of its last constituent and
    ``word(1)`` at level ``n+1`` starts with the word of its first one, so the
    nesting holds exactly when those constituents are ``k_n`` and ``1``.
    """
    out = []
    for n in range(1, N):
        last = d.levels[n + 1].columns[-1].last
        first = d.levels[n + 1].columns[0].first
        out.append({"level": n, "last_parent": last, "first_parent": first,
                    "ok": last == d.levels[n].k and first == 1})
    return out


def origin_letter(d: Diagram, n: int) -> str:
    """Letter at position 0 of ``window(n)`` by descending first constituents."""
    c = 1
    for m in range(n, 0, -1):
        c = d.levels[m].columns[c - 1].first
    return "0" if c == 1 else "1"


def vershik_successor(d: Diagram, c: CellRef):
    """Next cell up the same column, or ``TOP_REACHED`` from the top row."""
    lvl = d.level(c.level)
    lvl.column(c.column)
    if not 0 <= c.row < lvl.height:
        raise KRError(f"row {c.row} out of range at level {c.level}")
    if c.row + 1 < lvl.height:
        return CellRef(c.level, c.column, c.row + 1)
    return TOP_REACHED


def orbit_letters(d: Diagram, n: int, i: int) -> str:
    """Letters read along the column by following ``vershik_successor`` from row 0."""
    out = []
    c = CellRef(n, i, 0)
    while c is not TOP_REACHED:
        out.append("0" if cell_trace(d, c) == "A" else "1")
        c = vershik_successor(d, c)
    return "".join(out)


def smallest_period(s: str) -> int:
    """Smallest ``p`` with ``s[i] == s[i + p]`` for all valid ``i`` (prefix function)."""
    n = len(s)
    pi = [0] * n
    for i in range(1, n):
        j = pi[i - 1]
        while j and s[i] != s[j]:
            j = pi[j - 1]
        if s[i] == s[j]:
            j += 1
        pi[i] = j
    return n - pi[-1] if n else 0
