"""Exact rational vectors, a small rational simplex solver and low-dimension hulls.

Rationals are :class:`fractions.Fraction`; a rational vector is a plain tuple of
them.  Nothing in here touches floating point.
"""

from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .errors import DimensionMismatchError, KRError, UnsupportedDimensionError

RatVec = tuple  # tuple[Fraction, ...]

MAX_HULL_DIM = 4


def rat(x) -> Fraction:
    """Parse ``"p/q"``, ``"p"``, an int or a Fraction into a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip()
        try:
            return Fraction(s)
        except (ValueError, ZeroDivisionError) as exc:
            raise KRError(f"not a rational: {x!r}") from exc
    raise KRError(f"not a rational: {x!r}")


def fmt_rat(x: Fraction) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def ratvec(values: Iterable) -> RatVec:
    v = tuple(rat(x) for x in values)
    if not v:
        raise KRError("a rational vector needs at least one entry")
    return v


def _common_dim(points: Sequence[RatVec]) -> int:
    if not points:
        raise KRError("empty point list")
    dims = {len(p) for p in points}
    if len(dims) != 1:
        raise DimensionMismatchError(f"mixed dimensions {sorted(dims)}")
    return dims.pop()


def rank(rows: Sequence[Sequence[Fraction]]) -> int:
    """Rank of a rational matrix by exact Gaussian elimination."""
    m = [list(map(Fraction, r)) for r in rows]
    if not m:
        return 0
    ncols = len(m[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(r + 1, len(m)):
            if m[i][c]:
                f = m[i][c] / m[r][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        r += 1
        if r == len(m):
            break
    return r


def affine_dim(points: Sequence[RatVec]) -> int:
    """Dimension of the affine hull (0 for a single point)."""
    _common_dim(points)
    base = points[0]
    diffs = [[a - b for a, b in zip(p, base)] for p in points[1:]]
    return rank(diffs)


# -- exact linear programming -------------------------------------------------

class _Unbounded(Exception):
    pass


def lp_minimize(c, A, b):
    """Minimise ``c.x`` subject to ``A x = b``, ``x >= 0``, exactly.

    Two-phase tableau simplex with Bland's rule (so it terminates).  Returns
    ``(value, x)`` or ``None`` when infeasible.  Raises ``KRError`` if the
    problem is unbounded.
    """
    m = len(A)
    n = len(c)
    rows = []
    for i in range(m):
        row = [Fraction(v) for v in A[i]]
        rhs = Fraction(b[i])
        if rhs < 0:
            row = [-v for v in row]
            rhs = -rhs
        rows.append(row + [Fraction(int(j == i)) for j in range(m)] + [rhs])
    basis = [n + i for i in range(m)]
    total = n + m

    def run(cost, allowed):
        while True:
            cb = [cost[j] for j in basis]
            enter = None
            for j in range(total):
                if not allowed(j) or j in basis:
                    continue
                red = cost[j] - sum(cb[i] * rows[i][j] for i in range(len(rows)))
                if red < 0:
                    enter = j
                    break
            if enter is None:
                return
            leave = None
            best = None
            for i in range(len(rows)):
                a = rows[i][enter]
                if a > 0:
                    ratio = rows[i][-1] / a
                    if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                        best, leave = ratio, i
            if leave is None:
                raise _Unbounded
            _pivot(leave, enter)

    def _pivot(r, col):
        piv = rows[r][col]
        rows[r] = [v / piv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col]:
                f = rows[i][col]
                rows[i] = [a - f * b2 for a, b2 in zip(rows[i], rows[r])]
        basis[r] = col

    phase1 = [Fraction(0)] * n + [Fraction(1)] * m
    run(phase1, lambda j: True)
    if sum(rows[i][-1] for i in range(len(rows)) if basis[i] >= n) != 0:
        return None
    # drive remaining (zero-level) artificials out of the basis
    i = 0
    while i < len(rows):
        if basis[i] >= n:
            col = next((j for j in range(n) if rows[i][j] != 0 and j not in basis), None)
            if col is None:
                del rows[i]
                del basis[i]
                continue
            _pivot(i, col)
        i += 1
    cost = [Fraction(v) for v in c] + [Fraction(0)] * m
    try:
        run(cost, lambda j: j < n)
    except _Unbounded:
        raise KRError("linear program is unbounded") from None
    x = [Fraction(0)] * n
    for i, j in enumerate(basis):
        x[j] = rows[i][-1]
    return sum(cv * xv for cv, xv in zip(c, x)), x


def convex_coefficients(p: RatVec, points: Sequence[RatVec]) -> Optional[list]:
    """Weights ``w >= 0`` summing to 1 with ``sum w_i points_i == p``, or None."""
    if not points:
        return None
    d = _common_dim(list(points) + [p])
    A = [[q[k] for q in points] for k in range(d)] + [[1] * len(points)]
    b = list(p) + [1]
    res = lp_minimize([0] * len(points), A, b)
    return None if res is None else res[1]


def maxnorm_distance(p: RatVec, points: Sequence[RatVec]) -> Fraction:
    """Max-norm distance from ``p`` to the convex hull of ``points``."""
    d = _common_dim(list(points) + [p])
    n = len(points)
    # variables: lambda_1..n, t, s_1..d, s'_1..d
    nv = n + 1 + 2 * d
    A, b = [], []
    for k in range(d):
        row = [Fraction(0)] * nv
        for i, q in enumerate(points):
            row[i] = q[k]
        row[n] = Fraction(1)
        row[n + 1 + k] = Fraction(-1)
        A.append(row)
        b.append(p[k])
        row = [Fraction(0)] * nv
        for i, q in enumerate(points):
            row[i] = -q[k]
        row[n] = Fraction(1)
        row[n + 1 + d + k] = Fraction(-1)
        A.append(row)
        b.append(-p[k])
    A.append([Fraction(1)] * n + [Fraction(0)] * (1 + 2 * d))
    b.append(1)
    c = [0] * n + [1] + [0] * (2 * d)
    value, _ = lp_minimize(c, A, b)
    return value


def hull_vertices(points: Sequence[RatVec]) -> list:
    """Vertices of the convex hull, deduplicated and in lexicographic order."""
    d = _common_dim(points)
    if d > MAX_HULL_DIM:
        raise UnsupportedDimensionError(f"hull dimension {d} > {MAX_HULL_DIM}")
    uniq = sorted(set(tuple(Fraction(x) for x in p) for p in points))
    if len(uniq) <= 1:
        return uniq
    out = []
    for i, p in enumerate(uniq):
        others = uniq[:i] + uniq[i + 1:]
        if convex_coefficients(p, others) is None:
            out.append(p)
    return out


def in_hull(p: RatVec, points: Sequence[RatVec]) -> bool:
    return convex_coefficients(p, points) is not None


def maxnorm(v: RatVec) -> Fraction:
    return max(abs(x) for x in v)


def diameter(points: Sequence[RatVec]) -> Fraction:
    """Max-norm diameter of a finite point set."""
    best = Fraction(0)
    for i, p in enumerate(points):
        for q in points[i + 1:]:
            best = max(best, maxnorm(tuple(a - b for a, b in zip(p, q))))
    return best
