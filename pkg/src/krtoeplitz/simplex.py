"""Finite-level invariant-measure polytopes and certification against targets.

A level-compatible invariant measure puts equal mass on the rows of a column,
so its values on level-``anchor`` columns are convex combinations of the
columns' anchor signatures.  The hull of those signatures is the level
polytope; it shrinks with ``n`` toward the realized simplex.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .builder import TargetSpec, tracking_error_bound
from .diagram import Diagram, letter_frequencies, signature_matrix, tracking_columns
from .errors import KRError
from .exact import MAX_HULL_DIM, affine_dim, diameter, fmt_rat, hull_vertices, maxnorm_distance


@dataclass(frozen=True)
class SignatureHull:
    level: int
    anchor_level: int
    points: tuple
    vertices: tuple
    projected: bool = False  # True when only the first MAX_HULL_DIM coordinates are kept

    def vertex_columns(self) -> list:
        """1-based columns whose signature is a hull vertex (first column per point)."""
        out = []
        for v in self.vertices:
            out.append(next(i for i, p in enumerate(self.points, 1) if p == v))
        return out


@dataclass(frozen=True)
class CertReport:
    level: int
    anchor_level: int
    vertex_count: int
    tracking_errors: tuple
    hull_slack: Fraction
    affine_ok: bool
    vertices_are_tracking: bool = False
    projected: bool = False
    error_bound: Fraction = Fraction(0)
    hull_diameter: Fraction = Fraction(0)
    passed: bool = False
    notes: tuple = field(default=())

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "anchor_level": self.anchor_level,
            "vertex_count": self.vertex_count,
            "tracking_errors": [fmt_rat(e) for e in self.tracking_errors],
            "hull_slack": fmt_rat(self.hull_slack),
            "affine_ok": self.affine_ok,
            "vertices_are_tracking": self.vertices_are_tracking,
            "projected": self.projected,
            "error_bound": fmt_rat(self.error_bound),
            "hull_diameter": fmt_rat(self.hull_diameter),
            "passed": self.passed,
            "notes": list(self.notes),
        }


def _project(points) -> tuple:
    dim = len(points[0])
    if dim <= MAX_HULL_DIM:
        return [tuple(p) for p in points], False
    return [tuple(p[:MAX_HULL_DIM]) for p in points], True


def signature_points(d: Diagram, n: int, anchor: int) -> SignatureHull:
    rows = signature_matrix(d, n, anchor)
    pts, projected = _project(rows)
    return SignatureHull(n, anchor, tuple(pts), tuple(hull_vertices(pts)), projected)


def interval_A(d: Diagram, n: int) -> tuple:
    """Range of the measure of atom A over level-compatible invariant measures."""
    if n == 0:
        return Fraction(0), Fraction(1)
    f = letter_frequencies(d, n)
    return min(f), max(f)


def certify_simplex(d: Diagram, t: TargetSpec, n: int, anchor: int = 1,
                    slack_tol: Fraction = Fraction(0)) -> CertReport:
    """Compare the level-``n`` polytope with the targets.

    With two or more targets certification needs the hull vertices to be
    exactly the tracking signatures, those to be affinely independent and the
    other columns within ``slack_tol`` of their hull.  A single target cannot
    be a vertex set at a finite level, so then only the tracking error bound
    and a strictly shrinking hull diameter are required.
    """
    if n < 2:
        raise KRError("certification needs n >= 2")
    lvl = d.level(n)
    track = tracking_columns(lvl)
    if sorted(track) != list(range(1, t.m + 1)):
        raise KRError(f"level {n} lacks tracking role metadata for {t.m} targets")
    f = letter_frequencies(d, n)
    errors = tuple(abs(f[track[j] - 1] - t.p[j - 1]) for j in range(1, t.m + 1))
    hull = signature_points(d, n, anchor)
    tpts = [hull.points[track[j] - 1] for j in range(1, t.m + 1)]
    others = [p for i, p in enumerate(hull.points, 1) if i not in track.values()]
    slack = max((maxnorm_distance(p, tpts) for p in others), default=Fraction(0))
    aff = affine_dim(tpts) == t.m - 1
    vt = set(hull.vertices) == set(tpts) and len(set(tpts)) == t.m
    bound = tracking_error_bound(d, n)
    diam = diameter(list(hull.points))
    notes = []
    if hull.projected:
        notes.append(f"signatures projected onto the first {MAX_HULL_DIM} coordinates")
    if t.m == 1:
        prev = diameter(list(signature_points(d, n - 1, anchor).points)) if n - 1 > anchor else None
        shrinking = prev is None or diam < prev
        passed = max(errors) <= bound and shrinking
    else:
        passed = vt and aff and slack <= slack_tol
    return CertReport(n, anchor, len(hull.vertices), errors, slack, aff, vt,
                      hull.projected, bound, diam, passed, tuple(notes))


def certify_with_escalation(d: Diagram, t: TargetSpec, n: int, anchor: int = 1) -> CertReport:
    """Certify, raising the anchor level while the tracking signatures are not separable."""
    rep = certify_simplex(d, t, n, anchor)
    while not rep.affine_ok and t.m > 1 and rep.anchor_level + 1 < n:
        rep = certify_simplex(d, t, n, rep.anchor_level + 1)
        rep = CertReport(**{**rep.__dict__,
                            "notes": rep.notes + (f"anchor escalated to {rep.anchor_level}",)})
    return rep


def hull_nested(d: Diagram, n: int, anchor: int) -> bool:
    """Every level-``n+1`` signature lies in the level-``n`` hull (exact)."""
    from .exact import in_hull

    if n + 1 > d.depth:
        raise KRError("no next level")
    outer = signature_matrix(d, n, anchor)
    inner = signature_matrix(d, n + 1, anchor)
    return all(in_hull(p, outer) for p in inner)
