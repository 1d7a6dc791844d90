"""Command line: build, verify, emit-word, analyze.

Exit codes: 0 success, 1 verification failure, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from . import coder
from .builder import TargetSpec, build
from .diagram import CellRef, cell_trace
from .errors import DiagramError, KRError
from .io import RunConfig, diagram_to_dot, diagram_to_json, dumps, load_diagram
from .simplex import certify_with_escalation, hull_nested, interval_A

log = logging.getLogger("krtoeplitz")

WORD_CAP = 1 << 20  # letters in word.txt
ORBIT_CAP = 4096  # heights checked cell by cell in verify


class VerificationFailure(Exception):
    pass


def word_level(d, cap: int = WORD_CAP) -> int:
    """Deepest level whose window fits in ``cap`` letters (0 if none)."""
    best = 0
    for n in range(1, d.depth + 1):
        if 2 * d.height(n) <= cap:
            best = n
    return best


def write_artifacts(cfg: RunConfig, out: str) -> list:
    d = build(cfg.targets, cfg.params)
    os.makedirs(out, exist_ok=True)
    written = []

    def put(name, text):
        path = os.path.join(out, name)
        with open(path, "w") as fh:
            fh.write(text)
        written.append(path)

    if "diagram-json" in cfg.emit:
        put("diagram.json", diagram_to_json(d))
    if "diagram-dot" in cfg.emit:
        put("diagram.dot", diagram_to_dot(d))
    n = word_level(d)
    if "word" in cfg.emit:
        put("word.txt", coder.window(d, n).render() if n else "origin=0\n\n")
    if "skeleton" in cfg.emit:
        rep = coder.skeleton(d, n).to_json() if n else {"level": 0, "filled": {}, "density": "0"}
        put("skeleton.json", dumps(rep))
    if "cert" in cfg.emit:
        if d.depth >= 2:
            rep = certify_with_escalation(d, cfg.targets, d.depth, cfg.params.anchor_level)
            put("cert.json", dumps(rep.to_json()))
        else:
            put("cert.json", dumps({"level": d.depth, "skipped": "certification needs depth >= 2"}))
    return written


def _check(name, ok, detail=""):
    if not ok:
        raise VerificationFailure(f"{name}: {detail}" if detail else name)
    print(f"ok   {name}")


def verify_diagram(d) -> None:
    """Re-run every structural check on a parsed diagram; raises VerificationFailure."""
    print(f"ok   level invariants (conditions 1, 2, 5, 6) on {d.depth} levels")
    for n in range(1, d.depth + 1):
        h = d.height(n)
        if h > ORBIT_CAP:
            break
        for i in range(1, d.level(n).k + 1):
            word = coder.column_word(d, n, i)
            traced = "".join("0" if cell_trace(d, CellRef(n, i, t)) == "A" else "1"
                             for t in range(h))
            _check(f"word/orbit level {n} column {i}", word == traced == coder.orbit_letters(d, n, i))
    wl = word_level(d)
    for n in range(1, wl):
        a, b = coder.window(d, n), coder.window(d, n + 1)
        lo = b.origin - a.origin
        _check(f"window nesting {n} -> {n + 1}", b.letters[lo:lo + len(a.letters)] == a.letters)
    for n in range(1, wl + 1):
        _check(f"origin letter level {n}", coder.window(d, n).at(0) == "0")
    for n in range(1, wl):
        s, s2 = coder.skeleton(d, n), coder.skeleton(d, n + 1)
        h = d.height(n)
        bad = [r for r, c in s.filled.items()
               for q in range(0, d.height(n + 1), h) if s2.filled.get(r + q) != c]
        _check(f"skeleton lifting {n} -> {n + 1}", not bad, f"residues {bad[:5]}")
    for rec in coder.quasiperiodicity_certificate(d, d.depth):
        _check(f"quasiperiodicity level {rec['level']}", rec["ok"],
               f"first parents {rec['first_parents']}, last parents {rec['last_parents']}")
    for n in range(1, d.depth):
        lo, hi = interval_A(d, n + 1)
        lo0, hi0 = interval_A(d, n)
        _check(f"interval nesting {n} -> {n + 1}", lo0 <= lo <= hi <= hi0)
        if n >= 2 and d.level(1).k <= 5:
            _check(f"hull nesting {n} -> {n + 1} (anchor 1)", hull_nested(d, n, 1))


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="krtoeplitz", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)
    b = sub.add_parser("build", help="build a diagram from a config and write artifacts")
    b.add_argument("config", nargs="?")
    b.add_argument("--config", dest="config_opt")
    b.add_argument("--out", default=".")
    v = sub.add_parser("verify", help="re-validate a diagram.json")
    v.add_argument("diagram")
    e = sub.add_parser("emit-word", help="print the window of a level")
    e.add_argument("diagram")
    e.add_argument("--level", type=int, required=True)
    a = sub.add_parser("analyze", help="certify a diagram against targets")
    a.add_argument("diagram")
    a.add_argument("--targets", required=True, help="comma separated rationals, e.g. 1/4,3/4")
    a.add_argument("--level", type=int)
    a.add_argument("--anchor", type=int, default=1)
    return ap


def run(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.cmd == "build":
            path = args.config_opt or args.config
            if not path:
                print("build: a config path is required", file=sys.stderr)
                return 2
            for p in write_artifacts(RunConfig.load(path), args.out):
                print(p)
            return 0
        if args.cmd == "verify":
            try:
                d = load_diagram(args.diagram)
                verify_diagram(d)
            except DiagramError as exc:
                print(f"FAIL {exc}")
                return 1
            except VerificationFailure as exc:
                print(f"FAIL {exc}")
                return 1
            print("verified")
            return 0
        d = load_diagram(args.diagram)
        if args.cmd == "emit-word":
            sys.stdout.write(coder.window(d, args.level).render())
            return 0
        if args.cmd == "analyze":
            t = TargetSpec(tuple(s for s in args.targets.split(",") if s.strip()))
            n = args.level if args.level is not None else d.depth
            rep = certify_with_escalation(d, t, n, args.anchor)
            sys.stdout.write(dumps(rep.to_json()))
            return 0
    except (KRError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 2


def main() -> None:
    sys.exit(run())
