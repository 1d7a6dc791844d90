"""JSON and DOT serialization of diagrams, and run configs."""

from __future__ import annotations

import json
from dataclasses import dataclass

from .builder import BuildParams, TargetSpec
from .diagram import ROOT_ROLES, Diagram, append_level, new_root
from .errors import ConfigError, HeightError, KRError, RootShapeError
from .exact import fmt_rat

EMIT_KINDS = ("diagram-json", "diagram-dot", "word", "skeleton", "cert")


def diagram_to_dict(d: Diagram) -> dict:
    levels = []
    for lvl in d.levels:
        levels.append({"height": lvl.height,
                       "columns": [{"comp": list(c.comp), "role": c.role} for c in lvl.columns]})
    return {"levels": levels}


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def diagram_to_json(d: Diagram) -> str:
    return dumps(diagram_to_dict(d))


def diagram_from_dict(data: dict) -> Diagram:
    """Rebuild and fully re-validate a diagram; raises the first violated condition."""
    try:
        levels = data["levels"]
        root = levels[0]
    except (KeyError, IndexError, TypeError) as exc:
        raise KRError("diagram JSON needs a non-empty 'levels' list") from exc
    cols = root.get("columns", [])
    if (root.get("height") != 1 or len(cols) != 2
            or tuple(c.get("role") for c in cols) != ROOT_ROLES):
        raise RootShapeError("level 0 must be the two atoms A, B of height 1")
    d = new_root()
    for n, lvl in enumerate(levels[1:], start=1):
        try:
            comps = [c["comp"] for c in lvl["columns"]]
            roles = [c.get("role", "filler") for c in lvl["columns"]]
        except (KeyError, TypeError) as exc:
            raise KRError(f"level {n} is malformed") from exc
        d = append_level(d, comps, roles)
        if lvl.get("height") != d.top.height:
            raise HeightError(f"level {n} declares height {lvl.get('height')}, "
                              f"compositions give {d.top.height}")
    return d


def diagram_from_json(text: str) -> Diagram:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise KRError(f"invalid JSON: {exc}") from exc
    return diagram_from_dict(data)


def load_diagram(path) -> Diagram:
    with open(path) as fh:
        return diagram_from_json(fh.read())


def diagram_to_dot(d: Diagram) -> str:
    """One node per (level, column); one edge per composition entry labelled by position."""
    lines = ["digraph bratteli {", "  rankdir=TB;"]
    for lvl in d.levels:
        for i, c in enumerate(lvl.columns, start=1):
            lines.append(f'  "L{lvl.index}C{i}" [label="{lvl.index}:{i} {c.role}"];')
    for lvl in d.levels[1:]:
        for i, c in enumerate(lvl.columns, start=1):
            for pos, p in enumerate(c.comp, start=1):
                lines.append(f'  "L{lvl.index - 1}C{p}" -> "L{lvl.index}C{i}" [label="{pos}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class RunConfig:
    targets: TargetSpec
    params: BuildParams
    emit: frozenset = frozenset(EMIT_KINDS)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(data) - {"targets", "depth", "L_floor", "anchor_level", "emit"}
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        if "targets" not in data or "depth" not in data:
            raise ConfigError("config needs 'targets' and 'depth'")
        try:
            params = BuildParams(int(data["depth"]), int(data.get("L_floor", 8)),
                                 int(data.get("anchor_level", 1)))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad numeric config value: {exc}") from exc
        emit = frozenset(data.get("emit", EMIT_KINDS))
        bad = emit - set(EMIT_KINDS)
        if bad:
            raise ConfigError(f"unknown emit kinds {sorted(bad)}")
        return cls(TargetSpec(tuple(data["targets"])), params, emit)

    @classmethod
    def load(cls, path) -> "RunConfig":
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return {"targets": [fmt_rat(p) for p in self.targets.p], "depth": self.params.depth,
                "L_floor": self.params.L_floor, "anchor_level": self.params.anchor_level,
                "emit": sorted(self.emit)}
