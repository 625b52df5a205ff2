"""Parser for the textual game-description format.

A description has four indentation-structured sections:

    SpriteSet
        avatar > MovingAvatar color=GREEN
        spider > RandomNPC cooldown=2 color=RED
    InteractionSet
        avatar wall > stepBack
        door avatar > destroy if=key>=1
    TerminationSet
        SpriteCounter stype=goal limit=0 win=True
    LevelMapping
        A > avatar

Level maps are separate plain-text grids, one character per block, '.' or
space for empty.  Parsing never raises on malformed input; it returns
diagnostics, and any Error diagnostic suppresses the description.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional

from ..core.types import (
    EOS,
    Comparator,
    DynamicType,
    GameDescription,
    InteractionRule,
    LevelSpec,
    Orientation,
    Outcome,
    Precondition,
    Predicate,
    TerminationKind,
    TerminationRule,
    VgdlType,
)


class Severity(str, Enum):
    ERROR = "Error"
    WARNING = "Warning"


@dataclass(frozen=True)
class ParseDiagnostic:
    severity: Severity
    line: int
    message: str

    def __str__(self) -> str:
        return f"{self.severity.value} (line {self.line}): {self.message}"


@dataclass
class ParseResult:
    description: Optional[GameDescription]
    diagnostics: list[ParseDiagnostic] = field(default_factory=list)

    @property
    def errors(self) -> list[ParseDiagnostic]:
        return [d for d in self.diagnostics if d.severity is Severity.ERROR]

    @property
    def ok(self) -> bool:
        return self.description is not None


_SECTIONS = ("SpriteSet", "InteractionSet", "TerminationSet", "LevelMapping")

_VGDL_TYPES = {t.value: t for t in VgdlType}
_PREDICATES = {p.value: p for p in Predicate}

_SPRITE_PARAM_KEYS = {
    "speed", "cooldown", "orientation", "target", "projectile",
    "lifetime", "period", "exit", "color",
}
_RULE_PARAM_KEYS = {"if", "resource", "delta", "limit", "score", "into", "exit"}


def parse_description(text: str, levels: Optional[list[str]] = None) -> ParseResult:
    """Parse a description (and optional level grids) into a validated
    GameDescription, or diagnostics explaining why not."""
    diags: list[ParseDiagnostic] = []
    sections: dict[str, list[tuple[int, str]]] = {}
    current: Optional[str] = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        stripped = line.strip()
        if not raw[0].isspace() and stripped in _SECTIONS:
            if stripped in sections:
                diags.append(_err(lineno, f"duplicate section {stripped}"))
            current = stripped
            sections.setdefault(current, [])
            continue
        if current is None:
            diags.append(_err(lineno, f"content before any section header: {stripped!r}"))
            continue
        sections[current].append((lineno, stripped))

    for name in _SECTIONS:
        if name not in sections:
            diags.append(_err(0, f"missing section {name}"))

    classes: dict[str, DynamicType] = {}
    palette: dict[str, str] = {}
    raw_params: dict[str, dict[str, str]] = {}
    for lineno, line in sections.get("SpriteSet", []):
        _parse_sprite_line(lineno, line, classes, palette, raw_params, diags)

    rules: list[InteractionRule] = []
    for lineno, line in sections.get("InteractionSet", []):
        rule = _parse_rule_line(lineno, line, diags)
        if rule is not None:
            rules.append(rule)

    terminations: list[TerminationRule] = []
    for lineno, line in sections.get("TerminationSet", []):
        term = _parse_termination_line(lineno, line, diags)
        if term is not None:
            terminations.append(term)

    legend: dict[str, str] = {}
    for lineno, line in sections.get("LevelMapping", []):
        _parse_legend_line(lineno, line, legend, diags)

    avatar_classes = [c for c, d in classes.items() if d.is_avatar]
    avatar_class = avatar_classes[0] if len(avatar_classes) == 1 else ""
    if len(avatar_classes) != 1:
        diags.append(_err(0, f"expected exactly one avatar class, found {avatar_classes}"))

    capacities: dict[str, int] = {}
    for rule in rules:
        if rule.predicate in (Predicate.COLLECT_RESOURCE, Predicate.CHANGE_RESOURCE):
            if rule.limit is not None:
                name = rule.resource or rule.affected_class
                capacities[name] = rule.limit

    level_specs: list[LevelSpec] = []
    for i, grid_text in enumerate(levels or []):
        placements, level_diags = parse_level_grid(grid_text, legend)
        level_specs.append(placements)
        for d in level_diags:
            diags.append(
                ParseDiagnostic(d.severity, d.line, f"level {i}: {d.message}")
            )

    if any(d.severity is Severity.ERROR for d in diags):
        return ParseResult(None, diags)

    desc = GameDescription(
        classes=classes,
        avatar_class=avatar_class,
        interaction_set=rules,
        termination_set=terminations,
        levels=level_specs,
        palette=palette,
        resource_capacities=capacities,
        legend=legend,
    )
    for problem in desc.validate():
        diags.append(_err(0, problem))
    if any(d.severity is Severity.ERROR for d in diags):
        return ParseResult(None, diags)
    return ParseResult(desc, diags)


def parse_level_grid(
    grid_text: str, legend: dict[str, str]
) -> tuple[LevelSpec, list[ParseDiagnostic]]:
    """Validate one level grid against a legend."""
    diags: list[ParseDiagnostic] = []
    rows = [line for line in grid_text.splitlines() if line.strip("")]
    rows = [r for r in rows if r != ""]
    if not rows:
        diags.append(_err(0, "empty level grid"))
        return LevelSpec(grid=(), legend=dict(legend)), diags
    width = len(rows[0])
    for lineno, row in enumerate(rows, start=1):
        if len(row) != width:
            diags.append(_err(lineno, f"ragged row: {len(row)} != {width} columns"))
        for ch in row:
            if ch in (".", " "):
                continue
            if ch not in legend:
                diags.append(_err(lineno, f"level char {ch!r} missing from legend"))
    return LevelSpec(grid=tuple(rows), legend=dict(legend)), diags


def parse_level(
    grid_text: str, legend: dict[str, str]
) -> tuple[list[tuple[str, tuple[int, int]]], list[ParseDiagnostic]]:
    """Initial object placement for a grid: (class, (x, y)) in row-major
    order, which is also the id-assignment order."""
    spec, diags = parse_level_grid(grid_text, legend)
    if any(d.severity is Severity.ERROR for d in diags):
        return [], diags
    placements = []
    for y, row in enumerate(spec.grid):
        for x, ch in enumerate(row):
            if ch in (".", " "):
                continue
            placements.append((legend[ch], (x, y)))
    return placements, diags


def _err(line: int, message: str) -> ParseDiagnostic:
    return ParseDiagnostic(Severity.ERROR, line, message)


def _warn(line: int, message: str) -> ParseDiagnostic:
    return ParseDiagnostic(Severity.WARNING, line, message)


def _split_kv(parts: list[str], lineno: int, allowed: set[str],
              diags: list[ParseDiagnostic]) -> dict[str, str]:
    params: dict[str, str] = {}
    for part in parts:
        if "=" not in part:
            diags.append(_err(lineno, f"expected key=value, got {part!r}"))
            continue
        key, value = part.split("=", 1)
        if key not in allowed:
            diags.append(_err(lineno, f"unknown parameter {key!r}"))
            continue
        params[key] = value
    return params


def _parse_sprite_line(
    lineno: int,
    line: str,
    classes: dict[str, DynamicType],
    palette: dict[str, str],
    raw_params: dict[str, dict[str, str]],
    diags: list[ParseDiagnostic],
) -> None:
    if ">" not in line:
        diags.append(_err(lineno, f"sprite line needs 'name > Type': {line!r}"))
        return
    name_part, rest = line.split(">", 1)
    name = name_part.strip()
    if not name.isidentifier():
        diags.append(_err(lineno, f"bad class name {name!r}"))
        return
    if name in classes:
        diags.append(_err(lineno, f"duplicate class {name!r}"))
        return
    if name == EOS:
        diags.append(_err(lineno, f"{EOS!r} is reserved for the screen edge"))
        return
    tokens = rest.split()
    if not tokens:
        diags.append(_err(lineno, "missing dynamic type"))
        return
    type_name, param_tokens = tokens[0], tokens[1:]
    vgdl_type = _VGDL_TYPES.get(type_name)
    if vgdl_type is None:
        diags.append(_err(lineno, f"unknown dynamic type {type_name!r}"))
        return
    params = _split_kv(param_tokens, lineno, _SPRITE_PARAM_KEYS, diags)
    raw_params[name] = params
    kwargs = {}
    try:
        if "speed" in params:
            kwargs["speed"] = Fraction(params["speed"])
        if "cooldown" in params:
            kwargs["cooldown"] = int(params["cooldown"])
        if "orientation" in params:
            kwargs["orientation"] = Orientation(params["orientation"])
        if "target" in params:
            kwargs["target_class"] = params["target"]
        if "projectile" in params:
            kwargs["projectile_class"] = params["projectile"]
        if "lifetime" in params:
            kwargs["lifetime"] = int(params["lifetime"])
        if "period" in params:
            kwargs["spawn_period"] = int(params["period"])
        if "exit" in params:
            kwargs["portal_exit_class"] = params["exit"]
    except (ValueError, ZeroDivisionError) as exc:
        diags.append(_err(lineno, f"bad sprite parameter: {exc}"))
        return
    dtype = DynamicType(vgdl_type=vgdl_type, **kwargs)
    for problem in dtype.validate():
        diags.append(_err(lineno, f"class {name!r}: {problem}"))
    classes[name] = dtype
    if "color" in params:
        palette[name] = params["color"]


def _parse_precondition(value: str, lineno: int,
                        diags: list[ParseDiagnostic]) -> Optional[Precondition]:
    for op, comparator in ((">=", Comparator.AT_LEAST), ("<", Comparator.LESS_THAN)):
        if op in value:
            resource, threshold = value.split(op, 1)
            try:
                return Precondition(resource.strip(), comparator, int(threshold))
            except ValueError:
                diags.append(_err(lineno, f"bad precondition threshold {threshold!r}"))
                return None
    diags.append(_err(lineno, f"precondition must use >= or < : {value!r}"))
    return None


def _parse_rule_line(
    lineno: int, line: str, diags: list[ParseDiagnostic]
) -> Optional[InteractionRule]:
    if ">" not in line:
        diags.append(_err(lineno, f"rule line needs 'a b > predicate': {line!r}"))
        return None
    head, rest = line.split(">", 1)
    names = head.split()
    if len(names) != 2:
        diags.append(_err(lineno, f"rule needs two class names, got {names}"))
        return None
    affected, other = names
    tokens = rest.split()
    if not tokens:
        diags.append(_err(lineno, "missing predicate"))
        return None
    pred_name, param_tokens = tokens[0], tokens[1:]
    predicate = _PREDICATES.get(pred_name)
    if predicate is None:
        diags.append(_err(lineno, f"unknown predicate {pred_name!r}"))
        return None
    params = _split_kv(param_tokens, lineno, _RULE_PARAM_KEYS, diags)
    precondition = None
    if "if" in params:
        precondition = _parse_precondition(params["if"], lineno, diags)
        if precondition is None:
            return None
    try:
        rule = InteractionRule(
            affected_class=affected,
            other_class=other,
            predicate=predicate,
            precondition=precondition,
            resource=params.get("resource"),
            delta=int(params["delta"]) if "delta" in params else 1,
            limit=int(params["limit"]) if "limit" in params else None,
            score_delta=int(params["score"]) if "score" in params else 0,
            transform_into=params.get("into"),
            teleport_exit=params.get("exit"),
        )
    except ValueError as exc:
        diags.append(_err(lineno, f"bad rule parameter: {exc}"))
        return None
    if predicate is Predicate.TRANSFORM and rule.transform_into is None:
        diags.append(_err(lineno, "transform needs into=<class>"))
        return None
    if predicate is Predicate.TELEPORT and rule.teleport_exit is None:
        diags.append(_err(lineno, "teleport needs exit=<class>"))
        return None
    if predicate is Predicate.CHANGE_RESOURCE and rule.resource is None:
        diags.append(_err(lineno, "changeResource needs resource=<name>"))
        return None
    return rule


def _parse_termination_line(
    lineno: int, line: str, diags: list[ParseDiagnostic]
) -> Optional[TerminationRule]:
    tokens = line.split()
    kind_name, param_tokens = tokens[0], tokens[1:]
    params = _split_kv(param_tokens, lineno, {"stype", "limit", "win"}, diags)
    win_text = params.get("win", "")
    if win_text not in ("True", "False"):
        diags.append(_err(lineno, f"termination needs win=True|False, got {win_text!r}"))
        return None
    outcome = Outcome.WIN if win_text == "True" else Outcome.LOSS
    try:
        limit = int(params.get("limit", "0"))
    except ValueError:
        diags.append(_err(lineno, f"bad limit {params.get('limit')!r}"))
        return None
    if kind_name == "SpriteCounter":
        if "stype" not in params:
            diags.append(_err(lineno, "SpriteCounter needs stype=<class>"))
            return None
        return TerminationRule(
            TerminationKind.COUNT_REACHES, outcome,
            class_id=params["stype"], target_count=limit,
        )
    if kind_name == "Timeout":
        return TerminationRule(TerminationKind.TIMEOUT, outcome, ticks=limit)
    diags.append(_err(lineno, f"unknown termination kind {kind_name!r}"))
    return None


def _parse_legend_line(
    lineno: int, line: str, legend: dict[str, str], diags: list[ParseDiagnostic]
) -> None:
    if ">" not in line:
        diags.append(_err(lineno, f"legend line needs 'c > class': {line!r}"))
        return
    char_part, class_part = line.split(">", 1)
    char = char_part.strip()
    class_id = class_part.strip()
    if len(char) != 1:
        diags.append(_err(lineno, f"legend key must be one character: {char!r}"))
        return
    if char in legend:
        diags.append(_err(lineno, f"duplicate legend char {char!r}"))
        return
    if class_id in legend.values():
        diags.append(_err(lineno, f"class {class_id!r} already has a legend char"))
        return
    legend[char] = class_id
