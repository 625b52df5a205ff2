"""Game corpus: directory of ``games/<name>/game.vgdl`` plus
``games/<name>/level_<k>.txt`` files."""
from __future__ import annotations

import re
from pathlib import Path

from ..core.types import GameDescription
from ..parsing.parser import ParseDiagnostic, parse_description

_LEVEL_RE = re.compile(r"level_(\d+)\.txt$")


def default_corpus_dir() -> Path:
    # repo layout: games/ sits next to src/
    here = Path(__file__).resolve()
    for parent in here.parents:
        candidate = parent / "games"
        if candidate.is_dir():
            return candidate
    raise FileNotFoundError("no games/ directory found above " + str(here))


def list_games(corpus_dir: Path | None = None) -> list[str]:
    root = corpus_dir or default_corpus_dir()
    return sorted(p.name for p in root.iterdir() if (p / "game.vgdl").is_file())


def load_game(name: str, corpus_dir: Path | None = None) -> GameDescription:
    desc, diags = load_game_checked(name, corpus_dir)
    if desc is None:
        raise ValueError(
            f"game {name!r} failed to parse:\n" + "\n".join(str(d) for d in diags)
        )
    return desc


def load_game_checked(
    name: str, corpus_dir: Path | None = None
) -> tuple[GameDescription | None, list[ParseDiagnostic]]:
    root = (corpus_dir or default_corpus_dir()) / name
    text = (root / "game.vgdl").read_text()
    levels = []
    level_paths = sorted(
        (p for p in root.iterdir() if _LEVEL_RE.search(p.name)),
        key=lambda p: int(_LEVEL_RE.search(p.name).group(1)),
    )
    for p in level_paths:
        levels.append(p.read_text())
    result = parse_description(text, levels)
    return result.description, result.diagnostics


def validate_corpus(corpus_dir: Path | None = None) -> dict[str, list[str]]:
    """Parse every game; returns {game: [error strings]} (empty = all good)."""
    problems: dict[str, list[str]] = {}
    for name in list_games(corpus_dir):
        desc, diags = load_game_checked(name, corpus_dir)
        errors = [str(d) for d in diags if d.severity.value == "Error"]
        if desc is None or errors:
            problems[name] = errors or ["no description produced"]
        elif not desc.levels:
            problems[name] = ["game has no levels"]
    return problems
