"""Labeled per-node score tables and their CSV format.

One AspectScores = one aspect at one snapshot month.  The CSV layout is
`tree_code, level, aspect, month, value` with values at 17 significant
digits; a `# config_hash=...` comment line may precede the header.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, TextIO

from .hierarchy import level_of

ASPECTS = ("disruptiveness", "influence", "informativeness", "usefulness")
RELEVANCE = "relevance"


@dataclass
class AspectScores:
    aspect: str
    month: str
    values: dict[str, float]


def write_scores_csv(scores: AspectScores, out: TextIO, config_hash: str | None = None) -> None:
    if config_hash:
        out.write(f"# config_hash={config_hash}\n")
    out.write("tree_code,level,aspect,month,value\n")
    for code in sorted(scores.values):
        value = format(scores.values[code], ".17g")
        out.write(f"{code},{level_of(code)},{scores.aspect},{scores.month},{value}\n")


def read_scores_csv(lines: Iterable[str]) -> AspectScores:
    aspect = ""
    month = ""
    values: dict[str, float] = {}
    for raw in lines:
        line = raw.strip()
        if not line or line.startswith("#") or line.startswith("tree_code,"):
            continue
        code, _level, aspect, month, value = line.split(",")
        values[code] = float(value)
    return AspectScores(aspect=aspect, month=month, values=values)
