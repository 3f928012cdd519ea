"""Line-delimited JSON score files.

One record per line: {"post_id": ..., "provider_id": ..., "scores":
[[...], ...]} with one float array per dimension.  The format is shared
by the score CLI, the LLM cache exporter, and the replay provider.
"""
from __future__ import annotations

import json
import os
from typing import Iterable, Iterator, TextIO

from ..fusion.types import ScoreBlock


def score_record(post_id: str, block: ScoreBlock) -> dict:
    return {
        "post_id": post_id,
        "provider_id": block.provider_id,
        "scores": block.to_lists(),
    }


def dump_score_line(post_id: str, block: ScoreBlock) -> str:
    return json.dumps(score_record(post_id, block), sort_keys=True, separators=(",", ":"))


def write_scores(target: str | os.PathLike | TextIO, records: Iterable[tuple[str, ScoreBlock]]) -> int:
    """Write records to a path or open handle; returns the line count."""
    if hasattr(target, "write"):
        return _write_handle(target, records)
    with open(target, "w", encoding="utf-8") as fh:
        return _write_handle(fh, records)


def _write_handle(fh: TextIO, records: Iterable[tuple[str, ScoreBlock]]) -> int:
    n = 0
    for post_id, block in records:
        fh.write(dump_score_line(post_id, block))
        fh.write("\n")
        n += 1
    return n


def iter_score_lines(path: str | os.PathLike) -> Iterator[tuple[int, str]]:
    """Yield (1-based line number, raw line) pairs, skipping blank lines."""
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if line:
                yield lineno, line
