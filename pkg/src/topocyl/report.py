"""Canonical JSON reports: stable key order, config echo, version string."""

from __future__ import annotations

import json
import sys
from typing import Optional

VERSION = "0.1.0"


def make_report(command: str, config: dict, results: dict) -> dict:
    return {
        "command": command,
        "config": config,
        "results": results,
        "version": VERSION,
    }


def render(doc) -> str:
    """Byte-identical across runs with identical inputs."""
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def emit(doc, out: Optional[str]) -> None:
    text = render(doc)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
