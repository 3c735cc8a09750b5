"""Small helpers for reading structured text and writing deterministic output."""

import json
from pathlib import Path

import yaml

from .errors import QLError


def parse_yaml(text: str):
    try:
        return yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        line, col = (mark.line + 1, mark.column + 1) if mark else (0, 0)
        raise QLError("PARSE_ERROR", f"line {line}, column {col}: {exc.problem}", line=line, column=col) from exc
    except yaml.YAMLError as exc:
        raise QLError("PARSE_ERROR", str(exc)) from exc


def read_text(path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise QLError("PARSE_ERROR", f"cannot read {path}: {exc}") from exc


def dump_json(data) -> str:
    """Canonical JSON: sorted keys, fixed separators, trailing newline."""
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=True) + "\n"
