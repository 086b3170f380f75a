"""Parsing of the family literals and vector sources accepted by the CLI.

Weight literals: ``power:theta=0.5``, ``harmonic``, ``geometric``,
``powerderiv:a=0.5``, ``file:<path>`` (one positive number per line).

Orlicz literals: ``power:p=2``, ``finf``, ``expinv``, ``blend:w=0.5``,
``table:<path>`` (``t M(t)`` pairs per line).
"""
from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import numpy as np

from . import orlicz as oz
from . import weights as W
from .errors import LiteralParseError, PreconditionError
from .seqvec import IndexSetSpec, SeqVec


def _split(literal: str) -> tuple[str, dict[str, str]]:
    literal = literal.strip()
    if not literal:
        raise LiteralParseError("empty literal")
    head, _, rest = literal.partition(":")
    params = {}
    if rest:
        for part in rest.split(","):
            key, eq, value = part.partition("=")
            if not eq or not key.strip():
                raise LiteralParseError(f"malformed parameter {part!r} in {literal!r}")
            params[key.strip()] = value.strip()
    return head.strip(), params


def _number(params: dict, key: str, literal: str) -> float:
    if set(params) != {key}:
        raise LiteralParseError(f"{literal!r}: expected exactly the parameter {key!r}")
    try:
        return float(params[key])
    except ValueError as exc:
        raise LiteralParseError(f"{literal!r}: {key} is not a number") from exc


def _read_numbers(path: str) -> list[list[float]]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise LiteralParseError(f"cannot read {path}: {exc}") from exc
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            rows.append([float(x) for x in line.replace(",", " ").split()])
        except ValueError as exc:
            raise LiteralParseError(f"{path}:{lineno}: {exc}") from exc
    return rows


def parse_weight(literal: str) -> W.Weight:
    if literal.startswith("file:"):
        rows = _read_numbers(literal[5:])
        if not rows or any(len(r) != 1 for r in rows):
            raise LiteralParseError(f"{literal!r}: need one number per line")
        vals = [r[0] for r in rows]
        if any(v <= 0 for v in vals):
            bad = next(i for i, v in enumerate(vals, 1) if v <= 0)
            raise PreconditionError(f"weight term at index {bad} is not positive")
        return W.table(vals, name="file")
    head, params = _split(literal)
    if head == "power":
        return W.power(_number(params, "theta", literal))
    if head == "powerderiv":
        return W.power_derivative(_number(params, "a", literal))
    if head in ("harmonic", "geometric") and not params:
        return W.harmonic() if head == "harmonic" else W.geometric()
    raise LiteralParseError(f"unknown weight literal {literal!r}")


def parse_orlicz(literal: str) -> oz.OrliczFunction:
    if literal.startswith("table:"):
        rows = _read_numbers(literal[6:])
        if not rows or any(len(r) != 2 for r in rows):
            raise LiteralParseError(f"{literal!r}: need 't M(t)' pairs")
        arr = np.array(rows)
        return oz.table(arr[:, 0], arr[:, 1])
    head, params = _split(literal)
    if head == "power":
        return oz.power(_number(params, "p", literal))
    if head == "blend":
        return oz.blend(_number(params, "w", literal) if params else 0.5)
    if head in ("finf", "expinv") and not params:
        return oz.finf() if head == "finf" else oz.expinv()
    raise LiteralParseError(f"unknown Orlicz literal {literal!r}")


def parse_vector(source: str) -> SeqVec:
    """Vector from a file (JSON entry list or ``index value`` lines), ``-`` for stdin,
    or an inline list of values such as ``"1 1"`` (indices 1, 2, ...).
    """
    if source == "-":
        text = sys.stdin.read()
    elif os.path.isfile(source):
        try:
            text = Path(source).read_text()
        except OSError as exc:
            raise LiteralParseError(f"cannot read {source}: {exc}") from exc
    else:
        try:
            return SeqVec.from_values(float(x) for x in source.replace(",", " ").split())
        except ValueError as exc:
            raise LiteralParseError(f"cannot parse vector {source!r}") from exc
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            return SeqVec.from_json(text)
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise LiteralParseError(f"bad vector JSON: {exc}") from exc
    return SeqVec.from_text(text)


def parse_index_set(text: str) -> IndexSetSpec:
    """``odd``, ``even``, ``all``, ``mult:<b>``, ``prog:<start>,<step>`` or ``1,3,5``."""
    text = text.strip()
    try:
        if text == "odd":
            return IndexSetSpec.odds()
        if text == "even":
            return IndexSetSpec.evens()
        if text in ("all", "naturals"):
            return IndexSetSpec.naturals()
        if text.startswith("mult:"):
            return IndexSetSpec.multiples(int(text[5:]))
        if text.startswith("prog:"):
            start, step = text[5:].split(",")
            return IndexSetSpec.progression(int(start), int(step))
        return IndexSetSpec.explicit(int(x) for x in text.split(","))
    except ValueError as exc:
        if isinstance(exc, PreconditionError):
            raise
        raise LiteralParseError(f"cannot parse index set {text!r}") from exc


def parse_index_sets(text: str) -> list[IndexSetSpec]:
    """Semicolon-separated list of index sets."""
    parts = [p for p in text.split(";")]
    if not parts or any(not p.strip() for p in parts):
        raise LiteralParseError(f"malformed index-set list {text!r}")
    return [parse_index_set(p) for p in parts]


def parse_scale(items: list[str] | None) -> dict[str, int]:
    """``["J=200", "n=500"]`` (or comma-joined) to a dict of positive ints."""
    out = {}
    for item in items or []:
        for part in item.split(","):
            key, eq, value = part.partition("=")
            if not eq:
                raise LiteralParseError(f"scale entries look like key=value, got {part!r}")
            try:
                out[key.strip()] = int(value)
            except ValueError as exc:
                raise LiteralParseError(f"scale value {value!r} is not an integer") from exc
            if out[key.strip()] < 1:
                raise LiteralParseError(f"scale value for {key} must be >= 1")
    return out
