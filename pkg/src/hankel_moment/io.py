"""JSON documents: loading sequences and families, deterministic dumping."""
from __future__ import annotations

import json
import math
import os
import tempfile
from fractions import Fraction

from .explorer import TruncatedFamily
from .scalars import to_scalar
from .sequence import GeneratingVector, MultidimensionalSequence


class MalformedInput(ValueError):
    pass


def _scalars(raw, what):
    if not isinstance(raw, list) or not raw:
        raise MalformedInput(f"{what} must be a non-empty list")
    try:
        return [to_scalar(x) for x in raw]
    except (TypeError, ValueError) as exc:
        raise MalformedInput(f"bad value in {what}: {exc}") from None


def sequence_from_json(doc) -> MultidimensionalSequence:
    """Read a sequence document (table or Hankel rule).

    A bare list, or a document without ``kind``, is a generating vector; it
    then needs ``n`` only when the caller asks for a multidimensional view,
    so ``n`` defaults to 2.
    """
    if isinstance(doc, list):
        return MultidimensionalSequence(n=2, generator=GeneratingVector(_scalars(doc, "vector")))
    if not isinstance(doc, dict):
        raise MalformedInput("sequence document must be a JSON object or list")
    n = doc.get("n", 2)
    if not isinstance(n, int) or isinstance(n, bool) or n < 2:
        raise MalformedInput(f"n must be an integer >= 2, got {n!r}")
    kind = doc.get("kind", "hankel-rule" if "generating_vector" in doc else None)
    try:
        if kind == "hankel-rule":
            v = GeneratingVector(_scalars(doc.get("generating_vector"), "generating_vector"))
            return MultidimensionalSequence(n=n, generator=v)
        if kind == "table":
            entries = doc.get("entries")
            if not isinstance(entries, list):
                raise MalformedInput("table documents need an 'entries' list")
            table = {}
            for e in entries:
                j = tuple(e["j"])
                if j in table:
                    raise MalformedInput(f"duplicate entry for j = {list(j)}")
                table[j] = _scalars([e["value"]], f"entry {list(j)}")[0]
            max_degree = doc.get("max_degree")
            if not isinstance(max_degree, int):
                raise MalformedInput("table documents must declare an integer max_degree")
            return MultidimensionalSequence(n=n, table=table, max_degree=max_degree)
    except MalformedInput:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInput(str(exc)) from None
    raise MalformedInput(f"unknown kind {kind!r}")


def family_from_json(doc) -> TruncatedFamily:
    if not isinstance(doc, dict):
        raise MalformedInput("family document must be a JSON object")
    try:
        grid = doc.get("grid")
        if grid is not None:
            grid = {int(k): tuple(_scalars(vals, f"grid[{k}]")) for k, vals in grid.items()}
        return TruncatedFamily(
            n=int(doc["n"]),
            m_max=int(doc["m_max"]),
            pattern=tuple(int(k) for k in doc["pattern"]),
            grid=grid,
            samples=int(doc.get("samples", 0)),
            low=float(doc.get("low", -1.0)),
            high=float(doc.get("high", 1.0)),
            denominator=int(doc.get("denominator", 16)),
            seed=int(doc.get("seed", 0)),
        )
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise MalformedInput(f"bad family document: {exc}") from None


def load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedInput(f"cannot read {path}: {exc}") from None


def _format_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"non-finite float {x!r} in output")
    s = format(x, ".17g")
    if not any(ch in s for ch in ".en"):
        s += ".0"
    return s


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """Deterministic JSON: insertion-ordered keys, floats with 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return _format_float(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, Fraction):
        return json.dumps(f"{obj.numerator}/{obj.denominator}") if obj.denominator != 1 else str(obj.numerator)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(x, (int, float, str, Fraction)) and not isinstance(x, bool) for x in obj):
            return "[" + ", ".join(dumps(x, indent, _level + 1) for x in obj) + "]"
        items = [pad + dumps(x, indent, _level + 1) for x in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".hmk-", suffix=".json")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
