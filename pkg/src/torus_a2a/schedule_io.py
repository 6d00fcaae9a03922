"""Schedule files: JSON with one tree entry per line.

::

    {
      "k": 5,
      "n": 2,
      "tree": [
        {"offset": [-2, -2], "axis": 1, "sign": -1},
        ...
      ]
    }

Entries are sorted by offset.  The reader reports every problem with the
line it was found on.
"""

from __future__ import annotations

import json
import re
from pathlib import Path

from .torus import Coord, Direction, ShapeError, TorusShape, all_nodes, is_canonical, norm
from .schedule import RoutingTree, parent_offset

_WS = re.compile(r"[ \t\n\r]*")


class ScheduleFormatError(ValueError):
    def __init__(self, source: str, line: int, message: str):
        super().__init__(f"{source}:{line}: {message}")
        self.source = source
        self.line = line
        self.message = message


def dumps_schedule(tree: RoutingTree) -> str:
    lines = ["{", f'  "k": {tree.shape.k},', f'  "n": {tree.shape.n},', '  "tree": [']
    entries = [
        json.dumps({"offset": list(offset), "axis": e.axis, "sign": e.sign})
        for offset, e in sorted(tree.arrival.items())
    ]
    lines.append(",\n".join("    " + entry for entry in entries))
    lines += ["  ]", "}"]
    return "\n".join(lines) + "\n"


def write_schedule(tree: RoutingTree, path: str | Path) -> None:
    Path(path).write_text(dumps_schedule(tree), encoding="utf-8")


class _Reader:
    """Walks an already-valid JSON document, recording where values start."""

    def __init__(self, text: str, source: str):
        self.text = text
        self.source = source
        self.decoder = json.JSONDecoder()

    def line(self, pos: int) -> int:
        return self.text.count("\n", 0, pos) + 1

    def fail(self, pos: int, message: str) -> ScheduleFormatError:
        return ScheduleFormatError(self.source, self.line(pos), message)

    def skip(self, pos: int) -> int:
        return _WS.match(self.text, pos).end()

    def value(self, pos: int):
        return self.decoder.raw_decode(self.text, pos)

    def array(self, pos: int) -> tuple[list[tuple[int, object]], int, int]:
        """Elements with their start positions, the closing position, and the end."""
        items = []
        pos = self.skip(pos + 1)
        while self.text[pos] != "]":
            start = pos
            item, pos = self.value(pos)
            items.append((start, item))
            pos = self.skip(pos)
            if self.text[pos] == ",":
                pos = self.skip(pos + 1)
        return items, pos, pos + 1

    def document(self) -> tuple[dict, dict[str, int]]:
        pos = self.skip(0)
        if self.text[pos] != "{":
            raise self.fail(pos, "top level must be a JSON object")
        members: dict = {}
        where: dict[str, int] = {}
        pos = self.skip(pos + 1)
        while self.text[pos] != "}":
            key_pos = pos
            key, pos = self.value(pos)
            if key in members:
                raise self.fail(key_pos, f"duplicate key {key!r}")
            pos = self.skip(self.skip(pos) + 1)
            if key == "tree" and self.text[pos] == "[":
                items, close, pos = self.array(pos)
                members[key] = items
                where["tree_end"] = close
            else:
                members[key], pos = self.value(pos)
            where[key] = key_pos
            pos = self.skip(pos)
            if self.text[pos] == ",":
                pos = self.skip(pos + 1)
        return members, where


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def loads_schedule(text: str, source: str = "<schedule>") -> RoutingTree:
    try:
        json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScheduleFormatError(source, exc.lineno, f"invalid JSON: {exc.msg} at column {exc.colno}") from None
    reader = _Reader(text, source)
    members, where = reader.document()

    unknown = sorted(set(members) - {"k", "n", "tree"})
    if unknown:
        raise reader.fail(where[unknown[0]], f"unknown key {unknown[0]!r}")
    for key in ("k", "n", "tree"):
        if key not in members:
            raise ScheduleFormatError(source, 1, f"missing key {key!r}")
    for key in ("k", "n"):
        if not _is_int(members[key]):
            raise reader.fail(where[key], f"{key!r} must be an integer")
    try:
        shape = TorusShape(members["k"], members["n"])
    except ShapeError as exc:
        raise reader.fail(where["k"], str(exc)) from None
    if not isinstance(members["tree"], list):
        raise reader.fail(where["tree"], "'tree' must be an array")

    arrival: dict[Coord, Direction] = {}
    previous: Coord | None = None
    for pos, entry in members["tree"]:
        if not isinstance(entry, dict):
            raise reader.fail(pos, "tree entry must be an object")
        keys = set(entry)
        if keys != {"offset", "axis", "sign"}:
            raise reader.fail(pos, f"tree entry must have exactly the keys axis, offset, sign (got {sorted(keys)})")
        offset, axis, sign = entry["offset"], entry["axis"], entry["sign"]
        if not isinstance(offset, list) or not all(_is_int(c) for c in offset):
            raise reader.fail(pos, "offset must be an array of integers")
        if len(offset) != shape.n:
            raise reader.fail(pos, f"offset {offset} has {len(offset)} coordinates, expected {shape.n}")
        if not is_canonical(offset, shape):
            raise reader.fail(pos, f"offset {offset} is not in canonical centered form for k={shape.k}")
        offset = tuple(offset)
        if not any(offset):
            raise reader.fail(pos, "the zero offset has no arrival direction")
        if offset in arrival:
            raise reader.fail(pos, f"duplicate offset {list(offset)}")
        if previous is not None and offset < previous:
            raise reader.fail(pos, f"offset {list(offset)} out of order (after {list(previous)})")
        if not _is_int(axis) or not 1 <= axis <= shape.n:
            raise reader.fail(pos, f"axis must be an integer in 1..{shape.n}, got {axis!r}")
        if not _is_int(sign) or sign not in (1, -1):
            raise reader.fail(pos, f"sign must be 1 or -1, got {sign!r}")
        e = Direction(axis, sign)
        if norm(parent_offset(offset, e, shape), shape) != norm(offset, shape) - 1:
            raise reader.fail(pos, f"offset {list(offset)}: arrival along {e} does not come from a closer node")
        arrival[offset] = e
        previous = offset

    expected = shape.node_count - 1
    if len(arrival) != expected:
        first = next(o for o in all_nodes(shape) if any(o) and o not in arrival)
        raise reader.fail(
            where["tree_end"] if "tree_end" in where else where["tree"],
            f"missing offset {list(first)} ({expected - len(arrival)} of {expected} missing)",
        )
    return RoutingTree(shape, arrival)


def read_schedule(path: str | Path) -> RoutingTree:
    path = Path(path)
    return loads_schedule(path.read_text(encoding="utf-8"), str(path))
