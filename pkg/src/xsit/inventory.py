"""Labeled instance inventories: parsing, validation, serialization.

An inventory is an ordered list of (id, action, object) records, one per
video clip, plus the action and object vocabularies in first-occurrence
order. Labels are opaque, case-sensitive strings; any merging or
normalization belongs to preprocessing, not here.

Two interchange formats are supported:

* ``delimited``: UTF-8 CSV, one record per line,
  ``id,action,object[,media_ref]``, with an optional header line detected
  by exact match.
* ``record-lines``: one JSON object per line with the same field names.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, field
from typing import BinaryIO, Iterable, Literal, Union

from .errors import ParseError

Format = Literal["delimited", "record-lines"]

_HEADERS = ("id,action,object", "id,action,object,media_ref")


@dataclass(frozen=True)
class Instance:
    """One labeled clip: an action applied to an object."""

    id: str
    action: str
    object: str
    media_ref: str | None = None


@dataclass(frozen=True)
class Inventory:
    """Immutable instance collection with first-occurrence vocabularies."""

    instances: tuple[Instance, ...]
    action_vocab: tuple[str, ...]
    object_vocab: tuple[str, ...]
    _by_id: dict[str, Instance] = field(repr=False, compare=False, default_factory=dict)

    @classmethod
    def from_instances(cls, instances: Iterable[Instance]) -> "Inventory":
        """Build an inventory, deriving vocabularies from the instances."""
        insts = tuple(instances)
        actions: dict[str, None] = {}
        objects: dict[str, None] = {}
        for inst in insts:
            actions.setdefault(inst.action)
            objects.setdefault(inst.object)
        by_id = {inst.id: inst for inst in insts}
        return cls(insts, tuple(actions), tuple(objects), by_id)

    def __len__(self) -> int:
        return len(self.instances)

    def _index(self) -> dict[str, Instance]:
        if not self._by_id and self.instances:
            self._by_id.update({inst.id: inst for inst in self.instances})
        return self._by_id

    def by_id(self, instance_id: str) -> Instance:
        return self._index()[instance_id]

    def __contains__(self, instance_id: str) -> bool:
        return instance_id in self._index()

    def digest(self) -> str:
        """Checksum of the canonical record-lines serialization."""
        payload = serialize_inventory(self, "record-lines")
        return "sha256:" + hashlib.sha256(payload).hexdigest()


def _decode(source: Union[bytes, BinaryIO]) -> str:
    data = source if isinstance(source, bytes) else source.read()
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"source is not valid UTF-8: {exc}") from exc


def _check_required(row_id: str, action: str, obj: str, line: int) -> None:
    if not row_id:
        raise ParseError("empty id field", line)
    if not action:
        raise ParseError(f"empty action field (id {row_id!r})", line)
    if not obj:
        raise ParseError(f"empty object field (id {row_id!r})", line)


def parse_inventory(source: Union[bytes, BinaryIO], format: Format = "delimited") -> Inventory:
    """Parse an inventory from a byte stream.

    Raises ParseError on malformed rows (with the 1-based line number),
    duplicate ids, or empty required fields. Blank lines are skipped; an
    empty source yields an empty inventory.
    """
    text = _decode(source)
    if format == "delimited":
        instances = list(_parse_delimited(text))
    elif format == "record-lines":
        instances = list(_parse_record_lines(text))
    else:
        raise ParseError(f"unknown inventory format {format!r}")
    seen: set[str] = set()
    for inst in instances:
        if inst.id in seen:
            raise ParseError(f"duplicate id {inst.id!r}")
        seen.add(inst.id)
    return Inventory.from_instances(instances)


def _lines(text: str) -> Iterable[tuple[int, str]]:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    for line_no, line in enumerate(lines, start=1):
        yield line_no, line.removesuffix("\r")


def _parse_delimited(text: str) -> Iterable[Instance]:
    for line_no, line in _lines(text):
        if not line:
            continue
        if line_no == 1 and line in _HEADERS:
            continue
        try:
            fields = next(csv.reader([line]))
        except csv.Error as exc:
            raise ParseError(f"bad CSV row: {exc}", line_no) from exc
        if len(fields) not in (3, 4):
            raise ParseError(f"expected 3 or 4 fields, got {len(fields)}", line_no)
        row_id, action, obj = fields[0], fields[1], fields[2]
        media = fields[3] if len(fields) == 4 and fields[3] else None
        _check_required(row_id, action, obj, line_no)
        yield Instance(row_id, action, obj, media)


def _parse_record_lines(text: str) -> Iterable[Instance]:
    for line_no, line in _lines(text):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"bad JSON record: {exc}", line_no) from exc
        if not isinstance(record, dict):
            raise ParseError("record is not an object", line_no)
        missing = [k for k in ("id", "action", "object") if k not in record]
        if missing:
            raise ParseError(f"missing field {missing[0]!r}", line_no)
        row_id, action, obj = record["id"], record["action"], record["object"]
        media = record.get("media_ref") or None
        for name, value in (("id", row_id), ("action", action), ("object", obj)):
            if not isinstance(value, str):
                raise ParseError(f"field {name!r} is not a string", line_no)
        if media is not None and not isinstance(media, str):
            raise ParseError("field 'media_ref' is not a string", line_no)
        _check_required(row_id, action, obj, line_no)
        yield Instance(row_id, action, obj, media)


def serialize_inventory(inv: Inventory, format: Format = "delimited") -> bytes:
    """Serialize an inventory; parse(serialize(inv)) reproduces inv exactly."""
    if format == "delimited":
        buf = io.StringIO()
        with_media = any(i.media_ref is not None for i in inv.instances)
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(_HEADERS[1].split(",") if with_media else _HEADERS[0].split(","))
        for inst in inv.instances:
            row = [inst.id, inst.action, inst.object]
            if with_media:
                row.append(inst.media_ref or "")
            for value in row:
                if any(ch in value for ch in "\r\n\x00"):
                    raise ParseError(
                        f"field {value!r} of instance {inst.id!r} contains a "
                        "character the delimited format cannot carry; use the "
                        "record-lines format"
                    )
            writer.writerow(row)
        return buf.getvalue().encode("utf-8")
    if format == "record-lines":
        lines = []
        for inst in inv.instances:
            record: dict[str, str] = {
                "id": inst.id,
                "action": inst.action,
                "object": inst.object,
            }
            if inst.media_ref is not None:
                record["media_ref"] = inst.media_ref
            lines.append(json.dumps(record, ensure_ascii=False))
        return ("\n".join(lines) + ("\n" if lines else "")).encode("utf-8")
    raise ParseError(f"unknown inventory format {format!r}")


def validate_inventory(inv: Inventory) -> list[str]:
    """Return invariant violations as human-readable strings (empty if valid)."""
    violations: list[str] = []
    seen: set[str] = set()
    for inst in inv.instances:
        if not inst.id:
            violations.append("instance with empty id")
        elif inst.id in seen:
            violations.append(f"duplicate id {inst.id!r}")
        else:
            seen.add(inst.id)
        if not inst.action:
            violations.append(f"instance {inst.id!r} has an empty action label")
        if not inst.object:
            violations.append(f"instance {inst.id!r} has an empty object label")
    expected = Inventory.from_instances(inv.instances)
    if inv.action_vocab != expected.action_vocab:
        violations.append(
            f"action_vocab {list(inv.action_vocab)} does not match labels in "
            f"first-occurrence order {list(expected.action_vocab)}"
        )
    if inv.object_vocab != expected.object_vocab:
        violations.append(
            f"object_vocab {list(inv.object_vocab)} does not match labels in "
            f"first-occurrence order {list(expected.object_vocab)}"
        )
    return violations
