"""Protocol file I/O: manifest, feature table, labels, results.

These parsers are intentionally independent of the harness package; the
files on disk are the contract. Schema violations raise SchemaError
naming the offending field.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class SchemaError(Exception):
    """A protocol file does not match its documented shape."""


_DESIGN_KEYS = ("seed", "c", "u", "N", "actions", "common_objects",
                "unique_objects", "unseen_objects", "inventory_digest")


@dataclass(frozen=True)
class Manifest:
    seed: int
    actions: tuple[str, ...]
    train: tuple[str, ...]
    val: tuple[str, ...]
    test_ids: tuple[str, ...]


def read_manifest(path: Path | str) -> Manifest:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"manifest is not valid JSON: {exc}") from exc
    for key in ("design", "train", "val", "test"):
        if key not in doc:
            raise SchemaError(f"manifest missing top-level key {key!r}")
    design = doc["design"]
    for key in _DESIGN_KEYS:
        if key not in design:
            raise SchemaError(f"manifest design missing key {key!r}")
    test_ids = []
    for entry in doc["test"]:
        if not isinstance(entry, dict) or "id" not in entry or "type" not in entry:
            raise SchemaError("manifest test entries must carry 'id' and 'type'")
        test_ids.append(entry["id"])
    return Manifest(
        seed=design["seed"],
        actions=tuple(design["actions"]),
        train=tuple(doc["train"]),
        val=tuple(doc["val"]),
        test_ids=tuple(test_ids),
    )


def read_features(path: Path | str) -> dict[str, np.ndarray]:
    with open(path, newline="", encoding="utf-8") as f:
        rows = [r for r in csv.reader(f) if r]
    if not rows or rows[0][:1] != ["id"]:
        raise SchemaError("feature table missing its 'id,f0,...' header")
    dim = len(rows[0]) - 1
    vectors: dict[str, np.ndarray] = {}
    for row in rows[1:]:
        if len(row) != dim + 1:
            raise SchemaError(f"feature row {row[0]!r} has {len(row) - 1} values, expected {dim}")
        try:
            vectors[row[0]] = np.array([float(x) for x in row[1:]])
        except ValueError as exc:
            raise SchemaError(f"feature row {row[0]!r}: {exc}") from exc
    return vectors


def read_labels(path: Path | str) -> dict[str, str]:
    """Inventory CSV (id,action,object[,media_ref]) -> id to action map."""
    with open(path, newline="", encoding="utf-8") as f:
        rows = [r for r in csv.reader(f) if r]
    if rows and rows[0][:3] == ["id", "action", "object"]:
        rows = rows[1:]
    labels: dict[str, str] = {}
    for row in rows:
        if len(row) not in (3, 4):
            raise SchemaError(f"labels row {row!r} must have 3 or 4 fields")
        labels[row[0]] = row[1]
    return labels


def stack(vectors: dict[str, np.ndarray], ids: tuple[str, ...], what: str) -> np.ndarray:
    missing = [i for i in ids if i not in vectors]
    if missing:
        raise SchemaError(f"feature table is missing {what} id {missing[0]!r}")
    return np.stack([vectors[i] for i in ids])


def write_results(path: Path | str, trial_seed: int, predictions: dict[str, str],
                  order: tuple[str, ...]) -> None:
    doc = {
        "trial_seed": trial_seed,
        "predictions": [{"id": i, "action": predictions[i]} for i in order],
    }
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    os.replace(tmp, path)
