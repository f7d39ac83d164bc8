"""Action-object co-occurrence count matrices.

Rows are actions, columns are objects, both in inventory vocabulary order.
Each cell keeps the contributing instance ids, not just the count, because
sampling and split construction need cell membership.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .errors import ParseError
from .inventory import Inventory

CORNER = "action\\object"


@dataclass(eq=False)
class CoocMatrix:
    """Counts plus per-cell instance ids; immutable by convention."""

    actions: tuple[str, ...]
    objects: tuple[str, ...]
    counts: np.ndarray  # (|actions|, |objects|) int64
    cell_ids: tuple[tuple[tuple[str, ...], ...], ...]
    source_digest: str = ""
    _action_index: dict[str, int] = field(repr=False, default_factory=dict)
    _object_index: dict[str, int] = field(repr=False, default_factory=dict)

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        self.counts.setflags(write=False)
        self._action_index = {a: i for i, a in enumerate(self.actions)}
        self._object_index = {o: j for j, o in enumerate(self.objects)}

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.actions), len(self.objects))

    def total(self) -> int:
        return int(self.counts.sum())

    def count(self, action: str, obj: str) -> int:
        return int(self.counts[self._action_index[action], self._object_index[obj]])

    def ids(self, action: str, obj: str) -> tuple[str, ...]:
        return self.cell_ids[self._action_index[action]][self._object_index[obj]]


class Marginals(NamedTuple):
    row_totals: np.ndarray
    col_totals: np.ndarray
    density: float


def build_cooc(inv: Inventory) -> CoocMatrix:
    """Count (action, object) pairs over the inventory.

    Raises ValueError on an empty inventory; downstream design operations
    have nothing to work with.
    """
    if len(inv) == 0:
        raise ValueError("cannot build a co-occurrence matrix from an empty inventory")
    a_index = {a: i for i, a in enumerate(inv.action_vocab)}
    o_index = {o: j for j, o in enumerate(inv.object_vocab)}
    counts = np.zeros((len(a_index), len(o_index)), dtype=np.int64)
    cells: list[list[list[str]]] = [
        [[] for _ in o_index] for _ in a_index
    ]
    for inst in inv.instances:
        i, j = a_index[inst.action], o_index[inst.object]
        counts[i, j] += 1
        cells[i][j].append(inst.id)
    cell_ids = tuple(tuple(tuple(ids) for ids in row) for row in cells)
    return CoocMatrix(inv.action_vocab, inv.object_vocab, counts, cell_ids, inv.digest())


def marginals(m: CoocMatrix) -> Marginals:
    """Row and column totals plus the fraction of nonzero cells."""
    row_totals = m.counts.sum(axis=1)
    col_totals = m.counts.sum(axis=0)
    density = float(np.count_nonzero(m.counts) / m.counts.size)
    return Marginals(row_totals, col_totals, density)


def submatrix(m: CoocMatrix, row_idx: Sequence[int], col_idx: Sequence[int]) -> CoocMatrix:
    """Restrict a matrix to the given row and column indices, keeping cell ids."""
    actions = tuple(m.actions[i] for i in row_idx)
    objects = tuple(m.objects[j] for j in col_idx)
    counts = m.counts[np.ix_(row_idx, col_idx)] if row_idx and col_idx else np.zeros(
        (len(row_idx), len(col_idx)), dtype=np.int64
    )
    cell_ids = tuple(
        tuple(m.cell_ids[i][j] for j in col_idx) for i in row_idx
    )
    return CoocMatrix(actions, objects, counts, cell_ids, m.source_digest)


def render_report(m: CoocMatrix) -> str:
    """CSV count report: header row of object labels, one line per action."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([CORNER, *m.objects])
    for i, action in enumerate(m.actions):
        writer.writerow([action, *(int(c) for c in m.counts[i])])
    return buf.getvalue()


def parse_report(text: str) -> tuple[tuple[str, ...], tuple[str, ...], np.ndarray]:
    """Parse a count report back into (actions, objects, counts)."""
    rows = list(csv.reader(io.StringIO(text)))
    rows = [r for r in rows if r]
    if not rows or rows[0][:1] != [CORNER]:
        raise ParseError(f"matrix report must start with the {CORNER!r} cell")
    objects = tuple(rows[0][1:])
    actions = []
    counts = []
    for line_no, row in enumerate(rows[1:], start=2):
        if len(row) != len(objects) + 1:
            raise ParseError(f"expected {len(objects) + 1} cells, got {len(row)}", line_no)
        actions.append(row[0])
        try:
            counts.append([int(c) for c in row[1:]])
        except ValueError as exc:
            raise ParseError(f"non-integer count: {exc}", line_no) from exc
    return tuple(actions), objects, np.asarray(counts, dtype=np.int64)
