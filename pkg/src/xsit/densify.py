"""Greedy dense-submatrix selection.

Four ordered steps, each applied to the survivors of the previous one:

1. keep objects whose column total reaches ``min_object_total``;
2. keep actions where at least ``action_nonfloor_frac`` of the remaining
   cells hold at least ``cell_floor`` instances;
3. keep objects where at least ``object_nonfloor_frac`` of the remaining
   cells hold at least ``cell_floor`` instances;
4. while any cell is below ``min_cell``, remove the action or object with
   the most violating cells and recount.

Step 4 ties break toward the smaller marginal total, then actions before
objects, then the lower index, so the result is deterministic. Fraction
thresholds compare in exact rational arithmetic: a float threshold is read
by its decimal form, so 2 cells of 5 passes a 0.40 threshold exactly.

Step 4 removals can push surviving column totals back under
``min_object_total``, so the four steps repeat until a whole pass removes
nothing. That fixed-point loop is what makes the operation idempotent.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .cooc import CoocMatrix, submatrix
from .errors import DensifyError

FractionLike = Union[float, Fraction]


@dataclass(frozen=True)
class DensifyConfig:
    min_object_total: int = 100
    cell_floor: int = 15
    action_nonfloor_frac: FractionLike = 0.40
    object_nonfloor_frac: FractionLike = 0.80
    min_cell: int = 10


@dataclass(frozen=True)
class Removal:
    """One removed action or object, with the step that removed it."""

    step: int
    kind: str  # "action" or "object"
    label: str
    reason: str


def _as_fraction(x: FractionLike) -> Fraction:
    # Floats are interpreted via their shortest decimal repr: 0.4 -> 2/5.
    return x if isinstance(x, Fraction) else Fraction(str(x))


def densify(m: CoocMatrix, cfg: DensifyConfig = DensifyConfig()) -> tuple[CoocMatrix, list[Removal]]:
    """Apply the four-step heuristic; returns the submatrix and a removal log.

    Raises DensifyError when every action or every object is eliminated.
    Counts are never altered: the output cells are a subset of the input
    cells with identical contents.
    """
    if m.counts.size == 0:
        raise DensifyError("input matrix is empty")
    counts = m.counts
    rows = list(range(len(m.actions)))
    cols = list(range(len(m.objects)))
    log: list[Removal] = []

    def ensure_nonempty(step: int) -> None:
        if not rows:
            raise DensifyError(f"step {step} removed every action")
        if not cols:
            raise DensifyError(f"step {step} removed every object")

    while True:
        before = len(rows) + len(cols)

        # step 1: object totals
        kept = []
        for j in cols:
            total = int(counts[rows, j].sum())
            if total >= cfg.min_object_total:
                kept.append(j)
            else:
                log.append(Removal(1, "object", m.objects[j],
                                   f"column total {total} < {cfg.min_object_total}"))
        cols = kept
        ensure_nonempty(1)

        # step 2: per-action fraction of cells at or above the floor
        thr = _as_fraction(cfg.action_nonfloor_frac)
        kept = []
        for i in rows:
            ok = sum(1 for j in cols if counts[i, j] >= cfg.cell_floor)
            if Fraction(ok, len(cols)) >= thr:
                kept.append(i)
            else:
                log.append(Removal(2, "action", m.actions[i],
                                   f"{ok}/{len(cols)} cells >= {cfg.cell_floor}, below {thr}"))
        rows = kept
        ensure_nonempty(2)

        # step 3: per-object fraction of cells at or above the floor
        thr = _as_fraction(cfg.object_nonfloor_frac)
        kept = []
        for j in cols:
            ok = sum(1 for i in rows if counts[i, j] >= cfg.cell_floor)
            if Fraction(ok, len(rows)) >= thr:
                kept.append(j)
            else:
                log.append(Removal(3, "object", m.objects[j],
                                   f"{ok}/{len(rows)} cells >= {cfg.cell_floor}, below {thr}"))
        cols = kept
        ensure_nonempty(3)

        # step 4: eliminate sub-min_cell cells greedily
        while True:
            row_viol = {i: sum(1 for j in cols if counts[i, j] < cfg.min_cell) for i in rows}
            col_viol = {j: sum(1 for i in rows if counts[i, j] < cfg.min_cell) for j in cols}
            if not any(row_viol.values()) and not any(col_viol.values()):
                break
            candidates = []
            for pos, i in enumerate(rows):
                marginal = int(counts[i, cols].sum())
                candidates.append((-row_viol[i], marginal, 0, pos, "action", i))
            for pos, j in enumerate(cols):
                marginal = int(counts[rows, j].sum())
                candidates.append((-col_viol[j], marginal, 1, pos, "object", j))
            _, _, _, _, kind, idx = min(candidates)
            if kind == "action":
                rows.remove(idx)
                viol, label = row_viol[idx], m.actions[idx]
            else:
                cols.remove(idx)
                viol, label = col_viol[idx], m.objects[idx]
            log.append(Removal(4, kind, label, f"{viol} cells < {cfg.min_cell}"))
            ensure_nonempty(4)

        if len(rows) + len(cols) == before:
            return submatrix(m, rows, cols), log


def densify_summary(log: list[Removal]) -> str:
    """One line per removal, in removal order."""
    if not log:
        return "no removals"
    return "\n".join(
        f"step {r.step}: removed {r.kind} {r.label!r} ({r.reason})" for r in log
    )
