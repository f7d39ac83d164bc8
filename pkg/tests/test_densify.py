"""Dense-submatrix selection: thresholds, the greedy step, and its contract."""

from __future__ import annotations

import itertools
import random

import numpy as np
import pytest

from xsit.cooc import CoocMatrix, build_cooc
from xsit.densify import DensifyConfig, densify, densify_summary
from xsit.errors import DensifyError
from tests.conftest import make_inventory


def matrix_from_counts(counts, prefix="") -> CoocMatrix:
    """Hand-built matrix; cell ids are synthesized to match the counts."""
    counts = np.asarray(counts, dtype=np.int64)
    actions = [f"{prefix}a{i}" for i in range(counts.shape[0])]
    objects = [f"{prefix}o{j}" for j in range(counts.shape[1])]
    cells = {}
    for i, a in enumerate(actions):
        for j, o in enumerate(objects):
            cells[(a, o)] = int(counts[i, j])
    return build_cooc(make_inventory({k: v for k, v in cells.items() if v}))


def counts_map(m: CoocMatrix) -> dict[tuple[str, str], int]:
    return {(a, o): m.count(a, o) for a in m.actions for o in m.objects}


def test_step1_drops_underweight_column():
    # column "key" totals 90 < 100; everything else is comfortable
    inv = make_inventory({
        ("take", "apple"): 40, ("take", "spoon"): 40, ("take", "key"): 30,
        ("cut", "apple"): 40, ("cut", "spoon"): 40, ("cut", "key"): 30,
        ("wipe", "apple"): 40, ("wipe", "spoon"): 40, ("wipe", "key"): 30,
    })
    m = build_cooc(inv)
    sub, log = densify(m)
    assert sub.objects == ("apple", "spoon")
    assert sub.actions == m.actions
    assert [r.label for r in log] == ["key"]
    assert log[0].step == 1


def fixed_point_matrix() -> CoocMatrix:
    """5 x 30 with every cell >= 20 and column totals >= 100: a no-op input."""
    counts = 20 + (7 * np.arange(5)[:, None] + 3 * np.arange(30)[None, :]) % 9
    return matrix_from_counts(counts)


def test_fixed_point_is_noop():
    m = fixed_point_matrix()
    sub, log = densify(m)
    assert log == []
    assert sub.actions == m.actions
    assert sub.objects == m.objects
    assert np.array_equal(sub.counts, m.counts)


def test_step4_tie_breaks_toward_smaller_marginal():
    # steps 1-3 disabled; single violating cell (row 0, col 2) = 5.
    # row 0 and col 2 both have one violation; col 2's total (23) is smaller
    # than row 0's (55), so col 2 goes.
    cfg = DensifyConfig(min_object_total=0, cell_floor=0,
                        action_nonfloor_frac=0, object_nonfloor_frac=0, min_cell=10)
    m = matrix_from_counts([[20, 30, 5], [25, 40, 18]])
    sub, log = densify(m, cfg)
    assert [(r.kind, r.label) for r in log] == [("object", "o2")]
    assert int(sub.counts.min()) >= 10
    # brute-force oracle: the rule must reach a valid result with the
    # minimum number of removals possible on this instance
    assert len(log) == min_removals_to_clean(m, min_cell=10)


def min_removals_to_clean(m: CoocMatrix, min_cell: int) -> int:
    """Smallest number of full rows/columns whose removal clears violations."""
    rows, cols = m.counts.shape
    best = rows + cols
    for r_keep in itertools.product([0, 1], repeat=rows):
        for c_keep in itertools.product([0, 1], repeat=cols):
            if not any(r_keep) or not any(c_keep):
                continue
            ok = all(
                m.counts[i, j] >= min_cell
                for i in range(rows) if r_keep[i]
                for j in range(cols) if c_keep[j]
            )
            if ok:
                removed = r_keep.count(0) + c_keep.count(0)
                best = min(best, removed)
    return best


def test_step2_and_step3_fraction_thresholds_are_exact():
    # 2 of 5 cells at the floor passes a 0.40 threshold exactly
    cfg = DensifyConfig(min_object_total=0, cell_floor=15,
                        action_nonfloor_frac=0.40, object_nonfloor_frac=0, min_cell=0)
    m = matrix_from_counts([[15, 15, 1, 1, 1], [1, 1, 1, 1, 1]])
    sub, log = densify(m, cfg)
    assert sub.actions == ("a0",)
    assert [r.step for r in log] == [2]


def test_steps_apply_to_survivors_only():
    # col o2 totals 25 and dies at step 1; step 2's denominator must not
    # include it, or row a1 (2 of 3 cells at the floor) would die too
    cfg = DensifyConfig(min_object_total=100, cell_floor=15,
                        action_nonfloor_frac=1.0, object_nonfloor_frac=0, min_cell=0)
    m = matrix_from_counts([[60, 85, 20], [60, 15, 5]])
    sub, log = densify(m, cfg)
    assert sub.actions == ("a0", "a1")
    assert sub.objects == ("o0", "o1")


def test_all_rows_removed_is_an_error():
    cfg = DensifyConfig(min_object_total=0, cell_floor=100,
                        action_nonfloor_frac=1, object_nonfloor_frac=0, min_cell=0)
    with pytest.raises(DensifyError, match="step 2"):
        densify(matrix_from_counts([[1, 2], [3, 4]]), cfg)


def test_step4_error_when_everything_violates():
    cfg = DensifyConfig(min_object_total=0, cell_floor=0,
                        action_nonfloor_frac=0, object_nonfloor_frac=0, min_cell=10)
    with pytest.raises(DensifyError, match="step 4"):
        densify(matrix_from_counts([[1, 2], [3, 4]]), cfg)


def random_matrix(rng: random.Random) -> CoocMatrix:
    rows = rng.randint(3, 6)
    cols = rng.randint(4, 10)
    counts = [[rng.randint(0, 45) for _ in range(cols)] for _ in range(rows)]
    return matrix_from_counts(counts)


def test_contract_on_random_matrices():
    """Output cells >= min_cell, subset of input, idempotent."""
    cfg = DensifyConfig(min_object_total=60)
    rng = random.Random(20240817)
    successes = 0
    for _ in range(40):
        m = random_matrix(rng)
        try:
            sub, log = densify(m, cfg)
        except DensifyError:
            continue
        successes += 1
        assert int(sub.counts.min()) >= cfg.min_cell
        original = counts_map(m)
        for pair, count in counts_map(sub).items():
            assert original[pair] == count
        again, log2 = densify(sub, cfg)
        assert again.actions == sub.actions
        assert again.objects == sub.objects
        assert log2 == []
    assert successes >= 10


def test_raising_min_object_total_never_adds_columns():
    rng = random.Random(99)
    for _ in range(25):
        m = random_matrix(rng)
        try:
            low, _ = densify(m, DensifyConfig(min_object_total=50))
            high, _ = densify(m, DensifyConfig(min_object_total=80))
        except DensifyError:
            continue
        assert set(high.objects) <= set(low.objects)


def test_summary_lines():
    assert densify_summary([]) == "no removals"
    m = matrix_from_counts([[20, 30, 5], [25, 40, 18]])
    cfg = DensifyConfig(min_object_total=0, cell_floor=0,
                        action_nonfloor_frac=0, object_nonfloor_frac=0, min_cell=10)
    _, log = densify(m, cfg)
    summary = densify_summary(log)
    assert summary.splitlines() == ["step 4: removed object 'o2' (1 cells < 10)"]
    # several removals come out one per line, in order
    _, log2 = densify(matrix_from_counts([[5, 200], [5, 200], [200, 200]]),
                      DensifyConfig(min_object_total=150, cell_floor=0,
                                    action_nonfloor_frac=0, object_nonfloor_frac=0,
                                    min_cell=10))
    assert len(densify_summary(log2).splitlines()) == len(log2) == len(
        [r for r in log2]
    )
