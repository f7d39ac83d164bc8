"""Scoring, t-interval aggregation, repeated runs, grids, external protocol."""

from __future__ import annotations

import json
import math
import sys
import textwrap

import pytest

from xsit.cooc import build_cooc
from xsit.design import DesignSpec
from xsit.errors import ScoreError, TrialError
from xsit.simlearner import SynthWorldConfig, generate_world, memorizer_learner
from xsit.splits import SplitManifest, TestType
from xsit.trials import (
    ConfigEcho,
    GridAxes,
    TrialResult,
    aggregate,
    make_external_learner,
    parse_results_file,
    plot_csv,
    results_file_payload,
    run_grid,
    run_trials,
    score_predictions,
)
from tests.conftest import make_inventory


def manifest_with(test, actions=("a", "b"), train=(), seed=0):
    return SplitManifest(
        seed=seed, num_common=1, num_unique_per_action=0, total_train=len(train),
        actions=tuple(actions), common_objects=("x",),
        unique_objects={a: () for a in actions}, unseen_objects=("z",),
        inventory_digest="sha256:0", train=tuple(train), val=(), test=tuple(test),
    )


@pytest.fixture
def kitchen():
    return make_inventory({("a", "x"): 4, ("b", "x"): 4, ("a", "z"): 2, ("b", "z"): 2})


def test_score_partial_accuracy(kitchen):
    items = [(f"a-x-{k}", TestType.COMMON) for k in range(4)]
    manifest = manifest_with(items)
    predictions = {"a-x-0": "a", "a-x-1": "a", "a-x-2": "a", "a-x-3": "b"}
    result = score_predictions(manifest, predictions, kitchen)
    assert result.counts[TestType.COMMON] == (3, 4)
    assert result.accuracy()[TestType.COMMON] == 0.75


def test_score_all_correct_and_absent_types_omitted(kitchen):
    items = [("a-x-0", TestType.COMMON), ("a-z-0", TestType.UNSEEN)]
    manifest = manifest_with(items)
    result = score_predictions(manifest, {"a-x-0": "a", "a-z-0": "a"}, kitchen)
    assert result.accuracy() == {TestType.COMMON: 1.0, TestType.UNSEEN: 1.0}
    assert TestType.UNIQUE_SELF not in result.counts


def test_score_missing_prediction_names_id(kitchen):
    manifest = manifest_with([("a-x-0", TestType.COMMON), ("a-x-1", TestType.COMMON)])
    with pytest.raises(ScoreError, match="a-x-1"):
        score_predictions(manifest, {"a-x-0": "a"}, kitchen)


def test_score_unknown_action_rejected(kitchen):
    manifest = manifest_with([("a-x-0", TestType.COMMON)])
    with pytest.raises(ScoreError, match="'jump'"):
        score_predictions(manifest, {"a-x-0": "jump"}, kitchen)


def trial(seed, **type_counts):
    counts = {TestType(t): tuple(v) for t, v in type_counts.items()}
    return TrialResult(seed, counts)


def test_aggregate_zero_variance():
    results = [trial(i, common=(2, 4)) for i in range(3)]
    report = aggregate(results)
    agg = report.per_type[TestType.COMMON]
    assert agg.mean == 0.5
    assert agg.half_width_95 == 0.0
    assert agg.n_trials == 3


def test_aggregate_t_interval_two_trials():
    report = aggregate([trial(0, common=(4, 4)), trial(1, common=(0, 4))])
    agg = report.per_type[TestType.COMMON]
    assert agg.mean == 0.5
    # t(0.975, 1) * s / sqrt(2) = 12.706 * 0.70711 / 1.41421
    assert agg.half_width_95 == pytest.approx(6.353, abs=1e-3)


def test_aggregate_single_trial_has_no_interval():
    report = aggregate([trial(0, common=(4, 5))])
    agg = report.per_type[TestType.COMMON]
    assert agg.mean == 0.8
    assert agg.half_width_95 is None


def test_aggregate_rejects_empty_and_mismatched():
    with pytest.raises(ValueError, match="no trial"):
        aggregate([])
    with pytest.raises(ValueError, match="test types"):
        aggregate([trial(0, common=(1, 2)), trial(1, unseen=(1, 2))])


def test_aggregate_order_invariant():
    results = [trial(i, common=(i, 7), unseen=(7 - i, 7)) for i in range(7)]
    fwd = aggregate(results)
    rev = aggregate(list(reversed(results)))
    for t in (TestType.COMMON, TestType.UNSEEN):
        assert fwd.per_type[t].mean == rev.per_type[t].mean
        assert fwd.per_type[t].half_width_95 == rev.per_type[t].half_width_95


WORLD = SynthWorldConfig(num_actions=3, num_objects=8, instances_per_cell=12, seed=6)


def world_setup():
    inv, features = generate_world(WORLD)
    m = build_cooc(inv)
    spec = DesignSpec(0, 1, 24, m.actions,
                      unseen_reserve=tuple(m.objects[-2:]), seed=100)
    return inv, features, m, spec


def test_run_trials_deterministic_and_counted():
    inv, features, m, spec = world_setup()
    seen = []
    report = run_trials(inv, m, spec, memorizer_learner, 4,
                        on_trial=lambda man, pred, res: seen.append(man.seed))
    assert seen == [100, 101, 102, 103]
    again = run_trials(inv, m, spec, memorizer_learner, 4)
    assert report == again
    assert report.per_type[TestType.UNIQUE_SELF].mean == 1.0
    assert report.per_type[TestType.UNIQUE_OTHER].mean == 0.0
    assert report.config == ConfigEcho(0, 1, 24, 3)


def test_run_trials_single_trial_has_no_ci():
    inv, features, m, spec = world_setup()
    report = run_trials(inv, m, spec, memorizer_learner, 1)
    assert all(a.half_width_95 is None for a in report.per_type.values())


def test_trial_counts_match_manifest():
    inv, features, m, spec = world_setup()
    captured = []
    run_trials(inv, m, spec, memorizer_learner, 2,
               on_trial=lambda man, pred, res: captured.append((man, res)))
    for manifest, result in captured:
        expected = manifest.type_counts()
        assert {t: n for t, (_, n) in result.counts.items()} == expected


def test_failing_trial_names_its_index():
    inv, features, m, spec = world_setup()
    bad = DesignSpec(0, 1, 10**6, m.actions, unseen_reserve=(m.objects[-1],), seed=5)
    with pytest.raises(TrialError, match="trial 0 .seed 5."):
        run_trials(inv, m, bad, memorizer_learner, 2)


def test_grid_shapes_and_failures():
    inv, features, m, spec = world_setup()
    axes = GridAxes(c_values=[0, 1], u_values=[1], N_values=[24, 10**6])
    result = run_grid(inv, m, spec, axes, memorizer_learner, 2)
    assert len(result.entries) == 4
    ok = [e for e in result.entries if e.error is None]
    bad = result.failures()
    assert {(e.c, e.N) for e in ok} == {(0, 24), (1, 24)}
    assert {(e.c, e.N) for e in bad} == {(0, 10**6), (1, 10**6)}
    csv_text = plot_csv(result.entries)
    lines = csv_text.strip().splitlines()
    assert lines[0] == "c,u,N,test_type,mean,ci_half_width,n_trials"
    # 2 successful cells x (3 types for c=0, 4 types for c=1)
    assert len(lines) - 1 == 3 + 4


def test_plot_csv_marks_missing_interval():
    inv, features, m, spec = world_setup()
    report = run_trials(inv, m, spec, memorizer_learner, 1)
    from xsit.trials import GridEntry

    text = plot_csv([GridEntry(0, 1, 24, report, None)])
    assert ",NA," in text


def test_results_file_round_trip(kitchen):
    manifest = manifest_with([("a-x-0", TestType.COMMON), ("a-z-0", TestType.UNSEEN)],
                             seed=42)
    payload = results_file_payload(manifest, {"a-x-0": "a", "a-z-0": "b"})
    seed, predictions = parse_results_file(payload)
    assert seed == 42
    assert predictions == {"a-x-0": "a", "a-z-0": "b"}
    with pytest.raises(ScoreError, match="trial_seed"):
        parse_results_file("{}")


ECHO_LEARNER = textwrap.dedent("""
    import argparse, json
    p = argparse.ArgumentParser()
    for flag in ("--manifest", "--features", "--labels", "--out"):
        p.add_argument(flag)
    a = p.parse_args()
    doc = json.load(open(a.manifest))
    labels = {}
    for line in open(a.labels).read().splitlines()[1:]:
        iid, action, obj = line.split(",")[:3]
        labels[iid] = action
    predictions = [{"id": e["id"], "action": labels[e["id"]]} for e in doc["test"]]
    json.dump({"trial_seed": doc["design"]["seed"], "predictions": predictions},
              open(a.out, "w"))
""")


def test_external_learner_protocol(tmp_path):
    inv, features, m, spec = world_setup()
    script = tmp_path / "echo_learner.py"
    script.write_text(ECHO_LEARNER, encoding="utf-8")
    features_path = tmp_path / "features.csv"
    labels_path = tmp_path / "labels.csv"
    features.write(features_path)
    from xsit.inventory import serialize_inventory

    labels_path.write_bytes(serialize_inventory(inv, "delimited"))
    learner = make_external_learner(
        f"{sys.executable} {script}", features_path, labels_path, tmp_path / "work",
    )
    report = run_trials(inv, m, spec, learner, 2)
    # the stub echoes ground truth, so every present type scores 1.0
    assert all(agg.mean == 1.0 for agg in report.per_type.values())
    written = sorted(p.name for p in (tmp_path / "work").glob("trial_*/*"))
    assert written == ["manifest.json", "manifest.json", "results.json", "results.json"]


def test_external_learner_failure_reported(tmp_path):
    inv, features, m, spec = world_setup()
    script = tmp_path / "broken.py"
    script.write_text("import sys; sys.exit(3)", encoding="utf-8")
    learner = make_external_learner(
        f"{sys.executable} {script}", tmp_path / "f.csv", tmp_path / "l.csv",
        tmp_path / "work",
    )
    with pytest.raises(TrialError, match="exited with 3"):
        run_trials(inv, m, spec, learner, 1)
