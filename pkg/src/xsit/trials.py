"""Repeated seeded trials: scoring, aggregation, sweeps, learner protocol.

A trial is one seeded design + split + learn + evaluate cycle. Trial i of
a run uses seed ``spec.seed + i`` and re-draws object roles under that
seed. Learners are callables ``(manifest, features, truth) -> {id:
action}``; they may run in-process or behind the external file protocol:

* harness writes the manifest JSON and the feature table CSV (plus the
  labeled inventory, which supplies training labels);
* the learner process is invoked as
  ``<command> --manifest M --features F --labels L --out R``;
* it writes ``{"trial_seed": ..., "predictions": [{"id":..., "action":...}]}``.

Aggregation reports the per-type mean accuracy over trials with a 95%
Student-t half-width, computed with exact (order-independent) sums so
reports are identical however trials were interleaved.
"""

from __future__ import annotations

import json
import math
import shlex
import statistics
import subprocess
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Mapping, Sequence

from scipy import stats as scipy_stats

from .cooc import CoocMatrix
from .design import DesignSpec, assign_roles, sample_training_set
from .errors import ScoreError, TrialError, XsitError
from .inventory import Inventory
from .simlearner import FeatureTable
from .splits import SplitManifest, TestType, generate_splits

LearnerFn = Callable[[SplitManifest, "FeatureTable | None", Inventory], Mapping[str, str]]


@dataclass(frozen=True)
class TrialResult:
    """Per-type (correct, total) tallies for one trial."""

    trial_seed: int
    counts: Mapping[TestType, tuple[int, int]]

    def accuracy(self) -> dict[TestType, float]:
        return {t: c / n for t, (c, n) in self.counts.items()}


@dataclass(frozen=True)
class TypeAggregate:
    mean: float
    half_width_95: float | None  # None with a single trial (df = 0)
    n_trials: int


@dataclass(frozen=True)
class ConfigEcho:
    c: int
    u: int
    N: int
    num_actions: int


@dataclass(frozen=True)
class AggregateReport:
    config: ConfigEcho | None
    per_type: Mapping[TestType, TypeAggregate]


@dataclass(frozen=True)
class GridAxes:
    """Sweep values; None holds an axis at the base spec's value."""

    c_values: Sequence[int] | None = None
    u_values: Sequence[int] | None = None
    N_values: Sequence[int] | None = None


@dataclass(frozen=True)
class GridEntry:
    c: int
    u: int
    N: int
    report: AggregateReport | None
    error: str | None


@dataclass(frozen=True)
class GridResult:
    entries: tuple[GridEntry, ...]

    def failures(self) -> tuple[GridEntry, ...]:
        return tuple(e for e in self.entries if e.error is not None)


def score_predictions(
    manifest: SplitManifest,
    predictions: Mapping[str, str],
    truth: Inventory,
) -> TrialResult:
    """Tally per-type accuracy of predictions over the manifest's test items."""
    tallies: dict[TestType, list[int]] = {}
    for iid, ttype in manifest.test:
        if iid not in predictions:
            raise ScoreError(f"missing prediction for test id {iid!r}")
        if iid not in truth:
            raise ScoreError(f"test id {iid!r} is not in the inventory")
        predicted = predictions[iid]
        if predicted not in truth.action_vocab:
            raise ScoreError(f"prediction {predicted!r} is not a known action label")
        correct, total = tallies.setdefault(ttype, [0, 0])
        tallies[ttype][1] = total + 1
        if predicted == truth.by_id(iid).action:
            tallies[ttype][0] = correct + 1
    return TrialResult(
        manifest.seed, {t: (c, n) for t, (c, n) in tallies.items()}
    )


def aggregate(
    results: Sequence[TrialResult],
    config: ConfigEcho | None = None,
) -> AggregateReport:
    """Mean and 95% t-interval half-width per test type across trials.

    All results must expose the same set of types. Means use exact
    rational summation, so trial order cannot change the report. The
    half-width is t(0.975, n-1) * s / sqrt(n), zero when the sample
    variance is zero and absent (None) for a single trial.
    """
    if not results:
        raise ValueError("no trial results to aggregate")
    types = set(results[0].counts)
    for r in results[1:]:
        if set(r.counts) != types:
            raise ValueError(
                f"trial {r.trial_seed} has test types "
                f"{sorted(t.value for t in r.counts)}, expected "
                f"{sorted(t.value for t in types)}"
            )
    per_type: dict[TestType, TypeAggregate] = {}
    n = len(results)
    for t in TestType:
        if t not in types:
            continue
        accs = [r.counts[t][0] / r.counts[t][1] for r in results]
        mean = statistics.mean(accs)
        if n == 1:
            half = None
        else:
            s = statistics.stdev(accs)
            if s == 0.0:
                half = 0.0
            else:
                half = float(scipy_stats.t.ppf(0.975, n - 1)) * s / math.sqrt(n)
        per_type[t] = TypeAggregate(mean, half, n)
    return AggregateReport(config, per_type)


def run_trials(
    inv: Inventory,
    m: CoocMatrix,
    spec: DesignSpec,
    learner: LearnerFn,
    trials: int,
    features: FeatureTable | None = None,
    on_trial: Callable[[SplitManifest, Mapping[str, str], TrialResult], None] | None = None,
) -> AggregateReport:
    """Run ``trials`` seeded cycles and aggregate.

    Any failing trial aborts the run (TrialError naming the trial).
    ``on_trial`` observes each completed trial in order, e.g. to persist
    manifests and predictions.
    """
    if trials < 1:
        raise ValueError("trial count must be at least 1")
    results = []
    for i in range(trials):
        trial_spec = replace(spec, seed=spec.seed + i)
        try:
            roles = assign_roles(m, trial_spec)
            train = sample_training_set(m, roles, trial_spec)
            manifest = generate_splits(m, roles, train, trial_spec)
            predictions = learner(manifest, features, inv)
            result = score_predictions(manifest, predictions, inv)
        except (XsitError, ValueError, FloatingPointError) as exc:
            raise TrialError(f"trial {i} (seed {trial_spec.seed}): {exc}") from exc
        results.append(result)
        if on_trial is not None:
            on_trial(manifest, predictions, result)
    echo = ConfigEcho(spec.num_common, spec.num_unique_per_action,
                      spec.total_train, len(spec.actions))
    return aggregate(results, echo)


def run_grid(
    inv: Inventory,
    m: CoocMatrix,
    base_spec: DesignSpec,
    axes: GridAxes,
    learner: LearnerFn,
    trials: int,
    features: FeatureTable | None = None,
) -> GridResult:
    """Sweep (c, u, N) combinations; failed cells are recorded, not fatal."""
    c_values = axes.c_values if axes.c_values is not None else [base_spec.num_common]
    u_values = axes.u_values if axes.u_values is not None else [base_spec.num_unique_per_action]
    n_values = axes.N_values if axes.N_values is not None else [base_spec.total_train]
    entries = []
    for c in c_values:
        for u in u_values:
            for n in n_values:
                spec = replace(base_spec, num_common=c, num_unique_per_action=u,
                               total_train=n)
                try:
                    report = run_trials(inv, m, spec, learner, trials, features)
                    entries.append(GridEntry(c, u, n, report, None))
                except (XsitError, ValueError) as exc:
                    entries.append(GridEntry(c, u, n, None, str(exc)))
    return GridResult(tuple(entries))


PLOT_COLUMNS = "c,u,N,test_type,mean,ci_half_width,n_trials"


def plot_csv(entries: Sequence[GridEntry]) -> str:
    """Plot-data CSV for successful grid entries, one row per test type."""
    lines = [PLOT_COLUMNS]
    for entry in entries:
        if entry.report is None:
            continue
        for t in TestType:
            agg = entry.report.per_type.get(t)
            if agg is None:
                continue
            half = "NA" if agg.half_width_95 is None else f"{agg.half_width_95:.6f}"
            lines.append(
                f"{entry.c},{entry.u},{entry.N},{t.value},{agg.mean:.6f},{half},{agg.n_trials}"
            )
    return "\n".join(lines) + "\n"


def results_file_payload(manifest: SplitManifest, predictions: Mapping[str, str]) -> str:
    """Results-file JSON for a trial, as the external protocol defines it."""
    doc = {
        "trial_seed": manifest.seed,
        "predictions": [{"id": i, "action": predictions[i]} for i in manifest.test_ids()],
    }
    return json.dumps(doc, indent=2) + "\n"


def parse_results_file(text: str) -> tuple[int, dict[str, str]]:
    """Parse a results file into (trial_seed, predictions)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScoreError(f"results file is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "trial_seed" not in doc or "predictions" not in doc:
        raise ScoreError("results file must carry 'trial_seed' and 'predictions'")
    predictions = {}
    for entry in doc["predictions"]:
        if not isinstance(entry, dict) or "id" not in entry or "action" not in entry:
            raise ScoreError("results predictions must be {id, action} objects")
        predictions[entry["id"]] = entry["action"]
    return doc["trial_seed"], predictions


def make_external_learner(
    command: str,
    features_path: Path | str,
    labels_path: Path | str,
    workdir: Path | str,
) -> LearnerFn:
    """Adapter running one external-learner process per trial.

    ``command`` is shell-split and invoked with ``--manifest``,
    ``--features``, ``--labels``, and ``--out`` appended. The feature
    table and labeled inventory must already exist at the given paths.
    """
    argv = shlex.split(command)
    workdir = Path(workdir)

    def learner(manifest: SplitManifest, features, truth) -> dict[str, str]:
        trial_dir = workdir / f"trial_{manifest.seed}"
        trial_dir.mkdir(parents=True, exist_ok=True)
        manifest_path = trial_dir / "manifest.json"
        results_path = trial_dir / "results.json"
        manifest.write(manifest_path)
        proc = subprocess.run(
            [*argv,
             "--manifest", str(manifest_path),
             "--features", str(features_path),
             "--labels", str(labels_path),
             "--out", str(results_path)],
            capture_output=True,
            text=True,
        )
        if proc.returncode != 0:
            tail = proc.stderr.strip().splitlines()[-1] if proc.stderr.strip() else ""
            raise TrialError(
                f"external learner exited with {proc.returncode}: {tail}"
            )
        _, predictions = parse_results_file(results_path.read_text(encoding="utf-8"))
        return predictions

    return learner
