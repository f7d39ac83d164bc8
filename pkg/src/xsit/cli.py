"""Command-line pipelines over the toolkit.

Subcommands: ``ingest``, ``cooc``, ``densify``, ``design``, ``run``,
``grid``, plus ``synthworld`` to materialize a synthetic world for
end-to-end runs. Every command reads one JSON config file; ``--seed`` and
``--out`` flags override the config. All randomness flows from the config
seed, so reruns produce byte-identical outputs. Output files are written
via a temporary name and renamed, so a failing command never leaves a
partial file behind.

Config keys (all sections optional unless a command needs them)::

    {
      "inventory": "path.csv",
      "inventory_format": "delimited",        # or "record-lines"
      "features": "features.csv",             # linear / external learners
      "out": "outdir",
      "densify": {"min_object_total": 100, "cell_floor": 15,
                  "action_nonfloor_frac": 0.4, "object_nonfloor_frac": 0.8,
                  "min_cell": 10},
      "design": {"num_common": 3, "num_unique_per_action": 0,
                 "total_train": 375, "actions": ["act0"],
                 "unseen_reserve": ["obj20"], "seed": 0},
      "trials": {"T": 10, "learner": "memorizer", "lr": 0.5, "epochs": 10000},
      "grid": {"c_values": [1, 3], "u_values": [0], "N_values": [375]},
      "synthworld": {"num_actions": 5, "num_objects": 30,
                     "instances_per_cell": 100, "noise_sigma": 0.5, "seed": 0}
    }

Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 data or
design error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .cooc import build_cooc, render_report
from .densify import DensifyConfig, densify, densify_summary
from .design import DesignSpec, assign_roles, sample_training_set
from .errors import ConfigError, XsitError
from .inventory import parse_inventory, serialize_inventory, validate_inventory
from .simlearner import (
    FeatureTable,
    LinearHyper,
    SynthWorldConfig,
    generate_world,
    make_linear_learner,
    memorizer_learner,
)
from .splits import TestType, generate_splits
from .trials import (
    GridAxes,
    GridEntry,
    make_external_learner,
    plot_csv,
    results_file_payload,
    run_grid,
    run_trials,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_DATA = 4

_TOP_KEYS = {"inventory", "inventory_format", "features", "out",
             "densify", "design", "trials", "grid", "synthworld"}


def _load_config(path: str | None) -> dict:
    if path is None:
        raise ConfigError("--config is required")
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        config = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(config, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(config) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config key {sorted(unknown)[0]!r}")
    return config


def _section(config: dict, name: str, known: set[str]) -> dict:
    section = config.get(name, {})
    if not isinstance(section, dict):
        raise ConfigError(f"config section {name!r} must be an object")
    unknown = set(section) - known
    if unknown:
        raise ConfigError(f"unknown key {sorted(unknown)[0]!r} in config section {name!r}")
    return section


def _out_dir(config: dict, args) -> Path:
    out = args.out or config.get("out")
    if not out:
        raise ConfigError("no output directory: set 'out' in the config or pass --out")
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _write_atomic_bytes(path: Path, data: bytes) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)


def _load_inventory(config: dict):
    path = config.get("inventory")
    if not path:
        raise ConfigError("config key 'inventory' is required for this command")
    fmt = config.get("inventory_format", "delimited")
    if fmt not in ("delimited", "record-lines"):
        raise ConfigError(f"unknown inventory_format {fmt!r}")
    with open(path, "rb") as f:
        inv = parse_inventory(f, fmt)
    violations = validate_inventory(inv)
    if violations:
        raise XsitError("invalid inventory: " + "; ".join(violations[:5]))
    return inv


def _densify_config(config: dict) -> DensifyConfig | None:
    if "densify" not in config:
        return None
    section = _section(config, "densify", {
        "min_object_total", "cell_floor", "action_nonfloor_frac",
        "object_nonfloor_frac", "min_cell",
    })
    return DensifyConfig(**section)


def _matrix(config: dict):
    """Inventory -> co-occurrence matrix, densified when configured."""
    inv = _load_inventory(config)
    m = build_cooc(inv)
    cfg = _densify_config(config)
    log = []
    if cfg is not None:
        m, log = densify(m, cfg)
    return inv, m, log


def _design_spec(config: dict, m, args) -> DesignSpec:
    section = _section(config, "design", {
        "num_common", "num_unique_per_action", "total_train",
        "actions", "unseen_reserve", "seed",
    })
    required = {"num_common", "num_unique_per_action", "total_train"}
    missing = required - set(section)
    if missing:
        raise ConfigError(f"config design section is missing {sorted(missing)[0]!r}")
    actions = tuple(section.get("actions") or m.actions)
    reserve = section.get("unseen_reserve")
    seed = args.seed if args.seed is not None else section.get("seed", 0)
    return DesignSpec(
        num_common=section["num_common"],
        num_unique_per_action=section["num_unique_per_action"],
        total_train=section["total_train"],
        actions=actions,
        unseen_reserve=tuple(reserve) if reserve is not None else None,
        seed=seed,
    )


def _trials_section(config: dict) -> tuple[int, str, LinearHyper]:
    section = _section(config, "trials", {"T", "learner", "lr", "epochs"})
    trials = section.get("T", 10)
    learner = section.get("learner", "linear")
    hyper = LinearHyper(
        lr=section.get("lr", LinearHyper.lr),
        epochs=section.get("epochs", LinearHyper.epochs),
    )
    if not isinstance(trials, int) or trials < 1:
        raise ConfigError("trials.T must be a positive integer")
    return trials, learner, hyper


def _features(config: dict) -> FeatureTable | None:
    path = config.get("features")
    if not path:
        return None
    return FeatureTable.read(path)


def _make_learner(selection: str, hyper: LinearHyper, config: dict,
                  inv, features, out: Path):
    if selection == "memorizer":
        return memorizer_learner, features
    if selection == "linear":
        if features is None:
            raise ConfigError("the linear learner needs a 'features' config entry")
        return make_linear_learner(hyper), features
    if selection.startswith("external:"):
        command = selection[len("external:"):]
        if not command.strip():
            raise ConfigError("external learner command is empty")
        features_path = config.get("features")
        if not features_path:
            raise ConfigError("an external learner needs a 'features' config entry")
        protocol_dir = out / "protocol"
        protocol_dir.mkdir(parents=True, exist_ok=True)
        labels_path = protocol_dir / "labels.csv"
        _write_atomic_bytes(labels_path, serialize_inventory(inv, "delimited"))
        learner = make_external_learner(command, features_path, labels_path, protocol_dir)
        return learner, features
    raise ConfigError(
        f"unknown learner {selection!r}; expected memorizer, linear, or external:<command>"
    )


def _report_json(report, trials, learner, base_seed) -> str:
    doc = {
        "config": {
            "c": report.config.c,
            "u": report.config.u,
            "N": report.config.N,
            "num_actions": report.config.num_actions,
            "T": trials,
            "learner": learner,
            "base_seed": base_seed,
        },
        "types": {
            t.value: {
                "mean": agg.mean,
                "ci_half_width": agg.half_width_95,
                "n_trials": agg.n_trials,
            }
            for t in TestType
            if (agg := report.per_type.get(t)) is not None
        },
    }
    return json.dumps(doc, indent=2) + "\n"


def cmd_ingest(args) -> int:
    config = _load_config(args.config)
    out = _out_dir(config, args)
    inv = _load_inventory(config)
    _write_atomic_bytes(out / "inventory.csv", serialize_inventory(inv, "delimited"))
    print(f"{len(inv)} instances, {len(inv.action_vocab)} actions, "
          f"{len(inv.object_vocab)} objects -> {out / 'inventory.csv'}")
    return EXIT_OK


def cmd_cooc(args) -> int:
    config = _load_config(args.config)
    out = _out_dir(config, args)
    inv = _load_inventory(config)
    m = build_cooc(inv)
    _write_atomic(out / "cooc.csv", render_report(m))
    print(f"{m.shape[0]} x {m.shape[1]} matrix, {m.total()} instances "
          f"-> {out / 'cooc.csv'}")
    return EXIT_OK


def cmd_densify(args) -> int:
    config = _load_config(args.config)
    out = _out_dir(config, args)
    inv = _load_inventory(config)
    m = build_cooc(inv)
    cfg = _densify_config(config) or DensifyConfig()
    sub, log = densify(m, cfg)
    _write_atomic(out / "densified.csv", render_report(sub))
    _write_atomic(out / "densify_log.txt", densify_summary(log) + "\n")
    print(f"kept {sub.shape[0]} of {m.shape[0]} actions, "
          f"{sub.shape[1]} of {m.shape[1]} objects; {len(log)} removals")
    return EXIT_OK


def cmd_design(args) -> int:
    config = _load_config(args.config)
    out = _out_dir(config, args)
    inv, m, _ = _matrix(config)
    spec = _design_spec(config, m, args)
    roles = assign_roles(m, spec)
    train = sample_training_set(m, roles, spec)
    manifest = generate_splits(m, roles, train, spec)
    _write_atomic(out / "manifest.json", manifest.to_json())
    print(f"train {len(manifest.train)}, val {len(manifest.val)}, "
          f"test {len(manifest.test)} -> {out / 'manifest.json'}")
    return EXIT_OK


def cmd_run(args) -> int:
    config = _load_config(args.config)
    out = _out_dir(config, args)
    inv, m, _ = _matrix(config)
    spec = _design_spec(config, m, args)
    trials, selection, hyper = _trials_section(config)
    features = _features(config)
    learner, features = _make_learner(selection, hyper, config, inv, features, out)

    trial_dir = out / "trials"

    def persist(manifest, predictions, result):
        d = trial_dir / f"trial_{manifest.seed}"
        d.mkdir(parents=True, exist_ok=True)
        _write_atomic(d / "manifest.json", manifest.to_json())
        _write_atomic(d / "predictions.json", results_file_payload(manifest, predictions))

    report = run_trials(inv, m, spec, learner, trials, features, on_trial=persist)
    _write_atomic(out / "report.json", _report_json(report, trials, selection, spec.seed))
    entry = GridEntry(spec.num_common, spec.num_unique_per_action,
                      spec.total_train, report, None)
    _write_atomic(out / "plot.csv", plot_csv([entry]))
    for t in TestType:
        agg = report.per_type.get(t)
        if agg is not None:
            half = "n/a" if agg.half_width_95 is None else f"{agg.half_width_95:.4f}"
            print(f"{t.value}: mean {agg.mean:.4f} +/- {half} ({agg.n_trials} trials)")
    return EXIT_OK


def cmd_grid(args) -> int:
    config = _load_config(args.config)
    out = _out_dir(config, args)
    inv, m, _ = _matrix(config)
    spec = _design_spec(config, m, args)
    trials, selection, hyper = _trials_section(config)
    features = _features(config)
    learner, features = _make_learner(selection, hyper, config, inv, features, out)
    section = _section(config, "grid", {"c_values", "u_values", "N_values"})
    axes = GridAxes(
        c_values=section.get("c_values"),
        u_values=section.get("u_values"),
        N_values=section.get("N_values"),
    )
    result = run_grid(inv, m, spec, axes, learner, trials, features)
    _write_atomic(out / "grid.csv", plot_csv(result.entries))
    failures = result.failures()
    if failures:
        doc = [{"c": e.c, "u": e.u, "N": e.N, "error": e.error} for e in failures]
        _write_atomic(out / "grid_failures.json", json.dumps(doc, indent=2) + "\n")
        for e in failures:
            print(f"failed cell (c={e.c}, u={e.u}, N={e.N}): {e.error}",
                  file=sys.stderr)
    done = len(result.entries) - len(failures)
    print(f"{done}/{len(result.entries)} grid cells -> {out / 'grid.csv'}")
    return EXIT_OK


def cmd_synthworld(args) -> int:
    config = _load_config(args.config)
    out = _out_dir(config, args)
    section = _section(config, "synthworld", {
        "num_actions", "num_objects", "instances_per_cell", "noise_sigma", "seed",
    })
    if args.seed is not None:
        section = {**section, "seed": args.seed}
    try:
        cfg = SynthWorldConfig(**section)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    inv, features = generate_world(cfg)
    _write_atomic_bytes(out / "world_inventory.csv", serialize_inventory(inv, "delimited"))
    _write_atomic(out / "world_features.csv", features.to_csv())
    print(f"{len(inv)} instances ({cfg.num_actions} actions x {cfg.num_objects} "
          f"objects x {cfg.instances_per_cell}) -> {out}")
    return EXIT_OK


_COMMANDS = {
    "ingest": cmd_ingest,
    "cooc": cmd_cooc,
    "densify": cmd_densify,
    "design": cmd_design,
    "run": cmd_run,
    "grid": cmd_grid,
    "synthworld": cmd_synthworld,
}


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xsit",
        description="Design, split, and evaluate action-object co-occurrence experiments.",
    )
    parser.add_argument("--version", action="version", version=f"xsit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("ingest", "validate an inventory and write its canonical echo"),
        ("cooc", "write the co-occurrence matrix report"),
        ("densify", "select a dense submatrix and write it with its removal log"),
        ("design", "freeze one seeded split manifest"),
        ("run", "run repeated trials and write the aggregate report"),
        ("grid", "sweep (c, u, N) combinations and write plot data"),
        ("synthworld", "generate a synthetic world inventory and feature table"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--out", default=None, help="override the output directory")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error[config]: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error[io]: {exc}", file=sys.stderr)
        return EXIT_IO
    except (XsitError, ValueError, FloatingPointError) as exc:
        print(f"error[data]: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
