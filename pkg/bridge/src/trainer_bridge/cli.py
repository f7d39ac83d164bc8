"""Bridge entry point: manifest + features + labels in, results file out."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .formats import SchemaError, read_features, read_labels, read_manifest, stack, write_results
from .models import (
    fit_nearest_centroid,
    predict_linear,
    predict_nearest_centroid,
    train_linear,
)


def run(args) -> int:
    manifest = read_manifest(args.manifest)
    features = read_features(args.features)
    labels = read_labels(args.labels)

    missing = [i for i in manifest.train if i not in labels]
    if missing:
        raise SchemaError(f"labels file is missing train id {missing[0]!r}")
    order = {a: k for k, a in enumerate(manifest.actions)}
    unknown = [i for i in manifest.train if labels[i] not in order]
    if unknown:
        raise SchemaError(
            f"train id {unknown[0]!r} carries label {labels[unknown[0]]!r}, "
            "which is not in the manifest's actions"
        )

    X = stack(features, manifest.train, "train")
    y = np.array([order[labels[i]] for i in manifest.train])
    Xt = stack(features, manifest.test_ids, "test")

    if args.model == "linear":
        W = train_linear(X, y, len(order), lr=args.lr, epochs=args.epochs)
        picks = predict_linear(W, Xt)
    else:
        centroids = fit_nearest_centroid(X, y, len(order))
        picks = predict_nearest_centroid(centroids, Xt)

    predictions = {i: manifest.actions[k] for i, k in zip(manifest.test_ids, picks)}
    write_results(args.out, manifest.seed, predictions, manifest.test_ids)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="xsit-bridge",
        description="Train a lightweight classifier on a split manifest and "
                    "write predictions in the results-file protocol.",
    )
    parser.add_argument("--manifest", required=True)
    parser.add_argument("--features", required=True)
    parser.add_argument("--labels", required=True,
                        help="labeled inventory CSV supplying training labels")
    parser.add_argument("--out", required=True)
    parser.add_argument("--model", choices=("linear", "nearest-centroid"),
                        default="linear")
    parser.add_argument("--lr", type=float, default=0.5)
    parser.add_argument("--epochs", type=int, default=10000)
    args = parser.parse_args(argv)
    try:
        return run(args)
    except SchemaError as exc:
        print(f"xsit-bridge: schema error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"xsit-bridge: {exc}", file=sys.stderr)
        return 3
    except (ValueError, FloatingPointError) as exc:
        print(f"xsit-bridge: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
