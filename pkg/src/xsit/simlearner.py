"""Synthetic action-object worlds and reference learners.

The world gives every instance a feature vector of one-hot(object)
followed by its action prototype plus Gaussian noise. Object identity is
therefore perfectly predictive of the action wherever an object is tied
to a single action, while the action signal itself is noisy: the minimal
structure in which shortcut memorization competes with generalization.

Two reference learners probe that tension: ``memorizer_learner`` predicts
each object's majority training action (pure shortcut), and
``linear_learner`` trains a multinomial linear classifier by full-batch
gradient descent (see ``xsit._kernels`` for the training loop backends).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Mapping

import numpy as np

from . import _kernels
from .errors import ParseError
from .inventory import Instance, Inventory
from .splits import SplitManifest


@dataclass(frozen=True)
class SynthWorldConfig:
    """World shape and noise; defaults support the stock 375-instance designs."""

    num_actions: int = 5
    num_objects: int = 30
    instances_per_cell: int = 100
    noise_sigma: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.num_actions < 1 or self.num_objects < 1 or self.instances_per_cell < 1:
            raise ValueError("world dimensions must be positive")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be nonnegative")

    @property
    def object_dim(self) -> int:
        return self.num_objects

    @property
    def action_dim(self) -> int:
        return self.num_actions

    @property
    def feature_dim(self) -> int:
        return self.object_dim + self.action_dim


class FeatureTable:
    """Instance-id keyed feature vectors of a fixed length."""

    def __init__(self, vectors: Mapping[str, np.ndarray], dim: int):
        self.dim = dim
        self._vectors = {k: np.asarray(v, dtype=np.float64) for k, v in vectors.items()}
        for k, v in self._vectors.items():
            if v.shape != (dim,):
                raise ValueError(f"feature row {k!r} has shape {v.shape}, expected ({dim},)")

    def __len__(self) -> int:
        return len(self._vectors)

    def __contains__(self, instance_id: str) -> bool:
        return instance_id in self._vectors

    def get(self, instance_id: str) -> np.ndarray:
        return self._vectors[instance_id]

    def ids(self) -> tuple[str, ...]:
        return tuple(self._vectors)

    def matrix(self, instance_ids: Iterable[str]) -> np.ndarray:
        """Stack rows for the given ids, in the given order."""
        return np.stack([self._vectors[i] for i in instance_ids])

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["id", *(f"f{i}" for i in range(self.dim))])
        for key, vec in self._vectors.items():
            writer.writerow([key, *(repr(float(x)) for x in vec)])
        return buf.getvalue()

    def write(self, path: Path | str) -> None:
        Path(path).write_text(self.to_csv(), encoding="utf-8")

    @classmethod
    def from_csv(cls, text: str) -> "FeatureTable":
        rows = list(csv.reader(io.StringIO(text)))
        rows = [r for r in rows if r]
        if not rows or rows[0][:1] != ["id"]:
            raise ParseError("feature table must start with an 'id,f0,...' header")
        dim = len(rows[0]) - 1
        vectors: dict[str, np.ndarray] = {}
        for line_no, row in enumerate(rows[1:], start=2):
            if len(row) != dim + 1:
                raise ParseError(f"expected {dim + 1} fields, got {len(row)}", line_no)
            try:
                vectors[row[0]] = np.array([float(x) for x in row[1:]])
            except ValueError as exc:
                raise ParseError(f"bad float: {exc}", line_no) from exc
        return cls(vectors, dim)

    @classmethod
    def read(cls, path: Path | str) -> "FeatureTable":
        return cls.from_csv(Path(path).read_text(encoding="utf-8"))


def generate_world(cfg: SynthWorldConfig = SynthWorldConfig()) -> tuple[Inventory, FeatureTable]:
    """Generate a uniform world: every (action, object) cell holds
    ``instances_per_cell`` instances; features are one-hot(object) joined
    with the action basis vector plus N(0, noise_sigma^2) noise."""
    rng = np.random.default_rng(cfg.seed)
    actions = [f"act{i}" for i in range(cfg.num_actions)]
    objects = [f"obj{j:02d}" for j in range(cfg.num_objects)]
    instances = []
    vectors: dict[str, np.ndarray] = {}
    noise = rng.normal(
        0.0,
        cfg.noise_sigma,
        size=(cfg.num_actions * cfg.num_objects * cfg.instances_per_cell, cfg.action_dim),
    )
    row = 0
    for i, action in enumerate(actions):
        for j, obj in enumerate(objects):
            for k in range(cfg.instances_per_cell):
                iid = f"{action}_{obj}_{k:03d}"
                vec = np.zeros(cfg.feature_dim)
                vec[j] = 1.0
                vec[cfg.object_dim + i] = 1.0
                vec[cfg.object_dim:] += noise[row]
                instances.append(Instance(iid, action, obj))
                vectors[iid] = vec
                row += 1
    return Inventory.from_instances(instances), FeatureTable(vectors, cfg.feature_dim)


def memorizer_learner(
    manifest: SplitManifest,
    features: FeatureTable | None,
    truth: Inventory,
) -> dict[str, str]:
    """Predict each object's majority training action; shortcut oracle.

    Majority ties and objects never seen in training fall back to the
    lowest-index action of the design, so the behavior is fully
    deterministic. Features are ignored.
    """
    order = {a: i for i, a in enumerate(manifest.actions)}
    votes: dict[str, dict[str, int]] = {}
    for iid in manifest.train:
        inst = truth.by_id(iid)
        votes.setdefault(inst.object, {}).setdefault(inst.action, 0)
        votes[inst.object][inst.action] += 1
    table = {
        obj: min(counts, key=lambda a: (-counts[a], order[a]))
        for obj, counts in votes.items()
    }
    fallback = manifest.actions[0]
    return {
        iid: table.get(truth.by_id(iid).object, fallback)
        for iid in manifest.test_ids()
    }


@dataclass(frozen=True)
class LinearHyper:
    """Gradient-descent hyperparameters, chosen so the reference learner
    trains close to convergence on default-sized designs."""

    lr: float = 0.5
    epochs: int = 10000


def fit_linear(
    manifest: SplitManifest,
    features: FeatureTable,
    truth: Inventory,
    hyper: LinearHyper = LinearHyper(),
) -> tuple[np.ndarray, np.ndarray]:
    """Train on the manifest's train rows; returns (weights, losses)."""
    if not manifest.train:
        raise ValueError("manifest has no training instances")
    order = {a: i for i, a in enumerate(manifest.actions)}
    X = features.matrix(manifest.train)
    y = np.array([order[truth.by_id(i).action] for i in manifest.train], dtype=np.int64)
    return _kernels.train_softmax_gd(X, y, len(manifest.actions), hyper.lr, hyper.epochs)


def linear_learner(
    manifest: SplitManifest,
    features: FeatureTable,
    truth: Inventory,
    hyper: LinearHyper = LinearHyper(),
) -> dict[str, str]:
    """Multinomial linear classifier; argmax prediction, lowest index wins ties."""
    W, _ = fit_linear(manifest, features, truth, hyper)
    test_ids = manifest.test_ids()
    scores = features.matrix(test_ids) @ W
    picks = np.argmax(scores, axis=1)  # first maximum, i.e. lowest action index
    return {iid: manifest.actions[k] for iid, k in zip(test_ids, picks)}


def make_linear_learner(hyper: LinearHyper = LinearHyper()) -> Callable:
    """Bind hyperparameters into the (manifest, features, truth) signature."""

    def learner(manifest, features, truth):
        return linear_learner(manifest, features, truth, hyper)

    return learner
