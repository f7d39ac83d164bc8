"""Train/val/test membership with four-way test typing.

After the training draw, the remaining instances of every in-scope cell
are partitioned 80% test / 20% val per cell (largest-remainder rounding,
seeded shuffle). In-scope cells are the trained cells, the unique-object
cells under every other action, and the unseen-reserve cells under every
action. Unseen-reserve instances go wholly to test: they exist purely to
measure generalization, so none are spent on validation.

Test items carry exactly one of four types:

* ``common``       object trained with every action
* ``unique_self``  unique object paired with its training action
* ``unique_other`` unique object paired with a different action
* ``unseen``       reserved object, never trained
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Mapping

from .cooc import CoocMatrix
from .design import DesignSpec, RoleAssignment, TrainingSample
from .errors import SplitError
from .util import apportion, derive_rng

_TEST_WEIGHTS = (Fraction(4, 5), Fraction(1, 5))


class TestType(enum.Enum):
    __test__ = False  # not a pytest class, despite the name

    COMMON = "common"
    UNIQUE_SELF = "unique_self"
    UNIQUE_OTHER = "unique_other"
    UNSEEN = "unseen"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class SplitManifest:
    """Frozen record of one trial's design and membership."""

    seed: int
    num_common: int
    num_unique_per_action: int
    total_train: int
    actions: tuple[str, ...]
    common_objects: tuple[str, ...]
    unique_objects: Mapping[str, tuple[str, ...]]
    unseen_objects: tuple[str, ...]
    inventory_digest: str
    train: tuple[str, ...]
    val: tuple[str, ...]
    test: tuple[tuple[str, TestType], ...]
    warnings: tuple[str, ...] = ()

    def test_ids(self) -> tuple[str, ...]:
        return tuple(i for i, _ in self.test)

    def type_counts(self) -> dict[TestType, int]:
        counts: dict[TestType, int] = {}
        for _, t in self.test:
            counts[t] = counts.get(t, 0) + 1
        return counts

    def to_json(self) -> str:
        doc = {
            "design": {
                "seed": self.seed,
                "c": self.num_common,
                "u": self.num_unique_per_action,
                "N": self.total_train,
                "actions": list(self.actions),
                "common_objects": list(self.common_objects),
                "unique_objects": {a: list(v) for a, v in self.unique_objects.items()},
                "unseen_objects": list(self.unseen_objects),
                "inventory_digest": self.inventory_digest,
            },
            "train": list(self.train),
            "val": list(self.val),
            "test": [{"id": i, "type": t.value} for i, t in self.test],
            "warnings": list(self.warnings),
        }
        return json.dumps(doc, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "SplitManifest":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SplitError(f"manifest is not valid JSON: {exc}") from exc
        for key in ("design", "train", "val", "test"):
            if key not in doc:
                raise SplitError(f"manifest missing top-level key {key!r}")
        design = doc["design"]
        for key in ("seed", "c", "u", "N", "actions", "common_objects",
                    "unique_objects", "unseen_objects", "inventory_digest"):
            if key not in design:
                raise SplitError(f"manifest design missing key {key!r}")
        test = []
        for entry in doc["test"]:
            if not isinstance(entry, dict) or "id" not in entry or "type" not in entry:
                raise SplitError("manifest test entries must be {id, type} objects")
            try:
                test.append((entry["id"], TestType(entry["type"])))
            except ValueError as exc:
                raise SplitError(f"unknown test type {entry['type']!r}") from exc
        return cls(
            seed=design["seed"],
            num_common=design["c"],
            num_unique_per_action=design["u"],
            total_train=design["N"],
            actions=tuple(design["actions"]),
            common_objects=tuple(design["common_objects"]),
            unique_objects={a: tuple(v) for a, v in design["unique_objects"].items()},
            unseen_objects=tuple(design["unseen_objects"]),
            inventory_digest=design["inventory_digest"],
            train=tuple(doc["train"]),
            val=tuple(doc["val"]),
            test=tuple(test),
            warnings=tuple(doc.get("warnings", ())),
        )

    def write(self, path: Path | str) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def read(cls, path: Path | str) -> "SplitManifest":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


def classify_test_type(pair: tuple[str, str], roles: RoleAssignment) -> TestType:
    """Type of a test (action, object) pair under a role assignment."""
    action, obj = pair
    if action not in roles.unique_objects:
        raise SplitError(f"action {action!r} is not part of the design")
    if obj in roles.common_objects:
        return TestType.COMMON
    if obj in roles.unique_objects[action]:
        return TestType.UNIQUE_SELF
    for other, uniques in roles.unique_objects.items():
        if other != action and obj in uniques:
            return TestType.UNIQUE_OTHER
    if obj in roles.unseen_objects:
        return TestType.UNSEEN
    raise SplitError(f"object {obj!r} has no role in this design")


def generate_splits(
    m: CoocMatrix,
    roles: RoleAssignment,
    train: TrainingSample,
    spec: DesignSpec,
) -> SplitManifest:
    """Partition the post-training remainder into val and typed test sets."""
    rng = derive_rng(spec.seed, "splits")
    train_ids: list[str] = []
    test: list[tuple[str, TestType]] = []
    val: list[str] = []

    def split_pool(pool: list[str], ttype: TestType) -> None:
        rng.shuffle(pool)
        n_test, _ = apportion(len(pool), _TEST_WEIGHTS)
        test.extend((i, ttype) for i in pool[:n_test])
        val.extend(pool[n_test:])

    # trained cells: held-out instances become common / unique_self items
    for a in spec.actions:
        for o in tuple(roles.common_objects) + tuple(roles.unique_objects.get(a, ())):
            chosen = train.chosen.get((a, o), ())
            train_ids.extend(chosen)
            taken = set(chosen)
            pool = [i for i in m.ids(a, o) if i not in taken]
            split_pool(pool, classify_test_type((a, o), roles))

    # unique objects under every other action
    for owner in spec.actions:
        for o in roles.unique_objects.get(owner, ()):
            for b in spec.actions:
                if b == owner:
                    continue
                pool = list(m.ids(b, o))
                if pool:
                    split_pool(pool, TestType.UNIQUE_OTHER)

    # unseen-reserve cells go wholly to test
    for a in spec.actions:
        for o in roles.unseen_objects:
            test.extend((i, TestType.UNSEEN) for i in m.ids(a, o))

    present = {t for _, t in test}
    warnings = []
    expectations = [
        (TestType.COMMON, bool(roles.common_objects)),
        (TestType.UNIQUE_SELF, any(roles.unique_objects.values())),
        (TestType.UNIQUE_OTHER, any(roles.unique_objects.values()) and len(spec.actions) > 1),
        (TestType.UNSEEN, bool(roles.unseen_objects)),
    ]
    for ttype, expected in expectations:
        if expected and ttype not in present:
            warnings.append(f"test bucket {ttype.value!r} is empty despite a nonempty role group")

    return SplitManifest(
        seed=spec.seed,
        num_common=spec.num_common,
        num_unique_per_action=spec.num_unique_per_action,
        total_train=spec.total_train,
        actions=tuple(spec.actions),
        common_objects=tuple(roles.common_objects),
        unique_objects={a: tuple(v) for a, v in roles.unique_objects.items()},
        unseen_objects=tuple(roles.unseen_objects),
        inventory_digest=m.source_digest,
        train=tuple(train_ids),
        val=tuple(val),
        test=tuple(test),
        warnings=tuple(warnings),
    )
