"""Object-role assignment and balanced training-set sampling.

A design fixes which objects are common (paired with every action), which
are unique to a single action, and which are reserved as unseen, then
draws a quota-balanced training sample from the co-occurrence matrix.
All randomness flows from the spec seed; identical inputs give identical
designs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .cooc import CoocMatrix
from .errors import DesignError
from .util import apportion_equal, derive_rng

# mirrors reserving the last third of a 30-object selection for unseen tests
DEFAULT_UNSEEN_COUNT = 10


@dataclass(frozen=True)
class DesignSpec:
    """Design parameters; ``unseen_reserve=None`` reserves the last
    DEFAULT_UNSEEN_COUNT objects of the matrix column order."""

    num_common: int
    num_unique_per_action: int
    total_train: int
    actions: tuple[str, ...]
    unseen_reserve: tuple[str, ...] | None = None
    seed: int = 0

    def __post_init__(self):
        if self.num_common < 0 or self.num_unique_per_action < 0:
            raise DesignError("object counts must be nonnegative")
        if self.num_common + self.num_unique_per_action < 1:
            raise DesignError("need at least one common or unique object per action")
        if self.total_train < 1:
            raise DesignError("total_train must be positive")
        if not self.actions:
            raise DesignError("no actions specified")


@dataclass(frozen=True)
class RoleAssignment:
    common_objects: tuple[str, ...]
    unique_objects: Mapping[str, tuple[str, ...]]  # action -> its unique objects
    unseen_objects: tuple[str, ...]


@dataclass(frozen=True)
class TrainingSample:
    """Chosen instance ids and quotas per (action, object) training cell."""

    chosen: Mapping[tuple[str, str], tuple[str, ...]]
    quotas: Mapping[tuple[str, str], int]
    action_totals: Mapping[str, int]

    def ids(self) -> tuple[str, ...]:
        """All chosen ids, in cell order."""
        return tuple(i for ids in self.chosen.values() for i in ids)


def resolve_unseen_reserve(m: CoocMatrix, spec: DesignSpec) -> tuple[str, ...]:
    """The effective unseen reserve for a spec against a matrix."""
    if spec.unseen_reserve is not None:
        unknown = [o for o in spec.unseen_reserve if o not in m.objects]
        if unknown:
            raise DesignError(f"unseen reserve object {unknown[0]!r} is not in the matrix")
        return tuple(spec.unseen_reserve)
    return tuple(m.objects[-DEFAULT_UNSEEN_COUNT:])


def assign_roles(m: CoocMatrix, spec: DesignSpec) -> RoleAssignment:
    """Draw common and unique objects from the non-reserved pool.

    One seeded shuffle of the pool; the first ``num_common`` entries become
    common, then each action in order takes the next
    ``num_unique_per_action``. A drawn common object must have instances
    with every action; a drawn unique object must have instances with its
    action. Unsupported candidates are an error, not skipped, so designs
    stay honest about what the matrix can support.
    """
    for a in spec.actions:
        if a not in m.actions:
            raise DesignError(f"action {a!r} is not in the matrix")
    reserve = resolve_unseen_reserve(m, spec)
    reserved = set(reserve)
    pool = [o for o in m.objects if o not in reserved]
    need = spec.num_common + spec.num_unique_per_action * len(spec.actions)
    if len(pool) < need:
        raise DesignError(
            f"assignable pool has {len(pool)} objects but the design needs {need}"
        )
    rng = derive_rng(spec.seed, "roles")
    rng.shuffle(pool)
    common = tuple(pool[: spec.num_common])
    for o in common:
        for a in spec.actions:
            if m.count(a, o) == 0:
                raise DesignError(
                    f"common candidate {o!r} has no instances with action {a!r}"
                )
    unique: dict[str, tuple[str, ...]] = {}
    pos = spec.num_common
    for a in spec.actions:
        picked = tuple(pool[pos : pos + spec.num_unique_per_action])
        pos += spec.num_unique_per_action
        for o in picked:
            if m.count(a, o) == 0:
                raise DesignError(
                    f"unique candidate {o!r} has no instances with action {a!r}"
                )
        unique[a] = picked
    return RoleAssignment(common, unique, reserve)


def sample_training_set(
    m: CoocMatrix,
    roles: RoleAssignment,
    spec: DesignSpec,
    spill: bool = False,
) -> TrainingSample:
    """Draw instances without replacement under balanced quotas.

    Per-action budgets split ``total_train`` as evenly as possible (earlier
    actions take the remainder); within an action the budget is apportioned
    over its common-then-unique cells the same way. With ``spill=False`` a
    cell smaller than its quota is an error naming the cell; with
    ``spill=True`` the shortfall moves to the cells with the most remaining
    capacity.
    """
    budgets = apportion_equal(spec.total_train, len(spec.actions))
    rng = derive_rng(spec.seed, "train-sample")
    chosen: dict[tuple[str, str], tuple[str, ...]] = {}
    quotas: dict[tuple[str, str], int] = {}
    totals: dict[str, int] = {}
    for a, budget in zip(spec.actions, budgets):
        cells = tuple(roles.common_objects) + tuple(roles.unique_objects.get(a, ()))
        if not cells:
            raise DesignError(f"action {a!r} has no training cells")
        cell_quotas = apportion_equal(budget, len(cells))
        avail = [m.ids(a, o) for o in cells]
        if spill:
            cell_quotas = _spill(cell_quotas, [len(ids) for ids in avail], a)
        for o, quota, ids in zip(cells, cell_quotas, avail):
            if len(ids) < quota:
                raise DesignError(
                    f"cell ({a!r}, {o!r}) has {len(ids)} instances, quota {quota}"
                )
            picked = list(ids)
            rng.shuffle(picked)
            chosen[(a, o)] = tuple(picked[:quota])
            quotas[(a, o)] = quota
        totals[a] = budget
    return TrainingSample(chosen, quotas, totals)


def _spill(cell_quotas: list[int], capacities: list[int], action: str) -> list[int]:
    """Move quota overflow to the cells with the most remaining capacity."""
    quotas = [min(q, cap) for q, cap in zip(cell_quotas, capacities)]
    residual = sum(cell_quotas) - sum(quotas)
    while residual > 0:
        spare = [(cap - q, -i) for i, (q, cap) in enumerate(zip(quotas, capacities))]
        best, neg_i = max(spare)
        if best <= 0:
            raise DesignError(
                f"action {action!r} budget {sum(cell_quotas)} exceeds its "
                f"cell capacity {sum(capacities)}"
            )
        quotas[-neg_i] += 1
        residual -= 1
    return quotas
