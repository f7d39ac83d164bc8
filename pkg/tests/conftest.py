"""Shared builders for small inventories and matrices."""

from __future__ import annotations

import pytest

from xsit.cooc import build_cooc
from xsit.inventory import Instance, Inventory


def make_inventory(cells: dict[tuple[str, str], int]) -> Inventory:
    """Inventory with ``cells[(action, object)]`` instances per pair.

    Ids are ``{action}-{object}-{k}``; insertion order follows the dict.
    """
    instances = []
    for (action, obj), count in cells.items():
        for k in range(count):
            instances.append(Instance(f"{action}-{obj}-{k}", action, obj))
    return Inventory.from_instances(instances)


def uniform_inventory(actions: list[str], objects: list[str], per_cell: int) -> Inventory:
    return make_inventory({(a, o): per_cell for a in actions for o in objects})


@pytest.fixture
def small_matrix():
    """3 actions x 4 objects, 20 instances per cell."""
    inv = uniform_inventory(["take", "cut", "wipe"], ["apple", "spoon", "towel", "box"], 20)
    return inv, build_cooc(inv)
