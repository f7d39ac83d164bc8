"""Fixtures produced through the harness's public CLI, never its Python API."""

from __future__ import annotations

import json
import subprocess
import sys

import pytest

WORLD = {
    "num_actions": 3,
    "num_objects": 8,
    "instances_per_cell": 12,
    "noise_sigma": 0.5,
    "seed": 6,
}

DESIGN = {
    "num_common": 1,
    "num_unique_per_action": 1,
    "total_train": 24,
    "unseen_reserve": ["obj06", "obj07"],
    "seed": 100,
}


def harness(*args):
    return subprocess.run(
        [sys.executable, "-m", "xsit", *args], capture_output=True, text=True,
    )


def bridge(*args):
    return subprocess.run(
        [sys.executable, "-m", "trainer_bridge", *args], capture_output=True, text=True,
    )


@pytest.fixture(scope="session")
def fixture_dir(tmp_path_factory):
    """Synthetic world plus a frozen manifest, all written by the harness CLI."""
    root = tmp_path_factory.mktemp("protocol")
    config = root / "config.json"
    config.write_text(json.dumps({
        "synthworld": WORLD,
        "inventory": str(root / "world" / "world_inventory.csv"),
        "features": str(root / "world" / "world_features.csv"),
        "design": DESIGN,
        "out": str(root / "world"),
    }))
    proc = harness("synthworld", "--config", str(config))
    assert proc.returncode == 0, proc.stderr
    proc = harness("design", "--config", str(config), "--out", str(root / "design"))
    assert proc.returncode == 0, proc.stderr
    return {
        "root": root,
        "config": config,
        "manifest": root / "design" / "manifest.json",
        "features": root / "world" / "world_features.csv",
        "labels": root / "world" / "world_inventory.csv",
    }
