"""Deterministic RNG streams and integer apportionment helpers."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Sequence


def derive_rng(seed: int, label: str) -> random.Random:
    """Return an independent random stream for (seed, label).

    String seeds are hashed with sha512 (CPython seeding version 2), so the
    stream is stable across runs and platforms for a given seed and label.
    """
    return random.Random(f"{seed}/{label}")


def apportion(total: int, weights: Sequence[Fraction]) -> list[int]:
    """Split ``total`` into integers proportional to ``weights`` (which sum to 1).

    Largest-remainder rule; remainder ties go to the lower index.
    """
    shares = [w * total for w in weights]
    parts = [int(s) for s in shares]
    leftover = total - sum(parts)
    # parts[i] - shares[i] is minus the fractional remainder
    order = sorted(range(len(shares)), key=lambda i: (parts[i] - shares[i], i))
    for i in order[:leftover]:
        parts[i] += 1
    return parts


def apportion_equal(total: int, n: int) -> list[int]:
    """Split ``total`` into ``n`` integers differing by at most one.

    The first ``total % n`` parts receive the extra unit.
    """
    base, rem = divmod(total, n)
    return [base + 1 if i < rem else base for i in range(n)]
