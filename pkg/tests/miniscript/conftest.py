"""Fixtures for fragment tests."""

import random

import pytest

from src.miniscript.ast import MiniscriptNode, after, and_v, andor, older, pk, sha256, v


def _leaf(rng: random.Random) -> MiniscriptNode:
    choice = rng.randrange(4)
    if choice == 0:
        return pk(rng.choice(["A", "B", "C"]))
    if choice == 1:
        return sha256(rng.choice(["H", "G"]))
    if choice == 2:
        return older(rng.randint(1, 20))
    return after(rng.randint(1, 200))


def _condition(rng: random.Random, depth: int) -> MiniscriptNode:
    """B fragment that is not an and_v (an andor condition or a v child)."""
    if depth == 0 or rng.random() < 0.5:
        return _leaf(rng)
    return andor(
        _condition(rng, depth - 1), _base(rng, depth - 1), _base(rng, depth - 1)
    )


def _base(rng: random.Random, depth: int) -> MiniscriptNode:
    if depth == 0 or rng.random() < 0.3:
        return _leaf(rng)
    if rng.random() < 0.5:
        return and_v(v(_condition(rng, depth - 1)), _base(rng, depth - 1))
    return _condition(rng, depth)


@pytest.fixture
def generated_fragments() -> list[MiniscriptNode]:
    """
    Seeded batch of canonical B-typed fragments.

    Canonical means and_v chains nest to the right and never appear as an andor
    condition or directly under v, which is the form lift_script reconstructs.
    """
    rng = random.Random(7)
    return [_base(rng, 4) for _ in range(400)]
