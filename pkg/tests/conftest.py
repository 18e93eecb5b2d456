"""Shared fixtures and random model generators for the test suite."""
import random

import pytest

from fixleads import Event, EventSystem, StateSet, StateSpace, VarDecl
from fixleads.fixtures import (
    cycle3_system,
    idle_system,
    ladder3_system,
    mono3_system,
    twodown_system,
    x_set,
)


@pytest.fixture
def idle():
    return idle_system()


@pytest.fixture
def mono3():
    return mono3_system()


@pytest.fixture
def ladder3():
    return ladder3_system()


@pytest.fixture
def cycle3():
    return cycle3_system()


@pytest.fixture
def twodown():
    return twodown_system()


def xs(sys, *values):
    return x_set(sys, values)


def make_space(n: int) -> StateSpace:
    return StateSpace([VarDecl("x", tuple(range(n)))])


def random_set(rng: random.Random, space: StateSpace) -> StateSet:
    return StateSet(space, rng.getrandbits(space.size) & space.full_mask)


def random_event(rng: random.Random, space: StateSpace, name: str) -> Event:
    n = space.size
    guard = StateSet(space, rng.getrandbits(n) & space.full_mask)
    rel = {}
    for s in guard:
        img = rng.getrandbits(n) & space.full_mask
        if img == 0:
            img = 1 << rng.randrange(n)  # images must be non-empty
        rel[s] = img
    return Event(name, guard, rel)


def random_system(
    rng: random.Random, max_states: int = 10, max_events: int = 4
) -> EventSystem:
    n = rng.randint(1, max_states)
    space = make_space(n)
    events = [
        random_event(rng, space, f"e{i}")
        for i in range(rng.randint(1, max_events))
    ]
    init = StateSet(space, rng.getrandbits(n) & space.full_mask or 1)
    return EventSystem(space, events, init)


def variant_decreasing_system(rng: random.Random, max_states: int = 8):
    """A system whose every event strictly lowers the state index outside 0,
    plus the variant V(x) = x; index 0 is absorbing via a self-loop."""
    from fixleads import VariantFn

    n = rng.randint(2, max_states)
    space = make_space(n)
    events = []
    for i in range(rng.randint(1, 3)):
        guard_mask = 0
        rel = {}
        for s in range(1, n):
            if rng.random() < 0.8:
                guard_mask |= 1 << s
                succs = rng.sample(range(s), k=rng.randint(1, s))
                rel[s] = sum(1 << t for t in succs)
        events.append(Event(f"d{i}", StateSet(space, guard_mask), rel))
    stay = Event("stay", StateSet(space, 1), {0: 1})
    events.append(stay)
    init = space.universe()
    sys_ = EventSystem(space, events, init)
    variant = VariantFn(space, {s: s for s in range(n)}, "down")
    return sys_, variant
