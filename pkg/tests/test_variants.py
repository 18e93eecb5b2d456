"""Variant functions, level sets, and the variant-decrease theorem checker."""
import random

import pytest
from hypothesis import given, settings, strategies as st

from fixleads.mp import mp_step
from fixleads.variants import VariantError, VariantFn, check_variant_theorem

from conftest import make_space, random_set, random_system, xs


def _togo(sys):
    return VariantFn(sys.space, {0: 2, 1: 1, 2: 0}, "togo")


def test_level_sets_mono3(mono3):
    v = _togo(mono3)
    assert sorted(v.level_set(0)) == [2]
    assert sorted(v.level_set(1)) == [1]
    assert sorted(v.level_set(2)) == [0]
    assert v.level_set(5).is_empty()
    assert v.below_set(0).is_empty()
    assert sorted(v.below_set(2)) == [1, 2]
    assert v.max_value == 2


def test_variant_validation():
    sp = make_space(3)
    with pytest.raises(VariantError):
        VariantFn(sp, {0: 0, 1: 1})  # partial
    with pytest.raises(VariantError):
        VariantFn(sp, {0: 0, 1: -1, 2: 0})  # negative


def test_from_function():
    sp = make_space(4)
    v = VariantFn.from_function(sp, lambda st_: 3 - st_["x"])
    assert v.value_at(0) == 3 and v.value_at(3) == 0


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_level_set_identities(seed):
    rng = random.Random(seed)
    sp = make_space(rng.randint(1, 8))
    v = VariantFn(sp, {s: rng.randint(0, 4) for s in range(sp.size)})
    union_levels = sp.empty()
    for n in range(v.max_value + 2):
        below = sp.empty()
        for i in range(n):
            below = below | v.level_set(i)
        assert v.below_set(n).mask == below.mask  # v'(n) = union of lower levels
        union_levels = union_levels | v.level_set(n)
    assert union_levels.is_universe()  # totality
    union_below = sp.empty()
    for i in range(v.max_value + 1):
        union_below = union_below | v.below_set(i + 1)
    assert union_below.mask == union_levels.mask


def test_variant_theorem_mono3(mono3):
    f = lambda x: xs(mono3, 2) | mp_step(mono3, x)
    v = check_variant_theorem(f, mono3.space.universe(), _togo(mono3))
    assert v.holds
    assert mono3.space.universe().is_subset(v.fixpoint)


def test_variant_theorem_empty_p(mono3):
    f = lambda x: xs(mono3, 2) | mp_step(mono3, x)
    assert check_variant_theorem(f, mono3.space.empty(), _togo(mono3)).holds


def test_variant_theorem_ladder3_fails(ladder3):
    f = lambda x: xs(ladder3, 2) | mp_step(ladder3, x)
    v = check_variant_theorem(f, ladder3.space.universe(), _togo(ladder3))
    assert not v.holds
    assert v.details["failing_level"]["n"] == 1


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_variant_theorem_layer_bound(seed):
    """Under the antecedents, the first n+1 levels of p sit inside the
    (n+1)-th iterate of f."""
    rng = random.Random(seed)
    sys_ = random_system(rng, max_states=7)
    sp = sys_.space
    b = random_set(rng, sp)
    f = lambda x: b | mp_step(sys_, x)
    v_fn = VariantFn(sp, {s: rng.randint(0, sp.size) for s in range(sp.size)})
    p = random_set(rng, sp)
    verdict = check_variant_theorem(f, p, v_fn)
    if not verdict.holds:
        return
    trace = verdict.trace
    covered = sp.empty()
    for n in range(v_fn.max_value + 1):
        covered = covered | v_fn.level_set(n)
        iterate = trace.steps[min(n + 1, len(trace.steps) - 1)]
        assert (covered & p).is_subset(iterate)
