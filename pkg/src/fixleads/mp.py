"""Liveness checks under minimal progress.

A progress step must succeed no matter which enabled event the scheduler
picks, so the one-step transformer is the whole-system choice restricted to
states where at least one event is enabled.  Leads-to is decided by the
least fixpoint of the target-or-step iteration.
"""
from __future__ import annotations

from typing import Optional

from .events import EventSystem
from .states import StateSet
from .transformers import lfp
from .variants import VariantFn
from .verdicts import SelfCheckDefect, Verdict


def mp_step(sys: EventSystem, r: StateSet) -> StateSet:
    """One iteration step under minimal progress: enabled and all-events-reach-r."""
    return sys.grd_all & sys.apply_all(r)


def ensures_mp(sys: EventSystem, p: StateSet, q: StateSet) -> Verdict:
    ok = (p - q).is_subset(sys.apply_all(q) & sys.grd_all)
    return Verdict(holds=ok, relation="E_m")


def leadsto_mp(sys: EventSystem, a: StateSet, b: StateSet) -> Verdict:
    fix, trace = lfp(lambda x: b | mp_step(sys, x), sys.space)
    return Verdict(holds=a.is_subset(fix), relation="T_m", fixpoint=fix, trace=trace)


def leadsto_mp_si(sys: EventSystem, a: StateSet, b: StateSet) -> Verdict:
    si = sys.strongest_invariant()
    target = si & b
    fix, trace = lfp(lambda x: target | mp_step(sys, x), sys.space)
    v = Verdict(holds=(si & a).is_subset(fix), relation="T_m", fixpoint=fix, trace=trace)
    v.details["si"] = si
    return v


def rule_mp_variant(sys: EventSystem, a: StateSet, b: StateSet, variant: VariantFn) -> Verdict:
    """Variant-decrease rule: sufficient conditions for leads-to under MP.

    Antecedents: outside the target, every event step from ``a`` strictly
    decreases the variant, and ``a`` is both enabled and invariant.  On
    success the conclusion is re-verified against the direct fixpoint; a
    disagreement is a defect, not a verdict.
    """
    pending = a - b
    failing: Optional[dict] = None
    for n in range(variant.max_value + 1):
        lhs = pending & variant.level_set(n)
        rhs = sys.apply_all(variant.below_set(n))
        if not lhs.is_subset(rhs):
            failing = {"n": n, "states": (lhs - rhs).to_json()}
            break
    invariant_ok = pending.is_subset(sys.grd_all & sys.apply_all(a))
    holds = failing is None and invariant_ok
    v = Verdict(holds=holds, relation="rule-mp-variant")
    if failing is not None:
        v.details["failing_level"] = failing
    if not invariant_ok:
        v.details["not_invariant"] = (pending - (sys.grd_all & sys.apply_all(a))).to_json()
    if holds:
        direct = leadsto_mp(sys, a, b)
        if not direct.holds:
            raise SelfCheckDefect("variant rule antecedents passed but leads-to fails")
        v.fixpoint = direct.fixpoint
        v.trace = direct.trace
    return v
