"""Liveness checks under weak fairness.

A fair step trusts one helpful event: iterate the whole system while the
helpful event stays enabled and guaranteed to reach the target, knowing
fair scheduling must eventually run it.  The loop for a helpful event is a
greatest fixpoint; a fair step unions the loops of all events; leads-to is
again a least fixpoint over fair steps.
"""
from __future__ import annotations

from typing import Dict, Optional

from .events import Event, EventSystem
from .states import StateSet
from .transformers import gfp, lfp
from .variants import VariantFn
from .verdicts import SelfCheckDefect, Verdict


def fair_loop(sys: EventSystem, q: StateSet, g: Event, r: StateSet) -> StateSet:
    """Start states from which looping the system, with ``g`` fairly scheduled
    and guaranteed to reach ``r``, terminates in ``q``."""
    if r.is_universe():
        # at the full postcondition the liberal side is trivial, so the
        # demonic loop coincides with its termination set
        return fair_loop_termination(sys, q, g)
    g_r = g.guard & g.apply(r)
    fix, _ = gfp(lambda x: q | (g_r & sys.apply_all(x)), sys.space)
    return fix


def fair_loop_termination(sys: EventSystem, q: StateSet, g: Event) -> StateSet:
    """Termination set of the fair loop for helpful event ``g``."""
    base = q | g.guard
    blocked = sys.apply_all(q).complement()
    fix, _ = lfp(lambda x: base | (blocked & sys.apply_all(x)), sys.space)
    return fix


def fair_loop_liberal(sys: EventSystem, q: StateSet, g: Event, r: StateSet) -> StateSet:
    """Liberal interpretation of the fair loop (reach ``q`` or run forever)."""
    if r.is_universe():
        return sys.space.universe()
    g_r = g.guard & g.apply(r)
    fix, _ = gfp(lambda x: q | (g_r & sys.apply_all(x)), sys.space)
    return fix


def wf_step(sys: EventSystem, r: StateSet) -> StateSet:
    """One fair iteration step: some event's fair loop reaches ``r``."""
    out = sys.space.empty()
    for g in sys.events:
        out = out | fair_loop(sys, r, g, r)
    return out


def fair_loop_contributions(sys: EventSystem, r: StateSet) -> Dict[str, StateSet]:
    """Per-event fair-loop values at ``r`` (for verdict explainability)."""
    return {g.name: fair_loop(sys, r, g, r) for g in sys.events}


def ensures_wf(sys: EventSystem, g: Event, p: StateSet, q: StateSet) -> Verdict:
    rhs = sys.apply_all(p | q) & g.guard & g.apply(q)
    ok = (p - q).is_subset(rhs)
    v = Verdict(holds=ok, relation="E_w")
    v.details["helpful"] = g.name
    return v


def leadsto_wf(sys: EventSystem, a: StateSet, b: StateSet) -> Verdict:
    fix, trace = lfp(lambda x: b | wf_step(sys, x), sys.space)
    # every iterate stays inside target-or-(enabled and one step from the
    # fixpoint); a violation would unsound the WF-to-MP bridge
    bound = b | (sys.grd_all & sys.apply_all(fix))
    for step in trace.steps:
        if not step.is_subset(bound):
            raise SelfCheckDefect("fair iterate escapes the one-step bound")
    v = Verdict(holds=a.is_subset(fix), relation="T_w", fixpoint=fix, trace=trace)
    v.details["per_event"] = {
        name: s.to_json() for name, s in fair_loop_contributions(sys, fix).items()
    }
    return v


def leadsto_wf_si(sys: EventSystem, a: StateSet, b: StateSet) -> Verdict:
    si = sys.strongest_invariant()
    target = si & b
    fix, trace = lfp(lambda x: target | wf_step(sys, x), sys.space)
    v = Verdict(holds=(si & a).is_subset(fix), relation="T_w", fixpoint=fix, trace=trace)
    v.details["si"] = si
    return v


def rule_wf_to_mp(sys: EventSystem, a: StateSet, b: StateSet, variant: VariantFn) -> Verdict:
    """Bridge rule: a leads-to proved under weak fairness carries over to
    minimal progress when every event decreases the variant outside ``b``."""
    not_b = b.complement()
    failing: Optional[dict] = None
    for n in range(variant.max_value + 1):
        lhs = not_b & variant.level_set(n)
        rhs = sys.apply_all(variant.below_set(n))
        if not lhs.is_subset(rhs):
            failing = {"n": n, "states": (lhs - rhs).to_json()}
            break
    wf_verdict = leadsto_wf(sys, a, b)
    holds = failing is None and wf_verdict.holds
    v = Verdict(holds=holds, relation="rule-wf-to-mp")
    if failing is not None:
        v.details["failing_level"] = failing
    v.details["wf_holds"] = wf_verdict.holds
    if holds:
        from .mp import leadsto_mp

        direct = leadsto_mp(sys, a, b)
        if not direct.holds:
            raise SelfCheckDefect("bridge antecedents passed but MP leads-to fails")
        v.fixpoint = direct.fixpoint
        v.trace = direct.trace
    return v
