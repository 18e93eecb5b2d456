"""Trace-semantics decision procedure for leads-to, independent of fixpoints.

Works directly on the labeled transition graph.  A leads-to from ``a`` to
``b`` fails exactly when some state of ``a`` starts a maximal run that never
enters ``b``: a reachable deadlock in the complement of ``b``, or (under
minimal progress) any reachable cycle there, or (under weak fairness) a
reachable strongly connected component every always-enabled event of which
can be taken inside the component.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .events import EventSystem
from .states import StateSet


@dataclass
class Counterexample:
    kind: str  # 'deadlock-path' | 'lasso'
    start: int
    prefix: List[Tuple[str, int]] = field(default_factory=list)
    cycle: List[Tuple[str, int]] = field(default_factory=list)
    fairness_witness: Dict[str, int] = field(default_factory=dict)
    assumption: str = "mp"  # lassos need fairness witnesses only under 'wf'

    def states(self) -> List[int]:
        out = [self.start]
        out += [s for _, s in self.prefix]
        out += [s for _, s in self.cycle]
        return out

    def to_json(self, space=None) -> dict:
        def st(i):
            return space.state_of(i) if space is not None else i

        out = {
            "kind": self.kind,
            "assumption": self.assumption,
            "start": st(self.start),
            "prefix": [{"event": e, "state": st(s)} for e, s in self.prefix],
        }
        if self.kind == "lasso":
            out["cycle"] = [{"event": e, "state": st(s)} for e, s in self.cycle]
            out["fairness_witness"] = dict(self.fairness_witness)
        return out


def _edges_within(sys: EventSystem, allowed_mask: int) -> Dict[int, List[Tuple[str, int]]]:
    """Adjacency (event label, successor) restricted to ``allowed_mask`` nodes."""
    adj: Dict[int, List[Tuple[str, int]]] = {}
    m = allowed_mask
    while m:
        lsb = m & -m
        s = lsb.bit_length() - 1
        m ^= lsb
        out = []
        for e in sys.events:
            image = e.successors(s)
            img = image & allowed_mask
            while img:
                l2 = img & -img
                out.append((e.name, l2.bit_length() - 1))
                img ^= l2
        adj[s] = out
    return adj


def _bfs_tree(adj, sources) -> Dict[int, Optional[Tuple[int, str]]]:
    """Parent pointers (pred state, event) for nodes reachable from sources."""
    parent: Dict[int, Optional[Tuple[int, str]]] = {}
    dq = deque()
    for s in sources:
        if s in adj and s not in parent:
            parent[s] = None
            dq.append(s)
    while dq:
        s = dq.popleft()
        for ev, t in adj[s]:
            if t not in parent:
                parent[t] = (s, ev)
                dq.append(t)
    return parent


def _path_from_root(parent, node) -> Tuple[int, List[Tuple[str, int]]]:
    steps: List[Tuple[str, int]] = []
    cur = node
    while parent[cur] is not None:
        prev, ev = parent[cur]
        steps.append((ev, cur))
        cur = prev
    steps.reverse()
    return cur, steps


def _shortest_cycle_through(adj, node) -> List[Tuple[str, int]]:
    """Shortest closed walk from ``node`` back to itself (edges exist)."""
    # self loop first
    for ev, t in adj[node]:
        if t == node:
            return [(ev, node)]
    parent: Dict[int, Tuple[int, str]] = {}
    dq = deque()
    for ev, t in adj[node]:
        if t not in parent:
            parent[t] = (node, ev)
            dq.append(t)
    best: Optional[int] = None
    while dq:
        s = dq.popleft()
        if s == node:
            best = s
            break
        for ev, t in adj[s]:
            if t not in parent:
                parent[t] = (s, ev)
                dq.append(t)
    assert best is not None, "node is not on a cycle"
    steps: List[Tuple[str, int]] = []
    cur = node
    first = True
    while first or cur != node:
        first = False
        prev, ev = parent[cur]
        steps.append((ev, cur))
        cur = prev
    steps.reverse()
    return steps


def _sccs(adj) -> List[List[int]]:
    """Tarjan's algorithm, iterative, deterministic in ascending node order."""
    index: Dict[int, int] = {}
    low: Dict[int, int] = {}
    on_stack: Dict[int, bool] = {}
    stack: List[int] = []
    sccs: List[List[int]] = []
    counter = [0]

    for root in sorted(adj):
        if root in index:
            continue
        work = [(root, 0)]
        while work:
            node, ei = work[-1]
            if ei == 0:
                index[node] = low[node] = counter[0]
                counter[0] += 1
                stack.append(node)
                on_stack[node] = True
            advanced = False
            edges = adj[node]
            while ei < len(edges):
                t = edges[ei][1]
                ei += 1
                if t not in index:
                    work[-1] = (node, ei)
                    work.append((t, 0))
                    advanced = True
                    break
                if on_stack.get(t):
                    low[node] = min(low[node], index[t])
            if advanced:
                continue
            work.pop()
            if low[node] == index[node]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == node:
                        break
                sccs.append(sorted(comp))
            if work:
                pnode, _ = work[-1]
                low[pnode] = min(low[pnode], low[node])
    return sccs


def oracle_reachable(sys: EventSystem, start: StateSet) -> StateSet:
    """Forward reachability closure by breadth-first search."""
    seen = start.mask
    frontier = deque(start)
    while frontier:
        s = frontier.popleft()
        for e in sys.events:
            img = e.successors(s) & ~seen
            while img:
                lsb = img & -img
                t = lsb.bit_length() - 1
                img ^= lsb
                seen |= lsb
                frontier.append(t)
    return StateSet(sys.space, seen)


def oracle_mp(
    sys: EventSystem, a: StateSet, b: StateSet
) -> Tuple[bool, Optional[Counterexample]]:
    """Trace verdict under minimal progress.

    Fails iff from some start in ``a`` there is a maximal run avoiding ``b``:
    any reachable deadlock or any reachable cycle of the avoid-subgraph.
    """
    avoid = b.complement().mask
    sources = [s for s in a if (avoid >> s) & 1]
    if not sources:
        return True, None
    adj = _edges_within(sys, avoid)
    parent = _bfs_tree(adj, sources)

    deadlocks = sorted(
        s for s in parent if (sys.grd_all.mask >> s) & 1 == 0
    )
    if deadlocks:
        target = min(deadlocks, key=lambda s: (_depth(parent, s), s))
        start, prefix = _path_from_root(parent, target)
        return False, Counterexample("deadlock-path", start, prefix)

    cyclic = set()
    for comp in _sccs({s: adj[s] for s in parent}):
        comp_set = set(comp)
        internal = any(t in comp_set for s in comp for _, t in adj[s])
        if internal:
            cyclic.update(comp)
    if cyclic:
        target = min(cyclic, key=lambda s: (_depth(parent, s), s))
        start, prefix = _path_from_root(parent, target)
        cycle = _shortest_cycle_through(adj, target)
        return False, Counterexample("lasso", start, prefix, cycle)
    return True, None


def oracle_wf(
    sys: EventSystem, a: StateSet, b: StateSet
) -> Tuple[bool, Optional[Counterexample]]:
    """Trace verdict under weak fairness.

    Fails iff from some start in ``a`` the avoid-subgraph reaches a deadlock,
    or a strongly connected component with an internal edge in which every
    event enabled at all of its states can also be taken inside it.
    """
    avoid = b.complement().mask
    sources = [s for s in a if (avoid >> s) & 1]
    if not sources:
        return True, None
    adj = _edges_within(sys, avoid)
    parent = _bfs_tree(adj, sources)

    deadlocks = sorted(
        s for s in parent if (sys.grd_all.mask >> s) & 1 == 0
    )
    if deadlocks:
        target = min(deadlocks, key=lambda s: (_depth(parent, s), s))
        start, prefix = _path_from_root(parent, target)
        return False, Counterexample("deadlock-path", start, prefix, assumption="wf")

    for comp in _sccs({s: adj[s] for s in parent}):
        comp_set = set(comp)
        internal_edges = [
            (s, ev, t) for s in comp for ev, t in adj[s] if t in comp_set
        ]
        if not internal_edges:
            continue
        fair, witness_edges = _fair_component(sys, comp_set, internal_edges)
        if not fair:
            continue
        target = min(comp_set, key=lambda s: (_depth(parent, s), s))
        start, prefix = _path_from_root(parent, target)
        cycle, witness = _fair_cycle(adj, comp_set, target, witness_edges)
        return False, Counterexample(
            "lasso", start, prefix, cycle, witness, assumption="wf"
        )
    return True, None


def _fair_component(sys, comp_set, internal_edges):
    """A component is a fair trap iff every event enabled on all of it has an
    internal edge; returns one such edge per always-enabled event."""
    comp_mask = 0
    for s in comp_set:
        comp_mask |= 1 << s
    witness_edges = {}
    for e in sys.events:
        if comp_mask & ~e.guard.mask == 0:  # enabled at every state of the component
            edge = next(
                ((s, t) for s, ev, t in internal_edges if ev == e.name), None
            )
            if edge is None:
                return False, {}
            witness_edges[e.name] = edge
    return True, witness_edges


def _fair_cycle(adj, comp_set, anchor, witness_edges):
    """A closed walk from ``anchor`` visiting every component state and taking
    every witness edge; the full tour makes 'continuously enabled along the
    cycle' coincide with 'enabled on the whole component'."""
    comp_adj = {
        s: [(ev, t) for ev, t in adj[s] if t in comp_set] for s in comp_set
    }

    def path(u, v) -> List[Tuple[str, int]]:
        if u == v:
            return []
        parent = _bfs_tree(comp_adj, [u])
        _, steps = _path_from_root(parent, v)
        return steps

    cycle: List[Tuple[str, int]] = []
    cur = anchor
    witness: Dict[str, int] = {}
    for name in sorted(witness_edges):
        s, t = witness_edges[name]
        cycle += path(cur, s)
        witness[name] = len(cycle)
        cycle.append((name, t))
        cur = t
    for w in sorted(comp_set):
        if w != cur:
            cycle += path(cur, w)
            cur = w
    cycle += path(cur, anchor)
    return cycle, witness


def _depth(parent, node) -> int:
    d = 0
    cur = node
    while parent[cur] is not None:
        cur = parent[cur][0]
        d += 1
    return d


def validate_counterexample(
    sys: EventSystem, cx: Counterexample, b: StateSet
) -> bool:
    """Re-check a counterexample against its own structural invariants."""
    states = cx.states()
    if any(s in b for s in states):
        return False
    cur = cx.start
    for ev, t in cx.prefix + cx.cycle:
        e = sys.event(ev)
        if (e.successors(cur) >> t) & 1 == 0:
            return False
        cur = t
    if cx.kind == "deadlock-path":
        last = states[-1]
        return last not in sys.grd_all
    if cx.kind == "lasso":
        if not cx.cycle:
            return False
        knot = cx.prefix[-1][1] if cx.prefix else cx.start
        if cx.cycle[-1][1] != knot:
            return False
        if cx.assumption == "wf":
            cycle_states = {knot} | {s for _, s in cx.cycle}
            for e in sys.events:
                if all(s in e.guard for s in cycle_states):
                    idx = cx.fairness_witness.get(e.name)
                    if idx is None or not (0 <= idx < len(cx.cycle)):
                        return False
                    if cx.cycle[idx][0] != e.name:
                        return False
        return True
    return False
