"""Exact max-flow / min-cut on finite networks and mundane path decomposition."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from .core import (ZERO, CutWitness, DomainError, FlowError, Network, cut_witness,
                   flow_value, validate_flow)


class DecompositionError(FlowError):
    def __init__(self, msg, cycle=None):
        super().__init__(msg)
        self.cycle = cycle


def _scale(net: Network) -> int:
    return math.lcm(1, *(e.cap.denominator for e in net.edges))


def _augmenting_path(net, flow, cap, start):
    """BFS over the residual graph; out-arcs before in-arcs, each sorted by edge id."""
    prev = {v: None for v in start}
    queue = deque(start)
    while queue:
        v = queue.popleft()
        for e in net.out_edges(v):
            if e.ter not in prev and cap[e.id] - flow[e.id] > 0:
                prev[e.ter] = (e, +1)
                queue.append(e.ter)
        for e in net.in_edges(v):
            if e.init not in prev and flow[e.id] > 0:
                prev[e.init] = (e, -1)
                queue.append(e.init)
    return prev


def max_flow(net: Network) -> dict:
    """Edmonds-Karp on integer-scaled capacities; deterministic."""
    L = _scale(net)
    cap = {e.id: int(e.cap * L) for e in net.edges}
    flow = {e.id: 0 for e in net.edges}
    s, t = net.source, net.sink
    while True:
        prev = _augmenting_path(net, flow, cap, [s])
        if t not in prev:
            break
        path = []
        v = t
        while v != s:
            e, d = prev[v]
            path.append((e, d))
            v = e.init if d > 0 else e.ter
        delta = min(cap[e.id] - flow[e.id] if d > 0 else flow[e.id] for e, d in path)
        for e, d in path:
            flow[e.id] += d * delta
    return {k: Fraction(v, L) for k, v in flow.items()}


def residual_reach(net: Network, f) -> set:
    """Vertices reachable from s along arcs with positive residual capacity."""
    flow = {e.id: f.get(e.id, ZERO) for e in net.edges}
    cap = {e.id: e.cap for e in net.edges}
    return set(_augmenting_path(net, flow, cap, [net.source]))


def min_cut(net: Network, f) -> CutWitness:
    """Source side = residual reachability from s under the maximum flow ``f``."""
    rep = validate_flow(net, f)
    if rep:
        raise DomainError(f"not a flow: {rep}")
    S = residual_reach(net, f)
    if net.sink in S:
        raise DomainError("flow is not maximum: an augmenting path reaches the sink")
    return cut_witness(net, S)


def orthogonal_pair(net: Network):
    f = max_flow(net)
    return f, min_cut(net, f)


@dataclass
class PathDecomposition:
    terms: list = field(default_factory=list)  # (theta, [edge ids])

    def total(self) -> dict:
        out = {}
        for theta, path in self.terms:
            for e in path:
                out[e] = out.get(e, ZERO) + theta
        return out

    def __len__(self):
        return len(self.terms)


def find_cycle(net: Network, support) -> list | None:
    """Edge ids of a directed cycle inside ``support`` (a set of edge ids), or None."""
    colour = {}
    for root in sorted(net.vertices, key=str):
        if root in colour:
            continue
        stack = [(root, iter([e for e in net.out_edges(root) if e.id in support]))]
        colour[root] = 1
        trail = []
        while stack:
            v, it = stack[-1]
            e = next(it, None)
            if e is None:
                colour[v] = 2
                stack.pop()
                if trail:
                    trail.pop()
                continue
            u = e.ter
            if colour.get(u) == 1:
                cyc = [e.id]
                for p in reversed(trail):
                    cyc.append(p.id)
                    if p.init == u:
                        break
                return cyc[::-1]
            if u not in colour:
                colour[u] = 1
                trail.append(e)
                stack.append((u, iter([d for d in net.out_edges(u) if d.id in support])))
    return None


def _first_path(net: Network, g) -> list | None:
    """Lexicographically first s-t path inside supp(g) (edge ids)."""
    dead = set()
    path = []
    onpath = {net.source}

    def dfs(v):
        if v == net.sink:
            return True
        for e in net.out_edges(v):
            if g[e.id] > 0 and e.ter not in dead and e.ter not in onpath:
                path.append(e.id)
                onpath.add(e.ter)
                if dfs(e.ter):
                    return True
                path.pop()
                onpath.discard(e.ter)
        dead.add(v)
        return False

    return path if dfs(net.source) else None


def decompose_mundane(net: Network, f) -> PathDecomposition:
    g = {e.id: f.get(e.id, ZERO) for e in net.edges}
    support = {k for k, v in g.items() if v > 0}
    cyc = find_cycle(net, support)
    if cyc is not None:
        raise DecompositionError(f"support contains a directed cycle: {cyc}", cyc)
    dec = PathDecomposition()
    while True:
        path = _first_path(net, g)
        if path is None:
            break
        theta = min(g[e] for e in path)
        for e in path:
            g[e] -= theta
        dec.terms.append((theta, path))
    left = {k: v for k, v in g.items() if v != 0}
    if left:
        raise DecompositionError(f"flow is not a sum of s-t paths; remainder on {sorted(left)[:5]}")
    return dec


def flow_on(net: Network, f) -> dict:
    """Restrict/extend ``f`` to exactly the edges of ``net`` (missing edges are 0)."""
    return {e.id: f.get(e.id, ZERO) for e in net.edges}


def max_flow_value(net: Network) -> Fraction:
    return flow_value(net, max_flow(net))
