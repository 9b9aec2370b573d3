"""Residual networks, flow composition, cleanup, and the two limit procedures.

``attain_sup`` runs the halving iteration that produces flows of value
(1 - 2^-i) * alpha on growing truncations; ``stabilized_min_cut`` runs the
capacity-rounding procedure and reports where the resulting cuts stop
changing inside a fixed window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .core import (ZERO, DomainError, Edge, GenerationError, LazyFamily, Network,
                   ValidationError, flow_value, validate_flow)
from .finite_solver import find_cycle, max_flow, min_cut

REV = "~"


@dataclass(frozen=True)
class ResidualNetwork:
    base: Network
    network: Network  # RES(net, f) with capacities c_R
    pairing: dict  # reverse edge id -> original edge id

    @property
    def forward_caps(self) -> dict:
        return {e.id: self.network.cap(e.id) for e in self.base.edges}

    @property
    def reverse_edges(self) -> dict:
        return {r: (o, self.network.cap(r)) for r, o in self.pairing.items()}


def reverse_network(net: Network) -> Network:
    """Swap source and sink and reverse every edge (ids kept)."""
    return net.reverse_network()


def _check_no_antiparallel(net: Network):
    pairs = {(e.init, e.ter) for e in net.edges}
    for u, v in pairs:
        if (v, u) in pairs:
            raise DomainError(
                f"antiparallel edges between {u!r} and {v!r}; subdivide one of them first")


def residual(net: Network, f) -> ResidualNetwork:
    _check_no_antiparallel(net)
    rep = validate_flow(net, f)
    if rep:
        raise ValidationError(f"not a flow: {rep}")
    skip = {e.id for e in net.out_edges(net.source)} | {e.id for e in net.in_edges(net.sink)}
    edges = []
    pairing = {}
    for e in net.edges:
        fe = f.get(e.id, ZERO)
        edges.append(Edge(e.id, e.init, e.ter, e.cap - fe))
        if e.id not in skip:
            rid = REV + e.id
            edges.append(Edge(rid, e.ter, e.init, fe))
            pairing[rid] = e.id
    res = Network(net.vertices, edges, net.source, net.sink)
    return ResidualNetwork(net, res, pairing)


def oplus(net: Network, f, g, res: ResidualNetwork | None = None) -> dict:
    """h(x, y) = f(x, y) + g(x, y) - g(y, x); checks that h is a flow of value |f| + |g|."""
    if res is None:
        res = residual(net, f)
    rep = validate_flow(res.network, g)
    if rep:
        raise ValidationError(f"not a flow in the residual network: {rep}")
    h = {e.id: f.get(e.id, ZERO) + g.get(e.id, ZERO) - g.get(REV + e.id, ZERO)
         for e in net.edges}
    rep = validate_flow(net, h)
    if rep:
        raise ValidationError(f"composition is not a flow: {rep}")
    assert flow_value(net, h) == flow_value(net, f) + flow_value(res.network, g)
    return h


def cancel_cycles(net: Network, g) -> dict:
    """Subtract circulations until the support is acyclic."""
    h = {e.id: g.get(e.id, ZERO) for e in net.edges}
    while True:
        cyc = find_cycle(net, {k for k, v in h.items() if v > 0})
        if cyc is None:
            return h
        m = min(h[e] for e in cyc)
        for e in cyc:
            h[e] -= m


def cleanup(net: Network, g) -> dict:
    """A flow h <= g with |h| = |g|, acyclic support and d^-_h(x) <= |h| everywhere.

    On a finite network, propagating from s and cancelling circulations
    reduces to removing cycles: what remains is a sum of s-t paths.
    """
    rep = validate_flow(net, g)
    if rep:
        raise ValidationError(f"not a flow: {rep}")
    h = cancel_cycles(net, g)
    # flow not propagated from s cannot survive in an acyclic finite flow
    return h


def residual_flow_of_value(res: ResidualNetwork, delta: Fraction) -> dict:
    """A flow in RES of value exactly ``delta`` (via a capped super-source)."""
    net = res.network
    s2 = ("super-source",)
    extra = Edge("~super", s2, net.source, delta)
    aux = Network(tuple(net.vertices) + (s2,), net.edges + (extra,), s2, net.sink)
    g = max_flow(aux)
    if g["~super"] != delta:
        raise GenerationError(f"residual network cannot carry {delta}")
    return {e.id: g[e.id] for e in net.edges}


def aitken_limit(values) -> Fraction | None:
    """Exact limit of a sequence whose last three terms are exactly geometric.

    Returns the last value for an eventually constant sequence, the Aitken
    delta-squared limit when consecutive differences have a constant ratio,
    and None otherwise.
    """
    vals = [Fraction(v) for v in values]
    if not vals:
        return None
    if len(vals) >= 2 and vals[-1] == vals[-2]:
        return vals[-1]
    if len(vals) < 4:
        return None
    a, b, c, d = vals[-4:]
    d1, d2, d3 = b - a, c - b, d - c
    if d1 == 0 or d2 == 0 or d2 * d2 != d1 * d3:
        return None
    return d - d3 * d3 / (d3 - d2) if d3 != d2 else None


def _distinct(values):
    out = []
    for v in values:
        if not out or out[-1] != v:
            out.append(v)
    return out


def estimate_sup(values, patience: int = 4) -> Fraction | None:
    """Limit of nondecreasing truncation values, or None if not yet evident.

    Accepts either an exactly geometric tail of distinct values (extrapolated
    exactly) or a value repeated over the last ``patience`` radii.
    """
    if len(values) >= patience and len(set(values[-patience:])) == 1:
        return values[-1]
    lim = aitken_limit(_distinct(values))
    if lim is None or lim < values[-1]:
        return None
    return lim


@dataclass
class AttainResult:
    flow: dict
    value: Fraction
    radius: int
    alpha: Fraction
    network: Network
    history: list = field(default_factory=list)  # (i, radius, value)
    truncation_values: list = field(default_factory=list)  # (radius, max-flow value)


def attain_sup(fam: LazyFamily, i_max: int, r_max: int = 30) -> AttainResult:
    """Halving iteration f_i = f_{i-1} (+) k_i on growing delete-mode truncations."""
    if i_max < 1:
        raise DomainError("i_max must be >= 1")
    values = []
    frac = 1 - Fraction(1, 2 ** i_max)

    def value_at(r):
        while len(values) <= r:
            if len(values) > r_max:
                raise GenerationError(f"radius overflow: no truncation up to {r_max} suffices")
            n = fam.truncate(len(values))
            values.append(flow_value(n, max_flow(n)))
        return values[r]

    # grow until the supremum is evident and reachable to within the last target
    r = 0
    while True:
        value_at(r)
        alpha = estimate_sup(values)
        if alpha is not None and values[-1] >= frac * alpha:
            break
        r += 1
    history = []
    radius = 0
    net = fam.truncate(radius)
    f = net.zero_flow()
    for i in range(1, i_max + 1):
        target = (1 - Fraction(1, 2 ** i)) * alpha
        while value_at(radius) < target:
            radius += 1
        net = fam.truncate(radius)
        f = {e.id: f.get(e.id, ZERO) for e in net.edges}
        res = residual(net, f)
        delta = target - flow_value(net, f)
        g = residual_flow_of_value(res, delta)
        k = cleanup(res.network, g)
        f = oplus(net, f, k, res)
        history.append((i, radius, flow_value(net, f)))
    return AttainResult(f, flow_value(net, f), radius, alpha, net, history,
                        list(enumerate(values)))


def round_down(c: Fraction, i: int) -> Fraction:
    scale = 10 ** i
    return Fraction(math.floor(c * scale), scale)


@dataclass
class StabilizedCut:
    edges: frozenset
    capacity: Fraction
    stabilized_at: int | None
    rounds: list = field(default_factory=list)  # (i, radius, window cut ids, rounded value)
    side: frozenset = frozenset()
    network: Network | None = None


def stabilized_min_cut(fam: LazyFamily, i_max: int, mode: str = "delete",
                       r0: int | None = None) -> StabilizedCut:
    """Rounded-capacity orthogonal pairs on growing truncations r(i) = r0 + i."""
    if i_max < 1:
        raise DomainError("i_max must be >= 1")
    if r0 is None:
        r0 = fam.core_length
    window = {e.id for e in fam.ball_edges(r0 + 1)}
    rounds = []
    cut = None
    net = None
    for i in range(1, i_max + 1):
        r = r0 + i
        net = fam.truncate(r, mode)
        rounded = net.with_caps({e.id: round_down(e.cap, i) for e in net.edges})
        f = max_flow(rounded)
        cut = min_cut(rounded, f)
        rounds.append((i, r, frozenset(cut.forward_ids & window), flow_value(rounded, f)))
    start = len(rounds) - 1
    while start > 0 and rounds[start - 1][2] == rounds[-1][2]:
        start -= 1
    stab = rounds[start][0] if (len(rounds) - start >= 2 or i_max == 1) else None
    final = cut.forward_ids
    return StabilizedCut(frozenset(final), net.capacity_of(final), stab, rounds,
                         frozenset(cut.side), net)
