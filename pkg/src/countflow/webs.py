"""Weighted webs and wave calculus on finite instances.

A web is a digraph with two distinguished vertex sets A and B and a
nonnegative weight on every vertex.  Currents are edge functions keyed by
``(u, v)`` pairs; webs have no parallel edges.

The non-zero-wave and hindrance searches are exhaustive over essential
separating sets, so they are limited to small webs (``MAX_SEARCH`` vertices).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .core import (ZERO, DomainError, Edge, Network, SizeError, ValidationError,
                   as_fraction, validate_flow)
from .finite_solver import find_cycle, max_flow

MAX_SEARCH = 15


def _key(v):
    return repr(v)


class WeightedWeb:
    """(D, A, B, w) with D a finite simple digraph."""

    def __init__(self, vertices, edges, A, B, w):
        vertices, edges = list(vertices), list(edges)
        self.vertices = tuple(sorted(set(vertices), key=_key))
        vset = set(self.vertices)
        if len(vset) != len(vertices):
            raise DomainError("duplicate vertex")
        self.edges = tuple(sorted({(u, v) for u, v in edges}, key=_key))
        if len(self.edges) != len(edges):
            raise DomainError("parallel edges are not allowed in a web")
        for u, v in self.edges:
            if u not in vset or v not in vset:
                raise DomainError(f"edge {(u, v)!r} has an endpoint outside the web")
            if u == v:
                raise DomainError(f"loop at {u!r}")
        self.A = frozenset(A)
        self.B = frozenset(B)
        if not self.A <= vset or not self.B <= vset:
            raise DomainError("A and B must be vertex subsets")
        self.w = {v: as_fraction(w.get(v, 0)) for v in self.vertices}
        if any(x < 0 for x in self.w.values()):
            raise DomainError("weights must be nonnegative")
        self.succ = {v: [] for v in self.vertices}
        self.pred = {v: [] for v in self.vertices}
        for u, v in self.edges:
            self.succ[u].append(v)
            self.pred[v].append(u)

    @property
    def bipartite(self) -> bool:
        return (set(self.vertices) == self.A | self.B
                and all(u in self.A and v in self.B for u, v in self.edges))

    def zero(self) -> dict:
        return {e: ZERO for e in self.edges}

    def __repr__(self):
        return (f"WeightedWeb({len(self.vertices)} vertices, {len(self.edges)} edges, "
                f"|A|={len(self.A)}, |B|={len(self.B)})")

    def induced(self, keep, A=None, B=None) -> "WeightedWeb":
        keep = set(keep)
        return WeightedWeb(keep, [(u, v) for u, v in self.edges if u in keep and v in keep],
                           (self.A if A is None else A) & keep,
                           (self.B if B is None else B) & keep,
                           {v: self.w[v] for v in keep})


# ---------------------------------------------------------------------------
# degrees and the sets SAT, SINK, TER, KIR


def _val(f, e):
    return f.get(e, ZERO)


def out_deg(web, f, v) -> Fraction:
    return sum((_val(f, (v, u)) for u in web.succ[v]), ZERO)


def in_deg(web, f, v) -> Fraction:
    return sum((_val(f, (u, v)) for u in web.pred[v]), ZERO)


def current_violations(web: WeightedWeb, f) -> list:
    out = []
    extra = set(f) - set(web.edges)
    if extra:
        out.append(f"values on non-edges: {sorted(extra, key=_key)[:3]}")
    for e, x in f.items():
        if x < 0:
            out.append(f"negative value on {e!r}")
    for v in web.vertices:
        dp, dm = out_deg(web, f, v), in_deg(web, f, v)
        if dp > web.w[v]:
            out.append(f"outflow {dp} exceeds weight at {v!r}")
        if dm > web.w[v]:
            out.append(f"inflow {dm} exceeds weight at {v!r}")
        if v not in web.A and dp > dm:
            out.append(f"outflow exceeds inflow at non-A vertex {v!r}")
        if v in web.A and dm != 0:
            out.append(f"inflow into A-vertex {v!r}")
        if v in web.B and dp != 0:
            out.append(f"outflow from B-vertex {v!r}")
    return out


def check_current(web, f):
    bad = current_violations(web, f)
    if bad:
        raise ValidationError("not a current: " + "; ".join(bad))


def is_web_flow(web, f) -> bool:
    if current_violations(web, f):
        return False
    return kir(web, f) >= set(web.vertices) - web.A - web.B


def sat(web, f) -> set:
    return {v for v in web.vertices if v in web.A or in_deg(web, f, v) == web.w[v]}


def sink(web, f) -> set:
    return {v for v in web.vertices if out_deg(web, f, v) == 0}


def ter(web, f) -> set:
    return sat(web, f) & sink(web, f)


def kir(web, f) -> set:
    return {v for v in web.vertices if out_deg(web, f, v) == in_deg(web, f, v)}


# ---------------------------------------------------------------------------
# separation


def _reach(web, start, blocked, backward=False) -> set:
    nbr = web.pred if backward else web.succ
    seen = {v for v in start if v not in blocked}
    queue = deque(seen)
    while queue:
        v = queue.popleft()
        for u in nbr[v]:
            if u not in seen and u not in blocked:
                seen.add(u)
                queue.append(u)
    return seen


def rf(web, S) -> set:
    """Vertices all of whose paths to B meet S (S itself included)."""
    S = set(S)
    return set(web.vertices) - _reach(web, web.B, S, backward=True)


def essential(web, S) -> set:
    """x in S is essential iff some path from x to B avoids S - {x}; zero-length paths count."""
    S = set(S)
    out = set()
    for x in S:
        if x in web.B or _reach(web, [x], S - {x}) & web.B:
            out.add(x)
    return out


def is_separating(web, S) -> bool:
    return web.A <= rf(web, S)


def _witness(web, S):
    S = set(S)
    prev = {a: None for a in sorted(web.A - S, key=_key)}
    queue = deque(prev)
    while queue:
        v = queue.popleft()
        if v in web.B:
            path = [v]
            while prev[path[-1]] is not None:
                path.append(prev[path[-1]])
            return path[::-1]
        for u in web.succ[v]:
            if u not in prev and u not in S:
                prev[u] = v
                queue.append(u)
    return None


@dataclass
class SeparatorReport:
    separating: bool
    essential_subset: frozenset
    rf: frozenset
    rf_strict: frozenset
    witness_path: list | None = None


def separator_report(web, S) -> SeparatorReport:
    S = set(S)
    E = essential(web, S)
    R = rf(web, S)
    path = _witness(web, S)
    return SeparatorReport(path is None, frozenset(E), frozenset(R), frozenset(R - E), path)


def rf_strict(web, S) -> set:
    return rf(web, S) - essential(web, S)


# ---------------------------------------------------------------------------
# waves


def wave_violations(web, f) -> list:
    check_current(web, f)
    T = ter(web, f)
    out = []
    if not is_separating(web, T):
        out.append("TER(f) is not A-B separating")
    R = rf(web, T)
    for v in web.vertices:
        if v not in R and out_deg(web, f, v) > 0:
            out.append(f"positive outflow at {v!r} outside RF(f)")
    return out


def validate_wave(web, f):
    """(is_wave, report on TER(f)); raises ValidationError if f is not a current."""
    bad = wave_violations(web, f)
    return not bad, separator_report(web, ter(web, f))


def is_wave(web, f) -> bool:
    return not wave_violations(web, f)


def _net(vertices, caps, src, snk) -> Network:
    edges = [Edge(f"k{i:05d}", u, v, c) for i, ((u, v), c) in enumerate(caps)]
    return Network(list(vertices), edges, src, snk)


_SRC, _SNK = ("@source",), ("@sink",)


def is_trimming(web, f, g) -> bool:
    """The three trimming conditions of g relative to f.

    Zero-weight vertices are left out of the terminal-set comparison: they are
    always terminal for every current, so the equality cannot hold for them.
    """
    if any(_val(g, e) > _val(f, e) for e in web.edges) or not is_wave(web, g):
        return False
    Tf = ter(web, f)
    K = kir(web, g)
    if not rf_strict(web, Tf) <= K | web.A:
        return False
    pos = {v for v in web.vertices if web.w[v] > 0}
    return (ter(web, g) - web.A) & pos == (essential(web, Tf) - web.A) & pos


def trim(web, f) -> dict:
    """A trimming g <= f: inflow into non-essential roofed vertices is cut back to outflow.

    Computed as a maximum flow from A to the essential terminal set inside the
    support of f; a wave that is already trimmed is returned unchanged.
    """
    bad = wave_violations(web, f)
    if bad:
        raise ValidationError("not a wave: " + "; ".join(bad))
    f = {e: _val(f, e) for e in web.edges}
    if is_trimming(web, f, f):
        return f
    E = essential(web, ter(web, f)) - web.A
    caps = []
    for a in sorted(web.A, key=_key):
        caps.append(((_SRC, a), out_deg(web, f, a)))
    for (u, v) in web.edges:
        if f[(u, v)] > 0 and v not in web.A and u not in E:
            caps.append(((u, v), f[(u, v)]))
    for x in sorted(E, key=_key):
        caps.append(((x, _SNK), web.w[x]))
    net = _net(list(web.vertices) + [_SRC, _SNK], caps, _SRC, _SNK)
    h = max_flow(net)
    g = web.zero()
    for e in net.edges:
        if e.init != _SRC and e.ter != _SNK:
            g[(e.init, e.ter)] = h[e.id]
    return g


def quotient(web, f) -> WeightedWeb:
    bad = wave_violations(web, f)
    if bad:
        raise ValidationError("not a wave: " + "; ".join(bad))
    T = ter(web, f)
    keep = set(web.vertices) - rf_strict(web, T)
    return web.induced(keep, A=frozenset(essential(web, T)), B=web.B)


def compose(web, f, g) -> dict:
    """f plus the restriction of g to the edges of the quotient by f."""
    bad = wave_violations(web, f)
    if bad:
        raise ValidationError("not a wave: " + "; ".join(bad))
    extra = set(g) - set(web.edges)
    if extra:
        raise ValidationError(f"g has values on non-edges: {sorted(extra, key=_key)[:3]}")
    Q = set(quotient(web, f).edges)
    h = {e: _val(f, e) + (_val(g, e) if e in Q else ZERO) for e in web.edges}
    check_current(web, h)
    return h


# ---------------------------------------------------------------------------
# exhaustive searches


def essential_separators(web):
    """Essential A-B separating sets, smallest first, then in vertex order."""
    vs = web.vertices
    for k in range(len(vs) + 1):
        for T in combinations(vs, k):
            T = set(T)
            if is_separating(web, T) and essential(web, T) == T:
                yield T


def _saturating(web, T, supply=None):
    """(value, target, current) for a current inside RF(T) saturating T - A.

    Vertices of T are sinks; vertex weights bound throughput.  ``supply``
    overrides the outflow bound of individual A-vertices.
    """
    supply = supply or {}
    R = rf(web, T)
    inner = R - T
    tgt = [t for t in sorted(T - web.A, key=_key)]
    target = sum((web.w[t] for t in tgt), ZERO)
    big = sum(web.w.values(), ZERO) + 1
    caps = []
    for v in sorted(inner, key=_key):
        if v in web.A:
            caps.append(((_SRC, (v, 1)), supply.get(v, web.w[v])))
        else:
            caps.append((((v, 0), (v, 1)), web.w[v]))
    for t in tgt:
        caps.append((((t, 0), _SNK), web.w[t]))
    for u, v in web.edges:
        if u in inner and v in R and v not in web.A:
            caps.append((((u, 1), (v, 0)), big))
    verts = {_SRC, _SNK}
    for (u, v), _ in caps:
        verts.update((u, v))
    net = _net(sorted(verts, key=_key), caps, _SRC, _SNK)
    h = max_flow(net)
    value = sum((h[e.id] for e in net.edges if e.init == _SRC), ZERO)
    cur = web.zero()
    for e in net.edges:
        if e.init != _SRC and e.ter != _SNK and e.init[1] == 1:
            cur[(e.init[0], e.ter[0])] = h[e.id]
    return value, target, cur


def _guard(web):
    if len(web.vertices) > MAX_SEARCH:
        raise SizeError(f"exhaustive wave search limited to {MAX_SEARCH} vertices")


def _trickle(web, T):
    """A non-zero current inside RF(T) that leaves T untouched, or None."""
    R = rf(web, T)
    inner = R - T
    live = {v for v in inner if web.w[v] > 0}
    for a in sorted(live & web.A, key=_key):
        for v in sorted(web.succ[a], key=_key):
            if v in live and v not in web.A:
                cur = web.zero()
                cur[(a, v)] = min(web.w[a], web.w[v])
                return cur
    inside = live - web.A
    net = _net(sorted(inside, key=_key) + [_SRC, _SNK],
               [((u, v), 1) for u, v in web.edges if u in inside and v in inside],
               _SRC, _SNK)
    cyc = find_cycle(net, {e.id for e in net.edges})
    if cyc is None:
        return None
    em = net.edge_map
    cur = web.zero()
    amount = min(web.w[em[e].init] for e in cyc)
    for e in cyc:
        cur[(em[e].init, em[e].ter)] = amount
    return cur


def find_nonzero_wave(web) -> dict | None:
    """Some non-zero wave, or None if the web has none (exhaustive)."""
    _guard(web)
    for T in essential_separators(web):
        value, target, cur = _saturating(web, T)
        if value < target:
            continue
        if target > 0:
            return cur
        cur = _trickle(web, T)
        if cur is not None:
            return cur
    return None


def max_wave(web, max_rounds=None) -> dict:
    """Grow f := f composed with a non-zero wave of the quotient until none is left."""
    _guard(web)
    f = web.zero()
    rounds = max_rounds if max_rounds is not None else len(web.vertices) + 1
    for _ in range(rounds + 1):
        Q = quotient(web, f)
        g = find_nonzero_wave(Q)
        if g is None:
            return f
        f = compose(web, f, g)
        bad = wave_violations(web, f)
        if bad:
            raise ValidationError("composition left the wave class: " + "; ".join(bad))
    raise SizeError("maximal wave search did not settle")


def zero_wave_hindered(web) -> list:
    """A-vertices hindered by the zero wave."""
    T = ter(web, web.zero())
    E = essential(web, T)
    return sorted((a for a in web.A - E if web.w[a] > 0), key=_key)


def find_hindrance(web, epsilon=ZERO):
    """(wave, a) with a outside the essential terminal set and w(a) - d+(a) > epsilon."""
    _guard(web)
    eps = as_fraction(epsilon)
    if eps < 0:
        raise DomainError("epsilon must be nonnegative")
    for T in essential_separators(web):
        value, target, _ = _saturating(web, T)
        if value < target:
            continue
        for a in sorted(web.A - T, key=_key):
            v0, _, _ = _saturating(web, T, {a: ZERO})
            need = max(ZERO, target - v0)
            if web.w[a] - need > eps:
                _, _, cur = _saturating(web, T, {a: need})
                return cur, a
    return None


def is_loose(web) -> bool:
    return find_nonzero_wave(web) is None and not zero_wave_hindered(web)


def linkage(web) -> dict | None:
    """A web-flow saturating every A-vertex of a bipartite web, or None."""
    if not web.bipartite:
        raise DomainError("linkage needs a bipartite web")
    big = sum(web.w.values(), ZERO) + 1
    caps = []
    left = sorted(web.A, key=_key)
    right = sorted(web.B, key=_key)
    for a in left:
        caps.append(((_SRC, (a, "A")), web.w[a]))
    for u, v in web.edges:
        if u not in web.B and v not in web.A:
            caps.append((((u, "A"), (v, "B")), big))
    for b in right:
        caps.append((((b, "B"), _SNK), web.w[b]))
    verts = [(a, "A") for a in left] + [(b, "B") for b in right] + [_SRC, _SNK]
    net = _net(verts, caps, _SRC, _SNK)
    h = max_flow(net)
    if sum((h[e.id] for e in net.edges if e.init == _SRC), ZERO) < sum((web.w[a] for a in left), ZERO):
        return None
    f = web.zero()
    for e in net.edges:
        if e.init != _SRC and e.ter != _SNK:
            f[(e.init[0], e.ter[0])] = h[e.id]
    return f


# ---------------------------------------------------------------------------
# transformations


def network_to_web(net: Network) -> WeightedWeb:
    """Vertices are edge ids; consecutive edges are joined."""
    edges = []
    for e in net.edges:
        for d in net.out_edges(e.ter):
            edges.append((e.id, d.id))
    return WeightedWeb([e.id for e in net.edges], edges,
                       {e.id for e in net.out_edges(net.source)},
                       {e.id for e in net.in_edges(net.sink)},
                       {e.id: e.cap for e in net.edges})


def web_flow_to_flow(net: Network, f) -> dict:
    web = network_to_web(net)
    if not is_web_flow(web, f):
        raise ValidationError("not a web-flow: " + "; ".join(current_violations(web, f) or
                                                             ["Kirchhoff fails at an inner vertex"]))
    g = {e.id: max(out_deg(web, f, e.id), in_deg(web, f, e.id)) for e in net.edges}
    rep = validate_flow(net, g)
    if rep:
        raise ValidationError(f"back-translation is not a flow: {rep}")
    return g


def web_to_bipartite(web) -> WeightedWeb:
    """v outside B gets a copy (v, 'A'); v outside A gets a copy (v, 'B')."""
    Ap = {(v, "A") for v in web.vertices if v not in web.B}
    Bp = {(v, "B") for v in web.vertices if v not in web.A}
    edges = [((u, "A"), (v, "B")) for u, v in web.edges
             if (u, "A") in Ap and (v, "B") in Bp]
    edges += [((v, "A"), (v, "B")) for v in web.vertices
              if v not in web.A and v not in web.B]
    w = {x: web.w[x[0]] for x in Ap | Bp}
    return WeightedWeb(Ap | Bp, edges, Ap, Bp, w)


def project_separator(web, S) -> set:
    AS = {x[0] for x in S if x[1] == "A"}
    BS = {x[0] for x in S if x[1] == "B"}
    # vertices of A and B at once have no copies but lie in every separating set
    return (AS & BS) | (web.A & AS) | (web.B & BS) | (web.A & web.B)


def project_wave(web, f):
    """(f', S') for a wave f on web_to_bipartite(web); f'(u, v) = f(u_A, v_B)."""
    bip = web_to_bipartite(web)
    bad = wave_violations(bip, f)
    if bad:
        raise ValidationError("not a wave on the bipartite web: " + "; ".join(bad))
    g = {(u, v): _val(f, ((u, "A"), (v, "B"))) for u, v in web.edges}
    bad = wave_violations(web, g)
    if bad:
        raise ValidationError("projection is not a wave: " + "; ".join(bad))
    return g, project_separator(web, ter(bip, f))


def web_minus_current(web, f) -> WeightedWeb:
    """(D, A, B, w - d_f) with d_f the undirected degree d+ + d-."""
    check_current(web, f)
    w = {v: web.w[v] - out_deg(web, f, v) - in_deg(web, f, v) for v in web.vertices}
    if any(x < 0 for x in w.values()):
        raise DomainError("current degree exceeds a weight")
    return WeightedWeb(web.vertices, web.edges, web.A, web.B, w)


def web_minus_function(web, g) -> WeightedWeb:
    w = {v: web.w[v] - as_fraction(g.get(v, 0)) for v in web.vertices}
    if any(x < 0 for x in w.values()):
        raise DomainError("vertex function exceeds a weight")
    return WeightedWeb(web.vertices, web.edges, web.A, web.B, w)
