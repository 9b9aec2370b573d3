"""Exact data model: networks, flows, cuts and lazily generated networks.

All magnitudes are :class:`fractions.Fraction`.  Vertex ids are arbitrary
hashable values (strings in every builtin); edge ids are strings and stay
stable across truncations of a lazy family, so flows computed on different
truncations can be compared edge by edge.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Hashable, Iterable, Mapping

Vertex = Hashable
Flow = dict  # edge id -> Fraction

ZERO = Fraction(0)

_RATIONAL_RE = re.compile(r"^\s*(-?\d+)(?:\s*/\s*(\d+))?\s*$")


class FlowError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(FlowError, ValueError):
    pass


class NetworkError(FlowError, ValueError):
    pass


class ValidationError(FlowError, ValueError):
    pass


class GenerationError(FlowError):
    pass


class SizeError(FlowError):
    pass


def parse_rational(text) -> Fraction:
    """Parse ``"p/q"`` or ``"p"`` (ints and Fractions pass through)."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int) and not isinstance(text, bool):
        return Fraction(text)
    if not isinstance(text, str):
        raise ValueError(f"not a rational: {text!r}")
    m = _RATIONAL_RE.match(text)
    if not m:
        raise ValueError(f"not a rational: {text!r}")
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ValueError(f"zero denominator: {text!r}")
    return Fraction(int(m.group(1)), den)


def format_rational(x) -> str:
    return str(Fraction(x))


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not accepted; use Fraction or 'p/q' strings")
    return parse_rational(x)


@dataclass(frozen=True, order=True)
class Edge:
    id: str
    init: Vertex = field(compare=False)
    ter: Vertex = field(compare=False)
    cap: Fraction = field(compare=False, default=ZERO)


@dataclass(frozen=True)
class Network:
    vertices: tuple
    edges: tuple
    source: Vertex
    sink: Vertex

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        fixed = []
        for e in self.edges:
            if not isinstance(e, Edge):
                e = Edge(*e)
            cap = as_fraction(e.cap)
            if cap < 0:
                raise NetworkError(f"negative capacity on {e.id}")
            fixed.append(Edge(e.id, e.init, e.ter, cap))
        object.__setattr__(self, "edges", tuple(fixed))
        vset = set(self.vertices)
        if len(vset) != len(self.vertices):
            raise NetworkError("duplicate vertex id")
        if self.source not in vset or self.sink not in vset:
            raise NetworkError("source and sink must be vertices")
        if self.source == self.sink:
            raise NetworkError("source equals sink")
        seen = set()
        for e in self.edges:
            if e.id in seen:
                raise NetworkError(f"duplicate edge id {e.id}")
            seen.add(e.id)
            if e.init not in vset or e.ter not in vset:
                raise NetworkError(f"edge {e.id} has an endpoint outside the vertex set")
            if e.init == e.ter:
                raise NetworkError(f"loop edge {e.id} at {e.init!r}")
            if e.ter == self.source:
                raise NetworkError(f"IN(s) must be empty: edge {e.id} enters the source")
            if e.init == self.sink:
                raise NetworkError(f"OUT(t) must be empty: edge {e.id} leaves the sink")

    @cached_property
    def edge_map(self) -> dict:
        return {e.id: e for e in self.edges}

    @cached_property
    def _adjacency(self):
        out = {v: [] for v in self.vertices}
        inn = {v: [] for v in self.vertices}
        for e in sorted(self.edges):
            out[e.init].append(e)
            inn[e.ter].append(e)
        return out, inn

    def out_edges(self, v) -> list:
        return self._adjacency[0][v]

    def in_edges(self, v) -> list:
        return self._adjacency[1][v]

    def cap(self, eid) -> Fraction:
        return self.edge_map[eid].cap

    def zero_flow(self) -> Flow:
        return {e.id: ZERO for e in self.edges}

    def capacity_of(self, eids: Iterable[str]) -> Fraction:
        return sum((self.edge_map[i].cap for i in eids), ZERO)

    def with_caps(self, caps: Mapping[str, Fraction]) -> "Network":
        return Network(self.vertices,
                       [Edge(e.id, e.init, e.ter, caps.get(e.id, e.cap)) for e in self.edges],
                       self.source, self.sink)

    def reverse_network(self) -> "Network":
        """Same graph with every edge reversed and source/sink swapped."""
        return Network(self.vertices,
                       [Edge(e.id, e.ter, e.init, e.cap) for e in self.edges],
                       self.sink, self.source)


def _fval(f: Mapping, eid) -> Fraction:
    return f.get(eid, ZERO)


def _check_domain(net: Network, f: Mapping):
    extra = set(f) - set(net.edge_map)
    if extra:
        raise DomainError(f"flow defined on edges outside the network: {sorted(extra)[:5]}")


def degrees(net: Network, f: Mapping, v) -> tuple:
    """Return ``(d+, d-, d+ - d-)`` of ``f`` at vertex ``v``."""
    if v not in net._adjacency[0]:
        raise DomainError(f"unknown vertex {v!r}")
    dplus = sum((_fval(f, e.id) for e in net.out_edges(v)), ZERO)
    dminus = sum((_fval(f, e.id) for e in net.in_edges(v)), ZERO)
    return dplus, dminus, dplus - dminus


def flow_value(net: Network, f: Mapping) -> Fraction:
    _check_domain(net, f)
    return degrees(net, f, net.source)[0]


@dataclass
class FlowReport:
    capacity_violations: list = field(default_factory=list)  # (edge id, value, cap)
    kirchhoff_violations: list = field(default_factory=list)  # (vertex, net degree)

    def __bool__(self):
        # truthy when there is something to report
        return bool(self.capacity_violations or self.kirchhoff_violations)

    @property
    def ok(self) -> bool:
        return not self


def validate_flow(net: Network, f: Mapping) -> FlowReport:
    _check_domain(net, f)
    rep = FlowReport()
    for e in net.edges:
        x = _fval(f, e.id)
        if x < 0 or x > e.cap:
            rep.capacity_violations.append((e.id, x, e.cap))
    for v in net.vertices:
        if v in (net.source, net.sink):
            continue
        d = degrees(net, f, v)[2]
        if d != 0:
            rep.kirchhoff_violations.append((v, d))
    return rep


@dataclass(frozen=True)
class CutWitness:
    """A side set S together with its two directed boundaries.

    ``side`` may be only the part of S inside an inspected window when S is
    infinite; ``forward``/``backward`` then list the window's boundary edges
    and the optional closed-form totals cover the rest.  A closed-form total
    of ``None`` with ``finite=False`` means the sum diverges.
    """

    side: frozenset
    forward: frozenset
    backward: frozenset
    s_in_side: bool
    t_in_side: bool
    finite: bool = True
    name: str = ""
    forward_capacity: Fraction | None = None
    backward_capacity: Fraction | None = None

    @property
    def is_st_cut(self) -> bool:
        return self.s_in_side and not self.t_in_side

    @property
    def forward_ids(self) -> frozenset:
        return frozenset(e.id for e in self.forward)

    @property
    def backward_ids(self) -> frozenset:
        return frozenset(e.id for e in self.backward)

    def capacity(self) -> Fraction | None:
        """Forward capacity; ``None`` when it diverges."""
        if self.forward_capacity is not None:
            return self.forward_capacity
        if not self.finite:
            return None
        return sum((e.cap for e in self.forward), ZERO)

    def reverse_capacity(self) -> Fraction | None:
        if self.backward_capacity is not None:
            return self.backward_capacity
        if not self.finite:
            return None
        return sum((e.cap for e in self.backward), ZERO)


def cut_witness(net: Network, S: Iterable) -> CutWitness:
    S = frozenset(S)
    unknown = S - set(net.vertices)
    if unknown:
        raise DomainError(f"vertices not in network: {sorted(map(str, unknown))[:5]}")
    fwd = frozenset(e for e in net.edges if e.init in S and e.ter not in S)
    bwd = frozenset(e for e in net.edges if e.init not in S and e.ter in S)
    return CutWitness(S, fwd, bwd, net.source in S, net.sink in S)


def check_orthogonal(net: Network, f: Mapping, S: Iterable):
    """Return ``(True, None)`` or ``(False, offending edge id)``."""
    w = cut_witness(net, S)
    if not w.is_st_cut:
        raise DomainError("side set does not define an s-t cut")
    for e in sorted(w.forward):
        if _fval(f, e.id) != e.cap:
            return False, e.id
    for e in sorted(w.backward):
        if _fval(f, e.id) != 0:
            return False, e.id
    return True, None


def reachable(start: Iterable, succ: Callable) -> set:
    seen = set(start)
    queue = deque(seen)
    while queue:
        v = queue.popleft()
        for u in succ(v):
            if u not in seen:
                seen.add(u)
                queue.append(u)
    return seen


# ---------------------------------------------------------------------------
# lazy families


class LazyFamily:
    """A countable, locally finite network known through an adjacency oracle.

    Subclasses implement :meth:`out_edges` and :meth:`in_edges` for any
    vertex.  ``horizon`` bounds the exploration used to identify components
    of the graph outside a ball: two outside vertices are taken to lie in the
    same component iff they are joined outside the ball within distance
    ``r + horizon`` of the core path.  ``None`` means the family is finite and
    exploration is exhaustive.
    """

    name = "family"
    horizon: int | None = None

    def __init__(self, source, sink, core_path, params=None):
        self.source = source
        self.sink = sink
        self.core_path = list(core_path)
        self.params = dict(params or {})
        self._balls = {}

    def out_edges(self, v) -> list:
        raise NotImplementedError

    def in_edges(self, v) -> list:
        raise NotImplementedError

    def neighbours(self, v):
        for e in self.out_edges(v):
            yield e.ter
        for e in self.in_edges(v):
            yield e.init

    @property
    def core_length(self) -> int:
        return len(self.core_path) - 1

    def ball(self, r: int) -> dict:
        """Vertices at undirected distance <= r from the core path."""
        if r < 0:
            raise GenerationError("radius must be nonnegative")
        if r in self._balls:
            return self._balls[r]
        if r > 0:
            prev = self.ball(r - 1)
            dist = dict(prev)
            for v, d in prev.items():
                if d == r - 1:
                    for u in self.neighbours(v):
                        if u not in dist:
                            dist[u] = r
        else:
            dist = {v: 0 for v in self.core_path}
        self._balls[r] = dist
        return dist

    def ball_edges(self, r: int) -> list:
        B = self.ball(r)
        return sorted(e for v in B for e in self.out_edges(v) if e.ter in B)

    def boundary(self, r: int):
        """Edges leaving and entering the ball of radius r."""
        B = self.ball(r)
        out = sorted(e for v in B for e in self.out_edges(v) if e.ter not in B)
        inn = sorted(e for v in B for e in self.in_edges(v) if e.init not in B)
        return out, inn

    def edges_by_id(self, r: int) -> dict:
        B = self.ball(r)
        m = {}
        for v in B:
            for e in self.out_edges(v):
                m[e.id] = e
            for e in self.in_edges(v):
                m[e.id] = e
        return m

    def max_degree(self, r: int) -> int:
        return max(len(self.out_edges(v)) + len(self.in_edges(v)) for v in self.ball(r))

    def components_outside(self, r: int) -> dict:
        """Map each outside vertex adjacent to the ball to a component label."""
        B = self.ball(r)
        frontier = sorted({u for v in B for u in self.neighbours(v) if u not in B}, key=str)
        label = {}
        limit = None if self.horizon is None else r + self.horizon
        outer = self.ball(limit) if limit is not None else None
        for u in frontier:
            if u in label:
                continue
            comp = reachable([u], lambda x: (y for y in self.neighbours(x)
                                             if y not in B and (outer is None or y in outer)))
            rep = min(comp & set(frontier), key=str)
            name = f"C[{rep}]"
            for x in comp:
                if x in label:
                    continue
                label[x] = name
        return {u: label[u] for u in frontier}

    def truncate(self, r: int, mode: str = "delete") -> Network:
        if mode not in ("delete", "contract"):
            raise DomainError(f"unknown truncation mode {mode!r}")
        B = self.ball(r)
        edges = self.ball_edges(r)
        vertices = sorted(B, key=str)
        if mode == "contract":
            comp = self.components_outside(r)
            out, inn = self.boundary(r)
            for e in out:
                edges.append(Edge(e.id, e.init, comp[e.ter], e.cap))
            for e in inn:
                edges.append(Edge(e.id, comp[e.init], e.ter, e.cap))
            vertices += sorted(set(comp.values()))
        try:
            return Network(vertices, sorted(edges), self.source, self.sink)
        except NetworkError as exc:
            raise GenerationError(str(exc)) from exc

    def contracted_vertices(self, net: Network) -> list:
        return [v for v in net.vertices if isinstance(v, str) and v.startswith("C[")]


class FiniteFamily(LazyFamily):
    """Wrap a finite network as a (trivially) lazy family."""

    name = "finite"
    horizon = None

    def __init__(self, net: Network, core_path=None, name="finite"):
        self.net = net
        self.name = name
        if core_path is None:
            core_path = _undirected_path(net)
        super().__init__(net.source, net.sink, core_path)

    def out_edges(self, v):
        return self.net.out_edges(v)

    def in_edges(self, v):
        return self.net.in_edges(v)


def _undirected_path(net: Network) -> list:
    """Shortest s-t path in the underlying undirected graph (or [s, t])."""
    nbr = {v: set() for v in net.vertices}
    for e in net.edges:
        nbr[e.init].add(e.ter)
        nbr[e.ter].add(e.init)
    prev = {net.source: None}
    queue = deque([net.source])
    while queue:
        v = queue.popleft()
        if v == net.sink:
            break
        for u in sorted(nbr[v], key=str):
            if u not in prev:
                prev[u] = v
                queue.append(u)
    if net.sink not in prev:
        return [net.source, net.sink]
    path = [net.sink]
    while prev[path[-1]] is not None:
        path.append(prev[path[-1]])
    return path[::-1]


def truncate(fam: LazyFamily, r: int, mode: str = "delete") -> Network:
    return fam.truncate(r, mode)
