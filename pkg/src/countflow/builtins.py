"""Built-in countable networks.

``counterexample63`` is the binary tree of 4-vertex paths with no mundane flow
of maximal value; ``siw73`` reweights it so that the infimum over finite cuts
is 0 without being attained.  The remaining three are small one- or two-ended
graphs illustrating flows through ends.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .core import (ZERO, CutWitness, DomainError, Edge, LazyFamily, as_fraction)

_X = re.compile(r"^x([0-3])\^(\d+)$")


def x(j: int, i: int) -> str:
    return f"x{j}^{i}"


def eid(u, v) -> str:
    return f"({u},{v})"


def level(i: int) -> int:
    """Level k of path Q_i, i.e. 2^(k-1) <= i <= 2^k - 1."""
    return i.bit_length()


class TreeOfPaths(LazyFamily):
    """Paths Q_i = x0^i x1^i x2^i x3^i hung on a binary tree of indices."""

    name = "counterexample63"
    horizon = 6

    def __init__(self, params=None):
        if params:
            raise DomainError(f"{self.name} takes no parameters, got {sorted(params)}")
        super().__init__(x(0, 1), x(3, 1), [x(j, 1) for j in range(4)], {})

    def path_cap(self, i: int, j: int) -> Fraction:
        # capacity of the edge x_j^i -> x_{j+1}^i
        return Fraction(1, 2 ** level(i))

    def attach_cap(self, parent: int) -> Fraction:
        return Fraction(1, 2 ** level(parent))

    def _edge(self, u, v, cap) -> Edge:
        return Edge(eid(u, v), u, v, cap)

    def _parse(self, v):
        m = _X.match(v) if isinstance(v, str) else None
        if not m or int(m.group(2)) < 1:
            raise DomainError(f"not a vertex of {self.name}: {v!r}")
        return int(m.group(1)), int(m.group(2))

    def out_edges(self, v):
        j, i = self._parse(v)
        out = []
        if j < 3:
            out.append(self._edge(v, x(j + 1, i), self.path_cap(i, j)))
        if j == 0:
            out.append(self._edge(v, x(0, 2 * i), self.attach_cap(i)))
        elif j == 1:
            out.append(self._edge(v, x(0, 2 * i + 1), self.attach_cap(i)))
        elif j == 3 and i > 1:
            p = i // 2
            target = x(2, p) if i % 2 == 0 else x(3, p)
            out.append(self._edge(v, target, self.attach_cap(p)))
        return sorted(out)

    def in_edges(self, v):
        j, i = self._parse(v)
        inn = []
        if j > 0:
            inn.append(self._edge(x(j - 1, i), v, self.path_cap(i, j - 1)))
        if j == 0 and i > 1:
            p = i // 2
            src = x(0, p) if i % 2 == 0 else x(1, p)
            inn.append(self._edge(src, v, self.attach_cap(p)))
        elif j == 2:
            inn.append(self._edge(x(3, 2 * i), v, self.attach_cap(i)))
        elif j == 3:
            inn.append(self._edge(x(3, 2 * i + 1), v, self.attach_cap(i)))
        return sorted(inn)

    # -- structure helpers --------------------------------------------------

    def level_radius(self, k: int) -> int:
        """Smallest radius whose ball contains every vertex of levels 1..k."""
        need = {x(j, i) for i in range(1, 2 ** k) for j in range(4)}
        r = 0
        while not need <= self.ball(r).keys():
            r += 1
        return r

    def levels_network(self, k: int):
        """The finite network on Q_1 .. Q_{2^k - 1} and their attachments."""
        from .core import Network
        verts = [x(j, i) for i in range(1, 2 ** k) for j in range(4)]
        vs = set(verts)
        edges = sorted({e for v in verts for e in self.out_edges(v) if e.ter in vs})
        return Network(verts, edges, self.source, self.sink)

    def middle_edge(self, i: int) -> str:
        return eid(x(1, i), x(2, i))

    def path_edges(self, i: int) -> list:
        """Edge ids of P_i, the unique s-t path through Q_i."""
        if i == 1:
            return [eid(x(j, 1), x(j + 1, 1)) for j in range(3)]
        p = i // 2
        parent = self.path_edges(p)
        q = [eid(x(j, i), x(j + 1, i)) for j in range(3)]
        if i % 2 == 0:
            # leave Q_p at x0^p, rejoin at x2^p
            return _prefix_to(parent, x(0, p)) + [eid(x(0, p), x(0, i))] + q + \
                [eid(x(3, i), x(2, p))] + _suffix_from(parent, x(2, p))
        return _prefix_to(parent, x(1, p)) + [eid(x(1, p), x(0, i))] + q + \
            [eid(x(3, i), x(3, p))] + _suffix_from(parent, x(3, p))

    def f_k(self, k: int) -> dict:
        """The mundane flow sum_{i < 2^k} 2^-k chi(E(P_i))."""
        f = {}
        w = Fraction(1, 2 ** k)
        for i in range(1, 2 ** k):
            for e in self.path_edges(i):
                f[e] = f.get(e, ZERO) + w
        return f

    def level_cut(self, k: int) -> CutWitness:
        """Finite s-t cut: middle edges of levels <= k plus the returns into level k."""
        fwd = [self._edge(x(1, i), x(2, i), self.path_cap(i, 1)) for i in range(1, 2 ** k)]
        side = {x(j, i) for i in range(1, 2 ** k) for j in (0, 1)}
        for i in range(2 ** (k - 1), 2 ** k):
            fwd.append(self._edge(x(3, 2 * i), x(2, i), self.attach_cap(i)))
            fwd.append(self._edge(x(3, 2 * i + 1), x(3, i), self.attach_cap(i)))
            side |= {x(j, c) for c in (2 * i, 2 * i + 1) for j in range(4)}
        return CutWitness(frozenset(side), frozenset(fwd), frozenset(), True, False,
                          name=f"level-{k}")

    def finite_cut(self, k: int) -> CutWitness:
        return self.level_cut(k)

    def named_cuts(self, r: int = 0) -> list:
        # the side of F also holds the whole subtree entered through x0^1 -> x0^2;
        # only its Q_1 part is listed, the boundary is given explicitly
        d = self._edge(x(1, 1), x(0, 3), self.attach_cap(1))
        last = self._edge(x(2, 1), x(3, 1), self.path_cap(1, 2))
        F = CutWitness(frozenset({x(0, 1), x(1, 1), x(2, 1)}), frozenset({d, last}),
                       frozenset(), True, False, name="F")
        return [F]

    def canonical_flow(self, k: int = 4) -> dict:
        return self.f_k(k)


def _prefix_to(path: list, v: str) -> list:
    out = []
    for e in path:
        if e.startswith(f"({v},"):
            return out
        out.append(e)
    return out


def _suffix_from(path: list, v: str) -> list:
    for n, e in enumerate(path):
        if e.startswith(f"({v},"):
            return path[n:]
    return []


class SparseTreeOfPaths(TreeOfPaths):
    """Same graph; middle edges get capacity 0, other 1/2^k become 1/4^k."""

    name = "siw73"

    def path_cap(self, i, j):
        if j == 1:
            return ZERO
        return Fraction(1, 4 ** level(i))

    def attach_cap(self, parent):
        return Fraction(1, 4 ** level(parent))


def _cap_param(params, name):
    params = dict(params or {})
    cap = as_fraction(params.pop("capacity", 1))
    if params:
        raise DomainError(f"{name}: unknown parameters {sorted(params)}")
    if cap <= 0:
        raise DomainError(f"{name}: capacity must be positive")
    return cap


class DoubleRayCirculation(LazyFamily):
    """Double ray c_i (i in Z) with a flow entering one end and leaving by the other.

    Edges: c_i -> c_{i+1} for i != 0, c_1 -> c_0, s -> c_1, c_0 -> t.  The
    canonical flow runs s -> c_1 -> c_2 -> ... off to the right end and comes
    back ... -> c_{-1} -> c_0 -> t from the left end.
    """

    name = "double_ray_circulation"
    horizon = 1

    def __init__(self, params=None):
        self.c = _cap_param(params, self.name)
        super().__init__("s", "t", ["s", "c1", "c0", "t"], {"capacity": self.c})

    @staticmethod
    def _idx(v):
        if not (isinstance(v, str) and re.match(r"^c-?\d+$", v)):
            raise DomainError(f"not a vertex of double_ray_circulation: {v!r}")
        return int(v[1:])

    def _e(self, u, v):
        return Edge(eid(u, v), u, v, self.c)

    def out_edges(self, v):
        if v == "s":
            return [self._e("s", "c1")]
        if v == "t":
            return []
        i = self._idx(v)
        out = []
        if i != 0:
            out.append(self._e(v, f"c{i + 1}"))
        if i == 1:
            out.append(self._e("c1", "c0"))
        if i == 0:
            out.append(self._e("c0", "t"))
        return sorted(out)

    def in_edges(self, v):
        if v == "s":
            return []
        if v == "t":
            return [self._e("c0", "t")]
        i = self._idx(v)
        inn = []
        if i - 1 != 0:
            inn.append(self._e(f"c{i - 1}", v))
        if i == 0:
            inn.append(self._e("c1", "c0"))
        if i == 1:
            inn.append(self._e("s", "c1"))
        return sorted(inn)

    def canonical_flow_rule(self, e: Edge) -> Fraction:
        return ZERO if e.id == eid("c1", "c0") else self.c

    def named_cuts(self, r: int = 0) -> list:
        side = frozenset({"s", "t"} | {f"c{-i}" for i in range(r + 1)})
        return [CutWitness(side, frozenset({self._e("s", "c1")}),
                           frozenset({self._e("c1", "c0")}), True, True, name="left-half")]


class _Ladder(LazyFamily):
    horizon = 1
    rung_down = True

    def __init__(self, params=None):
        self.c = _cap_param(params, self.name)
        super().__init__("s", "t", ["s", "a0", "b0", "t"], {"capacity": self.c})

    def _e(self, u, v):
        return Edge(eid(u, v), u, v, self.c)

    @staticmethod
    def _split(v):
        m = re.match(r"^([ab])(\d+)$", v) if isinstance(v, str) else None
        if not m:
            raise DomainError(f"not a ladder vertex: {v!r}")
        return m.group(1), int(m.group(2))

    def _rung(self, i):
        a, b = f"a{i}", f"b{i}"
        return self._e(a, b) if self.rung_down else self._e(b, a)

    def _all(self, v):
        if v == "s":
            return [self._e("s", "a0")]
        if v == "t":
            return [self._e("b0", "t")]
        side, i = self._split(v)
        es = [self._rung(i)]
        if side == "a":
            es.append(self._e(f"a{i}", f"a{i + 1}"))
            es.append(self._e(f"a{i - 1}", v) if i > 0 else self._e("s", "a0"))
        else:
            es.append(self._e(f"b{i + 1}", f"b{i}"))
            es.append(self._e(v, f"b{i - 1}") if i > 0 else self._e("b0", "t"))
        return es

    def out_edges(self, v):
        return sorted(e for e in self._all(v) if e.init == v)

    def in_edges(self, v):
        return sorted(e for e in self._all(v) if e.ter == v)

    def canonical_flow_rule(self, e: Edge) -> Fraction:
        a, b = e.init, e.ter
        rung = {a[:1], b[:1]} == {"a", "b"}
        return ZERO if rung else self.c


class LadderThroughEnd(_Ladder):
    """One-ended ladder: rails s -> a0 -> a1 -> ... and ... -> b1 -> b0 -> t, rungs a_i -> b_i.

    The canonical flow runs out along the a-rail and back along the b-rail,
    i.e. through the single end.
    """

    name = "ladder_wcr"
    rung_down = True


class NoFinitePath(_Ladder):
    """Ladder with rungs b_i -> a_i: no finite directed s-t path exists."""

    name = "no_finite_path"
    rung_down = False

    def named_cuts(self, r: int = 0) -> list:
        side = frozenset({"s"} | {f"a{i}" for i in range(r + 1)})
        back = frozenset(self._rung(i) for i in range(r + 1))
        return [CutWitness(side, frozenset(), back, True, False, finite=False,
                           name="a-ray", forward_capacity=ZERO, backward_capacity=None)]


BUILTINS = {
    "counterexample63": TreeOfPaths,
    "siw73": SparseTreeOfPaths,
    "double_ray_circulation": DoubleRayCirculation,
    "ladder_wcr": LadderThroughEnd,
    "no_finite_path": NoFinitePath,
}


def builtin(name: str, params=None) -> LazyFamily:
    try:
        cls = BUILTINS[name]
    except KeyError:
        raise DomainError(f"unknown builtin {name!r}; choose from {sorted(BUILTINS)}") from None
    return cls(params)
