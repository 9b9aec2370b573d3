"""Flows on locally finite countable networks seen through finite windows.

Covers the contraction sequence, finite-cut-respecting (fcr) and
cut-respecting (scr) verification, and desk-scale approximations of the
values sigma_w, tau_w and tau_s.  Flows on a lazy family are given either as
a rule ``edge -> value``, as a mapping ``edge id -> value`` (missing ids read
as 0), or as a list of such mappings, one per radius, which must agree on
shared edges.
"""

from __future__ import annotations

import math
from collections import Counter
from collections.abc import Mapping
from dataclasses import dataclass, field
from fractions import Fraction

from .core import (ZERO, CutWitness, DomainError, FiniteFamily, LazyFamily, Network,
                   ValidationError, cut_witness, flow_value, validate_flow)
from .finite_solver import max_flow, min_cut, orthogonal_pair
from .residual import stabilized_min_cut

FCR_OK = "fcr-consistent"
FCR_BAD = "fcr-violated"
SCR_BAD = "scr-violated"
SCR_OK = "scr-consistent"


class ConsistencyError(ValidationError):
    """Per-radius flows disagree on an edge they share."""


@dataclass
class CutCheck:
    cut: CutWitness
    status: str  # "balanced" / "violated" / "satisfied"
    imbalance: Fraction
    detail: str = ""

    def __iter__(self):
        return iter((self.cut, self.status, self.imbalance))


@dataclass
class EndFlowReport:
    values_by_radius: list = field(default_factory=list)
    cut_checks: list = field(default_factory=list)
    verdict: str = FCR_OK
    flow: dict | None = None
    intervals: dict = field(default_factory=dict)  # edge id -> (min, max) where not stable
    window: tuple | None = None  # radii whose values were compared
    degree_profile: dict = field(default_factory=dict)

    @property
    def violations(self) -> list:
        return [c for c in self.cut_checks if c.status == "violated"]

    def witness(self) -> CutCheck | None:
        v = self.violations
        return v[0] if v else None


# ---------------------------------------------------------------------------
# flows given lazily


def _lookup(flow):
    if callable(flow) and not isinstance(flow, Mapping):
        return lambda e: Fraction(flow(e))
    if isinstance(flow, Mapping):
        return lambda e: Fraction(flow.get(e.id, ZERO))
    merged = {}
    for r, part in enumerate(flow):
        for k, v in part.items():
            v = Fraction(v)
            if k in merged and merged[k] != v:
                raise ConsistencyError(
                    f"flow on {k} is {merged[k]} at an earlier radius but {v} at radius {r}")
            merged[k] = v
    return lambda e: merged.get(e.id, ZERO)


def degree_profile(fam: LazyFamily, r: int) -> dict:
    """Histogram of total degrees over the ball of radius r (local finiteness evidence)."""
    return dict(sorted(Counter(len(fam.out_edges(v)) + len(fam.in_edges(v))
                               for v in fam.ball(r)).items()))


def contraction(fam: LazyFamily, i: int) -> Network:
    """Ball of radius i with every outside component contracted to one vertex."""
    degree_profile(fam, i)
    return fam.truncate(i, "contract")


def _window_network(fam, r):
    """Ball of radius r plus its boundary edges (outside endpoints kept)."""
    B = fam.ball(r)
    edges = fam.ball_edges(r)
    out, inn = fam.boundary(r)
    verts = set(B) | {e.ter for e in out} | {e.init for e in inn}
    return sorted(B, key=str), sorted(set(edges) | set(out) | set(inn)), verts


def _check_flow_window(fam, val, r_max):
    """Capacities on the window and Kirchhoff inside ball(r_max - 1); returns |f|."""
    _, edges, _ = _window_network(fam, r_max)
    for e in edges:
        x = val(e)
        if x < 0 or x > e.cap:
            raise ValidationError(f"value {x} on {e.id} violates 0 <= f <= {e.cap}")
    inner = fam.ball(max(r_max - 1, 0)) if r_max > 0 else {}
    for v in inner:
        if v in (fam.source, fam.sink):
            continue
        dp = sum((val(e) for e in fam.out_edges(v)), ZERO)
        dm = sum((val(e) for e in fam.in_edges(v)), ZERO)
        if dp != dm:
            raise ValidationError(f"Kirchhoff fails at {v!r}: out {dp}, in {dm}")
    return sum((val(e) for e in fam.out_edges(fam.source)), ZERO)


def ball_cut(fam: LazyFamily, r: int) -> CutWitness:
    out, inn = fam.boundary(r)
    B = frozenset(fam.ball(r))
    return CutWitness(B, frozenset(out), frozenset(inn), fam.source in B, fam.sink in B,
                      name=f"ball-{r}")


def _fcr_check(cut, val, value) -> CutCheck:
    fwd = sum((val(e) for e in cut.forward), ZERO)
    bwd = sum((val(e) for e in cut.backward), ZERO)
    rhs = bwd if cut.t_in_side else bwd + value
    diff = fwd - rhs
    return CutCheck(cut, "balanced" if diff == 0 else "violated", diff,
                    f"{fwd} = {rhs}")


def check_fcr(fam: LazyFamily, flow, r_max: int, extra_cuts=()) -> EndFlowReport:
    """Balance condition on every ball cut up to r_max and on each finite extra cut.

    A cut counts as finite when both of its directed boundaries are finite.
    """
    val = _lookup(flow)
    value = _check_flow_window(fam, val, r_max)
    rep = EndFlowReport(values_by_radius=[(r, value) for r in range(r_max + 1)],
                        degree_profile=degree_profile(fam, r_max))
    for r in range(r_max + 1):
        rep.cut_checks.append(_fcr_check(ball_cut(fam, r), val, value))
    for cut in extra_cuts:
        if not cut.s_in_side:
            raise DomainError(f"cut {cut.name or '?'} does not contain the source")
        if cut.finite:
            rep.cut_checks.append(_fcr_check(cut, val, value))
    rep.verdict = FCR_BAD if rep.violations else FCR_OK
    return rep


def check_scr(fam: LazyFamily, flow, cuts, r_max: int = 3) -> EndFlowReport:
    """fcr check, then both capacity inequalities on every supplied s-t cut.

    Flow sums run over the edges listed in each cut (the inspected window);
    a capacity given as divergent makes its inequality hold trivially.
    """
    rep = check_fcr(fam, flow, r_max, cuts)
    if rep.verdict == FCR_BAD:
        return rep
    val = _lookup(flow)
    value = rep.values_by_radius[-1][1]
    for cut in cuts:
        if not cut.is_st_cut:
            continue
        fwd = sum((val(e) for e in cut.forward), ZERO)
        bwd = sum((val(e) for e in cut.backward), ZERO)
        cap, rcap = cut.capacity(), cut.reverse_capacity()
        bad = None
        if cap is not None and value + bwd > cap:
            bad = (value + bwd - cap, f"{value + bwd} <= {cap}")
        elif rcap is not None and fwd > rcap + value:
            bad = (fwd - rcap - value, f"{fwd} <= {rcap + value}")
        if bad:
            rep.cut_checks.append(CutCheck(cut, "violated", bad[0], bad[1]))
        else:
            rep.cut_checks.append(CutCheck(cut, "satisfied", ZERO, "holds"))
    if any(c.status == "violated" for c in rep.cut_checks):
        rep.verdict = SCR_BAD
    else:
        rep.verdict = SCR_OK
    return rep


# ---------------------------------------------------------------------------
# approximations


def _final_third(n: int) -> range:
    k = max(1, math.ceil(n / 3))
    return range(n - k, n)


def edgewise_limit(flows: list):
    """(stable values, intervals) over a list of flows on growing networks.

    An edge is stable when every flow of the list assigns it the same value;
    edges missing from some flow are left out.
    """
    common = set(flows[0])
    for f in flows[1:]:
        common &= set(f)
    stable, intervals = {}, {}
    for k in sorted(common):
        vals = [f[k] for f in flows]
        if len(set(vals)) == 1:
            stable[k] = vals[0]
        else:
            intervals[k] = (min(vals), max(vals))
    return stable, intervals


def _stable_radius(fam, stable, upto):
    """Largest r <= upto such that every window edge of radius r is stable."""
    best = -1
    for r in range(upto + 1):
        _, edges, _ = _window_network(fam, r)
        if all(e.id in stable for e in edges):
            best = r
        else:
            break
    return best


def approx_tw(fam: LazyFamily, i_max: int) -> EndFlowReport:
    """sigma_i = |f_i| on the contractions for i = 1..i_max and a limit candidate."""
    if i_max < 1:
        raise DomainError("i_max must be >= 1")
    flows, values = [], []
    for i in range(1, i_max + 1):
        net = contraction(fam, i)
        f = max_flow(net)
        cut = min_cut(net, f)
        v = flow_value(net, f)
        assert cut.capacity() == v
        flows.append(f)
        values.append((i, v))
    idx = _final_third(i_max)
    stable, intervals = edgewise_limit([flows[j] for j in idx])
    r = _stable_radius(fam, stable, idx.start + 1)
    rep = check_fcr(fam, stable, max(r, 0)) if r >= 0 else EndFlowReport(verdict=FCR_OK)
    rep.values_by_radius = values
    rep.flow = stable
    rep.intervals = intervals
    rep.window = (idx.start + 1, i_max, max(r, 0))
    return rep


def sigma_w_bound(fam: LazyFamily, k_max: int) -> list:
    """Capacities of finite s-t cuts for k = 1..k_max: upper bounds for sigma_w.

    Families that know a level structure supply their own level-k cut;
    otherwise the cut is the ball of radius k without the sink.
    """
    out = []
    for k in range(1, k_max + 1):
        out.append((k, finite_cut(fam, k).capacity()))
    return out


def finite_cut(fam: LazyFamily, k: int) -> CutWitness:
    if hasattr(fam, "finite_cut"):
        return fam.finite_cut(k)
    B = fam.ball(k)
    side = frozenset(v for v in B if v != fam.sink)
    fwd = frozenset(e for v in side for e in fam.out_edges(v) if e.ter not in side)
    bwd = frozenset(e for v in side for e in fam.in_edges(v) if e.init not in side)
    return CutWitness(side, fwd, bwd, True, False, name=f"ball-{k}-minus-sink")


def _exhausted(fam, r) -> bool:
    out, inn = fam.boundary(r)
    return not out and not inn and len(fam.ball(r)) == len(fam.ball(r + 1))


@dataclass
class OrthogonalApprox:
    flow: dict
    cut: CutWitness
    value: Fraction
    values: list = field(default_factory=list)  # (radius, mundane max-flow value)
    intervals: dict = field(default_factory=dict)
    orthogonal: bool = True
    offending: list = field(default_factory=list)
    exact: bool = False

    def __iter__(self):
        return iter((self.flow, self.cut, self.value))


def approx_ts_orthogonal(fam: LazyFamily, i_max: int) -> OrthogonalApprox:
    """Mundane max flows on growing truncations, the stabilized cut, and their agreement."""
    if i_max < 1:
        raise DomainError("i_max must be >= 1")
    r0 = fam.core_length
    radii = [r0 + i for i in range(1, i_max + 1)]
    if isinstance(fam, FiniteFamily) or _exhausted(fam, radii[-1]):
        net = fam.truncate(radii[-1])
        f, cut = orthogonal_pair(net)
        return OrthogonalApprox(f, cut, flow_value(net, f),
                                [(radii[-1], flow_value(net, f))], exact=True)
    flows, values = [], []
    for r in radii:
        net = fam.truncate(r)
        f = max_flow(net)
        flows.append(f)
        values.append((r, flow_value(net, f)))
    idx = _final_third(len(radii))
    stable, intervals = edgewise_limit([flows[j] for j in idx])
    sc = stabilized_min_cut(fam, i_max)
    cut = cut_witness(sc.network, sc.side)
    window = {e.id for e in fam.ball_edges(radii[idx.start])}
    offending = []
    for e in sorted(cut.forward):
        if e.id in window and stable.get(e.id) != e.cap:
            offending.append(e.id)
    for e in sorted(cut.backward):
        if e.id in window and stable.get(e.id) != 0:
            offending.append(e.id)
    return OrthogonalApprox(stable, cut, values[-1][1], values, intervals,
                            not offending, offending)


def canonical_flow(fam: LazyFamily):
    """The builtin's canonical flow as a rule or mapping, if it has one."""
    if hasattr(fam, "canonical_flow_rule"):
        return fam.canonical_flow_rule
    if hasattr(fam, "canonical_flow"):
        return fam.canonical_flow()
    raise DomainError(f"{fam.name} has no canonical flow")


def named_cuts(fam: LazyFamily, r: int = 0) -> list:
    return fam.named_cuts(r) if hasattr(fam, "named_cuts") else []


def validate_on_truncation(net: Network, f) -> None:
    rep = validate_flow(net, f)
    if rep:
        raise ValidationError(f"not a flow: {rep}")
