"""Spec files, report formatting, DOT output and the ``countflow`` command.

A spec is JSON.  A finite network::

    {"vertices": ["s", "t"], "edges": [{"from": "s", "to": "t", "cap": "5"}],
     "source": "s", "sink": "t"}

or a builtin family::

    {"builtin": {"name": "counterexample63", "params": {}}}

Capacities are strings ``"p/q"`` so nothing is lost in transit.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

from . import ends, webs
from .builtins import BUILTINS, builtin
from .core import (DomainError, Edge, FiniteFamily, FlowError, GenerationError, LazyFamily,
                   Network, NetworkError, SizeError, ValidationError, check_orthogonal,
                   cut_witness, flow_value, format_rational, parse_rational, validate_flow)
from .finite_solver import DecompositionError, decompose_mundane, max_flow, min_cut
from .residual import stabilized_min_cut

COMMANDS = ("solve", "cut", "decompose", "verify-flow", "verify-orthogonal", "web", "wave",
            "linkage", "ends-fcr", "ends-scr", "ends-approx", "sigma-w")

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_GENERATION = 0, 1, 2, 3


class SpecError(FlowError, ValueError):
    """Malformed spec text or content."""


@dataclass
class NetworkSpec:
    kind: str  # "finite" or "builtin"
    vertices: list = field(default_factory=list)
    edges: list = field(default_factory=list)  # (from, to, cap text)
    source: str | None = None
    sink: str | None = None
    name: str | None = None
    params: dict = field(default_factory=dict)

    def edge_ids(self) -> list:
        seen = {}
        ids = []
        for u, v, _ in self.edges:
            base = f"({u},{v})"
            seen[base] = seen.get(base, 0) + 1
            ids.append(base if seen[base] == 1 else f"{base}#{seen[base]}")
        return ids

    def build(self):
        if self.kind == "builtin":
            return builtin(self.name, self.params)
        edges = []
        for eid, (u, v, cap) in zip(self.edge_ids(), self.edges):
            try:
                c = parse_rational(cap)
            except ValueError as exc:
                raise SpecError(f"edge {eid}: {exc}") from None
            edges.append(Edge(eid, u, v, c))
        return Network(self.vertices, edges, self.source, self.sink)


def _fail(msg):
    raise SpecError(msg)


def load_spec(text: str) -> NetworkSpec:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        _fail("spec must be a JSON object")
    if "builtin" in data:
        b = data["builtin"]
        if set(data) != {"builtin"} or not isinstance(b, dict) or "name" not in b:
            _fail('builtin spec must be {"builtin": {"name": ..., "params": {...}}}')
        params = b.get("params", {})
        if not isinstance(params, dict):
            _fail("builtin params must be an object")
        return NetworkSpec("builtin", name=b["name"], params=params)
    missing = {"vertices", "edges", "source", "sink"} - set(data)
    if missing:
        _fail(f"missing fields: {sorted(missing)}")
    edges = []
    for k, e in enumerate(data["edges"]):
        if not isinstance(e, dict) or set(e) != {"from", "to", "cap"}:
            _fail(f"edge #{k}: expected fields from, to, cap")
        if not isinstance(e["cap"], str):
            _fail(f"edge #{k}: capacity must be a string \"p/q\"")
        edges.append((e["from"], e["to"], e["cap"]))
    return NetworkSpec("finite", list(data["vertices"]), edges, data["source"], data["sink"])


def emit_spec(spec: NetworkSpec) -> str:
    if spec.kind == "builtin":
        data = {"builtin": {"name": spec.name, "params": spec.params}}
    else:
        data = {"vertices": spec.vertices,
                "edges": [{"from": u, "to": v, "cap": c} for u, v, c in spec.edges],
                "source": spec.source, "sink": spec.sink}
    return json.dumps(data, indent=2) + "\n"


def spec_of_network(net: Network) -> NetworkSpec:
    return NetworkSpec("finite", list(net.vertices),
                       [(e.init, e.ter, format_rational(e.cap)) for e in net.edges],
                       net.source, net.sink)


def parse_spec(text: str):
    """Spec text -> Network or LazyFamily."""
    spec = load_spec(text)
    try:
        return spec.build()
    except NetworkError as exc:
        raise SpecError(str(exc)) from None


# ---------------------------------------------------------------------------
# output


def fmt(x) -> str:
    return "divergent" if x is None else format_rational(x)


def _flow_lines(f) -> list:
    return [f"flow {k}: {fmt(v)}" for k, v in sorted(f.items())]


def to_dot(net: Network, f=None, cut=None, contracted=()) -> str:
    cut_ids = set(cut.forward_ids | cut.backward_ids) if cut is not None else set()
    lines = ["digraph network {", "  rankdir=LR;"]
    for v in net.vertices:
        shape = "box" if v in contracted else "ellipse"
        lines.append(f'  "{v}" [shape={shape}];')
    for e in net.edges:
        label = f"{fmt(f.get(e.id, 0))}/{fmt(e.cap)}" if f is not None else fmt(e.cap)
        style = ', style=dashed, color=red' if e.id in cut_ids else ""
        lines.append(f'  "{e.init}" -> "{e.ter}" [label="{label}"{style}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _read_flow(path) -> dict:
    data = _read_json(path)
    if not isinstance(data, dict):
        raise SpecError("flow file must map edge ids to \"p/q\" values")
    try:
        return {k: parse_rational(v) for k, v in data.items()}
    except ValueError as exc:
        raise SpecError(f"flow file: {exc}") from None


def _read_sides(path) -> list:
    data = _read_json(path)
    if not isinstance(data, list):
        raise SpecError("cuts file must be a list of vertex lists")
    return [d["side"] if isinstance(d, dict) else d for d in data]


def _family_cut(fam: LazyFamily, side) -> ends.CutWitness:
    S = frozenset(side)
    fwd = frozenset(e for v in S for e in fam.out_edges(v) if e.ter not in S)
    bwd = frozenset(e for v in S for e in fam.in_edges(v) if e.init not in S)
    return ends.CutWitness(S, fwd, bwd, fam.source in S, fam.sink in S, name="supplied")


# ---------------------------------------------------------------------------
# commands


@dataclass
class Result:
    lines: list
    code: int = EXIT_OK
    dot: str | None = None

    @property
    def text(self) -> str:
        return "\n".join(self.lines) + "\n"


def _network(obj, args) -> tuple:
    """A finite network to work on: the spec itself or a truncation of the family."""
    if isinstance(obj, Network):
        return obj, []
    net = obj.truncate(args.radius, args.mode)
    return net, obj.contracted_vertices(net)


def _family(obj) -> LazyFamily:
    return FiniteFamily(obj) if isinstance(obj, Network) else obj


def cmd_solve(obj, args) -> Result:
    net, contracted = _network(obj, args)
    f = max_flow(net)
    cut = min_cut(net, f)
    lines = [f"value: {fmt(flow_value(net, f))}", *_flow_lines(f)]
    return Result(lines, dot=to_dot(net, f, cut, contracted))


def cmd_cut(obj, args) -> Result:
    if isinstance(obj, Network):
        f = max_flow(obj)
        cut = min_cut(obj, f)
        lines = [f"cut: {','.join(sorted(cut.forward_ids))}",
                 f"capacity: {fmt(cut.capacity())}",
                 f"side: {','.join(sorted(map(str, cut.side)))}"]
        return Result(lines, dot=to_dot(obj, f, cut))
    sc = stabilized_min_cut(obj, args.iterations, args.mode)
    lines = [f"cut: {','.join(sorted(sc.edges))}",
             f"capacity: {fmt(sc.capacity)}",
             f"stabilized_at: {sc.stabilized_at if sc.stabilized_at is not None else 'none'}"]
    for i, r, window, val in sc.rounds:
        lines.append(f"round {i}: radius {r}, rounded value {fmt(val)}, "
                     f"window cut {','.join(sorted(window))}")
    cut = cut_witness(sc.network, sc.side)
    return Result(lines, dot=to_dot(sc.network, None, cut, obj.contracted_vertices(sc.network)))


def _given_or_max(net, args):
    return _read_flow(args.flow) if args.flow else max_flow(net)


def cmd_decompose(obj, args) -> Result:
    net, contracted = _network(obj, args)
    f = _given_or_max(net, args)
    try:
        dec = decompose_mundane(net, f)
    except DecompositionError as exc:
        return Result([f"error: {exc}"], EXIT_VIOLATION)
    lines = [f"terms: {len(dec)}", f"value: {fmt(flow_value(net, f))}"]
    for theta, path in dec.terms:
        lines.append(f"path {fmt(theta)}: {' '.join(path)}")
    return Result(lines, dot=to_dot(net, f, None, contracted))


def cmd_verify_flow(obj, args) -> Result:
    net, _ = _network(obj, args)
    if not args.flow:
        raise SpecError("verify-flow needs --flow FILE")
    f = _read_flow(args.flow)
    rep = validate_flow(net, f)
    lines = [f"valid: {'yes' if rep.ok else 'no'}"]
    for eid, x, cap in rep.capacity_violations:
        lines.append(f"capacity violation {eid}: {fmt(x)} not in [0, {fmt(cap)}]")
    for v, x in rep.kirchhoff_violations:
        lines.append(f"kirchhoff violation {v}: {fmt(x)}")
    if rep.ok:
        lines.append(f"value: {fmt(flow_value(net, f))}")
    return Result(lines, EXIT_OK if rep.ok else EXIT_VIOLATION)


def cmd_verify_orthogonal(obj, args) -> Result:
    net, _ = _network(obj, args)
    if args.flow:
        f = _read_flow(args.flow)
        sides = _read_sides(args.cuts) if args.cuts else None
        if not sides:
            raise SpecError("verify-orthogonal with --flow needs --cuts FILE")
    else:
        f = max_flow(net)
        sides = [min_cut(net, f).side]
    rep = validate_flow(net, f)
    if not rep.ok:
        return Result([f"valid: no ({rep})"], EXIT_VIOLATION)
    lines, code = [], EXIT_OK
    for side in sides:
        ok, bad = check_orthogonal(net, f, side)
        name = ",".join(sorted(map(str, side)))
        lines.append(f"orthogonal {{{name}}}: {'yes' if ok else 'no, edge ' + bad}")
        if not ok:
            code = EXIT_VIOLATION
    return Result(lines, code)


def _web_lines(web) -> list:
    fmtv = lambda vs: ",".join(sorted(map(str, vs)))
    lines = [f"web vertices: {len(web.vertices)}", f"web edges: {len(web.edges)}",
             f"A: {fmtv(web.A)}", f"B: {fmtv(web.B)}"]
    lines += [f"weight {v}: {fmt(web.w[v])}" for v in web.vertices]
    lines += [f"edge {u} -> {v}" for u, v in web.edges]
    return lines


def cmd_web(obj, args) -> Result:
    net, _ = _network(obj, args)
    return Result(_web_lines(webs.network_to_web(net)))


def cmd_wave(obj, args) -> Result:
    net, _ = _network(obj, args)
    web = webs.network_to_web(net)
    f = webs.max_wave(web)
    T = webs.ter(web, f)
    rep = webs.separator_report(web, T)
    lines = [f"terminal: {','.join(sorted(map(str, T)))}",
             f"essential: {','.join(sorted(map(str, rep.essential_subset)))}",
             f"separating: {'yes' if rep.separating else 'no'}",
             f"loose quotient: {'yes' if webs.find_nonzero_wave(webs.quotient(web, f)) is None else 'no'}"]
    lines += [f"wave {u} -> {v}: {fmt(x)}" for (u, v), x in sorted(f.items()) if x]
    return Result(lines)


def cmd_linkage(obj, args) -> Result:
    net, _ = _network(obj, args)
    bip = webs.web_to_bipartite(webs.network_to_web(net))
    f = webs.linkage(bip)
    if f is None:
        return Result(["linkable: no"])
    lines = ["linkable: yes"]
    lines += [f"link {u[0]} -> {v[0]}: {fmt(x)}" for (u, v), x in sorted(f.items(), key=repr) if x]
    return Result(lines)


def _ends_inputs(obj, args):
    fam = _family(obj)
    if args.flow:
        flow = _read_flow(args.flow)
    elif isinstance(obj, Network):
        flow = max_flow(obj)
    else:
        flow = ends.canonical_flow(fam)
    cuts = list(ends.named_cuts(fam, args.radius))
    if args.cuts:
        cuts += [_family_cut(fam, side) for side in _read_sides(args.cuts)]
    return fam, flow, cuts


def _report_lines(rep) -> list:
    lines = [f"verdict: {rep.verdict}"]
    lines += [f"value at radius {r}: {fmt(v)}" for r, v in rep.values_by_radius]
    for c in rep.cut_checks:
        lines.append(f"cut {c.cut.name or '?'}: {c.status} (imbalance {fmt(c.imbalance)}; {c.detail})")
    w = rep.witness()
    if w is not None:
        lines.append(f"witness: {w.cut.name or '?'} {w.detail}")
    return lines


def cmd_ends_fcr(obj, args) -> Result:
    fam, flow, cuts = _ends_inputs(obj, args)
    rep = ends.check_fcr(fam, flow, args.radius, cuts)
    return Result(_report_lines(rep), EXIT_VIOLATION if rep.violations else EXIT_OK)


def cmd_ends_scr(obj, args) -> Result:
    fam, flow, cuts = _ends_inputs(obj, args)
    rep = ends.check_scr(fam, flow, cuts, args.radius)
    return Result(_report_lines(rep), EXIT_VIOLATION if rep.violations else EXIT_OK)


def cmd_ends_approx(obj, args) -> Result:
    fam = _family(obj)
    rep = ends.approx_tw(fam, args.iterations)
    lines = ["sigma: " + ", ".join(fmt(v) for _, v in rep.values_by_radius),
             f"verdict: {rep.verdict}",
             f"stable window: {rep.window[0]}..{rep.window[1]}, checked radius {rep.window[2]}",
             f"unstable edges: {len(rep.intervals)}"]
    o = ends.approx_ts_orthogonal(fam, args.iterations)
    lines += [f"mundane values: {', '.join(fmt(v) for _, v in o.values)}",
              f"cut: {','.join(sorted(o.cut.forward_ids))}",
              f"cut capacity: {fmt(o.cut.capacity())}",
              f"orthogonal in window: {'yes' if o.orthogonal else 'no'}"]
    return Result(lines)


def cmd_sigma_w(obj, args) -> Result:
    fam = _family(obj)
    bounds = ends.sigma_w_bound(fam, args.radius)
    return Result(["bounds: " + ", ".join(fmt(c) for _, c in bounds)])


HANDLERS = {
    "solve": cmd_solve, "cut": cmd_cut, "decompose": cmd_decompose,
    "verify-flow": cmd_verify_flow, "verify-orthogonal": cmd_verify_orthogonal,
    "web": cmd_web, "wave": cmd_wave, "linkage": cmd_linkage,
    "ends-fcr": cmd_ends_fcr, "ends-scr": cmd_ends_scr, "ends-approx": cmd_ends_approx,
    "sigma-w": cmd_sigma_w,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="countflow",
                                description="Exact max-flow/min-cut tools for finite and countable networks.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("spec", help="spec file (JSON) or builtin:NAME "
                                f"with NAME in {', '.join(sorted(BUILTINS))}")
    p.add_argument("--radius", type=int, default=3)
    p.add_argument("--iterations", type=int, default=4)
    p.add_argument("--mode", choices=("delete", "contract"), default="delete")
    p.add_argument("--dot", metavar="PATH")
    p.add_argument("--cuts", metavar="FILE")
    p.add_argument("--flow", metavar="FILE")
    return p


def _load(arg: str):
    if arg.startswith("builtin:"):
        return builtin(arg[len("builtin:"):])
    with open(arg) as fh:
        return parse_spec(fh.read())


def run(command: str, spec, **flags) -> Result:
    """Run one command on a spec object, spec text, or ``builtin:NAME``."""
    args = build_parser().parse_args([command, "-"])
    for k, v in flags.items():
        setattr(args, k, v)
    if isinstance(spec, str):
        spec = builtin(spec[8:]) if spec.startswith("builtin:") else parse_spec(spec)
    return HANDLERS[command](spec, args)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        obj = _load(args.spec)
        res = HANDLERS[args.command](obj, args)
    except (GenerationError, SizeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GENERATION
    except (SpecError, DomainError, NetworkError, ValidationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(res.text)
    if args.dot and res.dot:
        with open(args.dot, "w") as fh:
            fh.write(res.dot)
    return res.code


if __name__ == "__main__":
    sys.exit(main())
