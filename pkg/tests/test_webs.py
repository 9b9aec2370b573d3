from fractions import Fraction as F
import random

import pytest
from hypothesis import given, settings, strategies as st

from countflow import webs
from countflow.core import DomainError, Edge, Network, ValidationError, validate_flow
from countflow.webs import WeightedWeb
from webgen import random_wave, random_web

seeds = st.integers(0, 10 ** 9)


def k11(wa=1, wb=1):
    return WeightedWeb(["a", "b"], [("a", "b")], {"a"}, {"b"}, {"a": wa, "b": wb})


def path_web(w=1):
    return WeightedWeb(["a", "v", "b"], [("a", "v"), ("v", "b")], {"a"}, {"b"},
                       {"a": w, "v": w, "b": w})


class TestWebModel:
    def test_bipartite_flag(self):
        assert k11().bipartite and not path_web().bipartite

    def test_parallel_rejected(self):
        with pytest.raises(DomainError):
            WeightedWeb(["a", "b"], [("a", "b"), ("a", "b")], {"a"}, {"b"}, {})

    def test_negative_weight(self):
        with pytest.raises(DomainError):
            WeightedWeb(["a"], [], {"a"}, set(), {"a": -1})

    def test_current_axioms(self):
        web = path_web()
        assert webs.current_violations(web, {("a", "v"): F(1), ("v", "b"): F(1)}) == []
        assert webs.current_violations(web, {("a", "v"): F(2)})
        # outflow larger than inflow at a non-A vertex
        assert webs.current_violations(web, {("v", "b"): F(1)})
        with pytest.raises(ValidationError):
            webs.check_current(web, {("v", "b"): F(1)})

    def test_sets(self):
        web = path_web()
        f = {("a", "v"): F(1), ("v", "b"): F(1)}
        assert webs.sat(web, f) == {"a", "v", "b"}
        assert webs.sink(web, f) == {"b"}
        assert webs.ter(web, f) == {"b"}
        assert webs.is_web_flow(web, f)


class TestSeparators:
    def test_path_web(self):
        rep = webs.separator_report(path_web(), {"v"})
        assert rep.separating
        assert rep.essential_subset == {"v"}
        assert rep.rf == {"a", "v"} and rep.rf_strict == {"a"}

    def test_empty_set_not_separating(self):
        rep = webs.separator_report(k11(), set())
        assert not rep.separating and rep.witness_path == ["a", "b"]

    def test_edgeless(self):
        web = WeightedWeb(["a", "b"], [], {"a"}, {"b"}, {"a": 1, "b": 1})
        rep = webs.separator_report(web, {"a"})
        assert rep.separating and rep.essential_subset == set()


class TestWaves:
    def test_zero_is_wave(self):
        assert webs.is_wave(path_web(), {})

    def test_k11_saturated(self):
        ok, rep = webs.validate_wave(k11(), {("a", "b"): F(1)})
        assert ok and "b" in webs.ter(k11(), {("a", "b"): F(1)}) and rep.separating

    def test_outflow_outside_roof(self):
        # b is not roofed by TER = {a, v}? flow a->v->b with w(v)=2 leaves v unsaturated
        web = WeightedWeb(["a", "v", "b"], [("a", "v"), ("v", "b")], {"a"}, {"b"},
                          {"a": 1, "v": 2, "b": 2})
        f = {("a", "v"): F(1), ("v", "b"): F(1)}
        assert not webs.is_wave(web, f)

    def test_not_current_raises(self):
        with pytest.raises(ValidationError):
            webs.validate_wave(k11(), {("a", "b"): F(5)})


class TestTrim:
    def test_zero(self):
        assert all(v == 0 for v in webs.trim(path_web(), {}).values())

    def test_fixpoint(self):
        f = {("a", "b"): F(1)}
        assert webs.trim(k11(), f) == f

    def test_excess_inflow_cut_back(self):
        # a -> v -> b with w(b) = 0 and v saturated from a but shipping nothing
        web = WeightedWeb(["a", "v", "b"], [("a", "v"), ("v", "b")], {"a"}, {"b"},
                          {"a": 1, "v": 1, "b": 0})
        f = {("a", "v"): F(1), ("v", "b"): F(0)}
        assert webs.is_wave(web, f)
        g = webs.trim(web, f)
        assert g[("a", "v")] == 0 and webs.is_trimming(web, f, g)

    @settings(max_examples=60, deadline=None)
    @given(seeds)
    def test_postconditions(self, seed):
        rng = random.Random(seed)
        web = random_web(rng)
        f = random_wave(web, rng)
        assert webs.is_wave(web, f)
        assert webs.is_trimming(web, f, webs.trim(web, f))


class TestQuotientCompose:
    def test_empty(self):
        web = WeightedWeb([], [], set(), set(), {})
        assert webs.quotient(web, {}).vertices == ()

    def test_zero_wave_quotient(self):
        # a2 has no route to B so it is roofed and not essential
        web = WeightedWeb(["a1", "a2", "b"], [("a1", "b")], {"a1", "a2"}, {"b"},
                          {"a1": 1, "a2": 1, "b": 1})
        q = webs.quotient(web, {})
        assert set(q.vertices) == {"a1", "b"} and q.A == {"a1"}

    def test_full_wave_quotient(self):
        q = webs.quotient(k11(), {("a", "b"): F(1)})
        assert q.A == {"b"} and set(q.vertices) == {"b"}

    def test_identity(self):
        f = {("a", "b"): F(1)}
        assert webs.compose(k11(), f, {}) == f

    def test_zero_then_g(self):
        g = {("a", "b"): F(1, 2)}
        assert webs.compose(k11(), {}, g) == g

    def test_two_edges(self):
        web = WeightedWeb(["a1", "a2", "b1", "b2"], [("a1", "b1"), ("a2", "b2")],
                          {"a1", "a2"}, {"b1", "b2"}, {v: 1 for v in ["a1", "a2", "b1", "b2"]})
        f = {("a1", "b1"): F(1)}
        g = {("a2", "b2"): F(1)}
        h = webs.compose(web, f, g)
        assert webs.ter(web, h) & web.B == {"b1", "b2"}

    @settings(max_examples=60, deadline=None)
    @given(seeds)
    def test_composition_laws(self, seed):
        rng = random.Random(seed)
        web = random_web(rng, bipartite=rng.random() < 0.5)
        f = random_wave(web, rng)
        q = webs.quotient(web, f)
        g0 = random_wave(q, rng)
        g = {e: g0.get(e, F(0)) for e in web.edges}
        h = webs.compose(web, f, g)
        assert webs.is_wave(web, h)
        Tf, Tg, Th = webs.ter(web, f), webs.ter(q, g0), webs.ter(web, h)
        assert webs.essential(web, Tf | Tg) <= Th
        if web.bipartite:
            assert Th & web.B == (Tf | Tg) & web.B


class TestMaxWaveHindrance:
    def test_k11(self):
        f = webs.max_wave(k11())
        assert f == {("a", "b"): 1}
        assert webs.quotient(k11(), f).A == {"b"}

    def test_b_weight_zero(self):
        web = k11(1, 0)
        assert all(v == 0 for v in webs.max_wave(web).values())
        assert webs.is_separating(web, webs.ter(web, {}))

    def test_loose_gives_zero(self):
        web = WeightedWeb(["a", "b"], [("a", "b")], {"a"}, {"b"}, {"a": 1, "b": 2})
        assert webs.is_loose(web)
        assert all(v == 0 for v in webs.max_wave(web).values())
        assert webs.find_hindrance(web) is None

    def test_dead_end(self):
        web = WeightedWeb(["a", "b"], [], {"a"}, {"b"}, {"a": 1, "b": 1})
        f, a = webs.find_hindrance(web)
        assert a == "a" and all(v == 0 for v in f.values())

    def test_k11_margin(self):
        f, a = webs.find_hindrance(k11(2, 1))
        assert a == "a" and f[("a", "b")] == 1
        assert webs.find_hindrance(k11(2, 1), F(1)) is None
        assert webs.find_hindrance(k11(2, 1), F(1, 2)) is not None

    def test_chain_of_waves(self):
        web = WeightedWeb(["a1", "a2", "b1", "b2"], [("a1", "b1"), ("a2", "b2")],
                          {"a1", "a2"}, {"b1", "b2"}, {v: 1 for v in ["a1", "a2", "b1", "b2"]})
        chain = [{}, {("a1", "b1"): F(1)}, {("a1", "b1"): F(1), ("a2", "b2"): F(1)}]
        assert all(webs.is_wave(web, f) for f in chain)
        assert webs.validate_wave(web, chain[-1])[0]


class TestLinkage:
    def test_k11(self):
        assert webs.linkage(k11()) == {("a", "b"): 1}

    def test_infeasible(self):
        assert webs.linkage(k11(2, 1)) is None

    def test_k22(self):
        vs = ["a1", "a2", "b1", "b2"]
        web = WeightedWeb(vs, [(a, b) for a in vs[:2] for b in vs[2:]], {"a1", "a2"},
                          {"b1", "b2"}, {v: 1 for v in vs})
        f = webs.linkage(web)
        assert all(webs.out_deg(web, f, a) == 1 for a in web.A)
        assert all(webs.in_deg(web, f, b) <= 1 for b in web.B)

    def test_requires_bipartite(self):
        with pytest.raises(DomainError):
            webs.linkage(path_web())


def two_step_net():
    return Network(["s", "a", "t"], [Edge("(s,a)", "s", "a", F(2)), Edge("(a,t)", "a", "t", F(3))],
                   "s", "t")


class TestTransformations:
    def test_path(self):
        web = webs.network_to_web(two_step_net())
        assert web.edges == (("(s,a)", "(a,t)"),)
        assert web.A == {"(s,a)"} and web.B == {"(a,t)"}
        assert web.w == {"(a,t)": 3, "(s,a)": 2}

    def test_one_edge(self):
        net = Network(["s", "t"], [Edge("(s,t)", "s", "t", F(1))], "s", "t")
        web = webs.network_to_web(net)
        assert web.A == web.B == {"(s,t)"} and web.edges == ()

    def test_in_out_two(self):
        edges = [Edge("(s,x)", "s", "x", 1), Edge("(s,y)", "s", "y", 1),
                 Edge("(x,m)", "x", "m", 1), Edge("(y,m)", "y", "m", 1),
                 Edge("(m,p)", "m", "p", 1), Edge("(m,q)", "m", "q", 1),
                 Edge("(p,t)", "p", "t", 1), Edge("(q,t)", "q", "t", 1)]
        net = Network(["s", "x", "y", "m", "p", "q", "t"], edges, "s", "t")
        web = webs.network_to_web(net)
        into_m = {"(x,m)", "(y,m)"}
        assert len([e for e in web.edges if e[0] in into_m]) == 4

    def test_back_translation(self):
        net = two_step_net()
        assert all(v == 0 for v in webs.web_flow_to_flow(net, {}).values())
        g = webs.web_flow_to_flow(net, {("(s,a)", "(a,t)"): F(2)})
        assert g == {"(s,a)": 2, "(a,t)": 2} and validate_flow(net, g).ok

    def test_back_translation_source_side(self):
        net = Network(["s", "a", "t"], [Edge("(s,a)", "s", "a", F(2)), Edge("(a,t)", "a", "t", F(2)),
                                         Edge("(s,t)", "s", "t", F(2))], "s", "t")
        web = webs.network_to_web(net)
        g = webs.web_flow_to_flow(net, {("(s,a)", "(a,t)"): F(3, 2)})
        assert g["(s,a)"] == F(3, 2) and web.A == {"(s,a)", "(s,t)"}

    def test_not_web_flow(self):
        with pytest.raises(ValidationError):
            webs.web_flow_to_flow(two_step_net(), {("(s,a)", "(a,t)"): F(5)})

    def test_bipartite_of_bipartite(self):
        bip = webs.web_to_bipartite(k11())
        assert bip.edges == ((("a", "A"), ("b", "B")),)

    def test_split_vertex(self):
        bip = webs.web_to_bipartite(path_web())
        assert set(bip.edges) == {(("a", "A"), ("v", "B")), (("v", "A"), ("v", "B")),
                                  (("v", "A"), ("b", "B"))}
        assert bip.bipartite

    def test_empty(self):
        bip = webs.web_to_bipartite(WeightedWeb([], [], set(), set(), {}))
        assert bip.vertices == () and bip.bipartite

    def test_project_zero(self):
        g, S = webs.project_wave(path_web(), {})
        assert all(v == 0 for v in g.values()) and webs.ter(path_web(), g) >= {"a"}

    def test_project_saturating_v(self):
        web = path_web()
        f = {(("a", "A"), ("v", "B")): F(1)}
        g, S = webs.project_wave(web, f)
        assert g[("a", "v")] == 1 and "v" in webs.ter(web, g)

    def test_project_split_only(self):
        # w(b) = 0 keeps b terminal so the split edge alone is a wave
        web = WeightedWeb(["a", "v", "b"], [("a", "v"), ("v", "b")], {"a"}, {"b"},
                          {"a": 1, "v": 1, "b": 0})
        g, _ = webs.project_wave(web, {(("v", "A"), ("v", "B")): F(1)})
        assert all(v == 0 for v in g.values())

    @settings(max_examples=60, deadline=None)
    @given(seeds)
    def test_projection_ter(self, seed):
        rng = random.Random(seed)
        web = random_web(rng, n_max=6)
        bip = webs.web_to_bipartite(web)
        f = random_wave(bip, rng)
        g, S = webs.project_wave(web, f)
        assert webs.is_wave(web, g) and webs.ter(web, g) == S


class TestHelpers:
    def test_minus_current(self):
        web = webs.web_minus_current(path_web(2), {("a", "v"): F(1), ("v", "b"): F(1)})
        assert web.w == {"a": 1, "v": 0, "b": 1}

    def test_minus_function(self):
        assert webs.web_minus_function(k11(), {"a": F(1, 2)}).w["a"] == F(1, 2)
        with pytest.raises(DomainError):
            webs.web_minus_function(k11(), {"a": 2})
