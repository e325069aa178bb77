import io
import random
from fractions import Fraction

import pytest

from whitehead.currents import (
    FillingCertificate,
    GraphChart,
    Inconclusive,
    RoseChart,
    certify_filling,
    characteristic_current,
    counting_current,
    default_probes,
    length_norm,
    projective_distance,
    reduced_paths,
    uniform_current,
)
from whitehead.fsmc import Fsmc
from whitehead.samplers import make_preset
from whitehead.words import conjugacy_class, occurrences_symmetrized

from test_moves import random_class


class TestCounting:
    def test_ab_depth1(self):
        t = counting_current(conjugacy_class("ab"), 2, 1)
        assert t.weight((1,)) == 1 and t.weight((-1,)) == 1
        assert t.weight((2,)) == 1 and t.weight((-2,)) == 1
        assert length_norm(t) == 2

    def test_aa_depth2(self):
        t = counting_current(conjugacy_class("aa"), 2, 2)
        assert t.weight((1, 1)) == 2
        assert t.weight((-1, -1)) == 2
        assert length_norm(t) == 2

    def test_matches_symmetrized_occurrences(self):
        rng = random.Random(1)
        for _ in range(30):
            c = random_class(rng, max_len=15)
            depth = rng.randint(1, 4)
            t = counting_current(c, 2, depth)
            for v in t.weights:
                assert t.weights[v] == occurrences_symmetrized(v, c)

    def test_switch_and_flip_exact(self):
        rng = random.Random(2)
        for _ in range(60):
            c = random_class(rng, max_len=20)
            t = counting_current(c, 2, rng.randint(2, 4))
            assert t.switch_violations() == []
            assert t.flip_violations() == []

    def test_norm_equals_length(self):
        rng = random.Random(3)
        for _ in range(50):
            c = random_class(rng, max_len=25)
            assert length_norm(counting_current(c, 2, 1)) == len(c)


class TestUniform:
    def test_values_rank2(self):
        t = uniform_current(2, 3)
        assert t.weight((1,)) == Fraction(1, 2)
        assert t.weight((1, 2)) == Fraction(1, 6)
        assert t.weight((1, 2, 1)) == Fraction(1, 18)

    def test_norm_one_and_switch(self):
        for rank in (2, 3):
            t = uniform_current(rank, 3)
            assert length_norm(t) == 1
            assert t.switch_violations() == []
            assert t.flip_violations() == []


class TestCharacteristic:
    def test_rose_uniform_equals_uniform_current(self):
        p = make_preset("rose2")
        for depth in (1, 2, 3):
            t = characteristic_current(p.chain, p.graph, depth)
            u = uniform_current(2, depth)
            from whitehead.words import format_word
            for v, w in u.weights.items():
                # rose edge ids are the letter characters themselves
                path = tuple(format_word((x,)) for x in v)
                assert t.weight(path) == w
            assert length_norm(t) == 1

    def test_positive_chain_support(self):
        p = make_preset("rose-positive")
        t = characteristic_current(p.chain, p.graph, 3)
        for v, w in t.weights.items():
            positive = all(x in ("a", "b") for x in v)
            negative = all(x in ("A", "B") for x in v)
            assert (w > 0) == (positive or negative)

    def test_exactness_across_presets(self):
        for name in ("rose2", "rose-positive", "lollipop", "chart-example2"):
            p = make_preset(name)
            t = characteristic_current(p.chain, p.graph, 4)
            assert length_norm(t) == 1
            assert t.switch_violations() == []
            assert t.flip_violations() == []

    def test_rejects_non_gamma_based(self):
        p = make_preset("rose2")
        half = Fraction(1, 2)
        bad = Fsmc(["a", "A"], [[half, half], [half, half]])
        with pytest.raises(ValueError):
            characteristic_current(bad, p.graph, 2)


class TestDistance:
    def test_identity_and_scaling(self):
        t = counting_current(conjugacy_class("abbab"), 2, 3)
        assert projective_distance(t, t) == 0
        doubled = type(t)(t.chart, t.depth,
                          {k: 2 * v for k, v in t.weights.items()}, t.kind)
        assert projective_distance(t, doubled) == 0

    def test_pseudometric_sampled(self):
        rng = random.Random(4)
        tables = [counting_current(random_class(rng, max_len=20), 2, 3)
                  for _ in range(6)]
        probes = default_probes(2, 3)
        for a in tables:
            for b in tables:
                dab = projective_distance(a, b, probes)
                assert dab == pytest.approx(projective_distance(b, a, probes))
                for c in tables:
                    assert dab <= (projective_distance(a, c, probes)
                                   + projective_distance(c, b, probes) + 1e-12)

    def test_sampled_word_near_characteristic(self):
        p = make_preset("rose2")
        char = characteristic_current(p.chain, p.graph, 3)
        _, closed = p.sample("hat", 50_000, 77)
        t = counting_current(closed, GraphChart(p.graph), 3)
        assert projective_distance(t, char) <= 0.02


class TestDump:
    def test_jsonl_format(self):
        t = uniform_current(2, 1)
        buf = io.StringIO()
        t.dump_jsonl(buf)
        lines = buf.getvalue().strip().split("\n")
        assert len(lines) == 4
        assert '"word": "a"' in lines[0]
        assert '"weight": "1/2"' in lines[0]


class TestFilling:
    def test_three_subword_de_bruijn_style(self):
        # Eulerian circuit on the reduced-word shift graph (vertices are the
        # 12 reduced 2-words, edges the 36 reduced 3-words) spells a cyclic
        # word of length 36 containing every reduced 3-word forwards
        from whitehead.words import CyclicWord

        out_edges = {}
        for v in reduced_paths(RoseChart(2), 3):
            out_edges.setdefault(v[:2], []).append(v)
        stack = [next(iter(out_edges))]
        circuit = []
        while stack:
            v = stack[-1]
            if out_edges.get(v):
                e = out_edges[v].pop()
                stack.append(e[1:])
            else:
                circuit.append(stack.pop())
        circuit.reverse()
        word = [v[0] for v in circuit[:-1]]  # closed walk: drop repeated end
        assert len(word) == 36
        c = CyclicWord(word)
        cert = certify_filling(c, "three-subword", rank=2)
        assert isinstance(cert, FillingCertificate)
        assert cert.conclusive

    def test_three_subword_explicit(self):
        # a commutator power misses most length-3 subwords
        res = certify_filling(conjugacy_class("abAB"), "three-subword", rank=2)
        assert isinstance(res, Inconclusive)

    def test_full_support_depth(self):
        t = uniform_current(2, 3)
        cert = certify_filling(t, "full-support-depth")
        assert isinstance(cert, FillingCertificate)
        assert not cert.conclusive  # depth-bounded evidence only
        assert cert.evidence["depth"] == 3

    def test_fsmc_xf_case1_rose(self):
        p = make_preset("rose2")
        cert = certify_filling(p.chain, "fsmc-xf", graph=p.graph)
        assert isinstance(cert, FillingCertificate)
        assert cert.conclusive and cert.evidence["case"] == 1

    def test_fsmc_xf_case1_theta(self):
        p = make_preset("chart-example2")
        cert = certify_filling(p.chain, "fsmc-xf", graph=p.graph)
        assert cert.conclusive and cert.evidence["case"] == 1

    def test_fsmc_xf_case2_positive(self):
        p = make_preset("rose-positive")
        cert = certify_filling(p.chain, "fsmc-xf", graph=p.graph)
        assert cert.conclusive and cert.evidence["case"] == 2

    def test_fsmc_xf_case4_lollipop(self):
        p = make_preset("lollipop")
        cert = certify_filling(p.chain, "fsmc-xf", graph=p.graph)
        assert cert.conclusive and cert.evidence["case"] == 4

    def test_basis_pairs_on_positive_chain(self):
        p = make_preset("rose-positive")
        # rose chart table over letters, from the chain's characteristic data
        t = uniform_current(2, 4)
        cert = certify_filling(t, "basis-pairs", power_bound=2)
        assert isinstance(cert, FillingCertificate)
        assert not cert.conclusive

    def test_word_power(self):
        # base word must itself certify filling first
        t = uniform_current(2, 4)
        res = certify_filling(t, "word-power", word=conjugacy_class("abAB"),
                              power_bound=1)
        assert isinstance(res, Inconclusive)
