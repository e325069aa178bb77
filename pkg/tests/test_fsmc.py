import random
from fractions import Fraction

import pytest

from whitehead.fsmc import (
    Fsmc,
    NotIrreducible,
    build_iterated,
    feasible_words,
    is_irreducible,
    is_tight,
    mu0_k,
    sample,
    stationary,
)

HALF = Fraction(1, 2)


def two_state():
    return Fsmc(["s", "t"], [[HALF, HALF], [HALF, HALF]])


def rose_chain():
    third = Fraction(1, 3)
    zero = Fraction(0)
    # states a, A, b, B; uniform over the three non-inverse successors
    return Fsmc(["a", "A", "b", "B"], [
        [third, zero, third, third],
        [zero, third, third, third],
        [third, third, third, zero],
        [third, third, zero, third],
    ])


def random_rational_chain(rng, k):
    rows = []
    for _ in range(k):
        cuts = sorted(rng.randint(0, 24) for _ in range(k - 1))
        parts = []
        prev = 0
        for c in cuts:
            parts.append(c - prev)
            prev = c
        parts.append(24 - prev)
        rows.append([Fraction(p, 24) for p in parts])
    # splice in a positive cycle so the chain is irreducible
    for i in range(k):
        j = (i + 1) % k
        if rows[i][j] == 0:
            rows[i] = [x * Fraction(1, 2) for x in rows[i]]
            rows[i][j] += HALF
    return Fsmc(list(range(k)), rows)


class TestValidation:
    def test_row_sum_enforced(self):
        with pytest.raises(ValueError):
            Fsmc(["x", "y"], [[HALF, HALF], [HALF, Fraction(1, 3)]])

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            Fsmc(["x", "y"], [[Fraction(3, 2), Fraction(-1, 2)], [HALF, HALF]])

    def test_fraction_strings(self):
        chain = Fsmc(["x", "y"], [["1/3", "2/3"], ["0.25", "3/4"]])
        assert chain.rational
        assert chain.prob("y", "x") == Fraction(1, 4)

    def test_float_mode(self):
        chain = Fsmc(["x", "y"], [[0.5, 0.5], [0.25, 0.75]])
        assert not chain.rational

    def test_json_round_trip(self):
        chain = rose_chain()
        again = Fsmc.from_json(chain.to_json())
        assert again.states == chain.states
        assert again.rows == chain.rows


class TestIrreducible:
    def test_all_half(self):
        assert is_irreducible(two_state())

    def test_block_diagonal(self):
        zero = Fraction(0)
        blocks = Fsmc(list("wxyz"), [
            [HALF, HALF, zero, zero],
            [HALF, HALF, zero, zero],
            [zero, zero, HALF, HALF],
            [zero, zero, HALF, HALF],
        ])
        assert not is_irreducible(blocks)

    def test_rose(self):
        assert is_irreducible(rose_chain())


class TestTight:
    def test_examples(self):
        assert is_tight(two_state())
        assert is_tight(rose_chain())
        assert not is_tight(Fsmc(["x", "y"], [[Fraction(1), Fraction(0)],
                                              [HALF, HALF]]))


class TestStationary:
    def test_symmetric_two_state(self):
        assert stationary(two_state()).mu0 == (HALF, HALF)

    def test_rose_uniform(self):
        assert stationary(rose_chain()).mu0 == (Fraction(1, 4),) * 4

    def test_not_irreducible_raises(self):
        one, zero = Fraction(1), Fraction(0)
        with pytest.raises(NotIrreducible):
            stationary(Fsmc(["x", "y"], [[one, zero], [zero, one]]))

    def test_exact_residual_on_random_chains(self):
        rng = random.Random(8)
        for _ in range(25):
            chain = random_rational_chain(rng, rng.randint(2, 8))
            assert is_irreducible(chain)
            mu = stationary(chain).mu0
            assert sum(mu) == 1
            k = len(chain.states)
            for j in range(k):
                assert sum(mu[i] * chain.rows[i][j] for i in range(k)) == mu[j]

    def test_float_fallback(self):
        chain = Fsmc(["x", "y"], [[0.5, 0.5], [0.25, 0.75]])
        mu = stationary(chain).mu0
        assert abs(mu[0] - 1 / 3) < 1e-12


class TestCylinderWeights:
    def test_k1_is_stationary(self):
        chain = rose_chain()
        mu = stationary(chain)
        for s in chain.states:
            assert mu0_k(chain, [s]) == mu[s]

    def test_two_state_pair(self):
        assert mu0_k(two_state(), ["s", "t"]) == Fraction(1, 4)

    def test_infeasible_zero(self):
        assert mu0_k(rose_chain(), ["a", "A"]) == 0

    def test_unknown_state(self):
        with pytest.raises(KeyError):
            mu0_k(rose_chain(), ["a", "zz"])

    def test_marginal_identities_exact(self):
        rng = random.Random(9)
        for _ in range(5):
            chain = random_rational_chain(rng, rng.randint(2, 5))
            for k in (1, 2, 3):
                for v in feasible_words(chain, k):
                    w = mu0_k(chain, v)
                    right = sum(mu0_k(chain, v + (s,)) for s in chain.states)
                    left = sum(mu0_k(chain, (s,) + v) for s in chain.states)
                    assert w == right == left
            for k in (1, 2, 3):
                assert sum(mu0_k(chain, v) for v in feasible_words(chain, k)) == 1


class TestIterated:
    def test_k1_identity(self):
        chain = rose_chain()
        assert build_iterated(chain, 1) is chain

    def test_two_state_k2(self):
        it = build_iterated(two_state(), 2)
        assert len(it.states) == 4
        assert stationary(it).mu0 == (Fraction(1, 4),) * 4

    def test_stationary_matches_mu0k(self):
        rng = random.Random(10)
        for _ in range(5):
            chain = random_rational_chain(rng, rng.randint(2, 5))
            it = build_iterated(chain, 2)
            assert is_irreducible(it)
            mu = stationary(it)
            for v in it.states:
                assert mu[v] == mu0_k(chain, v)


class TestSample:
    def test_deterministic(self):
        chain = rose_chain()
        assert sample(chain, None, 200, 5) == sample(chain, None, 200, 5)
        assert sample(chain, None, 200, 5) != sample(chain, None, 200, 6)

    def test_forced_cycle_periodic(self):
        one, zero = Fraction(1), Fraction(0)
        cyc = Fsmc(["x", "y"], [[zero, one], [one, zero]])
        assert not is_tight(cyc)
        traj = sample(cyc, {"x": 1}, 6, 0)
        assert traj == ["x", "y", "x", "y", "x", "y"]

    def test_respects_feasibility(self):
        chain = rose_chain()
        traj = sample(chain, None, 5000, 11)
        inv = {"a": "A", "A": "a", "b": "B", "B": "b"}
        for s, t in zip(traj, traj[1:]):
            assert t != inv[s]

    def test_letter_frequencies_converge(self):
        chain = rose_chain()
        mu = stationary(chain)
        ns = [1000, 10_000, 100_000]
        errs = []
        for n in ns:
            traj = sample(chain, None, n, 123)
            err = max(abs(traj.count(s) / n - float(mu[s])) for s in chain.states)
            errs.append(err)
        assert errs[-1] <= 0.01
        # decaying error with factor-2 slack
        assert errs[2] <= 2 * errs[1] and errs[1] <= 2 * errs[0]

    def test_block_frequencies_converge(self):
        chain = rose_chain()
        n = 100_000
        traj = sample(chain, None, n, 321)
        for k in (2, 3):
            counts = {}
            for i in range(n):
                v = tuple(traj[(i + j) % n] for j in range(k))
                counts[v] = counts.get(v, 0) + 1
            for v in feasible_words(chain, k):
                assert abs(counts.get(v, 0) / n - float(mu0_k(chain, v))) <= 0.01


class TestQuasiInversion:
    def test_bound_at_n400(self):
        # tight chain: coincidence probability <= sigma^floor(sqrt(n));
        # at n=400 the bound is (1/3)^20, so zero events are expected
        chain = rose_chain()
        inv = {"a": "A", "A": "a", "b": "B", "B": "b"}
        trials = 20_000
        n, k = 400, 20
        hits = 0
        for t in range(trials):
            traj = sample(chain, None, n, (202, t))
            head = traj[:k]
            tail = traj[n - k:]
            if head == [inv[s] for s in reversed(tail)]:
                hits += 1
        sigma = 1 / 3
        assert hits / trials <= sigma ** k + 1e-9
