"""Finite-state Markov chains with exact rational stationary data.

Transition entries supplied as fractions stay fractions end to end: the
stationary distribution is solved by Gaussian elimination over Q, so the
residual of mu*P = mu and the cylinder-weight marginal identities hold
exactly, not to a tolerance.  Float entries are accepted as an opt-in mode
with a 1e-12 residual contract.

Cylinder weights mu0[k](s_1..s_k) = mu0(s_1) p(s_1,s_2) ... p(s_{k-1},s_k)
are the stationary distribution of the iterated chain on feasible k-blocks,
and the frequencies of k-blocks along a trajectory converge to them; both
facts are exposed as operations (`mu0_k`, `build_iterated`) and exercised by
the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .rng import CounterRng

FLOAT_ROW_TOL = 1e-12


class NotIrreducible(ValueError):
    pass


def parse_entry(x):
    """Accept Fraction, int, float, or strings like '1/3' / '0.25'."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return x
    if isinstance(x, str):
        s = x.strip()
        if "/" in s:
            return Fraction(s)
        if "." in s or "e" in s or "E" in s:
            return Fraction(s)  # exact decimal
        return Fraction(int(s))
    raise TypeError(f"bad transition entry {x!r}")


class Fsmc:
    """Finite state set plus a row-stochastic transition matrix."""

    def __init__(self, states, rows):
        self.states = tuple(states)
        if len(set(self.states)) != len(self.states):
            raise ValueError("duplicate states")
        self.index = {s: i for i, s in enumerate(self.states)}
        k = len(self.states)
        parsed = []
        rational = True
        for r, row in enumerate(rows):
            if len(row) != k:
                raise ValueError(f"row {r} has {len(row)} entries, expected {k}")
            row = tuple(parse_entry(x) for x in row)
            if any(isinstance(x, float) for x in row):
                rational = False
            if any((x < 0) for x in row):
                raise ValueError(f"negative entry in row {r}")
            parsed.append(row)
        self.rational = rational
        if rational:
            for r, row in enumerate(parsed):
                if sum(row) != 1:
                    raise ValueError(f"row {r} sums to {sum(row)} != 1")
        else:
            parsed = [tuple(float(x) for x in row) for row in parsed]
            for r, row in enumerate(parsed):
                if abs(sum(row) - 1.0) > FLOAT_ROW_TOL:
                    raise ValueError(f"row {r} sums to {sum(row)} (tol {FLOAT_ROW_TOL})")
        self.rows = tuple(parsed)
        self._stationary = None
        self._cum = None

    def prob(self, s, t):
        return self.rows[self.index[s]][self.index[t]]

    def successors(self, s):
        i = self.index[s]
        return [t for j, t in enumerate(self.states) if self.rows[i][j] > 0]

    def to_json(self) -> dict:
        return {
            "states": list(self.states),
            "rows": [[str(x) for x in row] for row in self.rows],
        }

    @classmethod
    def from_json(cls, data) -> "Fsmc":
        return cls(data["states"], data["rows"])


def is_irreducible(chain: Fsmc) -> bool:
    """Strong connectivity of the positive-transition digraph."""
    k = len(chain.states)
    if k == 0:
        return False
    fwd = [[j for j in range(k) if chain.rows[i][j] > 0] for i in range(k)]
    rev = [[] for _ in range(k)]
    for i in range(k):
        for j in fwd[i]:
            rev[j].append(i)

    def reach(adj):
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == k

    return reach(fwd) and reach(rev)


def is_tight(chain: Fsmc) -> bool:
    """All transition probabilities strictly below 1."""
    return all(x < 1 for row in chain.rows for x in row)


@dataclass(frozen=True)
class StationaryData:
    states: tuple
    mu0: tuple

    def __getitem__(self, s):
        return self.mu0[self.states.index(s)]

    def as_dict(self):
        return dict(zip(self.states, self.mu0))


def _solve_stationary(rows, rational):
    """Solve mu (P - I) = 0 with sum(mu) = 1 by Gaussian elimination.

    Works on the transposed system; the rows of P^T - I sum to zero, so the
    last equation may be replaced by the normalization without losing rank.
    """
    k = len(rows)
    one = Fraction(1) if rational else 1.0
    zero = Fraction(0) if rational else 0.0
    # A x = b with A = (P^T - I) except last row = ones, b = e_last
    A = [[rows[j][i] - (one if i == j else zero) for j in range(k)] for i in range(k)]
    A[k - 1] = [one] * k
    b = [zero] * (k - 1) + [one]
    for col in range(k):
        pivot = None
        best = zero
        for r in range(col, k):
            mag = abs(A[r][col])
            if mag > best:
                best = mag
                pivot = r
        if pivot is None or A[pivot][col] == 0:
            raise NotIrreducible("singular stationary system (chain not irreducible?)")
        if pivot != col:
            A[col], A[pivot] = A[pivot], A[col]
            b[col], b[pivot] = b[pivot], b[col]
        inv = one / A[col][col]
        A[col] = [x * inv for x in A[col]]
        b[col] = b[col] * inv
        for r in range(k):
            if r != col and A[r][col] != 0:
                f = A[r][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
                b[r] = b[r] - f * b[col]
    return tuple(b)


def stationary(chain: Fsmc) -> StationaryData:
    """The unique stationary distribution of an irreducible chain.

    Exact in rational mode (residual of mu*P = mu is identically zero);
    float mode checks the residual against 1e-12.
    """
    if chain._stationary is not None:
        return chain._stationary
    if not is_irreducible(chain):
        raise NotIrreducible("stationary distribution requires an irreducible chain")
    mu = _solve_stationary(chain.rows, chain.rational)
    if not chain.rational:
        k = len(chain.states)
        resid = sum(abs(sum(mu[i] * chain.rows[i][j] for i in range(k)) - mu[j])
                    for j in range(k))
        if resid > FLOAT_ROW_TOL:
            raise ArithmeticError(f"float stationary residual {resid} above {FLOAT_ROW_TOL}")
    data = StationaryData(chain.states, mu)
    chain._stationary = data
    return data


def mu0_k(chain: Fsmc, word) -> Fraction | float:
    """Stationary cylinder weight mu0(s_1) p(s_1,s_2) ... p(s_{k-1},s_k).

    Zero when any transition is infeasible; weights over all k-words sum to 1.
    """
    word = tuple(word)
    if not word:
        raise ValueError("word must be nonempty")
    for s in word:
        if s not in chain.index:
            raise KeyError(f"unknown state {s!r}")
    mu = stationary(chain)
    w = mu.mu0[chain.index[word[0]]]
    for a, b in zip(word, word[1:]):
        if w == 0:
            return w
        w = w * chain.prob(a, b)
    return w


def feasible_words(chain: Fsmc, k: int):
    """All feasible k-blocks, in lexicographic state order."""
    out = [(s,) for s in chain.states]
    for _ in range(k - 1):
        out = [w + (t,) for w in out for t in chain.states if chain.prob(w[-1], t) > 0]
    return out


def build_iterated(chain: Fsmc, k: int) -> Fsmc:
    """The k-block chain: states are feasible k-words, shifts inherit p(s_k, s).

    Its stationary distribution equals mu0[k] pointwise.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if k == 1:
        return chain
    states = feasible_words(chain, k)
    idx = {w: i for i, w in enumerate(states)}
    zero = Fraction(0) if chain.rational else 0.0
    rows = []
    for w in states:
        row = [zero] * len(states)
        for t in chain.states:
            p = chain.prob(w[-1], t)
            if p > 0:
                row[idx[w[1:] + (t,)]] = p
        rows.append(row)
    return Fsmc(states, rows)


def sample(chain: Fsmc, mu, n: int, seed) -> list:
    """A length-n state trajectory; deterministic in (seed, step counter).

    `mu` is the initial distribution: a dict state->weight, a vector aligned
    with chain.states, or None for the stationary distribution.  Sampling is
    inverse-CDF per row with a counter-based generator, so parallel trials
    keyed by distinct seeds never share or race a generator state.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if mu is None:
        mu = stationary(chain).mu0
    elif isinstance(mu, dict):
        mu = [mu.get(s, 0) for s in chain.states]
    weights = [float(x) for x in mu]
    total = sum(weights)
    if abs(total - 1.0) > 1e-9:
        raise ValueError("initial distribution must sum to 1")
    if chain._cum is None:
        cum_rows = []
        for row in chain.rows:
            acc = 0.0
            cum = []
            for x in row:
                acc += float(x)
                cum.append(acc)
            cum_rows.append(cum)
        chain._cum = cum_rows
    cum_rows = chain._cum

    rng = CounterRng(seed)
    u = rng.uniform(0)
    acc = 0.0
    state = len(weights) - 1
    for i, wgt in enumerate(weights):
        acc += wgt
        if u < acc:
            state = i
            break
    out = [chain.states[state]]
    uniform = rng.uniform
    for step in range(1, n):
        u = uniform(step)
        cum = cum_rows[state]
        lo, hi = 0, len(cum) - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if u < cum[mid]:
                hi = mid
            else:
                lo = mid + 1
        state = lo
        out.append(chain.states[state])
    return out
