"""Minimality detectors: strict, (M,lambda,eps[,move-set]) and spectrum estimates.

All threshold comparisons are exact: lambda and eps are rationals and cyclic
lengths are integers, so a ratio test never depends on float rounding.

The linear-time detector builds the candidate set S' of every class reachable
from the input by at most M moves whose stepwise length ratio stays <= 1+eps,
then verifies the minimizing-set conditions directly on S'.  If the input
belongs to any qualifying set at all, that set must equal S', so the check is
complete, not heuristic.

The MLE-mode verifier enumerates the orbit ball of radius (1+eps)*max length
by capped BFS; peak reduction guarantees the ball search finds every orbit
element inside the radius.  Violations with ratio between 1+eps and lambda
are beyond the ball and are out of the verifier's stated scope.
"""

from __future__ import annotations

import statistics
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from .algorithm import CapExceeded, Witness, _chain_witness, minimize, level_component
from .moves import MoveSet, get_move_set
from .words import CyclicWord, format_word
from .rng import CounterRng


@dataclass(frozen=True)
class MleParams:
    """Detector parameters: set size bound M, threshold lambda, slack eps."""

    m: int
    lam: Fraction
    eps: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lam", Fraction(self.lam))
        object.__setattr__(self, "eps", Fraction(self.eps))
        if self.m < 1:
            raise ValueError("M must be >= 1")
        if not self.lam > 1:
            raise ValueError("lambda must be > 1")
        if not (0 < self.eps < 1):
            raise ValueError("eps must lie in (0,1)")
        if not self.eps < self.lam - 1:
            raise ValueError("need eps < lambda - 1")

    @property
    def detector_ok(self) -> bool:
        """The extra inequality lambda*(1-eps)/(1+eps) > 1 the detector needs."""
        return self.lam * (1 - self.eps) / (1 + self.eps) > 1


@dataclass
class MinimizingSet:
    classes: frozenset
    params: MleParams
    mode: str                       # "mlew" or "mle"
    witnesses: dict = field(default_factory=dict)  # class -> move-index chain from the seed

    def __contains__(self, c):
        return c in self.classes

    def __len__(self):
        return len(self.classes)


@dataclass
class MlewFailure:
    condition: int
    detail: str
    classes: frozenset = frozenset()


def is_strictly_minimal(c: CyclicWord, moves: MoveSet | None = None) -> bool:
    """True iff every non-inner second-kind move strictly increases ||c||."""
    moves = moves or get_move_set(max(2, max(abs(x) for x in c)))
    n = len(c)
    lengths = moves.image_lengths(c)
    return all(lengths[i] > n for i in moves.second_kind_non_inner)


def detect_mlew(c: CyclicWord, params: MleParams, moves: MoveSet | None = None):
    """Linear-time decision of (M,lambda,eps,move-set)-minimality of [c].

    Returns the (unique) MinimizingSet on success, otherwise an MlewFailure
    naming the first violated condition.  Requires the detector inequality
    lambda*(1-eps)/(1+eps) > 1.
    """
    if not params.detector_ok:
        raise ValueError("parameters violate lambda*(1-eps)/(1+eps) > 1")
    moves = moves or get_move_set(max(2, max(abs(x) for x in c)))
    one_plus = 1 + params.eps

    # S' := classes reachable by <= M moves with stepwise ratio <= 1+eps.
    chains = {c: ()}
    lengths_of = {c: moves.image_lengths(c)}
    frontier = [c]
    for _ in range(params.m):
        nxt = []
        for v in frontier:
            n_v = len(v)
            for idx, ln in enumerate(lengths_of[v]):
                if Fraction(ln, n_v) > one_plus:
                    continue
                w = v if moves[idx].is_inner else moves[idx].apply_to_class(v)
                if w not in chains:
                    chains[w] = chains[v] + (idx,)
                    lengths_of[w] = moves.image_lengths(w)
                    nxt.append(w)
        frontier = nxt
        if not frontier:
            break

    candidate = frozenset(chains)
    # Condition (1): cardinality.
    if len(candidate) > params.m:
        return MlewFailure(1, f"reachable set has {len(candidate)} > M={params.m} classes",
                           candidate)
    # Condition (3): pairwise length ratios within [1-eps, 1+eps].
    lens = sorted(len(v) for v in candidate)
    lo, hi = lens[0], lens[-1]
    if Fraction(hi, lo) > one_plus or Fraction(lo, hi) < 1 - params.eps:
        return MlewFailure(3, f"length spread {lo}..{hi} exceeds eps={params.eps}", candidate)
    # Condition (4): every move either stays in the set or stretches by >= lambda.
    for v in candidate:
        n_v = len(v)
        for idx, ln in enumerate(lengths_of[v]):
            if Fraction(ln, n_v) >= params.lam:
                continue
            w = v if moves[idx].is_inner else moves[idx].apply_to_class(v)
            if w not in candidate:
                return MlewFailure(
                    4,
                    f"move {idx} sends {format_word(v)} to {format_word(w)} "
                    f"(ratio {ln}/{n_v} < lambda) outside the set",
                    candidate)
    # Condition (2) holds by construction: everything was reached from c.
    witnesses = {v: chain for v, chain in chains.items()}
    return MinimizingSet(candidate, params, "mlew", witnesses)


def orbit_ball(c: CyclicWord, length_cap: int, moves: MoveSet,
               vertex_cap: int = 10 ** 6) -> set:
    """All orbit elements of cyclic length <= length_cap (capped BFS).

    Peak reduction lets any orbit element of length within the cap be reached
    through classes of length <= max(its length, ||c||), so the capped
    closure is exhaustive inside the ball.
    """
    if len(c) > length_cap:
        raise ValueError("seed longer than the ball radius")
    seen = {c}
    queue = deque([c])
    while queue:
        v = queue.popleft()
        lengths = moves.image_lengths(v)
        for idx, ln in enumerate(lengths):
            if ln > length_cap or moves[idx].is_inner:
                continue
            w = moves[idx].apply_to_class(v)
            if w not in seen:
                seen.add(w)
                if len(seen) > vertex_cap:
                    raise CapExceeded(vertex_cap, len(seen))
                queue.append(w)
    return seen


def verify_minimizing_set(classes, params: MleParams, mode: str = "mlew",
                          moves: MoveSet | None = None, vertex_cap: int = 10 ** 6,
                          length_cap: int | None = None):
    """Check the minimizing-set conditions for S directly.

    mode="mlew": all four conditions by direct move application (same-orbit
    via the full equivalence procedure).
    mode="mle": conditions (1)-(3) plus the ball check: the orbit ball of
    radius (1+eps)*max||u|| must coincide with S; with the stated radius that
    is exactly the brute-force rho >= lambda test of the exponential
    procedure, truncated at the documented cap.

    Returns (ok, violations).
    """
    S = set(classes)
    if not S:
        return False, ["empty set"]
    moves = moves or get_move_set(max(2, max(abs(x) for c in S for x in c)))
    violations = []
    if len(S) > params.m:
        violations.append(f"condition 1: {len(S)} classes > M={params.m}")
    lens = sorted(len(v) for v in S)
    lo, hi = lens[0], lens[-1]
    if Fraction(hi, lo) > 1 + params.eps or Fraction(lo, hi) < 1 - params.eps:
        violations.append(f"condition 3: length spread {lo}..{hi}")

    if mode == "mlew":
        members = sorted(S)
        from .algorithm import equivalent
        base = members[0]
        for other in members[1:]:
            ok, _ = equivalent(base, other, moves, vertex_cap)
            if not ok:
                violations.append(
                    f"condition 2: {format_word(base)} and {format_word(other)} "
                    "in different orbits")
        for v in members:
            n_v = len(v)
            lengths = moves.image_lengths(v)
            for idx, ln in enumerate(lengths):
                if Fraction(ln, n_v) >= params.lam:
                    continue
                w = v if moves[idx].is_inner else moves[idx].apply_to_class(v)
                if w not in S:
                    violations.append(
                        f"condition 4: move {idx} escapes the set from {format_word(v)} "
                        f"with ratio {ln}/{n_v} < lambda")
        return not violations, violations

    if mode != "mle":
        raise ValueError(f"unknown mode {mode!r}")
    if length_cap is None:
        length_cap = int((1 + params.eps) * hi)  # floor of the exact rational radius
    seed = min(S)
    ball = orbit_ball(seed, length_cap, moves, vertex_cap)
    missing = S - ball
    if missing:
        violations.append(
            f"condition 2: {len(missing)} classes not in the orbit ball of the seed")
    extra = ball - S
    if extra:
        sample = format_word(sorted(extra)[0])
        violations.append(
            f"condition 4: orbit element {sample} of length <= (1+eps)*max "
            f"lies outside the set (rho < lambda)")
    return not violations, violations


# -- empirical distortion spectrum ----------------------------------------


@dataclass
class AutEstimate:
    images: tuple          # images of the positive generators, as words
    word_count: int        # how many move products collapsed onto this action
    mean: float
    stderr: float
    samples: int
    is_first_kind_product: bool


@dataclass
class DistortionEstimate:
    """Monte-Carlo ratio table over products of <= radius moves.

    `j_hat` is the smallest mean ratio, `delta_hat` the argmin set (within
    one combined confidence radius), `lambda_hat` the second-smallest over
    smallest mean, and `m_hat` the size of delta_hat.  Estimates only; exact
    computation of the spectrum for non-rational currents is out of scope.
    """

    entries: list
    j_hat: float
    lambda_hat: float
    delta_hat: list
    m_hat: int
    collisions: int
    warnings: list


SAMPLE_FLOOR = 200  # below this the normal-approximation radii are unreliable


def _compose(images, move, rank):
    """images: tuple of words for a_1..a_N; postcompose with `move`."""
    return tuple(move.apply_to_word(img) for img in images)


def _image_table(images):
    table = {}
    for i, img in enumerate(images, start=1):
        table[i] = img
        table[-i] = tuple(-x for x in reversed(img))
    return table


def _apply_images(images, c):
    from .words import cyclic_reduce, free_reduce
    table = _image_table(images)
    out = []
    for x in c:
        out.extend(table[x])
    core, _ = cyclic_reduce(free_reduce(out))
    return len(core)


def estimate_distortion(stream, radius: int, samples: int,
                        moves: MoveSet | None = None, seed: int = 0,
                        probe_count: int = 32):
    """Estimate the distortion spectrum of the current a word stream is adapted to.

    Enumerates products of at most `radius` moves, dedupes them by their
    action on `probe_count` random probe words (word-problem-free; collisions
    are counted, not hidden), then reports the mean of ||phi(w)||/||w|| over
    the sampled stream for each surviving action.
    """
    if radius < 1 or samples < 1:
        raise ValueError("radius and samples must be >= 1")
    words = []
    for w in stream:
        words.append(w)
        if len(words) >= samples:
            break
    if not words:
        raise ValueError("empty stream")
    moves = moves or get_move_set(max(2, max(abs(x) for w in words for x in w)))
    rank = moves.rank

    rng = CounterRng(seed, "distortion-probes")
    probes = []
    for t in range(probe_count):
        letters = []
        prev = 0
        for i in range(8):
            options = [x for x in range(-rank, rank + 1) if x and x != -prev]
            prev = options[rng.randrange(t * 101 + i, len(options))]
            letters.append(prev)
        probes.append(tuple(letters))

    identity = tuple((i,) for i in range(1, rank + 1))
    frontier = [(identity, True)]
    by_action = {}
    collisions = 0

    def action_sig(images):
        from .words import free_reduce
        table = _image_table(images)
        sig = []
        for p in probes:
            out = []
            for x in p:
                out.extend(table[x])
            sig.append(free_reduce(out))
        return tuple(sig)

    by_action[action_sig(identity)] = [identity, 1, True]
    for _ in range(radius):
        nxt = []
        for images, first_only in frontier:
            for mv in moves:
                new = _compose(images, mv, rank)
                fk = first_only and mv.kind == 1
                sig = action_sig(new)
                if sig in by_action:
                    by_action[sig][1] += 1
                    collisions += 1
                else:
                    by_action[sig] = [new, 1, fk]
                    nxt.append((new, fk))
        frontier = nxt

    entries = []
    for images, count, fk in by_action.values():
        ratios = [_apply_images(images, w) / len(w) for w in words]
        mean = statistics.fmean(ratios)
        sd = statistics.pstdev(ratios) if len(ratios) > 1 else 0.0
        stderr = sd / max(1, len(ratios)) ** 0.5
        entries.append(AutEstimate(images, count, mean, stderr, len(ratios), fk))
    entries.sort(key=lambda e: e.mean)

    warnings = []
    if samples < SAMPLE_FLOOR:
        warnings.append(f"samples {samples} below the documented floor {SAMPLE_FLOOR}; "
                        "confidence radii are indicative only")
    if collisions:
        warnings.append(f"{collisions} move products collided on the probe set")

    j_hat = entries[0].mean
    radius0 = entries[0].stderr
    delta = []
    for e in entries:
        if e.mean <= j_hat + 2 * (radius0 + e.stderr) + 1e-12:
            delta.append(e)
        else:
            break
    rest = entries[len(delta):]
    lambda_hat = (rest[0].mean / j_hat) if rest else float("inf")
    return DistortionEstimate(entries, j_hat, lambda_hat,
                              [e.images for e in delta], len(delta),
                              collisions, warnings)


# -- ancillary: minimal-set machinery used by experiments -------------------


def minimal_class_set(c: CyclicWord, moves: MoveSet, vertex_cap: int = 10 ** 6):
    """M([c]): minimize, then collect the whole level component."""
    res = minimize(c, moves)
    comp = level_component(res.minimal, moves, vertex_cap)
    return res, comp
