"""The beta-shift language: admissibility, counting, fullness, cylinders.

Admissibility of a digit word is the classical lexicographic condition of
Parry: every suffix must be at most the same-length prefix of the expansion
of 1.  The follower automaton operationalises it.  Its state is the length of
the longest suffix of the word read so far that is a prefix of the expansion
of 1; a digit exceeding the next reference digit rejects, matching it
advances, and a smaller digit falls back through KMP failure links.

For a simple Parry base the reference sequence is purely periodic, states are
taken mod the period, and the automaton is finite and exact at all depths.
Otherwise the automaton is built to a requested depth and rebuilt on demand.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

from .expansion import (
    BetaContext,
    Word,
    beta_power_bounds,
    word_sum_bounds,
)
from .numerics import BoundedReal


def lex_compare(a: Word, b: Word) -> int:
    """-1, 0, or 1 for words of equal length."""
    if len(a) != len(b):
        raise ValueError("lex_compare requires equal lengths")
    if a < b:
        return -1
    if a > b:
        return 1
    return 0


def _failure_links(pattern: list[int]) -> list[int]:
    pi = [0] * len(pattern)
    k = 0
    for i in range(1, len(pattern)):
        while k > 0 and pattern[i] != pattern[k]:
            k = pi[k - 1]
        if pattern[i] == pattern[k]:
            k += 1
        pi[i] = k
    return pi


class FollowerAutomaton:
    """Deterministic acceptor for the beta-admissible words.

    States are 0..S; state s means the last s digits read equal the first s
    reference digits (mod the period for a simple Parry base).  ``step``
    returns the next state or None for rejection.
    """

    def __init__(self, ctx: BetaContext, depth: int):
        self.ctx = ctx
        ctx.eps_star(min(depth, 64) + 1)  # may discover termination cheaply
        if ctx.simple_parry is None:
            ctx.eps_star(depth + 1)
        period = ctx._star_period
        if period is not None:
            m = len(period)
            for p in range(1, m):
                if m % p == 0 and period == period[:p] * (m // p):
                    raise AssertionError("reference period must be primitive")
            self.period = m
            self.pattern = list(period) * 3
            self.depth = depth
        else:
            self.period = None
            self.pattern = list(ctx.eps_star(depth + 1))
            self.depth = depth
        self.pi = _failure_links(self.pattern)
        self._table: list[list[Optional[int]]] = []

    @property
    def num_states(self) -> int:
        return self.period if self.period is not None else self.depth + 1

    def _step_raw(self, lifted: int, c: int) -> Optional[int]:
        e = self.pattern[lifted]
        if c > e:
            return None
        if c == e:
            return lifted + 1
        t = lifted
        while t > 0 and self.pattern[t] != c:
            t = self.pi[t - 1]
        if self.pattern[t] == c:
            t += 1
        else:
            t = 0
        return t

    def step(self, state: int, c: int) -> Optional[int]:
        if c < 0:
            raise ValueError("digits are non-negative")
        if self.period is not None:
            t = self._step_raw(state + self.period, c)
            return None if t is None else t % self.period
        if state > self.depth:
            raise ValueError("automaton depth exceeded; rebuild deeper")
        return self._step_raw(state, c)

    def transition_table(self, alphabet_max: Optional[int] = None) -> list[list[Optional[int]]]:
        """Dense (state, digit) table; None entries are rejections."""
        amax = self.ctx.alphabet_max if alphabet_max is None else alphabet_max
        if self._table and len(self._table[0]) == amax + 1:
            return self._table
        states = self.num_states
        self._table = [
            [self.step(s, c) for c in range(amax + 1)] for s in range(states)
        ]
        return self._table

    def feed(self, word: Word, state: int = 0) -> Optional[int]:
        for c in word:
            state = self.step(state, c)
            if state is None:
                return None
        return state

    def accepts(self, word: Word) -> bool:
        return self.feed(word) is not None

    def max_digit(self, state: int) -> int:
        if self.period is not None:
            return self.pattern[state % self.period]
        return self.pattern[state]


def automaton_for(ctx: BetaContext, depth: int) -> FollowerAutomaton:
    """Automaton for ctx usable on words of length <= depth, cached on the context."""
    cached = getattr(ctx, "_follower_cache", None)
    if cached is not None and (cached.period is not None or cached.depth >= depth):
        return cached
    auto = FollowerAutomaton(ctx, max(depth, 64))
    ctx._follower_cache = auto
    return auto


# ---------------------------------------------------------------------------
# admissibility
# ---------------------------------------------------------------------------


def is_admissible(w: Word, ctx: BetaContext) -> bool:
    if any(d < 0 for d in w):
        raise ValueError("digits are non-negative")
    if any(d > ctx.alphabet_max for d in w):
        return False
    return automaton_for(ctx, len(w)).accepts(w)


def is_admissible_naive(w: Word, ctx: BetaContext) -> bool:
    """Direct suffix-by-suffix lexicographic check, used as an oracle."""
    if any(d < 0 for d in w):
        raise ValueError("digits are non-negative")
    if any(d > ctx.alphabet_max for d in w):
        return False
    n = len(w)
    star = ctx.eps_star(n)
    for j in range(n):
        if w[j:] > star[: n - j]:
            return False
    return True


def count_admissible(ctx: BetaContext, n: int) -> int:
    """Exact number of admissible words of length n."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return 1
    return sum(state_counts(ctx, n).values())


def state_counts(ctx: BetaContext, n: int) -> dict[int, int]:
    """Exact count of admissible length-n words by final automaton state."""
    auto = automaton_for(ctx, n)
    table = auto.transition_table()
    counts = {0: 1}
    for _ in range(n):
        nxt: dict[int, int] = {}
        for s, c in counts.items():
            for t in table[s]:
                if t is not None:
                    nxt[t] = nxt.get(t, 0) + c
        counts = nxt
    return counts


def enumerate_admissible(ctx: BetaContext, n: int) -> Iterator[Word]:
    """All admissible words of length n in lexicographic order, streamed."""
    if n == 0:
        yield ()
        return
    auto = automaton_for(ctx, n)
    table = auto.transition_table()
    digits = [0] * n
    states = [0] * (n + 1)
    k = 0
    digits[0] = -1
    while k >= 0:
        digits[k] += 1
        if digits[k] > ctx.alphabet_max:
            k -= 1
            continue
        t = table[states[k]][digits[k]]
        if t is None:
            k -= 1
            continue
        states[k + 1] = t
        if k == n - 1:
            yield tuple(digits)
        else:
            k += 1
            digits[k] = -1


# ---------------------------------------------------------------------------
# fullness and cylinders
# ---------------------------------------------------------------------------


def is_full(w: Word, ctx: BetaContext) -> bool:
    """A word is full when appending any admissible word stays admissible.

    Equivalent to the follower state being 0: no live suffix constrains the
    continuation.  (For a simple Parry base the state is already reduced mod
    the period, which is what makes e.g. the full period word full.)
    """
    state = automaton_for(ctx, len(w)).feed(w)
    if state is None:
        raise ValueError("word is not admissible")
    return state == 0


@dataclass(frozen=True)
class Cylinder:
    """Geometry of the interval of points sharing a digit prefix."""

    word: Word
    left: BoundedReal
    length: BoundedReal
    full: bool


def cylinder(w: Word, ctx: BetaContext, refine: int = 24) -> Cylinder:
    """Left endpoint, length, and fullness of the order-n cylinder of w.

    The supremum is approached by greedily extending w with maximal
    admissible digits (which follows the expansion of 1 from the follower
    state), so `refine` extension steps determine the length within
    beta^-(n+refine).
    """
    n = len(w)
    auto = automaton_for(ctx, n + refine)
    state = auto.feed(w)
    if state is None:
        raise ValueError("word is not admissible")
    ext = []
    t = state
    for _ in range(refine):
        d = auto.max_digit(t)
        t2 = auto.step(t, d)
        assert t2 is not None
        ext.append(d)
        t = t2
    full = state == 0
    left = word_sum_bounds(w, ctx)
    sup_base = word_sum_bounds(w + tuple(ext), ctx)
    tail = beta_power_bounds(ctx, -(n + refine))
    diff = sup_base - left
    length = BoundedReal.from_endpoints(diff.lo, diff.hi + tail.hi)
    return Cylinder(word=w, left=left, length=length, full=full)


# ---------------------------------------------------------------------------
# distribution of full cylinders
# ---------------------------------------------------------------------------


def max_nonfull_run(ctx: BetaContext, n: int) -> tuple[int, int]:
    """(longest run of consecutive non-full order-n cylinders, total count).

    Computed by dynamic programming over (state, remaining depth) run
    summaries instead of enumerating words, so large n stay cheap.
    """
    auto = automaton_for(ctx, n)
    table = auto.transition_table()
    # summary: (count, prefix_run, max_run, suffix_run, all_nonfull)
    memo: dict[tuple[int, int], tuple[int, int, int, int, bool]] = {}

    def combine(a, b):
        ca, pa, ma, sa, aa = a
        cb, pb, mb, sb, ab = b
        count = ca + cb
        if aa and ab:
            return (count, count, count, count, True)
        pre = ca + pb if aa else pa
        suf = cb + sa if ab else sb
        mid = max(ma, mb, sa + pb)
        return (count, pre, mid, suf, False)

    def summary(state, depth):
        if depth == 0:
            if state == 0:
                return (1, 0, 0, 0, False)
            return (1, 1, 1, 1, True)
        key = (state, depth)
        hit = memo.get(key)
        if hit is not None:
            return hit
        acc = None
        for t in table[state]:
            if t is None:
                continue
            s = summary(t, depth - 1)
            acc = s if acc is None else combine(acc, s)
        memo[key] = acc
        return acc

    count, pre, mid, suf, allnf = summary(0, n)
    return (count if allnf else max(pre, mid, suf), count)


def full_window_check(ctx: BetaContext, n: int) -> bool:
    """True when every n+1 consecutive order-n cylinders contain a full one."""
    run, _ = max_nonfull_run(ctx, n)
    return run <= n
