"""Random draws for the protocol, in two interchangeable modes.

Protocol code is written once against the RandomSource draw API. A
SamplerSource serves draws pseudorandomly from a seed; enumerate_paths
replays the same protocol function over every possible draw path,
attaching an exact rational weight to each path. Branch weights multiply
along a path and sum to exactly 1 over any complete enumeration.

Weights are tracked as integers over a caller-supplied common denominator
so the hot enumeration loop never touches Fraction arithmetic. The caller
obtains the denominator from path_denominator(), which multiplies together
every per-site branch count the protocol can encounter, making each
stepwise integer division exact.

Draws are rejection-free in both modes (index arithmetic only), so the
sampler and the enumerator range over identical branch sets.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterator, Optional

from .distributions import PijTable


@lru_cache(maxsize=None)
def _permutations(n: int) -> tuple:
    return tuple(itertools.permutations(range(n)))


@lru_cache(maxsize=None)
def _orderings(items: tuple) -> tuple:
    return tuple(itertools.permutations(items))


@lru_cache(maxsize=None)
def _subsets(universe: tuple, size: int) -> tuple:
    return tuple(itertools.combinations(universe, size))


@lru_cache(maxsize=None)
def _value_tuples(count: int, high: int) -> tuple:
    return tuple(itertools.product(range(1, high + 1), repeat=count))


@lru_cache(maxsize=None)
def _bernoulli_branches(num: int, den: int, keep_zero: bool) -> tuple:
    """Branch values and weight numerators for a theta draw with P(0) = num/den."""
    if keep_zero or (0 < num < den):
        return (0, 1), (num, den - num)
    if num == 0:
        return (1,), (den,)
    return (0,), (den,)


@dataclass(frozen=True)
class RandomTape:
    """Ordered record of every draw of one protocol run.

    draws is a tuple of (label, value) pairs in canonical draw order.
    weight is the exact path probability in enumerator mode, None when
    the tape was sampled.
    """

    draws: tuple
    weight: Optional[Fraction] = None

    def describe(self) -> str:
        parts = ["%s=%s" % (label, value) for label, value in self.draws]
        if self.weight is not None:
            parts.append("weight=%s" % self.weight)
        return " ".join(parts)


class RandomSource:
    """Abstract draw API shared by the sampler and the enumerator."""

    mode = "abstract"

    def _uniform(self, label: str, values: tuple):
        raise NotImplementedError

    def _weighted(self, label: str, values: tuple, nums: tuple, den: int):
        raise NotImplementedError

    def draw_permutation(self, n: int) -> tuple:
        """Uniform permutation of range(n)."""
        if n < 1:
            raise ValueError("permutation size must be >= 1, got %d" % n)
        return self._uniform("perm", _permutations(n))

    def draw_nonzero_vector(self, support: tuple, high: int) -> tuple:
        """Uniform values in [1:high], one per support index, aligned with support."""
        return self._uniform("values", _value_tuples(len(support), high))

    def draw_weighted_pair(self, table: PijTable) -> tuple:
        """One (i, j) pair drawn with the table's exact weights."""
        return self._weighted("pair", table.branch_values, table.branch_nums, table.denominator)

    def draw_subset(self, universe: tuple, size: int) -> tuple:
        """Uniform size-subset of the universe tuple, in universe order."""
        if not 0 <= size <= len(universe):
            raise ValueError("subset size %d out of range [0:%d]" % (size, len(universe)))
        return self._uniform("subset", _subsets(universe, size))

    def draw_ordering(self, items: tuple) -> tuple:
        """Uniform reordering of the given items."""
        return self._uniform("ordering", _orderings(items))

    def draw_bernoulli(self, p_zero: Fraction) -> int:
        """0 with probability p_zero, else 1. Degenerate weights prune a branch."""
        num, den = p_zero.numerator, p_zero.denominator
        if not 0 <= num <= den:
            raise ValueError("p_zero must lie in [0, 1], got %s" % p_zero)
        values, nums = _bernoulli_branches(num, den, False)
        return self._weighted("bernoulli", values, nums, den)

    def tape(self) -> RandomTape:
        raise NotImplementedError

    def reset_tape(self) -> None:
        """Start a fresh tape; a no-op for sources scoped to one run."""


class SamplerSource(RandomSource):
    """Seeded pseudorandom draws (deterministic per seed), with a tape.

    Large domains are sampled directly (shuffle, sample, randrange) rather
    than by materializing branch lists, but every draw is uniform over the
    same branch set the enumerator ranges over.
    """

    mode = "sampler"
    generator_name = "python-random-mt19937"

    def __init__(self, seed: int):
        self.seed = seed
        self._rng = random.Random(seed)
        self._draws: list = []

    def draw_permutation(self, n: int) -> tuple:
        if n < 1:
            raise ValueError("permutation size must be >= 1, got %d" % n)
        perm = list(range(n))
        self._rng.shuffle(perm)
        value = tuple(perm)
        self._draws.append(("perm", value))
        return value

    def draw_nonzero_vector(self, support: tuple, high: int) -> tuple:
        rng = self._rng
        value = tuple(rng.randint(1, high) for _ in support)
        self._draws.append(("values", value))
        return value

    def draw_weighted_pair(self, table: PijTable) -> tuple:
        r = self._rng.randrange(table.denominator)
        acc = 0
        for value, num in zip(table.branch_values, table.branch_nums):
            acc += num
            if r < acc:
                self._draws.append(("pair", value))
                return value
        raise AssertionError("pair weights did not cover the denominator")

    def draw_subset(self, universe: tuple, size: int) -> tuple:
        if not 0 <= size <= len(universe):
            raise ValueError("subset size %d out of range [0:%d]" % (size, len(universe)))
        pos = sorted(self._rng.sample(range(len(universe)), size))
        value = tuple(universe[p] for p in pos)
        self._draws.append(("subset", value))
        return value

    def draw_ordering(self, items: tuple) -> tuple:
        order = list(items)
        self._rng.shuffle(order)
        value = tuple(order)
        self._draws.append(("ordering", value))
        return value

    def draw_bernoulli(self, p_zero: Fraction) -> int:
        num, den = p_zero.numerator, p_zero.denominator
        if not 0 <= num <= den:
            raise ValueError("p_zero must lie in [0, 1], got %s" % p_zero)
        value = 0 if self._rng.randrange(den) < num else 1
        self._draws.append(("bernoulli", value))
        return value

    def reset_tape(self) -> None:
        self._draws = []

    def tape(self) -> RandomTape:
        return RandomTape(tuple(self._draws))


class EnumeratorSource(RandomSource):
    """Replay-driven exhaustive source; use via enumerate_paths().

    Each draw method first checks whether its site is already on the stack
    (the replay common case) and only then falls back to the base-class
    semantics via _uniform/_weighted to create the site. Replay hits skip
    recomputing the branch-value tuple entirely; the base RandomSource
    methods remain the reference semantics for what each draw ranges over.
    """

    mode = "enumerator"

    __slots__ = (
        "D",
        "keep_zero_bernoulli",
        "verify_replay",
        "_depth",
        "_top",
        "_vals",
        "_idx",
        "_mult",
        "_wts",
        "_labels",
    )

    def __init__(self, denominator: int, keep_zero_bernoulli: bool = False, verify_replay: bool = False):
        self.D = denominator
        self.keep_zero_bernoulli = keep_zero_bernoulli
        self.verify_replay = verify_replay
        self._depth = 0
        self._top = 0
        self._vals: list = []   # per site: tuple of branch values
        self._idx: list = []    # per site: current branch index
        self._mult: list = []   # per site: integer weight numerator after the site
        self._wts: list = []    # per site: (nums, den) for weighted sites, else None
        self._labels: list = []

    def draw_permutation(self, n: int) -> tuple:
        d = self._depth
        self._depth = d + 1
        if d < self._top and not self.verify_replay:
            return self._vals[d][self._idx[d]]
        self._depth = d
        return RandomSource.draw_permutation(self, n)

    def draw_nonzero_vector(self, support: tuple, high: int) -> tuple:
        d = self._depth
        self._depth = d + 1
        if d < self._top and not self.verify_replay:
            return self._vals[d][self._idx[d]]
        self._depth = d
        return RandomSource.draw_nonzero_vector(self, support, high)

    def draw_weighted_pair(self, table: PijTable) -> tuple:
        d = self._depth
        self._depth = d + 1
        if d < self._top and not self.verify_replay:
            return self._vals[d][self._idx[d]]
        self._depth = d
        return RandomSource.draw_weighted_pair(self, table)

    def draw_subset(self, universe: tuple, size: int) -> tuple:
        d = self._depth
        self._depth = d + 1
        if d < self._top and not self.verify_replay:
            return self._vals[d][self._idx[d]]
        self._depth = d
        return RandomSource.draw_subset(self, universe, size)

    def draw_ordering(self, items: tuple) -> tuple:
        d = self._depth
        self._depth = d + 1
        if d < self._top and not self.verify_replay:
            return self._vals[d][self._idx[d]]
        self._depth = d
        return RandomSource.draw_ordering(self, items)

    def draw_bernoulli(self, p_zero: Fraction) -> int:
        d = self._depth
        self._depth = d + 1
        if d < self._top and not self.verify_replay:
            return self._vals[d][self._idx[d]]
        self._depth = d
        num, den = p_zero.numerator, p_zero.denominator
        if not 0 <= num <= den:
            raise ValueError("p_zero must lie in [0, 1], got %s" % p_zero)
        values, nums = _bernoulli_branches(num, den, self.keep_zero_bernoulli)
        return self._weighted("bernoulli", values, nums, den)

    def _uniform(self, label: str, values: tuple):
        d = self._depth
        self._depth = d + 1
        if d < self._top:
            if values != self._vals[d]:
                raise AssertionError("replay mismatch at site %d (%s)" % (d, label))
            return self._vals[d][self._idx[d]]
        prev = self._mult[d - 1] if d else self.D
        count = len(values)
        if prev % count:
            raise AssertionError("denominator does not cover site %d (%s)" % (d, label))
        self._vals.append(values)
        self._idx.append(0)
        self._mult.append(prev // count)
        self._wts.append(None)
        self._labels.append(label)
        self._top = d + 1
        return values[0]

    def _weighted(self, label: str, values: tuple, nums: tuple, den: int):
        d = self._depth
        self._depth = d + 1
        if d < self._top:
            if values != self._vals[d]:
                raise AssertionError("replay mismatch at site %d (%s)" % (d, label))
            return self._vals[d][self._idx[d]]
        prev = self._mult[d - 1] if d else self.D
        if (prev * nums[0]) % den:
            raise AssertionError("denominator does not cover site %d (%s)" % (d, label))
        self._vals.append(values)
        self._idx.append(0)
        self._mult.append(prev * nums[0] // den)
        self._wts.append((nums, den))
        self._labels.append(label)
        self._top = d + 1
        return values[0]

    def path_weight_numerator(self) -> int:
        return self._mult[-1] if self._mult else self.D

    def tape(self) -> RandomTape:
        draws = tuple(
            (label, vals[idx])
            for label, vals, idx in zip(self._labels, self._vals, self._idx)
        )
        return RandomTape(draws, Fraction(self.path_weight_numerator(), self.D))


def enumerate_paths(
    fn: Callable,
    denominator: int,
    keep_zero_bernoulli: bool = False,
    verify_replay: bool = False,
) -> Iterator[tuple]:
    """Run fn(source) over every complete draw path, depth first.

    Yields (result, weight_numerator) per path; the exact path probability
    is weight_numerator / denominator and the numerators sum to exactly
    the denominator over a full enumeration (weights sum to 1).

    fn must be deterministic given its draws and must consume draws in the
    same order on every path prefix (true of any straight-line protocol).
    The denominator must be divisible by every product of branch counts
    along any path; path_denominator() in the protocol module builds it.
    """
    src = EnumeratorSource(denominator, keep_zero_bernoulli, verify_replay)
    vals, idx, mult, wts = src._vals, src._idx, src._mult, src._wts
    labels = src._labels
    while True:
        src._depth = 0
        result = fn(src)
        yield result, (mult[-1] if mult else denominator)
        d = len(vals) - 1
        while d >= 0 and idx[d] + 1 == len(vals[d]):
            d -= 1
        if d < 0:
            return
        idx[d] += 1
        del vals[d + 1 :], idx[d + 1 :], mult[d + 1 :], wts[d + 1 :], labels[d + 1 :]
        w = wts[d]
        if w is not None:
            nums, den = w
            prev = mult[d - 1] if d else denominator
            mult[d] = prev * nums[idx[d]] // den
        src._top = d + 1
