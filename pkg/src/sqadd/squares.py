"""Sums of k positive squares: enumeration, expressibility, exceptional sets.

Two independent routes answer "is n a sum of k positive squares":

* a lexicographic backtracking enumerator (per-n, early exit, cap as a
  prefix of the full ordered list), and
* a dynamic-programming bitmask sieve over all n <= N at once.

The exceptional-set routines compare the searched sets against closed-form
reference lists, which is the point of the whole module.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import isqrt
from typing import Optional


@dataclass(frozen=True)
class Representation:
    """A multiset of k positive integers whose squares sum to n."""

    n: int
    parts: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.parts:
            raise ValueError("at least one part required")
        if any(a < 1 for a in self.parts):
            raise ValueError(f"parts must be positive: {self.parts}")
        if any(a > b for a, b in zip(self.parts, self.parts[1:])):
            raise ValueError(f"parts must be nondecreasing: {self.parts}")
        if sum(a * a for a in self.parts) != self.n:
            raise ValueError(f"{self.parts} does not represent {self.n}")

    @property
    def k(self) -> int:
        return len(self.parts)


@lru_cache(maxsize=1 << 17)
def _part_tuples(n: int, k: int, cap: Optional[int]) -> tuple[tuple[int, ...], ...]:
    out: list[tuple[int, ...]] = []
    prefix: list[int] = []

    def rec(remaining: int, slots: int, lo: int) -> None:
        if cap is not None and len(out) >= cap:
            return
        if slots == 1:
            r = isqrt(remaining)
            if r >= lo and r * r == remaining:
                out.append(tuple(prefix) + (r,))
            return
        # smallest remaining part v satisfies slots * v^2 <= remaining
        hi = isqrt(remaining // slots)
        for v in range(lo, hi + 1):
            prefix.append(v)
            rec(remaining - v * v, slots - 1, v)
            prefix.pop()
            if cap is not None and len(out) >= cap:
                return

    if n >= k:
        rec(n, k, 1)
    return tuple(out)


def enumerate_representations(
    n: int, k: int, cap: Optional[int] = None
) -> list[Representation]:
    """Canonical representations of n into k positive squares.

    Output is in lexicographic order of the nondecreasing part tuples and a
    cap returns a prefix of the unlimited list.  Deterministic and pure.
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    if cap is not None and cap < 1:
        raise ValueError(f"cap must be positive or None, got {cap}")
    return [Representation(n, parts) for parts in _part_tuples(n, k, cap)]


def is_expressible(n: int, k: int) -> bool:
    """Whether n is a sum of k positive squares (early-exit search)."""
    return bool(enumerate_representations(n, k, 1))


def expressibility_sieve(k: int, bound: int) -> list[int]:
    """Bitmasks E[1..k]; bit n of E[j] set iff n is a sum of j positive squares.

    E[0] is the empty-sum mask (bit 0 only) so indexing is by j directly.
    The masks are plain ints and safe to share once built.
    """
    if k < 1 or bound < 1:
        raise ValueError("k and bound must be positive")
    mask = (1 << (bound + 1)) - 1
    squares = 0
    a = 1
    while a * a <= bound:
        squares |= 1 << (a * a)
        a += 1
    levels = [1, squares]
    for _ in range(2, k + 1):
        prev = levels[-1]
        cur = 0
        a = 1
        while a * a <= bound - 1:
            cur |= prev << (a * a)
            a += 1
        levels.append(cur & mask)
    return levels


@dataclass(frozen=True)
class ExceptionalSet:
    """Integers up to a bound with no representation into k positive squares."""

    k: int
    bound: int
    members: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(a >= b for a, b in zip(self.members, self.members[1:])):
            raise ValueError("members must be strictly ascending")
        if self.members and self.members[-1] > self.bound:
            raise ValueError("member exceeds bound")


def exceptional_set(
    k: int, bound: int, sieve: Optional[list[int]] = None
) -> ExceptionalSet:
    """All n <= bound that are not sums of k positive squares (batch sieve)."""
    if k < 3:
        raise ValueError(f"exceptional_set requires k >= 3, got {k}")
    if bound < 1:
        raise ValueError(f"bound must be positive, got {bound}")
    if sieve is None:
        sieve = expressibility_sieve(k, bound)
    level = sieve[k]
    members = tuple(n for n in range(1, bound + 1) if not (level >> n) & 1)
    return ExceptionalSet(k, bound, members)


def hurwitz_exceptions(bound: int) -> list[int]:
    """Perfect squares <= bound that are not sums of three positive squares."""
    if bound < 1:
        raise ValueError(f"bound must be positive, got {bound}")
    level = expressibility_sieve(3, bound)[3]
    out = []
    a = 1
    while a * a <= bound:
        if not (level >> (a * a)) & 1:
            out.append(a * a)
        a += 1
    return out


def hurwitz_reference_set(bound: int) -> list[int]:
    """Closed form for the square exceptions: powers of 4 and 25 times them."""
    out = set()
    q = 1
    while q <= bound:
        out.add(q)
        if 25 * q <= bound:
            out.add(25 * q)
        q *= 4
    return sorted(out)


# Sporadic exceptions for sums of four positive squares, plus three
# geometric families 2*4^m, 6*4^m, 14*4^m.
_FOUR_SQUARE_SPORADIC = (1, 3, 5, 9, 11, 17, 29, 41)
_FOUR_SQUARE_FAMILIES = (2, 6, 14)


def dubouis_reference_set(k: int, bound: int) -> list[int]:
    """The closed-form exception list for sums of k positive squares, k >= 4.

    For k = 5 the list is the union of the generic k >= 5 pattern and the
    lone extra value 33 (confirmed against brute force by the test suite).
    """
    if k < 4:
        raise ValueError(f"no closed form for k = {k}; need k >= 4")
    if bound < 1:
        raise ValueError(f"bound must be positive, got {bound}")
    values: set[int] = set()
    if k == 4:
        values.update(_FOUR_SQUARE_SPORADIC)
        for f in _FOUR_SQUARE_FAMILIES:
            v = f
            while v <= bound:
                values.add(v)
                v *= 4
    else:
        values.update(range(1, k))
        values.update((k + 1, k + 2, k + 4, k + 5, k + 7, k + 10, k + 13))
        if k == 5:
            values.add(33)
    return sorted(v for v in values if v <= bound)
