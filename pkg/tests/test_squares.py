"""Representation enumeration and exceptional sets, checked against brute force."""

from itertools import combinations_with_replacement
from math import isqrt

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sqadd.squares import (
    ExceptionalSet,
    Representation,
    dubouis_reference_set,
    enumerate_representations,
    exceptional_set,
    expressibility_sieve,
    hurwitz_exceptions,
    hurwitz_reference_set,
    is_expressible,
)


def brute_force_parts(n: int, k: int) -> list[tuple[int, ...]]:
    """Independent oracle: scan all nondecreasing k-tuples up to isqrt(n)."""
    out = []
    for parts in combinations_with_replacement(range(1, isqrt(n) + 1), k):
        if sum(a * a for a in parts) == n:
            out.append(parts)
    return out


class TestEnumerate:
    def test_28_into_4_contains_both_published_pairs(self):
        parts = [r.parts for r in enumerate_representations(28, 4)]
        assert (1, 3, 3, 3) in parts
        assert (2, 2, 2, 4) in parts

    def test_28_into_4_exact_set(self):
        # oracle: brute force over a1 <= a2 <= a3 <= a4 <= 5
        expected = brute_force_parts(28, 4)
        assert expected == [(1, 1, 1, 5), (1, 3, 3, 3), (2, 2, 2, 4)]
        assert [r.parts for r in enumerate_representations(28, 4)] == expected

    @pytest.mark.parametrize("k", [1, 2, 3, 5, 9])
    def test_n_equal_k_is_all_ones(self, k):
        reps = enumerate_representations(k, k)
        assert [r.parts for r in reps] == [(1,) * k]

    def test_12_into_3(self):
        expected = brute_force_parts(12, 3)
        assert expected == [(2, 2, 2)]
        assert [r.parts for r in enumerate_representations(12, 3)] == expected

    def test_matches_brute_force_broadly(self):
        for n in range(1, 120):
            for k in range(1, 6):
                got = [r.parts for r in enumerate_representations(n, k)]
                assert got == brute_force_parts(n, k), (n, k)

    def test_lexicographic_order(self):
        reps = [r.parts for r in enumerate_representations(300, 4)]
        assert reps == sorted(reps)

    @given(
        n=st.integers(min_value=1, max_value=400),
        k=st.integers(min_value=1, max_value=6),
        cap=st.integers(min_value=1, max_value=8),
    )
    @settings(max_examples=60, deadline=None)
    def test_cap_is_a_prefix(self, n, k, cap):
        full = enumerate_representations(n, k)
        capped = enumerate_representations(n, k, cap)
        assert capped == full[:cap]

    def test_invariants_exhaustive(self):
        # every returned representation sums back and is nondecreasing;
        # Representation.__post_init__ re-validates on construction
        for n in range(1, 10_001):
            for r in enumerate_representations(n, 3):
                assert sum(a * a for a in r.parts) == n
                assert all(a <= b for a, b in zip(r.parts, r.parts[1:]))

    def test_validation(self):
        with pytest.raises(ValueError):
            Representation(10, (3, 1))  # not nondecreasing
        with pytest.raises(ValueError):
            Representation(10, (1, 2))  # 1 + 4 != 10
        with pytest.raises(ValueError):
            Representation(4, ())
        with pytest.raises(ValueError):
            enumerate_representations(0, 3)
        with pytest.raises(ValueError):
            enumerate_representations(5, 0)


class TestExpressible:
    def test_33_not_five_squares(self):
        assert not is_expressible(33, 5)

    def test_4_not_three_squares(self):
        assert not is_expressible(4, 3)

    @pytest.mark.parametrize("k", range(5, 13))
    def test_k_plus_3_always_expressible(self, k):
        assert is_expressible(k + 3, k)
        assert brute_force_parts(k + 3, k)

    def test_agrees_with_enumerator(self):
        for n in range(1, 500):
            for k in range(1, 8):
                assert is_expressible(n, k) == bool(enumerate_representations(n, k, 1))

    def test_monotone_padding(self):
        # n a sum of k positive squares implies n+1 is one of k+1
        sieves = {k: expressibility_sieve(k, 2001)[k] for k in range(1, 11)}
        for k in range(1, 10):
            cur, nxt = sieves[k], sieves[k + 1]
            for n in range(1, 2000):
                if (cur >> n) & 1:
                    assert (nxt >> (n + 1)) & 1, (n, k)


class TestExceptionalSets:
    def test_five_squares_bound_40(self):
        got = exceptional_set(5, 40)
        assert got.members == (1, 2, 3, 4, 6, 7, 9, 10, 12, 15, 18, 33)

    def test_four_squares_bound_50(self):
        got = exceptional_set(4, 50)
        assert got.members == (1, 2, 3, 5, 6, 8, 9, 11, 14, 17, 24, 29, 32, 41)

    def test_six_squares_bound_25(self):
        got = exceptional_set(6, 25)
        assert got.members == (1, 2, 3, 4, 5, 7, 8, 10, 11, 13, 16, 19)

    def test_agrees_with_per_n_search(self):
        for k in (3, 4, 5, 6):
            batch = exceptional_set(k, 300)
            slow = tuple(n for n in range(1, 301) if not is_expressible(n, k))
            assert batch.members == slow

    def test_validation(self):
        with pytest.raises(ValueError):
            exceptional_set(2, 100)
        with pytest.raises(ValueError):
            ExceptionalSet(4, 10, (3, 3))
        with pytest.raises(ValueError):
            ExceptionalSet(4, 10, (11,))


class TestDubouisReference:
    def test_k4_bound_50(self):
        assert dubouis_reference_set(4, 50) == [
            1, 2, 3, 5, 6, 8, 9, 11, 14, 17, 24, 29, 32, 41,
        ]

    def test_k5_bound_40(self):
        assert dubouis_reference_set(5, 40) == [
            1, 2, 3, 4, 6, 7, 9, 10, 12, 15, 18, 33,
        ]

    def test_k7_bound_25(self):
        assert dubouis_reference_set(7, 25) == [
            1, 2, 3, 4, 5, 6, 8, 9, 11, 12, 14, 17, 20,
        ]

    def test_k5_union_confirmed_by_search(self):
        # the k = 5 list is the generic k >= 5 pattern plus the value 33
        assert dubouis_reference_set(5, 2000) == [
            n for n in range(1, 2001) if not is_expressible(n, 5)
        ]

    def test_rejects_small_k(self):
        with pytest.raises(ValueError):
            dubouis_reference_set(3, 100)


class TestHurwitz:
    def test_bound_1100(self):
        assert hurwitz_exceptions(1100) == [1, 4, 16, 25, 64, 100, 256, 400, 1024]

    def test_bound_3(self):
        assert hurwitz_exceptions(3) == [1]

    def test_matches_closed_form_to_10_4(self):
        assert hurwitz_exceptions(10_000) == hurwitz_reference_set(10_000)

    def test_closed_form_values(self):
        assert hurwitz_reference_set(110) == [1, 4, 16, 25, 64, 100]
