import math
from fractions import Fraction

import pytest
from hypothesis import given, settings

from swapvoter import (
    NonSymmetricKernel,
    NotSatisfiable,
    RateKernel,
    from_power_law,
    is_irreducible,
    moment,
    symmetrize,
    tail_rates,
    tightness_constant,
)

from conftest import flip_kernels, swap_kernels


class TestRateKernel:
    def test_drops_zero_rates(self):
        k = RateKernel({1: 0, 2: Fraction(1, 3), -1: 0.0})
        assert k.support == (2,)
        assert k(1) == 0 and k(-1) == 0
        assert k(2) == Fraction(1, 3)

    def test_rejects_zero_displacement(self):
        with pytest.raises(ValueError):
            RateKernel({0: 1})

    def test_rejects_negative_rate(self):
        with pytest.raises(ValueError):
            RateKernel({1: -0.5})

    def test_empty(self):
        k = RateKernel.empty()
        assert len(k) == 0
        assert k.max_range == 0
        assert k(3) == 0

    def test_iter_sorted(self):
        k = RateKernel({3: 1, -2: 2, 1: 3})
        assert [d for d, _ in k] == [-2, 1, 3]

    def test_truncated(self):
        k = RateKernel({1: 1, 3: 1, -4: 2})
        assert k.truncated(3).support == (1, 3)
        assert k.truncated(10).support == (-4, 1, 3)

    def test_scaled_and_add(self):
        k = RateKernel({1: Fraction(1, 2)})
        assert k.scaled(Fraction(3))(1) == Fraction(3, 2)
        s = k + RateKernel({1: Fraction(1, 2), 2: 1})
        assert s(1) == 1 and s(2) == 1

    def test_is_symmetric(self):
        assert RateKernel({1: 1, -1: 1}).is_symmetric()
        assert not RateKernel({1: 1, -1: 2}).is_symmetric()
        assert not RateKernel({2: 1}).is_symmetric()


class TestPowerLaw:
    def test_values(self):
        k = from_power_law(2.0, 3.0, 4)
        for n in range(1, 5):
            assert k(n) == pytest.approx(2.0 * n**-3.0)
            assert k(-n) == pytest.approx(2.0 * n**-3.0)
        assert k(5) == 0

    def test_support_size(self):
        assert len(from_power_law(1.0, 2.2, 50)) == 100

    def test_bad_args(self):
        with pytest.raises(ValueError):
            from_power_law(-1.0, 2.0, 5)
        with pytest.raises(ValueError):
            from_power_law(1.0, 2.0, 0)

    def test_zero_amplitude_is_empty(self):
        assert len(from_power_law(0.0, 2.0, 5)) == 0


class TestSymmetrize:
    @given(flip_kernels())
    def test_definition(self, q):
        qs = symmetrize(q)
        top = q.max_range
        for n in range(1, top + 1):
            want = Fraction(q(n) + q(-n), 2)
            assert qs(n) == want
            assert qs(-n) == want

    def test_keeps_fractions(self):
        qs = symmetrize(RateKernel({1: Fraction(1, 3)}))
        assert qs(1) == Fraction(1, 6)
        assert isinstance(qs(1), Fraction)


class TestMoment:
    @given(flip_kernels())
    def test_second_moment(self, q):
        assert moment(q, 2) == sum(r * d * d for d, r in q)

    def test_empty(self):
        assert moment(RateKernel.empty(), 2) == 0


class TestTailRates:
    @given(flip_kernels(), swap_kernels())
    def test_definition(self, q, p):
        qs = symmetrize(q)
        a = tail_rates(q, p)
        top = max(q.max_range, p.max_range)
        for n in range(1, top + 2):
            want = sum(2 * (qs(k) + p(k)) for k in range(n, top + 1))
            assert a(n) == want
        assert a(top + 1) == 0

    @given(flip_kernels(), swap_kernels())
    def test_weighted_sum_matches_triangle_form(self, q, p):
        # sum_n a(n) * n telescopes to the half-square weights, exactly
        qs = symmetrize(q)
        a = tail_rates(q, p)
        lhs = sum(r * n for n, r in a)
        top = max(q.max_range, p.max_range)
        rhs = sum(
            2 * (qs(k) + p(k)) * Fraction(k * (k + 1), 2) for k in range(1, top + 1)
        )
        assert lhs == rhs

    def test_nn(self):
        a = tail_rates(RateKernel({1: Fraction(1, 2), -1: Fraction(1, 2)}),
                       RateKernel({1: Fraction(1, 4)}))
        assert dict(iter(a)) == {1: Fraction(3, 2)}


class TestIrreducible:
    def test_gcd_one(self):
        assert is_irreducible(RateKernel({1: 1, -1: 1}))
        assert is_irreducible(RateKernel({2: 1, -2: 1, 3: 1, -3: 1}))

    def test_gcd_two(self):
        assert not is_irreducible(RateKernel({2: 1, -2: 1}))
        assert not is_irreducible(RateKernel({2: 1, -2: 1, 4: 1, -4: 1}))

    def test_requires_symmetric_support(self):
        with pytest.raises(NonSymmetricKernel):
            is_irreducible(RateKernel({1: 1}))

    @given(flip_kernels())
    def test_matches_gcd_oracle(self, q):
        table = {d: 1 for d in q.support}
        table.update({-d: 1 for d in q.support})
        sym = RateKernel(table)
        want = math.gcd(*[abs(d) for d in sym.support]) == 1
        assert is_irreducible(sym) == want


class TestTightnessConstant:
    def test_nn_voter(self):
        q = RateKernel({1: Fraction(1, 2), -1: Fraction(1, 2)})
        assert tightness_constant(q, RateKernel.empty()) == (1, 2)

    def test_nn_with_swap(self):
        q = RateKernel({1: Fraction(1, 2), -1: Fraction(1, 2)})
        p = RateKernel({1: Fraction(1, 4)})
        # s = (1/2 + 1/4) * 1 = 3/4, atom 1/2: smallest N with 3/4 < N/2 is 2
        assert tightness_constant(q, p) == (1, 2)

    def test_no_flip_atom(self):
        with pytest.raises(NotSatisfiable):
            tightness_constant(RateKernel.empty(), RateKernel({1: 1}))

    @given(flip_kernels(), swap_kernels())
    def test_matches_brute_scan(self, q, p):
        qs = symmetrize(q)
        top = max(q.max_range, p.max_range)
        s = sum((qs(n) + p(n)) * n * n for n in range(1, top + 1))
        i = min(n for n in range(1, top + 1) if qs(n) > 0)
        n_val = 1
        while not s < qs(i) * n_val:
            n_val += 1
        assert tightness_constant(q, p) == (i, n_val)

    @given(flip_kernels(), swap_kernels())
    def test_inequality_is_strict_and_minimal(self, q, p):
        qs = symmetrize(q)
        top = max(q.max_range, p.max_range)
        s = sum((qs(n) + p(n)) * n * n for n in range(1, top + 1))
        i, n_val = tightness_constant(q, p)
        assert qs(i) > 0
        assert s < qs(i) * n_val
        if n_val > 1:
            assert not s < qs(i) * (n_val - 1)
