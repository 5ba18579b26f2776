from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swapvoter import (
    InterfaceConfig,
    RateKernel,
    TransitionEvent,
    TruncationSpec,
    apply_event,
    apply_generator,
    boundary_image_rates,
    enumerate_transitions,
    f_cd,
    flip,
    gfcd_closed_form,
    gs_fcd,
    gv_fcd,
    heaviside,
    interface_counts,
    swap,
    symmetrize,
    total_rate,
    width,
)

from conftest import (
    brute_f_cd,
    flip_kernels,
    interface_states,
    swap_kernels,
    transition_table,
)


class TestTransitionEvent:
    def test_swap_orders_endpoints(self):
        with pytest.raises(ValueError):
            TransitionEvent("swap", 3, 1, 1.0)

    def test_rate_must_be_positive(self):
        with pytest.raises(ValueError):
            TransitionEvent("infection", 0, 1, 0.0)

    def test_infection_delta_is_the_target(self):
        e = TransitionEvent("infection", 5, 2, 1.0)
        assert e.delta == (5,)

    def test_swap_delta_is_the_pair(self):
        e = TransitionEvent("swap", 1, 4, 1.0)
        assert e.delta == (1, 4)

    def test_kind_checked(self):
        with pytest.raises(ValueError):
            TransitionEvent("teleport", 0, 1, 1.0)


class TestEnumerate:
    @given(interface_states(max_width=8), flip_kernels(4), swap_kernels(4))
    @settings(max_examples=60)
    def test_matches_pair_scan(self, x, q, p):
        events = enumerate_transitions(x, q, p)
        got = {}
        for e in events:
            got[e.delta] = got.get(e.delta, 0) + e.rate
        want = transition_table(x, q, p, max(q.max_range, p.max_range))
        assert got == want

    @given(interface_states(max_width=8), flip_kernels(5), swap_kernels(5),
           st.integers(1, 5))
    @settings(max_examples=40)
    def test_truncation_equals_kernel_restriction(self, x, q, p, k):
        a = enumerate_transitions(x, q, p, TruncationSpec(k))
        b = enumerate_transitions(x, q.truncated(k), p.truncated(k))
        assert a == b

    def test_sorted_and_deduplicated(self):
        x = flip(heaviside(), (-1, 1))
        q = RateKernel({1: 1.0, -1: 0.5, 2: 0.25})
        events = enumerate_transitions(x, q, RateKernel({1: 0.125}))
        keys = [(e.kind, e.i, e.j) for e in events]
        assert keys == sorted(keys)
        assert len(keys) == len(set(keys))

    @given(interface_states(max_width=8), flip_kernels(4), swap_kernels(4))
    @settings(max_examples=40)
    def test_events_change_the_state(self, x, q, p):
        for e in enumerate_transitions(x, q, p):
            assert apply_event(x, e) != x

    def test_heaviside_nn(self, nn_kernels):
        q, p = nn_kernels
        events = enumerate_transitions(heaviside(), q, p)
        # only the boundary pair (-1, 0) disagrees
        assert {(e.kind, e.i, e.j) for e in events} == {
            ("infection", -1, 0), ("infection", 0, -1)
        }
        assert all(e.rate == Fraction(1, 2) for e in events)


class TestApplyEvent:
    @given(interface_states(), st.integers(-8, 8), st.integers(1, 5))
    def test_infection_is_flip(self, x, t, n):
        if x.value(t) == x.value(t + n):
            return
        e = TransitionEvent("infection", t, t + n, 1.0)
        assert apply_event(x, e) == flip(x, (t,))

    @given(interface_states(), st.integers(-8, 8), st.integers(1, 5))
    def test_swap_is_swap(self, x, i, n):
        if x.value(i) == x.value(i + n):
            return
        e = TransitionEvent("swap", i, i + n, 1.0)
        assert apply_event(x, e) == swap(x, i, i + n)


class TestTotalRate:
    @given(interface_states(max_width=10), flip_kernels(4), swap_kernels(4))
    @settings(max_examples=60)
    def test_closed_form(self, x, q, p):
        lam = total_rate(x, q, p)
        top = max(q.max_range, p.max_range)
        want = sum(
            (q(n) + q(-n) + p(n)) * interface_counts(x, n)[0]
            for n in range(1, top + 1)
        )
        assert lam == want

    @given(interface_states(max_width=10), flip_kernels(4), swap_kernels(4))
    @settings(max_examples=60)
    def test_linear_bound_in_the_width(self, x, q, p):
        qs = symmetrize(q)
        top = max(q.max_range, p.max_range)
        w = width(x)
        bound = sum(2 * (qs(n) + p(n)) * (n + w) for n in range(1, top + 1))
        assert total_rate(x, q, p) <= bound


class TestDriftRoutes:
    """The two independent computations of the f_cd drift must agree."""

    @given(interface_states(max_width=10), flip_kernels(4), swap_kernels(4))
    @settings(max_examples=60)
    def test_exact_rational_agreement(self, x, q, p):
        direct = apply_generator(x, f_cd, q, p)
        closed = gfcd_closed_form(x, q, p)
        assert direct == closed

    @given(interface_states(max_width=10), flip_kernels(4), swap_kernels(4),
           st.integers(1, 4))
    @settings(max_examples=40)
    def test_truncated_agreement(self, x, q, p, k):
        trunc = TruncationSpec(k)
        assert apply_generator(x, f_cd, q, p, trunc) == gfcd_closed_form(x, q, p, trunc)

    @given(interface_states(max_width=10), flip_kernels(4))
    @settings(max_examples=40)
    def test_flip_part_from_pair_counts(self, x, q):
        qs = symmetrize(q)
        want = sum(
            qs(n) * (n * n - interface_counts(x, n)[0])
            for n in range(1, q.max_range + 1)
        )
        assert gv_fcd(x, q) == want

    def test_swap_part_frozen_value(self):
        assert gs_fcd(RateKernel({1: Fraction(1, 2)})) == Fraction(1, 2)

    def test_swap_part_is_quadratic(self):
        p = RateKernel({1: Fraction(1, 4), 3: Fraction(1, 8)})
        assert gs_fcd(p) == Fraction(1, 4) + 9 * Fraction(1, 8)

    def test_heaviside_nn_drift_vanishes(self, nn_kernels):
        q, p = nn_kernels
        assert gfcd_closed_form(heaviside(), q, p) == 0

    @given(interface_states(max_width=10))
    def test_nn_drift_from_pair_count(self, x):
        # for nearest-neighbour flips the drift is q_s(1) * (1 - I_1)
        q = RateKernel({1: Fraction(1, 2), -1: Fraction(1, 2)})
        i1 = interface_counts(x, 1)[0]
        assert gfcd_closed_form(x, q, RateKernel.empty()) == Fraction(1, 2) * (1 - i1)

    @given(interface_states(max_width=10), flip_kernels(4), swap_kernels(4))
    @settings(max_examples=40)
    def test_drift_floor(self, x, q, p):
        # G f_cd >= sum (q_s + p)(n) n^2 - sum q_s(n) (n + width)
        qs = symmetrize(q)
        top = max(q.max_range, p.max_range)
        w = width(x)
        floor = sum(
            (qs(n) + p(n)) * n * n - qs(n) * (n + w) for n in range(1, top + 1)
        )
        assert gfcd_closed_form(x, q, p) >= floor


class TestEventDeltas:
    @given(interface_states(max_width=10), st.integers(-8, 8), st.integers(1, 5))
    def test_swap_changes_f_cd_by_the_distance(self, x, i, n):
        if x.value(i) == x.value(i + n):
            return
        e = TransitionEvent("swap", i, i + n, 1.0)
        moved = brute_f_cd(apply_event(x, e)) - brute_f_cd(x)
        assert abs(moved) == n

    @given(interface_states(max_width=10), st.integers(-8, 8), st.integers(1, 5))
    def test_infection_delta_from_side_counts(self, x, t, n):
        if x.value(t) == x.value(t + n):
            return
        ones_left = sum(1 for i in range(x.offset, t) if x.value(i) == 1)
        zeros_right = sum(
            1 for i in range(t + 1, x.rightmost_zero + 1) if x.value(i) == 0
        )
        e = TransitionEvent("infection", t, t + n, 1.0)
        moved = brute_f_cd(apply_event(x, e)) - brute_f_cd(x)
        if x.value(t) == 0:
            assert moved == zeros_right - ones_left
        else:
            assert moved == ones_left - zeros_right
