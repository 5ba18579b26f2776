"""Shared strategies and brute-force oracles for the test suite.

The oracles here recompute observables by definition (quadratic pair scans,
explicit enumeration) so the optimized implementations are always tested
against independent code.
"""

from fractions import Fraction
from typing import Dict, Tuple

import numpy as np
import pytest
from hypothesis import strategies as st

from swapvoter import InterfaceConfig, RateKernel


# --- hypothesis strategies --------------------------------------------------

rate_fractions = st.fractions(
    min_value=Fraction(1, 64), max_value=Fraction(8), max_denominator=64
)


@st.composite
def interface_states(draw, max_width: int = 12, max_offset: int = 12):
    """Valid interface states: empty window or 1<bits>0."""
    offset = draw(st.integers(-max_offset, max_offset))
    w = draw(st.integers(0, max_width))
    if w < 2:
        return InterfaceConfig(offset, ())
    mid = draw(st.lists(st.integers(0, 1), min_size=w - 2, max_size=w - 2))
    return InterfaceConfig(offset, (1, *mid, 0))


@st.composite
def flip_kernels(draw, max_range: int = 5):
    """Rational flip kernels on both sides, never empty."""
    table = draw(
        st.dictionaries(
            st.integers(-max_range, max_range).filter(lambda d: d != 0),
            rate_fractions,
            min_size=1,
            max_size=6,
        )
    )
    return RateKernel(table)


@st.composite
def swap_kernels(draw, max_range: int = 5):
    """Rational swap kernels, positive displacements, possibly empty."""
    table = draw(
        st.dictionaries(st.integers(1, max_range), rate_fractions, max_size=4)
    )
    return RateKernel(table)


# --- brute-force oracles ----------------------------------------------------

def brute_f_cd(x: InterfaceConfig) -> int:
    """Inversion count by quadratic scan: pairs with a 1 left of a 0.  Both
    sites of such a pair lie inside the window."""
    lo, hi = x.offset, x.rightmost_zero
    total = 0
    for i in range(lo, hi + 1):
        if x.value(i) != 1:
            continue
        for j in range(i + 1, hi + 1):
            if x.value(j) == 0:
                total += 1
    return total


def brute_counts(x: InterfaceConfig, n: int) -> Tuple[int, int, int]:
    """(disagreeing, 0->1, 1->0) pairs at displacement n by direct scan."""
    lo = x.offset - n
    hi = x.rightmost_zero
    tot = up = down = 0
    for i in range(lo, hi + 1):
        a, b = x.value(i), x.value(i + n)
        if a == b:
            continue
        tot += 1
        if a == 0:
            up += 1
        else:
            down += 1
    return tot, up, down


def transition_table(x, q, p, max_range) -> Dict[Tuple[int, ...], object]:
    """Aggregated rate per flip set by scanning every pair near the window.

    Independent of the package's enumeration: walks all pairs within the
    range around the window and applies the event rules directly.
    """
    lo = x.offset - max_range - 1
    hi = x.rightmost_zero + max_range + 1
    table: Dict[Tuple[int, ...], object] = {}

    def add(sites, rate):
        if rate:
            key = tuple(sorted(sites))
            table[key] = table.get(key, 0) + rate

    for i in range(lo, hi + 1):
        for n in range(1, max_range + 1):
            j = i + n
            if x.value(i) == x.value(j):
                continue
            add((i,), q(-n))   # i copies from j
            add((j,), q(n))    # j copies from i
            add((i, j), p(n))  # exchange
    return table


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def nn_kernels():
    half = Fraction(1, 2)
    return RateKernel({1: half, -1: half}), RateKernel.empty()


@pytest.fixture
def nn_swap_kernels():
    half = Fraction(1, 2)
    return RateKernel({1: half, -1: half}), RateKernel({1: Fraction(1, 4)})


@pytest.fixture
def mixed_exact_kernels():
    """Rational analogue of the mixed preset: inverse-quartic flips to range
    six plus adjacent swaps."""
    q = RateKernel({s * n: Fraction(1, n**4) for n in range(1, 7) for s in (1, -1)})
    return q, RateKernel({1: Fraction(1, 4)})
