"""Transition structure of the interface process and its boundary image.

Dynamics: a site i adopts the value of site j at rate q(i - j) whenever they
disagree (an infection, flipping {i}), and an unordered disagreeing pair
{i, j} exchanges values at rate p(|i - j|) (a swap, flipping both).  A
truncation restricts both mechanisms to pairs with |i - j| <= max_range.

Two independent evaluation routes are kept deliberately separate:
`apply_generator` sums rate * (f(after) - f(before)) over the enumerated
transition list, while `gfcd_closed_form` evaluates the exact expression

    sum_n (q_s(n) + p(n)) n^2  -  sum_n q_s(n) I_n(x),      q_s(n) = (q(n)+q(-n))/2,

with both sums over n >= 1 up to the truncation range.  Their agreement on
random states and kernels is the central correctness check of the package;
do not fold one into the other.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Sequence, Tuple

from .kernels import RateKernel, symmetrize
from .lattice import InterfaceConfig, flip, interface_counts, swap

INFECTION = "infection"
SWAP = "swap"


@dataclass(frozen=True)
class TransitionEvent:
    """One generator term: an infection (i adopts from j) or a swap (i < j)."""

    kind: str
    i: int
    j: int
    rate: float

    def __post_init__(self):
        if self.kind not in (INFECTION, SWAP):
            raise ValueError(f"unknown transition kind {self.kind!r}")
        if self.kind == SWAP and not self.i < self.j:
            raise ValueError("swap events require i < j")
        if self.i == self.j:
            raise ValueError("transition endpoints must differ")
        if not self.rate > 0:
            raise ValueError("transition rate must be > 0")

    @property
    def delta(self) -> Tuple[int, ...]:
        """Sites flipped by this event."""
        if self.kind == INFECTION:
            return (self.i,)
        return (self.i, self.j)


@dataclass(frozen=True)
class TruncationSpec:
    """Interaction range cap: only pairs with |i - j| <= max_range act."""

    max_range: int

    def __post_init__(self):
        if self.max_range < 1:
            raise ValueError("truncation range must be >= 1")


def _effective_range(q: RateKernel, p: RateKernel, trunc: TruncationSpec | None) -> int:
    top = max(q.max_range, p.max_range)
    if trunc is not None:
        top = min(top, trunc.max_range)
    return top


def apply_event(x: InterfaceConfig, event: TransitionEvent) -> InterfaceConfig:
    if event.kind == INFECTION:
        return flip(x, (event.i,))
    return swap(x, event.i, event.j)


def enumerate_transitions(
    x: InterfaceConfig,
    q: RateKernel,
    p: RateKernel,
    trunc: TruncationSpec | None = None,
) -> List[TransitionEvent]:
    """All positive-rate transitions from x, sorted by (kind, i, j).

    Disagreeing pairs exist only where at least one endpoint is inside the
    window, so scanning i in [offset - n, rightmost_zero] per distance n
    covers everything.  Each unordered disagreeing pair {i, i+n} contributes
    up to three events: infection of i (rate q(-n)), infection of i+n
    (rate q(n)), and the swap (rate p(n)).
    """
    top = _effective_range(q, p, trunc)
    events: List[TransitionEvent] = []
    for n in range(1, top + 1):
        q_left = q(-n)  # target left of source
        q_right = q(n)
        p_n = p(n)
        if q_left == 0 and q_right == 0 and p_n == 0:
            continue
        for i in range(x.offset - n, x.rightmost_zero + 1):
            if x.value(i) == x.value(i + n):
                continue
            if q_left > 0:
                events.append(TransitionEvent(INFECTION, i, i + n, q_left))
            if q_right > 0:
                events.append(TransitionEvent(INFECTION, i + n, i, q_right))
            if p_n > 0:
                events.append(TransitionEvent(SWAP, i, i + n, p_n))
    events.sort(key=lambda e: (e.kind, e.i, e.j))
    return events


def total_rate(
    x: InterfaceConfig,
    q: RateKernel,
    p: RateKernel,
    trunc: TruncationSpec | None = None,
):
    return sum(e.rate for e in enumerate_transitions(x, q, p, trunc))


def apply_generator(
    x: InterfaceConfig,
    f: Callable[[InterfaceConfig], object],
    q: RateKernel,
    p: RateKernel,
    trunc: TruncationSpec | None = None,
):
    """Generator applied to an observable by direct enumeration.

    This is the reference route: no closed form is consulted.  Exact when
    the kernels are rational and f is integer-valued.
    """
    base = f(x)
    return sum(
        e.rate * (f(apply_event(x, e)) - base)
        for e in enumerate_transitions(x, q, p, trunc)
    )


def gs_fcd(p: RateKernel, trunc: TruncationSpec | None = None):
    """Swap part acting on the inversion count: sum_{n>=1} p(n) n^2.

    State-independent: each disagreeing pair at distance n moves the count
    by +-n and the two orientations pair up.
    """
    top = p.max_range if trunc is None else min(p.max_range, trunc.max_range)
    return sum(p(n) * n * n for n in range(1, top + 1))


def gv_fcd(x: InterfaceConfig, q: RateKernel, trunc: TruncationSpec | None = None):
    """Infection part: sum_{n>=1} q_s(n) (n^2 - I_n(x))."""
    q_s = symmetrize(q)
    top = q_s.max_range if trunc is None else min(q_s.max_range, trunc.max_range)
    total = 0
    for n in range(1, top + 1):
        rate = q_s(n)
        if rate == 0:
            continue
        i_n, _, _ = interface_counts(x, n)
        total += rate * (n * n - i_n)
    return total


def gfcd_closed_form(
    x: InterfaceConfig,
    q: RateKernel,
    p: RateKernel,
    trunc: TruncationSpec | None = None,
):
    """Closed form for the generator on the inversion count (flip + swap parts)."""
    return gv_fcd(x, q, trunc) + gs_fcd(p, trunc)


# --- boundary (disagreement-point) process -------------------------------

def _odd_between(particles: Sequence[int], lo: int, hi: int) -> bool:
    """Whether an odd number of particles lies in [lo, hi]."""
    if hi < lo:
        return False
    return (bisect_right(particles, hi) - bisect_right(particles, lo - 1)) % 2 == 1


def boundary_generator_rates(
    particles: Iterable[int],
    q: RateKernel,
    p: RateKernel,
    trunc: TruncationSpec | None = None,
) -> List[Tuple[Tuple[int, ...], float]]:
    """Aggregated transition list of the boundary process from a particle set.

    The boundary field y(i) = 1{x(i) != x(i+1)} evolves autonomously.  Its
    transitions, indexed by the flipped y-sites:

      * {t-1, t}            -- some site t is infected; the rate aggregates
                               q(t - s) over sources s with an odd particle
                               count strictly between, i.e. in
                               [min(t,s), max(t,s) - 1];
      * {u-1, u, v-1, v}    -- the pair {u, v}, v - u >= 2, swaps: rate
                               p(v - u) if [u, v-1] holds an odd count;
      * {c-1, c+1}          -- the adjacent pair at a particle c swaps at
                               rate p(1) (y(c) toggles twice and cancels).

    Rates of identical flip sets are summed; zero-rate entries are dropped.
    The particle count must be odd and finite (an interface image).
    """
    ps = tuple(sorted(set(int(c) for c in particles)))
    if len(ps) % 2 == 0:
        raise ValueError("boundary states carry an odd number of particles")
    top = _effective_range(q, p, trunc)
    agg: Dict[Tuple[int, ...], float] = {}

    lo_t = ps[0] - top
    hi_t = ps[-1] + 1 + top
    for t in range(lo_t, hi_t + 1):
        rate = 0
        for s in range(t - top, t + top + 1):
            if s == t:
                continue
            r = q(t - s)
            if r == 0:
                continue
            if _odd_between(ps, min(t, s), max(t, s) - 1):
                rate = rate + r
        if rate > 0:
            key = (t - 1, t)
            agg[key] = agg.get(key, 0) + rate

    for d in range(2, top + 1):
        r = p(d)
        if r == 0:
            continue
        for u in range(ps[0] - d, ps[-1] + 1):
            if _odd_between(ps, u, u + d - 1):
                key = (u - 1, u, u + d - 1, u + d)
                agg[key] = agg.get(key, 0) + r
    r1 = p(1)
    if r1 > 0:
        for c in ps:
            key = (c - 1, c + 1)
            agg[key] = agg.get(key, 0) + r1

    return sorted(agg.items())


def boundary_image_rates(
    x: InterfaceConfig,
    q: RateKernel,
    p: RateKernel,
    trunc: TruncationSpec | None = None,
) -> List[Tuple[Tuple[int, ...], float]]:
    """Interface transitions pushed through the boundary map, aggregated.

    Independent of `boundary_generator_rates`: this route enumerates the
    interface transitions and maps each to the y-sites it toggles (an
    infection of t toggles {t-1, t}; a swap {u, v} toggles the symmetric
    difference of {u-1, u} and {v-1, v}).  Agreement between the two routes
    on random states is the consistency bridge for the boundary generator.
    """
    agg: Dict[Tuple[int, ...], float] = {}
    for e in enumerate_transitions(x, q, p, trunc):
        if e.kind == INFECTION:
            key = (e.i - 1, e.i)
        elif e.j == e.i + 1:
            key = (e.i - 1, e.i + 1)
        else:
            key = (e.i - 1, e.i, e.j - 1, e.j)
        agg[key] = agg.get(key, 0) + e.rate
    return sorted(agg.items())
