"""Jump-rate kernels on the one-dimensional lattice.

A kernel assigns a nonnegative rate to each nonzero displacement and is zero
everywhere else.  Finite support is required throughout: every construction
below materializes the full displacement -> rate table.  Rates may be floats
or fractions.Fraction; all arithmetic here is generic over both, which is what
makes the exact (rational) identity checks possible without a second code
path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, Mapping, Tuple, Union

from .exceptions import NonSymmetricKernel, NotSatisfiable

Rate = Union[float, Fraction]


def _as_rate(value) -> Rate:
    if isinstance(value, (Fraction, int)):
        return Fraction(value) if isinstance(value, int) else value
    return float(value)


@dataclass(frozen=True)
class RateKernel:
    """Immutable map from nonzero displacements to rates > 0.

    Zero-rate entries are dropped on construction, displacement 0 is
    rejected, and negative rates are rejected.  `support` is the sorted
    tuple of displacements carrying positive rate.
    """

    rates: Mapping[int, Rate]
    _table: Dict[int, Rate] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        table: Dict[int, Rate] = {}
        for disp, rate in self.rates.items():
            disp = int(disp)
            if disp == 0:
                raise ValueError("displacement 0 is not allowed in a rate kernel")
            rate = _as_rate(rate)
            if rate < 0:
                raise ValueError(f"negative rate {rate!r} at displacement {disp}")
            if rate > 0:
                table[disp] = rate
        object.__setattr__(self, "_table", table)
        object.__setattr__(self, "rates", dict(table))

    @classmethod
    def empty(cls) -> "RateKernel":
        return cls({})

    def __call__(self, displacement: int) -> Rate:
        return self._table.get(displacement, 0)

    def __iter__(self) -> Iterator[Tuple[int, Rate]]:
        return iter(sorted(self._table.items()))

    def __len__(self) -> int:
        return len(self._table)

    @property
    def support(self) -> Tuple[int, ...]:
        return tuple(sorted(self._table))

    @property
    def max_range(self) -> int:
        """Largest |displacement| in the support (0 for the empty kernel)."""
        return max((abs(d) for d in self._table), default=0)

    def is_symmetric(self) -> bool:
        return all(self._table.get(-d) == r for d, r in self._table.items())

    def truncated(self, max_abs: int) -> "RateKernel":
        """Restriction to displacements with |d| <= max_abs."""
        if max_abs < 0:
            raise ValueError("truncation range must be >= 0")
        return RateKernel({d: r for d, r in self._table.items() if abs(d) <= max_abs})

    def scaled(self, factor) -> "RateKernel":
        if factor < 0:
            raise ValueError("scale factor must be >= 0")
        return RateKernel({d: r * factor for d, r in self._table.items()})

    def __add__(self, other: "RateKernel") -> "RateKernel":
        merged: Dict[int, Rate] = dict(self._table)
        for d, r in other._table.items():
            merged[d] = merged.get(d, 0) + r
        return RateKernel(merged)


def from_power_law(c, beta, max_range: int) -> RateKernel:
    """Kernel r(n) = c * |n|**(-beta) for 1 <= |n| <= max_range (both signs)."""
    if max_range < 1:
        raise ValueError("power-law range must be >= 1")
    if c < 0:
        raise ValueError("power-law amplitude must be >= 0")
    table = {}
    for n in range(1, max_range + 1):
        rate = c * float(n) ** (-float(beta))
        table[n] = rate
        table[-n] = rate
    return RateKernel(table)


def symmetrize(kernel: RateKernel) -> RateKernel:
    """The kernel r_s(i) = (r(i) + r(-i)) / 2.

    Division uses Fraction semantics when both rates are Fractions, so a
    rational kernel stays rational.
    """
    out: Dict[int, Rate] = {}
    for d, r in kernel._table.items():
        if d in out or -d in out:
            continue
        mirrored = kernel(-d)
        if isinstance(r, Fraction) and isinstance(mirrored, (Fraction, int)):
            half = (r + mirrored) / 2
        else:
            half = (r + mirrored) / 2.0
        if half > 0:
            out[d] = half
            out[-d] = half
    return RateKernel(out)


def moment(kernel: RateKernel, order: int) -> Rate:
    """Sum_i |i|**order * r(i) over the full (signed) support."""
    if order < 0:
        raise ValueError("moment order must be >= 0")
    total = 0
    for d, r in kernel._table.items():
        total += r * abs(d) ** order
    return total


def tail_rates(q: RateKernel, p: RateKernel) -> RateKernel:
    """Dominating-walk jump rates a(n) = sum_{k>=n} 2 (q_s(k) + p(k)), n >= 1.

    Entries live on positive displacements only; the result is not symmetric
    and is empty when both inputs are.
    """
    q_s = symmetrize(q)
    top = max(q_s.max_range, p.max_range)
    out: Dict[int, Rate] = {}
    running = 0
    for n in range(top, 0, -1):
        running = running + 2 * (q_s(n) + p(n))
        if running > 0:
            out[n] = running
    return RateKernel(out)


def is_irreducible(kernel: RateKernel) -> bool:
    """Whether every site is reachable by finite sums of support steps.

    Only defined for symmetric kernels (the support then generates the
    subgroup gcd * Z, so the test is gcd == 1).  Raises NonSymmetricKernel
    otherwise; an empty kernel is not irreducible.
    """
    if not kernel.is_symmetric():
        raise NonSymmetricKernel("irreducibility is only defined for symmetric kernels")
    g = 0
    for d in kernel.support:
        g = math.gcd(g, abs(d))
    return g == 1


def tightness_constant(q: RateKernel, p: RateKernel) -> Tuple[int, int]:
    """Smallest (i, N), ordered lexicographically, with q_s(i) > 0 and

        sum_{n>=1} (q_s(n) + p(n)) * n**2  <  q_s(i) * N   (strict).

    Raises NotSatisfiable when q_s vanishes identically (then no i exists).
    """
    q_s = symmetrize(q)
    positive = [d for d in q_s.support if d > 0]
    if not positive:
        raise NotSatisfiable("symmetrized flip kernel has empty support")
    second = 0
    for n in range(1, max(q_s.max_range, p.max_range) + 1):
        second += (q_s(n) + p(n)) * n * n
    i = positive[0]
    n_min = 1
    while not second < q_s(i) * n_min:
        n_min += 1
    return i, n_min
