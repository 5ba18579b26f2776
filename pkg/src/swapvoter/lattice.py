"""Interface configurations on {0,1}^Z.

A configuration here is always an interface state: 0 at -infinity, 1 at
+infinity.  It is stored as the offset of the leftmost 1 together with the
bit window from that site through the rightmost 0.  A translate of the
Heaviside step has an empty window; otherwise the window starts with 1 and
ends with 0 by construction, which is exactly the normal form that makes the
translation quotient a plain window comparison.

Site convention: value(i) = 0 for i < offset, window bit for offset <= i <=
offset + len(window) - 1, and 1 beyond.  The two outermost disagreement
boundaries are then offset - 1 and offset + len(window) - 1, so the interface
width equals the window length.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, Tuple

from .exceptions import NotAnInterface


def _check_bits(bits: Tuple[int, ...]) -> None:
    for b in bits:
        if b not in (0, 1):
            raise NotAnInterface(f"window bits must be 0 or 1, got {b!r}")
    if bits:
        if bits[0] != 1:
            raise NotAnInterface("window must start at the leftmost 1")
        if bits[-1] != 0:
            raise NotAnInterface("window must end at the rightmost 0")


@dataclass(frozen=True)
class InterfaceConfig:
    """Normalized interface state: `offset` is the site of the leftmost 1."""

    offset: int = 0
    window: Tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "window", tuple(int(b) for b in self.window))
        _check_bits(self.window)

    def value(self, site: int) -> int:
        if site < self.offset:
            return 0
        if site >= self.offset + len(self.window):
            return 1
        return self.window[site - self.offset]

    @property
    def leftmost_one(self) -> int:
        return self.offset

    @property
    def rightmost_zero(self) -> int:
        # offset - 1 for an empty window: the last 0 sits just left of the step.
        return self.offset + len(self.window) - 1

    @property
    def window_string(self) -> str:
        return "".join(str(b) for b in self.window)

    def translated(self, shift: int) -> "InterfaceConfig":
        return InterfaceConfig(self.offset + shift, self.window)

    def sites(self, lo: int, hi: int) -> Tuple[int, ...]:
        """Values on the inclusive site range [lo, hi]."""
        return tuple(self.value(i) for i in range(lo, hi + 1))


@dataclass(frozen=True)
class CanonicalClass:
    """Translation-quotient representative: the window bits alone."""

    bits: Tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "bits", tuple(int(b) for b in self.bits))
        _check_bits(self.bits)

    @property
    def key(self) -> str:
        return "".join(str(b) for b in self.bits)

    @property
    def is_heaviside(self) -> bool:
        return not self.bits

    @property
    def width(self) -> int:
        return len(self.bits)


def heaviside() -> InterfaceConfig:
    """The step x(i) = 1 for i >= 0, else 0."""
    return InterfaceConfig(0, ())


def canonical(x: InterfaceConfig) -> CanonicalClass:
    return CanonicalClass(x.window)


def width(x: InterfaceConfig) -> int:
    """Distance between the outermost disagreement boundaries."""
    return len(x.window)


def flip(x: InterfaceConfig, delta: Iterable[int]) -> InterfaceConfig:
    """Flip the finite site set `delta` and renormalize.

    The result is always an interface state (toggling finitely many sites
    cannot change either limit), so the NotAnInterface validation in the
    constructor is a pure assertion here.
    """
    targets = sorted(set(int(s) for s in delta))
    if not targets:
        return x
    lo = min(x.offset, targets[0])
    hi = max(x.rightmost_zero, targets[-1])
    vals: Dict[int, int] = {i: x.value(i) for i in range(lo, hi + 1)}
    for s in targets:
        vals[s] ^= 1
    new_b = next((i for i in range(lo, hi + 1) if vals[i] == 1), hi + 1)
    new_e = next((i for i in range(hi, lo - 1, -1) if vals[i] == 0), lo - 1)
    if new_e < new_b:
        return InterfaceConfig(new_b, ())
    return InterfaceConfig(new_b, tuple(vals[i] for i in range(new_b, new_e + 1)))


def swap(x: InterfaceConfig, i: int, j: int) -> InterfaceConfig:
    """Exchange the values at sites i and j (identity when they agree)."""
    if i == j:
        raise ValueError("swap endpoints must differ")
    if x.value(i) == x.value(j):
        return x
    return flip(x, (i, j))


def f_cd(x: InterfaceConfig) -> int:
    """Inversion count: pairs (i, j) with i < j, x(i) = 1, x(j) = 0.

    Every such pair lies inside the window (a 1 forces i >= offset, a 0
    forces j <= rightmost zero), so a single right-to-left scan counting
    zeros suffices.
    """
    zeros = 0
    total = 0
    for bit in reversed(x.window):
        if bit == 0:
            zeros += 1
        else:
            total += zeros
    return total


def interface_counts(x: InterfaceConfig, n: int) -> Tuple[int, int, int]:
    """(I_n, I01_n, I10_n): disagreements between sites i and i + n.

    I01 counts x(i) = 0, x(i+n) = 1; I10 the reverse; I_n their sum.  Only
    i in [offset - n, rightmost zero] can disagree, everything else matches.
    """
    if n < 1:
        raise ValueError("distance must be >= 1")
    i01 = 0
    i10 = 0
    for i in range(x.offset - n, x.rightmost_zero + 1):
        a = x.value(i)
        b = x.value(i + n)
        if a < b:
            i01 += 1
        elif a > b:
            i10 += 1
    return i01 + i10, i01, i10


def thinned_counts(x: InterfaceConfig, n: int, m: int) -> Tuple[int, int]:
    """(I01_{n,m}, I10_{n,m}): disagreement counts along the sublattice nZ + m.

    Counts r with x(nr + m) = a and x(n(r+1) + m) = b for ab = 01 / 10.
    """
    if n < 1:
        raise ValueError("lattice spacing must be >= 1")
    lo = x.offset - n
    hi = x.rightmost_zero
    r_lo = -((lo - m) // -n)  # ceil((lo - m) / n)
    r_hi = (hi - m) // n
    i01 = 0
    i10 = 0
    for r in range(r_lo, r_hi + 1):
        a = x.value(n * r + m)
        b = x.value(n * (r + 1) + m)
        if a < b:
            i01 += 1
        elif a > b:
            i10 += 1
    return i01, i10
