"""Disagreement-point (boundary) dynamics and small Monte Carlo estimators.

The boundary field y(i) = 1{x(i) != x(i+1)} of an interface state is a
finite particle set with odd cardinality.  Its dynamics are autonomous:
transition rates depend on y alone, through the parity of particle counts
between event endpoints (`generator.boundary_generator_rates`).  Swaps move
particles in pairs and infections create or annihilate them in pairs, so
the parity of the particle count is conserved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

from .exceptions import PreconditionViolated
from .generator import TruncationSpec, boundary_generator_rates
from .kernels import RateKernel
from .lattice import InterfaceConfig, interface_counts
from .simulate import SimulationConfig, RecordSchedule, _Stream, run

_Z95 = 1.959963984540054


@dataclass(frozen=True)
class BoundaryConfig:
    """Finite odd set of disagreement points."""

    particles: Tuple[int, ...]

    def __post_init__(self):
        cleaned = tuple(sorted(set(int(c) for c in self.particles)))
        if len(cleaned) % 2 == 0:
            raise ValueError(
                f"boundary states carry an odd particle count, got {len(cleaned)}"
            )
        object.__setattr__(self, "particles", cleaned)

    def __len__(self) -> int:
        return len(self.particles)

    def min_gap(self) -> Optional[int]:
        """Smallest distance between two particles; None for a singleton."""
        ps = self.particles
        if len(ps) < 2:
            return None
        return min(b - a for a, b in zip(ps, ps[1:]))


def boundary(x: InterfaceConfig) -> BoundaryConfig:
    """Particle image of an interface state."""
    sites = [
        i
        for i in range(x.offset - 1, x.rightmost_zero + 1)
        if x.value(i) != x.value(i + 1)
    ]
    return BoundaryConfig(tuple(sites))


def generator_rates(
    y: BoundaryConfig,
    q: RateKernel,
    p: RateKernel,
    trunc: TruncationSpec | None = None,
):
    """Typed front for `generator.boundary_generator_rates`."""
    return boundary_generator_rates(y.particles, q, p, trunc)


@dataclass
class BoundaryRecord:
    ts: List[float]
    states: List[Tuple[int, ...]]
    event_count: int
    final_time: float

    @property
    def final_particles(self) -> Tuple[int, ...]:
        return self.states[-1]


def simulate_boundary(
    y0: BoundaryConfig,
    q: RateKernel,
    p: RateKernel,
    t_max: float,
    trunc: TruncationSpec | None = None,
    seed: int = 0,
    trajectory: int = 0,
) -> BoundaryRecord:
    """Direct-method simulation of the particle process.

    Re-enumerates the aggregated transition list after every event, which is
    plenty for the particle counts this is used at.  Parity conservation is
    asserted after every jump.
    """
    if not t_max >= 0:
        raise ValueError("t_max must be >= 0")
    stream = _Stream(seed, (trajectory << 32) | 7)
    parts = set(y0.particles)
    parity = len(parts) % 2
    rec = BoundaryRecord(ts=[0.0], states=[tuple(sorted(parts))], event_count=0,
                         final_time=t_max)
    t = 0.0
    while True:
        moves = boundary_generator_rates(tuple(parts), q, p, trunc)
        lam = float(sum(r for _, r in moves))
        if lam <= 0:
            break
        t_next = t + stream.exponential() / lam
        if t_next >= t_max:
            break
        t = t_next
        r = stream.uniform() * lam
        acc = 0.0
        flips = moves[-1][0]
        for key, rate in moves:
            acc += rate
            if r < acc:
                flips = key
                break
        parts.symmetric_difference_update(flips)
        assert len(parts) % 2 == parity, "particle parity broke"
        rec.event_count += 1
        rec.ts.append(t)
        rec.states.append(tuple(sorted(parts)))
    return rec


def _wilson(successes: int, trials: int) -> Tuple[float, float, float]:
    p_hat = successes / trials
    z2 = _Z95 * _Z95
    denom = 1 + z2 / trials
    center = (p_hat + z2 / (2 * trials)) / denom
    half = (
        _Z95
        * math.sqrt(p_hat * (1 - p_hat) / trials + z2 / (4 * trials * trials))
        / denom
    )
    return p_hat, max(0.0, center - half), min(1.0, center + half)


@dataclass(frozen=True)
class IntervalEstimate:
    """Binomial point estimate with a 95% Wilson interval."""

    successes: int
    trials: int
    estimate: float
    lower: float
    upper: float


def annihilation_probability(
    y0: BoundaryConfig,
    q: RateKernel,
    p: RateKernel,
    max_gap: int,
    surviving: int,
    t: float,
    trials: int,
    seed: int = 0,
    trunc: TruncationSpec | None = None,
) -> IntervalEstimate:
    """Chance that exactly `surviving` particles remain at time t.

    Preconditions: y0 carries surviving + 2 particles and some two of them
    sit within max_gap of each other.  Violations raise, they are not
    reported as zero estimates.  At t = 0 the estimate is exactly 0 (the
    count starts at surviving + 2).
    """
    if len(y0) != surviving + 2:
        raise PreconditionViolated(
            f"need {surviving + 2} particles to reach {surviving}, got {len(y0)}"
        )
    gap = y0.min_gap()
    if gap is None or gap > max_gap:
        raise PreconditionViolated(
            f"no particle pair within distance {max_gap} (closest: {gap})"
        )
    if trials < 1:
        raise ValueError("trials must be >= 1")
    hits = 0
    for k in range(trials):
        rec = simulate_boundary(y0, q, p, t, trunc=trunc, seed=seed, trajectory=k)
        if len(rec.final_particles) == surviving:
            hits += 1
    p_hat, lo, hi = _wilson(hits, trials)
    return IntervalEstimate(hits, trials, p_hat, lo, hi)


def boost_check(
    x: InterfaceConfig,
    q: RateKernel,
    p: RateKernel,
    displacement: int,
    threshold: int,
    t: float,
    trials: int,
    seed: int = 0,
    trunc: TruncationSpec | None = None,
) -> IntervalEstimate:
    """Estimate P[I_n(X_t) < threshold] from x, n = displacement.

    At t = 0 the probability is the indicator of the initial state and no
    simulation happens (trials is ignored; the interval is degenerate).
    """
    if displacement < 1:
        raise ValueError("displacement must be >= 1")
    if threshold < 1:
        raise ValueError("threshold must be >= 1")
    if not t >= 0:
        raise ValueError("t must be >= 0")
    if t == 0:
        i_n, _, _ = interface_counts(x, displacement)
        val = 1.0 if i_n < threshold else 0.0
        return IntervalEstimate(int(val), 1, val, val, val)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    k_trunc = None if trunc is None else trunc.max_range
    hits = 0
    for k in range(trials):
        cfg = SimulationConfig(
            q=q,
            p=p,
            t_max=t,
            initial=x,
            truncation=k_trunc,
            seed=seed,
            trajectory=k,
            schedule=RecordSchedule.grid(t),
            nmax=displacement,
            track_classes=False,
        )
        rec = run(cfg)
        i_n, _, _ = interface_counts(rec.final_state, displacement)
        if i_n < threshold:
            hits += 1
    p_hat, lo, hi = _wilson(hits, trials)
    return IntervalEstimate(hits, trials, p_hat, lo, hi)
