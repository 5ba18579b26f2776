"""Event-driven simulation of the interface process.

The workhorse is an incremental next-event engine (`run`): it keeps the set
of disagreeing pairs per displacement, a prefix-sum tree over the occupied
window for O(log w) single-flip updates of the inversion count, and exact
integer swap deltas (+-n).  The total event rate is recomputed from the
integer pair counts before every draw, so no floating error accumulates in
the clock.  A one-step reference sampler (`step`) built directly on the
enumerated transition list is kept as the slow, transparent route; tests
compare the two.

Randomness comes from counter-based Philox streams keyed by
(seed, trajectory, stream), so ensembles are reproducible regardless of how
trajectories are scheduled across processes.

`run_coupled` drives the interface jointly with a dominating pure-growth
walk.  The walk rings a bell of size n at the constant rate

    clock(n) = a(n) + (n - 1) * tail_p(n - 1),
    a(n)     = sum_{k >= n} 2 (q_s(k) + p(k)),
    tail_p(m) = sum_{k >= m} p(k),

and the interface extends its window by n only when the bell of size n
rings (thinning).  The first term covers infections and swaps with one leg
in the window; the correction term covers swaps whose endpoints straddle
the window on both sides, which extend the width by n from displacement
n + w - 1 in exactly n - 1 ways.  Without the correction the bound fails
for any kernel with nearest-neighbour swapping; with it the width is
dominated pathwise from every state, and `CouplingViolation` is unreachable.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .exceptions import CouplingViolation, EventBudgetExceeded, Unreachable
from .generator import (
    INFECTION,
    TransitionEvent,
    TruncationSpec,
    apply_event,
    enumerate_transitions,
)
from .kernels import RateKernel, symmetrize, tail_rates
from .lattice import InterfaceConfig, f_cd, heaviside, width

_BLOCK = 4096
_U64 = (1 << 64) - 1


class _Stream:
    """Buffered scalar draws from one keyed Philox stream."""

    def __init__(self, seed: int, substream: int):
        bitgen = np.random.Philox(key=[seed & _U64, substream & _U64])
        self._gen = np.random.Generator(bitgen)
        self._unif: List[float] = []
        self._expo: List[float] = []

    def uniform(self) -> float:
        buf = self._unif
        if not buf:
            buf[:] = self._gen.random(_BLOCK).tolist()
        return buf.pop()

    def exponential(self) -> float:
        buf = self._expo
        if not buf:
            buf[:] = self._gen.standard_exponential(_BLOCK).tolist()
        return buf.pop()


class _Fenwick:
    """Prefix sums over the occupancy array."""

    def __init__(self, values: Sequence[int]):
        n = len(values)
        tree = [0] * (n + 1)
        for i, v in enumerate(values):
            if v:
                j = i + 1
                while j <= n:
                    tree[j] += v
                    j += j & -j
        self.n = n
        self.tree = tree

    def add(self, i: int, delta: int) -> None:
        j = i + 1
        tree = self.tree
        n = self.n
        while j <= n:
            tree[j] += delta
            j += j & -j

    def prefix(self, i: int) -> int:
        """Sum of entries 0..i inclusive; i < 0 gives 0."""
        if i >= self.n:
            i = self.n - 1
        total = 0
        tree = self.tree
        j = i + 1
        while j > 0:
            total += tree[j]
            j -= j & -j
        return total


@dataclass(frozen=True)
class RecordSchedule:
    """When to emit a row: after every event, or at fixed time multiples."""

    kind: str = "events"
    dt: float = 0.0

    def __post_init__(self):
        if self.kind not in ("events", "grid"):
            raise ValueError(f"unknown schedule kind {self.kind!r}")
        if self.kind == "grid" and not self.dt > 0:
            raise ValueError("grid schedules need dt > 0")

    @classmethod
    def every_event(cls) -> "RecordSchedule":
        return cls("events", 0.0)

    @classmethod
    def grid(cls, dt: float) -> "RecordSchedule":
        return cls("grid", float(dt))


@dataclass(frozen=True)
class SimulationConfig:
    q: RateKernel
    p: RateKernel
    t_max: float
    initial: InterfaceConfig = field(default_factory=heaviside)
    truncation: Optional[int] = None
    seed: int = 0
    trajectory: int = 0
    schedule: RecordSchedule = field(default_factory=RecordSchedule.every_event)
    nmax: int = 4
    event_budget: int = 10_000_000
    width_stop: Optional[int] = None
    track_classes: bool = True
    track_displacement_integrals: bool = False

    def __post_init__(self):
        if not self.t_max >= 0:
            raise ValueError("t_max must be >= 0")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")
        if not 0 <= self.trajectory < 2**32:
            raise ValueError("trajectory index must fit in 32 bits")
        if self.truncation is not None and self.truncation < 1:
            raise ValueError("truncation range must be >= 1")
        if self.nmax < 1:
            raise ValueError("nmax must be >= 1")
        if self.event_budget < 1:
            raise ValueError("event budget must be >= 1")
        if self.width_stop is not None and self.width_stop < 0:
            raise ValueError("width_stop must be >= 0")

    @property
    def effective_range(self) -> int:
        top = max(self.q.max_range, self.p.max_range)
        if self.truncation is not None:
            top = min(top, self.truncation)
        return top


@dataclass
class TrajectoryRecord:
    """Sampled rows of one trajectory plus exact final accumulators.

    Row k carries the state at ts[k] (post-event for event schedules, the
    left limit for grid rows) and the cumulative generator integral up to
    ts[k].  `counts[k]` holds (I_1, ..., I_nmax).
    """

    config: SimulationConfig
    ts: List[float]
    event_index: List[int]
    f_cd: List[int]
    width: List[int]
    counts: List[Tuple[int, ...]]
    class_keys: Optional[List[str]]
    integral_gfcd: List[float]
    final_time: float
    final_state: InterfaceConfig
    final_integral_gfcd: float
    event_count: int
    width_hit_time: Optional[float] = None
    budget_exhausted: bool = False
    displacement_integrals: Optional[Dict[int, float]] = None

    def _segment(self, t: float) -> int:
        if not self.ts or t < self.ts[0] or t > self.final_time + 1e-12:
            raise ValueError(f"time {t} outside the recorded range")
        return bisect_right(self.ts, t) - 1

    def _exact_rows_only(self, t: float, k: int) -> None:
        # grid rows do not pin the state between samples
        if self.config.schedule.kind == "grid" and abs(self.ts[k] - t) > 1e-9:
            raise ValueError("grid records can only be queried at row times")

    def fcd_at(self, t: float) -> int:
        k = self._segment(t)
        self._exact_rows_only(t, k)
        return self.f_cd[k]

    def width_at(self, t: float) -> int:
        k = self._segment(t)
        self._exact_rows_only(t, k)
        return self.width[k]

    def count_at(self, t: float, n: int) -> int:
        if not 1 <= n <= self.config.nmax:
            raise ValueError(f"displacement {n} not recorded (nmax={self.config.nmax})")
        k = self._segment(t)
        self._exact_rows_only(t, k)
        return self.counts[k][n - 1]

    def integral_at(self, t: float) -> float:
        """Cumulative generator integral at t (linear between rows)."""
        k = self._segment(t)
        self._exact_rows_only(t, k)
        t0, i0 = self.ts[k], self.integral_gfcd[k]
        if t <= t0:
            return i0
        if k + 1 < len(self.ts):
            t1, i1 = self.ts[k + 1], self.integral_gfcd[k + 1]
        else:
            t1, i1 = self.final_time, self.final_integral_gfcd
        if t1 <= t0:
            return i0
        return i0 + (i1 - i0) * (t - t0) / (t1 - t0)


class _PairSet:
    """Left endpoints of disagreeing pairs at one displacement, O(1) toggle."""

    __slots__ = ("items", "pos")

    def __init__(self):
        self.items: List[int] = []
        self.pos: Dict[int, int] = {}

    def toggle(self, left: int) -> None:
        k = self.pos.pop(left, None)
        items = self.items
        if k is None:
            self.pos[left] = len(items)
            items.append(left)
        else:
            last = items.pop()
            if last != left:
                items[k] = last
                self.pos[last] = k

    def __len__(self) -> int:
        return len(self.items)


class _Engine:
    """Incremental direct-method sampler for one trajectory."""

    def __init__(self, cfg: SimulationConfig):
        self.cfg = cfg
        top = cfg.effective_range
        self.top = top
        q, p = cfg.q, cfg.p
        if cfg.truncation is not None:
            q = q.truncated(cfg.truncation)
            p = p.truncated(cfg.truncation)
        q_s = symmetrize(q)

        # per-displacement weights; track every n that carries rate, plus
        # the first nmax for the recorded counts
        tracked = sorted(
            set(range(1, cfg.nmax + 1))
            | {n for n in range(1, top + 1) if q(n) != 0 or q(-n) != 0 or p(n) != 0}
        )
        self.tracked = tracked
        self.w_left = {n: float(q(-n)) for n in tracked}
        self.w_right = {n: float(q(n)) for n in tracked}
        self.w_swap = {n: float(p(n)) for n in tracked}
        self.w_total = {
            n: self.w_left[n] + self.w_right[n] + self.w_swap[n] for n in tracked
        }
        self.active = [n for n in tracked if self.w_total[n] > 0]
        self.qs_w = {n: float(q_s(n)) for n in tracked if q_s(n) != 0}
        self.s_const = float(
            sum((q_s(n) + p(n)) * n * n for n in range(1, top + 1))
        )

        x = cfg.initial
        self.b = x.leftmost_one
        self.e = x.rightmost_zero
        pad = max(64, 2 * top, 2)
        self.origin = self.b - pad
        cells = [0] * pad + [int(v) for v in x.window] + [1] * pad
        self.arr = cells
        self.fen = _Fenwick(cells)

        self.pairs: Dict[int, _PairSet] = {n: _PairSet() for n in tracked}
        for n in tracked:
            for i in range(self.b - n, self.e + 1):
                if self._val(i) != self._val(i + n):
                    self.pairs[n].toggle(i)

        self.t = 0.0
        self.event_count = 0
        self.f_cd = f_cd(x)
        self.integral_gfcd = 0.0
        self.di: Optional[Dict[int, float]] = (
            {n: 0.0 for n in tracked} if cfg.track_displacement_integrals else None
        )
        sub = (cfg.trajectory << 32) | 0
        self.stream = _Stream(cfg.seed, sub)

    # -- state access ------------------------------------------------

    def _val(self, i: int) -> int:
        if i < self.b:
            return 0
        if i > self.e:
            return 1
        return self.arr[i - self.origin]

    def width(self) -> int:
        return self.e - self.b + 1

    def to_config(self) -> InterfaceConfig:
        o = self.origin
        bits = tuple(self.arr[self.b - o : self.e - o + 1])
        return InterfaceConfig(self.b, bits)

    def class_key(self) -> str:
        o = self.origin
        return "".join(
            "1" if v else "0" for v in self.arr[self.b - o : self.e - o + 1]
        )

    def count(self, n: int) -> int:
        return len(self.pairs[n])

    # -- rates ---------------------------------------------------------

    def total_rate(self) -> float:
        lam = 0.0
        for n in self.active:
            lam += self.w_total[n] * len(self.pairs[n])
        return lam

    def gval(self) -> float:
        g = self.s_const
        for n, w in self.qs_w.items():
            g -= w * len(self.pairs[n])
        return g

    # -- mutation ------------------------------------------------------

    def _grow(self, site: int) -> None:
        pad = max(64, 2 * self.top, self.width())
        lo = min(self.origin, site - pad)
        hi = max(self.origin + len(self.arr) - 1, site + pad)
        fresh = [0] * (hi - lo + 1)
        off = self.origin - lo
        for k, v in enumerate(self.arr):
            fresh[off + k] = v
        for k in range(off + len(self.arr), len(fresh)):
            fresh[k] = 1  # right of old storage: constant 1 territory
        self.arr = fresh
        self.origin = lo
        self.fen = _Fenwick(fresh)

    def _flip_raw(self, s: int) -> None:
        """Toggle one cell and restore the window bound invariants."""
        if s < self.origin or s >= self.origin + len(self.arr):
            self._grow(s)
        o = self.origin
        idx = s - o
        arr = self.arr
        old = arr[idx]
        arr[idx] = 1 - old
        self.fen.add(idx, 1 - 2 * old)
        if old == 0:  # became 1
            if s == self.e:  # rightmost zero vanished: scan left
                t = s - 1
                while t >= self.b and arr[t - o] == 1:
                    t -= 1
                self.e = t
            if s < self.b:
                self.b = s
        else:  # became 0
            if s == self.b:  # leftmost one vanished: scan right
                t = s + 1
                while t <= self.e and arr[t - o] == 0:
                    t += 1
                self.b = t
            if s > self.e:
                self.e = s

    def _flip_counted(self, s: int) -> None:
        """Flip one site, updating the inversion count from prefix sums."""
        if s < self.origin or s >= self.origin + len(self.arr):
            self._grow(s)
        idx = s - self.origin
        ones_left = self.fen.prefix(idx - 1)
        if s < self.e:
            ones_right = self.fen.prefix(self.e - self.origin) - self.fen.prefix(idx)
            zeros_right = (self.e - s) - ones_right
        else:
            zeros_right = 0
        if self.arr[idx] == 0:
            self.f_cd += zeros_right - ones_left
        else:
            self.f_cd += ones_left - zeros_right
        self._flip_raw(s)

    def _toggle_pairs(self, s: int, skip: Optional[Tuple[int, int]] = None) -> None:
        for n in self.tracked:
            ps = self.pairs[n]
            left = s - n
            if skip is None or (left, n) != skip:
                ps.toggle(left)
            if skip is None or (s, n) != skip:
                ps.toggle(s)

    def apply_infection(self, target: int) -> None:
        self._flip_counted(target)
        self._toggle_pairs(target)

    def apply_swap(self, i: int, n: int) -> None:
        # the pair (i, i+n) itself keeps disagreeing; values travel by n
        if self._val(i) == 0:
            self.f_cd += n
        else:
            self.f_cd -= n
        self._flip_raw(i)
        self._flip_raw(i + n)
        key = (i, n)
        self._toggle_pairs(i, skip=key)
        self._toggle_pairs(i + n, skip=key)

    def advance(self, dt: float) -> None:
        self.integral_gfcd += self.gval() * dt
        if self.di is not None:
            for n in self.tracked:
                self.di[n] += len(self.pairs[n]) * dt
        self.t += dt

    def draw_event(self, lam: float) -> Tuple[str, int, int]:
        """Pick (kind, i, n) with probability rate/lam."""
        r = self.stream.uniform() * lam
        acc = 0.0
        chosen = -1
        for n in self.active:
            sz = len(self.pairs[n])
            if sz == 0:
                continue
            acc += self.w_total[n] * sz
            chosen = n
            if r < acc:
                break
        n = chosen
        ps = self.pairs[n]
        i = ps.items[int(self.stream.uniform() * len(ps))]
        v = self.stream.uniform() * self.w_total[n]
        if v < self.w_left[n]:
            return (INFECTION, i, n)  # left endpoint adopts
        if v < self.w_left[n] + self.w_right[n]:
            return (INFECTION, i + n, n)  # right endpoint adopts
        return ("swap", i, n)

    def execute(self, kind: str, site: int, n: int) -> None:
        if kind == INFECTION:
            self.apply_infection(site)
        else:
            self.apply_swap(site, n)
        self.event_count += 1


def _record_from_engine(
    eng: _Engine,
    rows: Dict[str, list],
    hit: Optional[float],
    exhausted: bool,
) -> TrajectoryRecord:
    return TrajectoryRecord(
        config=eng.cfg,
        ts=rows["t"],
        event_index=rows["idx"],
        f_cd=rows["fcd"],
        width=rows["w"],
        counts=rows["cnt"],
        class_keys=rows["cls"],
        integral_gfcd=rows["ig"],
        final_time=eng.t,
        final_state=eng.to_config(),
        final_integral_gfcd=eng.integral_gfcd,
        event_count=eng.event_count,
        width_hit_time=hit,
        budget_exhausted=exhausted,
        displacement_integrals=dict(eng.di) if eng.di is not None else None,
    )


def run(cfg: SimulationConfig) -> TrajectoryRecord:
    """Simulate one trajectory to t_max (or the width stop).

    Raises EventBudgetExceeded, with the partial record attached, if the
    event cap is hit first.
    """
    eng = _Engine(cfg)
    nmax = cfg.nmax
    grid = cfg.schedule.kind == "grid"
    dt_grid = cfg.schedule.dt
    rows: Dict[str, list] = {
        "t": [], "idx": [], "fcd": [], "w": [], "cnt": [],
        "cls": [] if cfg.track_classes else None, "ig": [],
    }

    def emit(t: float, integral: float) -> None:
        rows["t"].append(t)
        rows["idx"].append(eng.event_count)
        rows["fcd"].append(eng.f_cd)
        rows["w"].append(eng.width())
        rows["cnt"].append(tuple(len(eng.pairs[n]) for n in range(1, nmax + 1)))
        if rows["cls"] is not None:
            rows["cls"].append(eng.class_key())
        rows["ig"].append(integral)

    emit(0.0, 0.0)
    next_k = 1  # next grid multiple to emit
    hit: Optional[float] = None
    t_max = cfg.t_max
    while True:
        lam = eng.total_rate()
        if lam <= 0.0:
            t_jump = math.inf
        else:
            t_jump = eng.t + eng.stream.exponential() / lam
        if t_jump >= t_max:
            if grid:
                g = next_k * dt_grid
                while g <= t_max + 1e-12:
                    emit(min(g, t_max), eng.integral_gfcd + eng.gval() * (g - eng.t))
                    next_k += 1
                    g = next_k * dt_grid
            eng.advance(t_max - eng.t)
            break
        if grid:
            g = next_k * dt_grid
            while g < t_jump:
                emit(g, eng.integral_gfcd + eng.gval() * (g - eng.t))
                next_k += 1
                g = next_k * dt_grid
        if eng.event_count >= cfg.event_budget:
            raise EventBudgetExceeded(
                f"event budget {cfg.event_budget} exhausted at t={eng.t:.6g}",
                record=_record_from_engine(eng, rows, hit, True),
            )
        kind, site, n = eng.draw_event(lam)
        eng.advance(t_jump - eng.t)
        eng.execute(kind, site, n)
        if not grid:
            emit(eng.t, eng.integral_gfcd)
        if cfg.width_stop is not None and eng.width() > cfg.width_stop:
            hit = eng.t
            break
    return _record_from_engine(eng, rows, hit, False)


def step(
    x: InterfaceConfig,
    q: RateKernel,
    p: RateKernel,
    rng: np.random.Generator,
    trunc: TruncationSpec | None = None,
) -> Tuple[float, TransitionEvent, InterfaceConfig]:
    """One direct-method draw via plain enumeration (reference route).

    Returns (holding time, event, new state).  Slow but transparent; the
    incremental engine in `run` is tested against the rates this route uses.
    """
    events = enumerate_transitions(x, q, p, trunc)
    lam = float(sum(e.rate for e in events))
    if lam <= 0:
        raise ValueError("state has no outgoing transitions under these kernels")
    dt = rng.standard_exponential() / lam
    r = rng.random() * lam
    acc = 0.0
    chosen = events[-1]
    for e in events:
        acc += e.rate
        if r < acc:
            chosen = e
            break
    return dt, chosen, apply_event(x, chosen)


# --- first-exit helpers ---------------------------------------------------

def tau_from_record(record: TrajectoryRecord, threshold: int) -> float:
    """First row time with width > threshold; inf if never reached."""
    for t, w in zip(record.ts, record.width):
        if w > threshold:
            return t
    if record.width_hit_time is not None:
        return record.width_hit_time
    return math.inf


def stopping_time_tau(
    cfg: SimulationConfig,
    threshold: int,
    truncation: Optional[int] = None,
) -> Tuple[float, TrajectoryRecord]:
    """First time the width exceeds the threshold, censored at t_max (inf).

    The trajectory is run with an early stop; the event sequence up to the
    stop is identical to the unstopped run with the same seed, so nested
    thresholds give monotone exit times on a common path.  An explicit
    truncation overrides the config's.
    """
    if truncation is not None:
        cfg = replace(cfg, truncation=truncation)
    if threshold < width(cfg.initial):
        raise ValueError("threshold below the initial width is already crossed")
    rec = run(replace(cfg, width_stop=threshold))
    if rec.width_hit_time is not None:
        return rec.width_hit_time, rec
    return math.inf, rec


# --- transport plans ------------------------------------------------------

def _egcd(a: int, b: int) -> Tuple[int, int, int]:
    if b == 0:
        return a, 1, 0
    g, x, y = _egcd(b, a % b)
    return g, y, x - (a // b) * y


def plan_transport(n: int, support: Sequence[int]) -> List[int]:
    """Ordered positive sites 1 = s_0, s_1, ..., s_T = n with every step in
    the symmetrized support and every intermediate site >= 1.

    Steps are the Bezout decomposition of n - 1, sorted descending; partial
    sums of a descending sequence are concave, so the minimum sits at an
    endpoint and positivity is automatic.
    """
    if n < 1:
        raise ValueError("target site must be >= 1")
    if n == 1:
        return [1]
    sizes = sorted({abs(int(s)) for s in support if int(s) != 0})
    if not sizes:
        raise Unreachable("empty step support")
    m = n - 1
    g, coef = sizes[0], [1]
    for s in sizes[1:]:
        g2, xg, yg = _egcd(g, s)
        coef = [c * xg for c in coef] + [yg]
        g = g2
    if m % g:
        raise Unreachable(
            f"offset {m} is not a multiple of gcd {g} of step sizes {sizes}"
        )
    scale = m // g
    steps: List[int] = []
    for c, s in zip(coef, sizes):
        k = c * scale
        if k:
            steps.extend([s if k > 0 else -s] * abs(k))
    steps.sort(reverse=True)
    sites = [1]
    for d in steps:
        sites.append(sites[-1] + d)
    assert sites[-1] == n and min(sites) >= 1
    return sites


# --- dominating-walk coupling ---------------------------------------------

def coupled_clock_rates(
    q: RateKernel,
    p: RateKernel,
    trunc: TruncationSpec | None = None,
) -> Dict[int, object]:
    """Constant ring rates clock(n) = a(n) + (n-1) tail_p(n-1), n >= 1.

    Exact in the kernel's arithmetic (Fraction in, Fraction out).  Reduces
    to the plain tail rates a(n) when there is no swapping.
    """
    top = max(q.max_range, p.max_range)
    if trunc is not None:
        top = min(top, trunc.max_range)
        q = q.truncated(top)
        p = p.truncated(top)
    a = tail_rates(q, p)
    p_tail: Dict[int, object] = {}
    acc = 0
    for k in range(top, 0, -1):
        acc = acc + p(k)
        p_tail[k] = acc
    out: Dict[int, object] = {}
    for n in range(1, top + 2):
        rate = a(n) + (n - 1) * p_tail.get(n - 1, 0)
        if rate != 0:
            out[n] = rate
    return out


def _growth(e: TransitionEvent, b: int, last_zero: int, w: int) -> int:
    """Width change of one event, by endpoint position alone."""
    if e.kind == INFECTION:
        t = e.i
        if t < b:
            return 0 if (w == 0 and t == b - 1) else b - t
        if t > last_zero:
            return 0 if (w == 0 and t == b) else t - last_zero
        return 0
    u, v = e.i, e.j
    if u < b and v > last_zero:
        return (v - u + 1) - w
    if u < b:
        return b - u
    if v > last_zero:
        return v - last_zero
    return 0


def width_growth(event: TransitionEvent, x: InterfaceConfig) -> int:
    """Width change the event would cause from x (positive = extension)."""
    return _growth(event, x.leftmost_one, x.rightmost_zero, width(x))


def extension_rates(
    x: InterfaceConfig,
    q: RateKernel,
    p: RateKernel,
    trunc: TruncationSpec | None = None,
) -> Dict[int, object]:
    """Total transition rate toward each positive width extension from x.

    Exact in the kernels' arithmetic; the pathwise domination argument
    hinges on extension_rates(x)[n] <= coupled_clock_rates(q, p)[n] for all
    states, which tests verify here directly.
    """
    out: Dict[int, object] = {}
    b = x.leftmost_one
    last_zero = x.rightmost_zero
    w = width(x)
    for e in enumerate_transitions(x, q, p, trunc):
        g = _growth(e, b, last_zero, w)
        if g > 0:
            out[g] = out.get(g, 0) + e.rate
    return out


@dataclass
class CoupledWalkState:
    time: float
    position: int
    interface_width: int


@dataclass
class CoupledRecord:
    """Joint trace of the interface and its dominating walk."""

    ts: List[float]
    widths: List[int]
    walk: List[int]
    jump_log: List[Tuple[float, int, bool]]  # (time, bell size, executed)
    clock_rates: Dict[int, float]
    base_rates: Dict[int, float]
    event_count: int
    master_count: int
    interior_count: int
    final_state: InterfaceConfig
    final_time: float
    walk_level_hits: Dict[int, float] = field(default_factory=dict)
    width_level_hits: Dict[int, float] = field(default_factory=dict)

    @property
    def jump_counts(self) -> Dict[int, int]:
        out: Dict[int, int] = {}
        for _, n, _ in self.jump_log:
            out[n] = out.get(n, 0) + 1
        return out


def run_coupled(
    cfg: SimulationConfig,
    n_levels: Sequence[int] = (),
) -> CoupledRecord:
    """Drive the interface under the dominating-walk thinning.

    Bell n rings at the constant clock rate; each ring advances the walk by
    n and executes a width-extension-by-n interface event with probability
    (their total rate) / clock(n).  All other interface events run on a
    separate interior stream.  The walk position dominates the width after
    every event; a violation raises CouplingViolation (and indicates a bug,
    not randomness).

    For each threshold N in n_levels the record carries the first times the
    walk and the width exceed N (inf when never); domination forces
    walk_level_hits[N] <= width_level_hits[N].
    """
    q, p = cfg.q, cfg.p
    top = cfg.effective_range
    if top < 1:
        raise ValueError("kernels carry no rate")
    qt, pt = q.truncated(top), p.truncated(top)
    clocks = {n: float(r) for n, r in coupled_clock_rates(qt, pt).items()}
    base = {n: float(r) for n, r in tail_rates(qt, pt)}
    ns = sorted(clocks)
    sub_base = cfg.trajectory << 32
    interior = _Stream(cfg.seed, sub_base | 1)
    streams = {n: _Stream(cfg.seed, sub_base | (2 + i)) for i, n in enumerate(ns)}
    next_ring = {n: streams[n].exponential() / clocks[n] for n in ns}

    x = cfg.initial
    t_max = cfg.t_max
    walk = width(x)
    t = 0.0
    rec = CoupledRecord(
        ts=[0.0], widths=[width(x)], walk=[walk], jump_log=[],
        clock_rates=clocks, base_rates=base, event_count=0,
        master_count=0, interior_count=0, final_state=x, final_time=t_max,
    )
    levels = sorted(set(int(v) for v in n_levels))

    def note_levels() -> None:
        for lev in levels:
            if walk > lev and lev not in rec.walk_level_hits:
                rec.walk_level_hits[lev] = t
            if width(x) > lev and lev not in rec.width_level_hits:
                rec.width_level_hits[lev] = t

    note_levels()

    while True:
        b = x.leftmost_one
        last_zero = x.rightmost_zero
        w = width(x)
        events = enumerate_transitions(x, qt, pt)
        ext: Dict[int, List[TransitionEvent]] = {}
        ext_rate: Dict[int, float] = {}
        interior_events: List[TransitionEvent] = []
        lam_int = 0.0
        for e in events:
            g = _growth(e, b, last_zero, w)
            if g > 0:
                ext.setdefault(g, []).append(e)
                ext_rate[g] = ext_rate.get(g, 0.0) + e.rate
            else:
                interior_events.append(e)
                lam_int += e.rate
        for g, r in ext_rate.items():
            if g not in clocks or r > clocks[g] * (1 + 1e-9):
                raise CouplingViolation(
                    f"extension-by-{g} rate {r} exceeds clock {clocks.get(g, 0.0)}"
                )

        t_int = t + interior.exponential() / lam_int if lam_int > 0 else math.inf
        n_star = min(ns, key=lambda n: next_ring[n])
        t_ring = next_ring[n_star]
        t_next = min(t_int, t_ring)
        if t_next >= t_max:
            break
        if t_ring <= t_int:
            n = n_star
            t = t_ring
            stream = streams[n]
            next_ring[n] = t + stream.exponential() / clocks[n]
            walk += n
            u = stream.uniform() * clocks[n]
            execute = u < ext_rate.get(n, 0.0)
            rec.jump_log.append((t, n, execute))
            rec.master_count += 1
            if execute:
                bucket = ext[n]
                r = stream.uniform() * ext_rate[n]
                acc = 0.0
                chosen = bucket[-1]
                for e in bucket:
                    acc += e.rate
                    if r < acc:
                        chosen = e
                        break
                x = apply_event(x, chosen)
                rec.event_count += 1
        else:
            t = t_int
            r = interior.uniform() * lam_int
            acc = 0.0
            chosen = interior_events[-1]
            for e in interior_events:
                acc += e.rate
                if r < acc:
                    chosen = e
                    break
            x = apply_event(x, chosen)
            rec.event_count += 1
            rec.interior_count += 1
        rec.ts.append(t)
        rec.widths.append(width(x))
        rec.walk.append(walk)
        note_levels()
        if walk < width(x):
            raise CouplingViolation(
                f"walk at {walk} fell below interface width {width(x)} at t={t:.6g}"
            )
    rec.final_state = x
    for lev in levels:
        rec.walk_level_hits.setdefault(lev, math.inf)
        rec.width_level_hits.setdefault(lev, math.inf)
    return rec
