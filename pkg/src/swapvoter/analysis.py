"""Path statistics over recorded trajectories.

Everything here folds `TrajectoryRecord` rows; nothing re-simulates.  Time
averages are exact piecewise-constant sums over inter-event segments, so
they need event-schedule records (grid records lose the state between
samples and are rejected where that would bias a result).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .kernels import symmetrize
from .simulate import TrajectoryRecord

_Z95 = 1.959963984540054


def _require_event_rows(rec: TrajectoryRecord, what: str) -> None:
    if rec.config.schedule.kind != "events":
        raise ValueError(f"{what} needs event-schedule records")


def _segments(rec: TrajectoryRecord) -> Iterable[Tuple[int, float]]:
    """(row index, holding time) pairs covering [0, final_time]."""
    ts = rec.ts
    for k in range(len(ts)):
        t_next = ts[k + 1] if k + 1 < len(ts) else rec.final_time
        dt = t_next - ts[k]
        if dt > 0:
            yield k, dt


# --- recurrence -----------------------------------------------------------

@dataclass
class RecurrenceStats:
    """Occupation bookkeeping by canonical window class.

    The flat class has key ""; return times are completed excursions away
    from it (censored excursions at the end of a record are dropped).
    """

    total_time: float
    occupation: Dict[str, float]
    visits: Dict[str, int]
    width_occupation: Dict[int, float]
    return_times: List[float]
    class_count: int
    truncated: bool

    @property
    def flat_fraction(self) -> float:
        return self.occupation.get("", 0.0) / self.total_time if self.total_time else 0.0

    @property
    def mean_return(self) -> float:
        return sum(self.return_times) / len(self.return_times) if self.return_times else math.nan

    @property
    def median_return(self) -> float:
        if not self.return_times:
            return math.nan
        xs = sorted(self.return_times)
        m = len(xs) // 2
        return xs[m] if len(xs) % 2 else 0.5 * (xs[m - 1] + xs[m])


def recurrence_report(
    records: Iterable[TrajectoryRecord],
    class_cap: int = 10**6,
) -> RecurrenceStats:
    """Fold occupation times, visit counts and flat-class excursions."""
    occupation: Dict[str, float] = {}
    visits: Dict[str, int] = {}
    width_occ: Dict[int, float] = {}
    returns: List[float] = []
    total = 0.0
    truncated = False
    for rec in records:
        _require_event_rows(rec, "recurrence accounting")
        if rec.class_keys is None:
            raise ValueError("recurrence accounting needs class keys")
        keys = rec.class_keys
        total += rec.final_time
        away_since: Optional[float] = None
        prev: Optional[str] = None
        for k, dt in _segments(rec):
            key = keys[k]
            if key in occupation:
                occupation[key] += dt
            elif len(occupation) < class_cap:
                occupation[key] = dt
            else:
                truncated = True
            if key != prev:
                visits[key] = visits.get(key, 0) + 1
            w = rec.width[k]
            width_occ[w] = width_occ.get(w, 0.0) + dt
            if key == "" and away_since is not None:
                returns.append(rec.ts[k] - away_since)
                away_since = None
            elif key != "" and away_since is None and prev == "":
                away_since = rec.ts[k]
            prev = key
    return RecurrenceStats(
        total_time=total,
        occupation=occupation,
        visits=visits,
        width_occupation=width_occ,
        return_times=returns,
        class_count=len(occupation),
        truncated=truncated,
    )


def total_variation(
    hist_a: Dict[int, float], hist_b: Dict[int, float]
) -> float:
    """TV distance between two normalized occupation histograms."""
    za = sum(hist_a.values())
    zb = sum(hist_b.values())
    if za <= 0 or zb <= 0:
        raise ValueError("histograms must have positive mass")
    keys = set(hist_a) | set(hist_b)
    return 0.5 * sum(
        abs(hist_a.get(k, 0.0) / za - hist_b.get(k, 0.0) / zb) for k in keys
    )


# --- time averages --------------------------------------------------------

@dataclass
class CesaroEstimate:
    """Ensemble of per-path time fractions of {I_n < threshold}."""

    displacement: int
    threshold: int
    per_path: List[float]

    @property
    def mean(self) -> float:
        return sum(self.per_path) / len(self.per_path)

    @property
    def se(self) -> float:
        xs = self.per_path
        if len(xs) < 2:
            return math.nan
        m = self.mean
        var = sum((v - m) ** 2 for v in xs) / (len(xs) - 1)
        return math.sqrt(var / len(xs))

    @property
    def interval(self) -> Tuple[float, float]:
        half = _Z95 * self.se
        return self.mean - half, self.mean + half


def occupancy_below(rec: TrajectoryRecord, displacement: int, threshold: int) -> float:
    """Exact time spent with I_displacement < threshold."""
    _require_event_rows(rec, "occupancy accounting")
    if not 1 <= displacement <= rec.config.nmax:
        raise ValueError(
            f"displacement {displacement} not recorded (nmax={rec.config.nmax})"
        )
    col = displacement - 1
    return sum(dt for k, dt in _segments(rec) if rec.counts[k][col] < threshold)


def cesaro_fraction(
    records: Sequence[TrajectoryRecord], displacement: int, threshold: int
) -> CesaroEstimate:
    per_path = []
    for rec in records:
        if rec.final_time <= 0:
            raise ValueError("cannot average over a zero-length record")
        per_path.append(occupancy_below(rec, displacement, threshold) / rec.final_time)
    if not per_path:
        raise ValueError("no records given")
    return CesaroEstimate(displacement, threshold, per_path)


# --- martingale residuals --------------------------------------------------

@dataclass
class CheckpointStats:
    t: float
    count: int
    mean_residual: float
    se_residual: float
    ne_mean: float
    ne_se: float

    @property
    def z(self) -> float:
        return self.mean_residual / self.se_residual if self.se_residual > 0 else math.inf


@dataclass
class MartingaleReport:
    checkpoints: List[CheckpointStats]

    @property
    def worst_abs_z(self) -> float:
        return max(abs(c.z) for c in self.checkpoints)


def martingale_residual(
    records: Sequence[TrajectoryRecord], checkpoints: Sequence[float]
) -> MartingaleReport:
    """Per-checkpoint mean of f_cd(X_t) - integral - f_cd(X_0) with its SE.

    The compensated count is a martingale started at zero, so the mean
    residual should sit within a few standard errors of zero; ne_mean is
    the accompanying f_cd(X_0) + E integral, which stays nonnegative.
    """
    if not records:
        raise ValueError("no records given")
    out = []
    for t in checkpoints:
        resid = []
        ne = []
        for rec in records:
            base = rec.f_cd[0]
            integral = rec.integral_at(t)
            resid.append(rec.fcd_at(t) - integral - base)
            ne.append(base + integral)
        n = len(resid)
        m = sum(resid) / n
        mn = sum(ne) / n
        if n > 1:
            se = math.sqrt(sum((v - m) ** 2 for v in resid) / (n - 1) / n)
            ne_se = math.sqrt(sum((v - mn) ** 2 for v in ne) / (n - 1) / n)
        else:
            se = ne_se = math.nan
        out.append(CheckpointStats(t, n, m, se, mn, ne_se))
    return MartingaleReport(out)


# --- exact pathwise inequality chain ---------------------------------------

@dataclass
class LedgerRow:
    """One path's exact identity and bound bookkeeping.

    identity: final integral of the generator closed form equals
    T * quadratic_rate - sum_n q_s(n) * integral I_n, both accumulated
    independently during the run.  bound: the same disagreement integrals
    dominate q_s(i) * threshold * (time spent at I_i >= threshold).
    """

    final_time: float
    quadratic_rate: float
    integral_gfcd: float
    weighted_counts: float
    occupancy_above: float
    identity_residual: float
    identity_ok: bool
    bound_margin: float
    bound_ok: bool

    @property
    def floor_value(self) -> float:
        # lower bound for the integral implied by the chain
        return self.final_time * self.quadratic_rate - self.weighted_counts


@dataclass
class LedgerReport:
    displacement: int
    threshold: int
    rows: List[LedgerRow]

    @property
    def all_identities_ok(self) -> bool:
        return all(r.identity_ok for r in self.rows)

    @property
    def all_bounds_ok(self) -> bool:
        return all(r.bound_ok for r in self.rows)

    @property
    def max_identity_residual(self) -> float:
        return max(r.identity_residual for r in self.rows)


def contradiction_ledger(
    records: Sequence[TrajectoryRecord],
    displacement: int,
    threshold: int,
    rel_tol: float = 1e-9,
) -> LedgerReport:
    """Check the exact integral identity and the termwise bound per path.

    Needs records run with displacement integrals tracked.  Kernels and
    truncation are taken from each record's own config.
    """
    if not records:
        raise ValueError("no records given")
    rows = []
    for rec in records:
        di = rec.displacement_integrals
        if di is None:
            raise ValueError("records must track displacement integrals")
        cfg = rec.config
        q, p = cfg.q, cfg.p
        if cfg.truncation is not None:
            q = q.truncated(cfg.truncation)
            p = p.truncated(cfg.truncation)
        q_s = symmetrize(q)
        top = cfg.effective_range
        s_rate = float(sum((q_s(n) + p(n)) * n * n for n in range(1, top + 1)))
        qsi = float(q_s(displacement))
        if qsi == 0:
            raise ValueError(
                f"q_s({displacement}) = 0: the bound carries no information"
            )
        weighted = float(
            sum(float(q_s(n)) * di[n] for n in di if q_s(n) != 0)
        )
        lhs = rec.final_integral_gfcd
        rhs = rec.final_time * s_rate - weighted
        scale = max(1.0, abs(lhs), abs(rhs))
        resid = abs(lhs - rhs) / scale
        occ = rec.final_time - occupancy_below(rec, displacement, threshold)
        margin = weighted - qsi * threshold * occ
        rows.append(
            LedgerRow(
                final_time=rec.final_time,
                quadratic_rate=s_rate,
                integral_gfcd=lhs,
                weighted_counts=weighted,
                occupancy_above=occ,
                identity_residual=resid,
                identity_ok=resid <= rel_tol,
                bound_margin=margin,
                bound_ok=margin >= -rel_tol * max(1.0, abs(weighted)),
            )
        )
    return LedgerReport(displacement, threshold, rows)
