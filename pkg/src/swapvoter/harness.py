"""Experiment orchestration: config files, trajectory farms, flat-file output.

Configs are TOML with three sections: [experiment] (kind plus per-kind
knobs), [kernel] (preset name, explicit rate tables, or a power law), and
[simulation] (horizon, truncation, recording).  Rates are accepted as
numbers or fraction strings ("1/2"), so rational-exact setups survive the
round trip through text.  Unknown keys anywhere are rejected.

Outputs are flat files only: one summary.json per experiment plus per-
trajectory CSVs (capped by csv_limit), every one carrying the digest of the
canonicalized config.  Summaries contain no wall-clock data; progress and
timing go to stderr, so reruns with the same config and seed are
byte-identical no matter the parallelism degree.
"""

from __future__ import annotations

import hashlib
import json
import os
import sys
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

try:
    import tomllib
except ModuleNotFoundError:  # 3.10
    import tomli as tomllib

from . import __version__
from .analysis import (
    cesaro_fraction,
    contradiction_ledger,
    martingale_residual,
    recurrence_report,
    total_variation,
)
from .boundary import (
    BoundaryConfig,
    annihilation_probability,
    boost_check,
    simulate_boundary,
)
from .exceptions import (
    EventBudgetExceeded,
    NotAnInterface,
    ParseError,
    ValidationError,
)
from .generator import TruncationSpec, apply_generator, gfcd_closed_form
from .kernels import RateKernel, from_power_law, is_irreducible, moment, symmetrize
from .lattice import InterfaceConfig, f_cd, heaviside, interface_counts
from .simulate import (
    RecordSchedule,
    SimulationConfig,
    TrajectoryRecord,
    run,
)

KINDS = (
    "verify-generator",
    "simulate",
    "recurrence",
    "martingale",
    "boundary",
    "boost-sweep",
    "ledger",
)

OUTPUT_ROOT_ENV = "SWAPVOTER_OUT"

PRESETS = ("nn", "nn-swap", "mixed", "heavy-2.2", "heavy-4")


def preset_kernels(name: str) -> Tuple[RateKernel, RateKernel, Optional[int]]:
    """Named kernel pairs (q, p, truncation) used across the test suite."""
    half = Fraction(1, 2)
    quarter = Fraction(1, 4)
    if name == "nn":
        return RateKernel({1: half, -1: half}), RateKernel.empty(), None
    if name == "nn-swap":
        return RateKernel({1: half, -1: half}), RateKernel({1: quarter}), None
    if name == "mixed":
        return from_power_law(1.0, 4.0, 6), RateKernel({1: quarter}), 6
    if name == "heavy-2.2":
        return from_power_law(1.0, 2.2, 50), RateKernel.empty(), 50
    if name == "heavy-4":
        return from_power_law(1.0, 4.0, 50), RateKernel.empty(), 50
    raise ValidationError(f"unknown kernel preset {name!r} (choose from {PRESETS})")


@dataclass(frozen=True)
class ExperimentSpec:
    """One experiment: a kind, a simulation config, and per-kind knobs."""

    kind: str
    sim: SimulationConfig
    ensemble: int = 1
    parallel: int = 1
    out_dir: Optional[str] = None
    label: str = ""
    csv_limit: int = 64
    checkpoints: Tuple[float, ...] = (1.0, 2.0, 4.0)
    cases: int = 500
    kernel_pool: int = 20
    max_width: int = 30
    max_range: int = 8
    displacement: int = 1
    threshold: int = 2
    particles: Tuple[int, ...] = (-1,)
    max_gap: int = 2
    surviving: int = 1
    trials: int = 1000
    thresholds: Tuple[int, ...] = (2, 4, 8)
    windows: Tuple[str, ...] = ()
    hypothesis_notes: Tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown experiment kind {self.kind!r}")
        if self.ensemble < 1:
            raise ValidationError("ensemble must be >= 1")
        if self.parallel < 1:
            raise ValidationError("parallel must be >= 1")
        if self.csv_limit < 0:
            raise ValidationError("csv_limit must be >= 0")


def kernel_diagnostics(q: RateKernel, p: RateKernel) -> List[str]:
    """Model-hypothesis report: flip atom, irreducibility, second moment.

    These are advisories, not errors; exploring regimes that break them is
    allowed and the notes say which ones do.
    """
    notes = []
    if len(q) == 0:
        notes.append("warning: flip kernel has no atoms; the interface is frozen "
                     "under pure swapping starts")
    q_s = symmetrize(q)
    combined: Dict[int, object] = {}
    for d, r in q_s:
        combined[d] = combined.get(d, 0) + r
    for d, r in p:
        combined[abs(d)] = combined.get(abs(d), 0) + r
        combined[-abs(d)] = combined.get(-abs(d), 0) + r
    if combined:
        if is_irreducible(RateKernel(combined)):
            notes.append("combined symmetrized kernel is irreducible")
        else:
            notes.append("warning: combined symmetrized kernel is NOT irreducible "
                         "(support gcd > 1); tightness hypotheses fail")
    second = float(moment(q_s, 2)) + float(
        sum(r * d * d for d, r in p if d > 0)
    )
    notes.append(f"second moment of q_s plus swap second moment: {second:.6g} (finite)")
    return notes


# --- config parsing ---------------------------------------------------------

def _reject_unknown(table: dict, allowed: Iterable[str], where: str) -> None:
    extra = sorted(set(table) - set(allowed))
    if extra:
        raise ParseError(f"unknown key(s) {extra} in [{where}]")


def _parse_rate(value, where: str):
    if isinstance(value, bool):
        raise ParseError(f"rate in {where} must be a number or fraction string")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, float):
        return value
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as err:
            raise ParseError(f"bad rate {value!r} in {where}: {err}") from None
    raise ParseError(f"rate in {where} has unsupported type {type(value).__name__}")


def _parse_kernel_table(table: dict, where: str) -> RateKernel:
    _reject_unknown(table, ("rates", "power_law"), where)
    if ("rates" in table) == ("power_law" in table):
        raise ParseError(f"[{where}] needs exactly one of 'rates' or 'power_law'")
    if "rates" in table:
        rates = table["rates"]
        if not isinstance(rates, dict):
            raise ParseError(f"[{where}].rates must be a table of displacement = rate")
        out = {}
        for key, val in rates.items():
            try:
                disp = int(key)
            except ValueError:
                raise ParseError(f"bad displacement {key!r} in [{where}].rates") from None
            out[disp] = _parse_rate(val, f"[{where}].rates.{key}")
        try:
            return RateKernel(out)
        except ValueError as err:
            raise ValidationError(f"[{where}]: {err}") from None
    pl = table["power_law"]
    if not isinstance(pl, dict):
        raise ParseError(f"[{where}].power_law must be a table")
    _reject_unknown(pl, ("c", "beta", "max_range"), f"{where}.power_law")
    for need in ("c", "beta", "max_range"):
        if need not in pl:
            raise ParseError(f"[{where}].power_law is missing {need!r}")
    try:
        return from_power_law(float(pl["c"]), float(pl["beta"]), int(pl["max_range"]))
    except ValueError as err:
        raise ValidationError(f"[{where}].power_law: {err}") from None


def _parse_kernels(table: dict) -> Tuple[RateKernel, RateKernel, Optional[int]]:
    _reject_unknown(table, ("preset", "q", "p"), "kernel")
    if "preset" in table:
        if "q" in table or "p" in table:
            raise ParseError("[kernel] preset and explicit q/p are mutually exclusive")
        return preset_kernels(table["preset"])
    if "q" not in table:
        raise ParseError("[kernel] needs a preset or an explicit q table")
    q = _parse_kernel_table(table["q"], "kernel.q")
    p = _parse_kernel_table(table["p"], "kernel.p") if "p" in table else RateKernel.empty()
    for d in p.support:
        if d < 0:
            raise ValidationError(
                "[kernel.p]: swap rates are indexed by positive distance only"
            )
    return q, p, None


def _parse_initial(value) -> InterfaceConfig:
    if value == "heaviside":
        return heaviside()
    if isinstance(value, dict):
        _reject_unknown(value, ("offset", "window"), "simulation.initial")
        window = value.get("window", "")
        if not isinstance(window, str) or set(window) - {"0", "1"}:
            raise ParseError("simulation.initial.window must be a string of 0/1")
        try:
            return InterfaceConfig(int(value.get("offset", 0)), tuple(int(c) for c in window))
        except NotAnInterface as err:
            raise ValidationError(f"simulation.initial: {err}") from None
    raise ParseError("simulation.initial must be \"heaviside\" or {offset, window}")


def _parse_schedule(value) -> RecordSchedule:
    if value == "events":
        return RecordSchedule.every_event()
    if isinstance(value, dict) and set(value) == {"grid"}:
        try:
            return RecordSchedule.grid(float(value["grid"]))
        except ValueError as err:
            raise ValidationError(f"simulation.record: {err}") from None
    raise ParseError("simulation.record must be \"events\" or { grid = dt }")


_SIM_KEYS = ("t_max", "truncation", "seed", "nmax", "record", "event_budget",
             "initial", "width_stop", "track_displacement_integrals")
_EXP_KEYS = ("kind", "label", "ensemble", "parallel", "csv_limit", "checkpoints",
             "cases", "kernel_pool", "max_width", "max_range", "displacement",
             "threshold", "particles", "max_gap", "surviving", "trials",
             "thresholds", "windows")


def parse_config(path) -> ExperimentSpec:
    """Load and validate one experiment config; print kernel diagnostics."""
    raw = Path(path).read_bytes()
    try:
        doc = tomllib.loads(raw.decode("utf-8"))
    except (tomllib.TOMLDecodeError, UnicodeDecodeError) as err:
        raise ParseError(f"{path}: {err}") from None
    _reject_unknown(doc, ("experiment", "kernel", "simulation"), "top level")
    exp = doc.get("experiment", {})
    _reject_unknown(exp, _EXP_KEYS, "experiment")
    if "kind" not in exp:
        raise ParseError("[experiment] is missing 'kind'")

    kern = doc.get("kernel")
    if kern is None:
        raise ParseError("missing [kernel] section")
    q, p, preset_trunc = _parse_kernels(kern)

    sim_tab = doc.get("simulation", {})
    _reject_unknown(sim_tab, _SIM_KEYS, "simulation")
    trunc = sim_tab.get("truncation", preset_trunc)
    try:
        sim = SimulationConfig(
            q=q,
            p=p,
            t_max=float(sim_tab.get("t_max", 1.0)),
            initial=_parse_initial(sim_tab.get("initial", "heaviside")),
            truncation=None if trunc is None else int(trunc),
            seed=int(sim_tab.get("seed", 0)),
            schedule=_parse_schedule(sim_tab.get("record", "events")),
            nmax=int(sim_tab.get("nmax", 4)),
            event_budget=int(sim_tab.get("event_budget", 10_000_000)),
            width_stop=(int(sim_tab["width_stop"]) if "width_stop" in sim_tab else None),
            track_displacement_integrals=bool(
                sim_tab.get("track_displacement_integrals", False)
            ),
        )
    except ValueError as err:
        raise ValidationError(f"[simulation]: {err}") from None

    notes = tuple(kernel_diagnostics(q, p))
    for note in notes:
        print(f"[config] {note}", file=sys.stderr)

    try:
        spec = ExperimentSpec(
            kind=exp["kind"],
            sim=sim,
            ensemble=int(exp.get("ensemble", 1)),
            parallel=int(exp.get("parallel", 1)),
            label=str(exp.get("label", "")),
            csv_limit=int(exp.get("csv_limit", 64)),
            checkpoints=tuple(float(v) for v in exp.get("checkpoints", (1.0, 2.0, 4.0))),
            cases=int(exp.get("cases", 500)),
            kernel_pool=int(exp.get("kernel_pool", 20)),
            max_width=int(exp.get("max_width", 30)),
            max_range=int(exp.get("max_range", 8)),
            displacement=int(exp.get("displacement", 1)),
            threshold=int(exp.get("threshold", 2)),
            particles=tuple(int(v) for v in exp.get("particles", (-1,))),
            max_gap=int(exp.get("max_gap", 2)),
            surviving=int(exp.get("surviving", 1)),
            trials=int(exp.get("trials", 1000)),
            thresholds=tuple(int(v) for v in exp.get("thresholds", (2, 4, 8))),
            windows=tuple(str(v) for v in exp.get("windows", ())),
            hypothesis_notes=notes,
        )
    except (TypeError, ValueError) as err:
        raise ValidationError(f"[experiment]: {err}") from None
    return spec


# --- canonical parameter echo and digest ------------------------------------

def _kernel_params(k: RateKernel) -> Dict[str, str]:
    return {str(d): (str(r) if isinstance(r, Fraction) else repr(r)) for d, r in k}


def spec_parameters(spec: ExperimentSpec) -> dict:
    """JSON-safe canonical echo of everything that determines the outputs."""
    sim = spec.sim
    return {
        "kind": spec.kind,
        "label": spec.label,
        "ensemble": spec.ensemble,
        "csv_limit": spec.csv_limit,
        "sim": {
            "q": _kernel_params(sim.q),
            "p": _kernel_params(sim.p),
            "t_max": repr(sim.t_max),
            "truncation": sim.truncation,
            "seed": sim.seed,
            "nmax": sim.nmax,
            "schedule": [sim.schedule.kind, repr(sim.schedule.dt)],
            "event_budget": sim.event_budget,
            "width_stop": sim.width_stop,
            "initial": {
                "offset": sim.initial.offset,
                "window": sim.initial.window_string,
            },
            "track_displacement_integrals": sim.track_displacement_integrals,
        },
        "checkpoints": [repr(t) for t in spec.checkpoints],
        "cases": spec.cases,
        "kernel_pool": spec.kernel_pool,
        "max_width": spec.max_width,
        "max_range": spec.max_range,
        "displacement": spec.displacement,
        "threshold": spec.threshold,
        "particles": list(spec.particles),
        "max_gap": spec.max_gap,
        "surviving": spec.surviving,
        "trials": spec.trials,
        "thresholds": list(spec.thresholds),
        "windows": list(spec.windows),
    }


def config_digest(spec: ExperimentSpec) -> str:
    blob = json.dumps(spec_parameters(spec), sort_keys=True).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()[:16]


# --- serialization -----------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_trajectory_csv(path: Path, rec: TrajectoryRecord, digest: str) -> None:
    nmax = rec.config.nmax
    cols = ["t", "event_index", "f_cd", "width"]
    cols += [f"i{n}" for n in range(1, nmax + 1)]
    cols += ["class_key_hash", "integral_gfcd"]
    lines = [f"# config_digest={digest}", ",".join(cols)]
    keys = rec.class_keys
    for k in range(len(rec.ts)):
        if keys is None:
            key_hash = ""
        else:
            key_hash = hashlib.blake2b(
                keys[k].encode("ascii"), digest_size=8
            ).hexdigest()
        row = [_fmt(rec.ts[k]), str(rec.event_index[k]), str(rec.f_cd[k]),
               str(rec.width[k])]
        row += [str(c) for c in rec.counts[k]]
        row += [key_hash, _fmt(rec.integral_gfcd[k])]
        lines.append(",".join(row))
    path.write_text("\n".join(lines) + "\n", encoding="ascii")


def write_boundary_csv(path: Path, ts, states, digest: str) -> None:
    lines = [f"# config_digest={digest}", "t,event_index,particle_count,particles"]
    for k, (t, parts) in enumerate(zip(ts, states)):
        lines.append(
            ",".join([_fmt(t), str(k), str(len(parts)),
                      ";".join(str(c) for c in parts)])
        )
    path.write_text("\n".join(lines) + "\n", encoding="ascii")


def _write_summary(out: Path, summary: dict) -> None:
    out.joinpath("summary.json").write_text(
        json.dumps(summary, sort_keys=True, indent=2) + "\n", encoding="ascii"
    )


# --- trajectory farms --------------------------------------------------------

def _one_trajectory(cfg: SimulationConfig) -> Tuple[bool, TrajectoryRecord]:
    try:
        return False, run(cfg)
    except EventBudgetExceeded as err:
        return True, err.record


def _farm(
    configs: Sequence[SimulationConfig], parallel: int, progress: str
) -> List[Tuple[bool, TrajectoryRecord]]:
    """Run trajectories, optionally across processes; order is by index."""
    if parallel <= 1 or len(configs) <= 1:
        out = []
        for i, cfg in enumerate(configs):
            out.append(_one_trajectory(cfg))
            if (i + 1) % max(1, len(configs) // 10) == 0:
                print(f"[{progress}] {i + 1}/{len(configs)} trajectories",
                      file=sys.stderr)
        return out
    import multiprocessing as mp

    ctx = mp.get_context("fork" if sys.platform != "win32" else "spawn")
    chunk = max(1, len(configs) // (parallel * 8))
    with ctx.Pool(parallel) as pool:
        out = list(pool.imap(_one_trajectory, configs, chunksize=chunk))
    print(f"[{progress}] {len(configs)}/{len(configs)} trajectories (parallel)",
          file=sys.stderr)
    return out


def _ensemble_configs(spec: ExperimentSpec, **overrides) -> List[SimulationConfig]:
    base = replace(spec.sim, **overrides) if overrides else spec.sim
    return [replace(base, trajectory=i) for i in range(spec.ensemble)]


def _dump_records(
    out: Path, records: Sequence[TrajectoryRecord], digest: str, limit: int
) -> int:
    wrote = 0
    for i, rec in enumerate(records):
        if wrote >= limit:
            break
        write_trajectory_csv(out / f"trajectory-{i:05d}.csv", rec, digest)
        wrote += 1
    return wrote


# --- random sweep for the generator identity ---------------------------------

def random_kernel(rng, max_range: int, allow_swap: bool = True):
    """One random (q, p) pair with support radius <= max_range."""
    top = int(rng.integers(1, max_range + 1))
    q_table = {}
    for d in range(1, top + 1):
        if rng.random() < 0.7:
            q_table[d] = float(rng.random())
        if rng.random() < 0.7:
            q_table[-d] = float(rng.random())
    if not q_table:
        q_table[1] = 1.0
    p_table = {}
    if allow_swap:
        for d in range(1, top + 1):
            if rng.random() < 0.5:
                p_table[d] = float(rng.random())
    return RateKernel(q_table), RateKernel(p_table)


def random_interface(rng, max_width: int) -> InterfaceConfig:
    """Random interface state with window width <= max_width."""
    w = int(rng.integers(0, max_width + 1))
    offset = int(rng.integers(-20, 21))
    if w < 2:
        return InterfaceConfig(offset, ())
    bits = [1] + [int(rng.integers(0, 2)) for _ in range(w - 2)] + [0]
    return InterfaceConfig(offset, tuple(bits))


def generator_sweep(
    cases: int, kernel_pool: int, max_width: int, max_range: int, seed: int
) -> dict:
    """Randomized identity check of the two generator routes on f_cd."""
    import numpy as np

    rng = np.random.Generator(np.random.Philox(key=[seed, 0x67656E]))
    kernels = [random_kernel(rng, max_range) for _ in range(kernel_pool)]
    worst = 0.0
    checked = 0
    for _ in range(cases):
        x = random_interface(rng, max_width)
        for q, p in kernels:
            lhs = apply_generator(x, f_cd, q, p)
            rhs = gfcd_closed_form(x, q, p)
            resid = abs(lhs - rhs) / (1.0 + abs(rhs))
            worst = max(worst, resid)
            checked += 1
    return {
        "cases": cases,
        "kernels": kernel_pool,
        "evaluations": checked,
        "worst_residual": worst,
        "tolerance": 1e-10,
        "pass": worst <= 1e-10,
    }


# --- experiment runners -------------------------------------------------------

def _split_width_histograms(records) -> Tuple[Dict[int, float], Dict[int, float]]:
    """Width occupation split at each record's half-time (exact at segment
    granularity; the straddling segment is divided between the halves)."""
    first: Dict[int, float] = {}
    second: Dict[int, float] = {}
    for rec in records:
        half = rec.final_time / 2.0
        ts = rec.ts
        for k in range(len(ts)):
            t0 = ts[k]
            t1 = ts[k + 1] if k + 1 < len(ts) else rec.final_time
            if t1 <= t0:
                continue
            w = rec.width[k]
            lo = min(t1, half) - t0
            if lo > 0:
                first[w] = first.get(w, 0.0) + lo
            hi = t1 - max(t0, half)
            if hi > 0:
                second[w] = second.get(w, 0.0) + hi
    return first, second


def _run_verify_generator(spec: ExperimentSpec, out: Path, digest: str) -> dict:
    return generator_sweep(
        spec.cases, spec.kernel_pool, spec.max_width, spec.max_range, spec.sim.seed
    )


def _run_simulate(spec: ExperimentSpec, out: Path, digest: str) -> dict:
    results = _farm(_ensemble_configs(spec), spec.parallel, "simulate")
    records = [rec for _, rec in results]
    _dump_records(out, records, digest, spec.csv_limit)
    widths = sorted(rec.width[-1] if rec.width else 0 for rec in records)
    fcds = sorted(rec.f_cd[-1] if rec.f_cd else 0 for rec in records)
    mid = len(records) // 2
    return {
        "trajectories": len(records),
        "budget_exhausted": sum(1 for ex, _ in results if ex),
        "events_total": sum(rec.event_count for rec in records),
        "final_width_median": widths[mid],
        "final_width_max": widths[-1],
        "final_f_cd_median": fcds[mid],
    }


def _run_recurrence(spec: ExperimentSpec, out: Path, digest: str) -> dict:
    results = _farm(_ensemble_configs(spec), spec.parallel, "recurrence")
    records = [rec for _, rec in results]
    _dump_records(out, records, digest, spec.csv_limit)
    stats = recurrence_report(records)
    first, second = _split_width_histograms(records)
    ces = cesaro_fraction(records, spec.displacement, spec.threshold)
    return {
        "trajectories": len(records),
        "budget_exhausted": sum(1 for ex, _ in results if ex),
        "recurrence": {
            "total_time": stats.total_time,
            "class_count": stats.class_count,
            "truncated": stats.truncated,
            "flat_fraction": stats.flat_fraction,
            "returns": len(stats.return_times),
            "mean_return": stats.mean_return,
            "median_return": stats.median_return,
            "width_histogram_half_tv": total_variation(first, second),
        },
        "cesaro": [{
            "displacement": ces.displacement,
            "threshold": ces.threshold,
            "mean": ces.mean,
            "se": ces.se,
        }],
    }


def _run_martingale(spec: ExperimentSpec, out: Path, digest: str) -> dict:
    results = _farm(_ensemble_configs(spec), spec.parallel, "martingale")
    records = [rec for _, rec in results]
    _dump_records(out, records, digest, spec.csv_limit)
    report = martingale_residual(records, spec.checkpoints)
    return {
        "trajectories": len(records),
        "budget_exhausted": sum(1 for ex, _ in results if ex),
        "martingale": [
            {
                "t": c.t,
                "mean_residual": c.mean_residual,
                "se_residual": c.se_residual,
                "z": c.z,
                "ne_mean": c.ne_mean,
                "ne_se": c.ne_se,
            }
            for c in report.checkpoints
        ],
    }


def _run_boundary(spec: ExperimentSpec, out: Path, digest: str) -> dict:
    y0 = BoundaryConfig(spec.particles)
    sim = spec.sim
    trunc = None if sim.truncation is None else TruncationSpec(sim.truncation)
    counts = []
    for i in range(spec.ensemble):
        rec = simulate_boundary(
            y0, sim.q, sim.p, sim.t_max, trunc=trunc, seed=sim.seed, trajectory=i
        )
        if i < spec.csv_limit:
            write_boundary_csv(out / f"boundary-{i:05d}.csv", rec.ts, rec.states, digest)
        counts.append(len(rec.final_particles))
    summary: dict = {
        "paths": spec.ensemble,
        "initial_particles": list(y0.particles),
        "final_count_min": min(counts),
        "final_count_max": max(counts),
        "parity_ok": all(c % 2 == len(y0) % 2 for c in counts),
    }
    gap = y0.min_gap()
    if len(y0) == spec.surviving + 2 and gap is not None and gap <= spec.max_gap:
        est = annihilation_probability(
            y0, sim.q, sim.p, spec.max_gap, spec.surviving, sim.t_max,
            spec.trials, seed=sim.seed, trunc=trunc,
        )
        summary["annihilation"] = {
            "surviving": spec.surviving,
            "trials": est.trials,
            "estimate": est.estimate,
            "wilson_lower": est.lower,
            "wilson_upper": est.upper,
        }
    return summary


def _run_boost_sweep(spec: ExperimentSpec, out: Path, digest: str) -> dict:
    sim = spec.sim
    trunc = None if sim.truncation is None else TruncationSpec(sim.truncation)
    starts: List[InterfaceConfig] = []
    if spec.windows:
        for wstr in spec.windows:
            try:
                starts.append(InterfaceConfig(0, tuple(int(c) for c in wstr)))
            except NotAnInterface as err:
                raise ValidationError(f"window {wstr!r}: {err}") from None
    else:
        starts.append(sim.initial)
    rows = []
    for x in starts:
        i1 = interface_counts(x, 1)[0]
        for m in spec.thresholds:
            est = boost_check(
                x, sim.q, sim.p, spec.displacement, m, sim.t_max,
                spec.trials, seed=sim.seed, trunc=trunc,
            )
            rows.append({
                "window": x.window_string,
                "i1": i1,
                "displacement": spec.displacement,
                "threshold": m,
                "trials": est.trials,
                "estimate": est.estimate,
                "wilson_lower": est.lower,
                "wilson_upper": est.upper,
            })
    return {"boost": rows}


def _run_ledger(spec: ExperimentSpec, out: Path, digest: str) -> dict:
    configs = _ensemble_configs(spec, track_displacement_integrals=True)
    results = _farm(configs, spec.parallel, "ledger")
    records = [rec for _, rec in results]
    _dump_records(out, records, digest, spec.csv_limit)
    report = contradiction_ledger(records, spec.displacement, spec.threshold)
    return {
        "trajectories": len(records),
        "budget_exhausted": sum(1 for ex, _ in results if ex),
        "ledger": {
            "displacement": report.displacement,
            "threshold": report.threshold,
            "identities_ok": report.all_identities_ok,
            "bounds_ok": report.all_bounds_ok,
            "max_identity_residual": report.max_identity_residual,
            "mean_floor": sum(r.floor_value for r in report.rows) / len(report.rows),
            "mean_occupancy_above": sum(r.occupancy_above for r in report.rows)
            / len(report.rows),
        },
    }


_RUNNERS: Dict[str, Callable[[ExperimentSpec, Path, str], dict]] = {
    "verify-generator": _run_verify_generator,
    "simulate": _run_simulate,
    "recurrence": _run_recurrence,
    "martingale": _run_martingale,
    "boundary": _run_boundary,
    "boost-sweep": _run_boost_sweep,
    "ledger": _run_ledger,
}


def output_dir(spec: ExperimentSpec) -> Path:
    root = spec.out_dir or os.environ.get(OUTPUT_ROOT_ENV) or "out"
    name = spec.kind if not spec.label else f"{spec.kind}-{spec.label}"
    return Path(root) / name


def run_experiment(spec: ExperimentSpec) -> dict:
    """Execute one experiment; write summary.json and CSVs; return summary."""
    out = output_dir(spec)
    out.mkdir(parents=True, exist_ok=True)
    digest = config_digest(spec)
    print(f"[{spec.kind}] output: {out} digest: {digest}", file=sys.stderr)
    results = _RUNNERS[spec.kind](spec, out, digest)
    summary = {
        "kind": spec.kind,
        "label": spec.label,
        "config_digest": digest,
        "ensemble": spec.ensemble,
        "version": __version__,
        "parameters": spec_parameters(spec),
        "results": results,
    }
    _write_summary(out, summary)
    print(f"[{spec.kind}] done", file=sys.stderr)
    return summary
