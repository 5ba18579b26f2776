"""Command-line front end.

One subcommand per experiment kind.  Every run is configured by a TOML file
(--config) or a kernel preset (--preset); command-line flags override the
file.  Results land under --out (or $SWAPVOTER_OUT, or ./out) as
summary.json plus per-trajectory CSVs.  Progress goes to stderr; stdout
carries only the summary JSON, so pipelines can consume it directly.

Exit codes: 0 success, 1 bad config or parameters, 2 violated runtime
invariant, 3 filesystem trouble.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from typing import List, Optional

from .exceptions import (
    CouplingViolation,
    NonSymmetricKernel,
    NotAnInterface,
    NotSatisfiable,
    ParseError,
    PreconditionViolated,
    Unreachable,
    ValidationError,
)
from .harness import (
    ExperimentSpec,
    kernel_diagnostics,
    parse_config,
    preset_kernels,
    run_experiment,
)
from .simulate import SimulationConfig

_USAGE_ERRORS = (
    ParseError,
    ValidationError,
    ValueError,
    NotAnInterface,
    NotSatisfiable,
    Unreachable,
    PreconditionViolated,
    NonSymmetricKernel,
)


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="TOML experiment file")
    sub.add_argument("--preset",
                     help="kernel preset (nn, nn-swap, mixed, heavy-2.2, heavy-4); "
                          "an alternative to --config")
    sub.add_argument("--seed", type=int, help="base RNG seed")
    sub.add_argument("--ensemble", type=int, help="number of trajectories")
    sub.add_argument("--parallel", type=int, help="worker process count")
    sub.add_argument("--out", help="output directory root")
    sub.add_argument("--event-budget", type=int, help="per-trajectory event cap")
    sub.add_argument("--t-max", type=float, help="time horizon")
    sub.add_argument("--label", help="suffix for the output directory name")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swapvoter",
        description="Interface experiments for one-dimensional swapping voter "
                    "dynamics.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sp = subs.add_parser("verify-generator",
                         help="randomized cross-check of the two drift routes")
    _add_common(sp)
    sp.add_argument("--cases", type=int, help="random states per kernel pool")
    sp.add_argument("--kernel-pool", type=int, help="random kernels to draw")
    sp.add_argument("--max-width", type=int, help="widest random window")
    sp.add_argument("--max-range", type=int, help="widest random kernel support")

    sp = subs.add_parser("simulate", help="run trajectories and dump CSVs")
    _add_common(sp)
    sp.add_argument("--width-stop", type=int, help="stop once width exceeds this")
    sp.add_argument("--nmax", type=int, help="track pair counts up to this distance")

    sp = subs.add_parser("recurrence",
                         help="occupation, return times, width histograms")
    _add_common(sp)
    sp.add_argument("--displacement", type=int, help="pair distance for occupancy")
    sp.add_argument("--threshold", type=int, help="count threshold for occupancy")

    sp = subs.add_parser("martingale",
                         help="compensated drift residuals at checkpoints")
    _add_common(sp)
    sp.add_argument("--checkpoints", type=float, nargs="+",
                    help="times at which to test the residual")

    sp = subs.add_parser("boundary", help="simulate the disagreement points")
    _add_common(sp)
    sp.add_argument("--particles", type=int, nargs="+",
                    help="initial disagreement positions (odd count)")
    sp.add_argument("--max-gap", type=int, help="closest-pair precondition")
    sp.add_argument("--surviving", type=int, help="target particle count")
    sp.add_argument("--trials", type=int, help="Monte Carlo trials")

    sp = subs.add_parser("boost-sweep",
                         help="probability of few near pairs at a fixed time")
    _add_common(sp)
    sp.add_argument("--displacement", type=int, help="pair distance to count")
    sp.add_argument("--thresholds", type=int, nargs="+",
                    help="count thresholds to sweep")
    sp.add_argument("--windows", nargs="+",
                    help="window bit strings to start from")
    sp.add_argument("--trials", type=int, help="Monte Carlo trials")

    sp = subs.add_parser("ledger",
                         help="pathwise drift identity and floor-bound audit")
    _add_common(sp)
    sp.add_argument("--displacement", type=int, help="distance entering the floor")
    sp.add_argument("--threshold", type=int, help="count threshold for the floor")

    return parser


def _spec_from_args(args: argparse.Namespace) -> ExperimentSpec:
    if args.config:
        spec = parse_config(args.config)
        if spec.kind != args.command:
            raise ValidationError(
                f"config kind {spec.kind!r} does not match subcommand "
                f"{args.command!r}"
            )
    else:
        if not args.preset:
            raise ValidationError("either --config or --preset is required")
        q, p, trunc = preset_kernels(args.preset)
        for note in kernel_diagnostics(q, p):
            print(f"[config] {note}", file=sys.stderr)
        spec = ExperimentSpec(
            kind=args.command,
            sim=SimulationConfig(q=q, p=p, t_max=1.0, truncation=trunc),
        )

    sim_over = {}
    for attr, key in (("seed", "seed"), ("t_max", "t_max"),
                      ("event_budget", "event_budget")):
        val = getattr(args, attr, None)
        if val is not None:
            sim_over[key] = val
    for attr in ("width_stop", "nmax"):
        val = getattr(args, attr, None)
        if val is not None:
            sim_over[attr] = val
    if sim_over:
        spec = replace(spec, sim=replace(spec.sim, **sim_over))

    spec_over = {}
    for attr in ("ensemble", "parallel", "label", "cases", "kernel_pool",
                 "max_width", "max_range", "displacement", "threshold",
                 "max_gap", "surviving", "trials"):
        val = getattr(args, attr, None)
        if val is not None:
            spec_over[attr] = val
    if getattr(args, "out", None):
        spec_over["out_dir"] = args.out
    if getattr(args, "checkpoints", None):
        spec_over["checkpoints"] = tuple(args.checkpoints)
    if getattr(args, "particles", None):
        spec_over["particles"] = tuple(args.particles)
    if getattr(args, "thresholds", None):
        spec_over["thresholds"] = tuple(args.thresholds)
    if getattr(args, "windows", None):
        spec_over["windows"] = tuple(args.windows)
    if spec_over:
        spec = replace(spec, **spec_over)
    return spec


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        spec = _spec_from_args(args)
        summary = run_experiment(spec)
    except _USAGE_ERRORS as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except (CouplingViolation, AssertionError) as err:
        print(f"invariant violated: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return 3
    json.dump(summary, sys.stdout, sort_keys=True, indent=2)
    print()
    return 0


if __name__ == "__main__":
    sys.exit(main())
