"""End-to-end acceptance checks.

Each test pins its tolerances and its wall-clock budget.  Randomized parts
run on fixed Philox seeds, so every run checks the same cases; statistical
assertions use the stated sigma bands on those fixed draws.  The heavy
Monte Carlo tests stream trajectories and keep only scalar accumulators,
or process records one seed group at a time, to bound memory.
"""
import math
import statistics
import time
from collections import Counter
from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest

from swapvoter import (
    BoundaryConfig,
    RateKernel,
    RecordSchedule,
    SimulationConfig,
    TruncationSpec,
    apply_generator,
    boundary,
    boundary_image_rates,
    coupled_clock_rates,
    f_cd,
    from_power_law,
    generator_rates,
    gfcd_closed_form,
    interface_counts,
    preset_kernels,
    run,
    run_coupled,
    simulate_boundary,
    swap,
    symmetrize,
    tail_rates,
    thinned_counts,
    total_variation,
    width,
)
from swapvoter.analysis import recurrence_report
from swapvoter.cli import main
from swapvoter.harness import (
    ExperimentSpec,
    _split_width_histograms,
    generator_sweep,
    output_dir,
    random_interface,
    run_experiment,
)


def rational_kernel(rng, max_range: int, allow_swap: bool = True):
    """Random (q, p) with Fraction rates, support radius <= max_range."""
    top = int(rng.integers(1, max_range + 1))
    q_table = {}
    for d in range(1, top + 1):
        if rng.random() < 0.7:
            q_table[d] = Fraction(int(rng.integers(1, 9)), int(rng.integers(1, 17)))
        if rng.random() < 0.7:
            q_table[-d] = Fraction(int(rng.integers(1, 9)), int(rng.integers(1, 17)))
    if not q_table:
        q_table[1] = Fraction(1)
    p_table = {}
    if allow_swap:
        for d in range(1, top + 1):
            if rng.random() < 0.5:
                p_table[d] = Fraction(int(rng.integers(1, 9)), int(rng.integers(1, 17)))
    return RateKernel(q_table), RateKernel(p_table)


def test_generator_identity_sweep():
    """Direct generator application and the closed form agree on f_cd.

    500 random interface states (width <= 30) x 20 random kernels (support
    radius <= 8), relative residual <= 1e-10; plus 50 all-rational cases
    where the two routes must agree exactly.  Budget 60 s.
    """
    t0 = time.monotonic()
    out = generator_sweep(cases=500, kernel_pool=20, max_width=30, max_range=8,
                          seed=20240817)
    assert out["evaluations"] == 500 * 20
    assert out["worst_residual"] <= 1e-10
    assert out["pass"] is True

    rng = np.random.default_rng(11)
    for _ in range(50):
        x = random_interface(rng, 30)
        q, p = rational_kernel(rng, 8)
        lhs = apply_generator(x, f_cd, q, p)
        rhs = gfcd_closed_form(x, q, p)
        assert isinstance(lhs, Fraction) and lhs == rhs

    assert time.monotonic() - t0 < 60.0


def test_pair_count_identities():
    """Counting identities on 10^4 random cases each, zero failures.

    Ordered-pair counts at displacement n differ by exactly n; on each
    thinned sublattice they differ by exactly 1; the disagreeing-pair count
    is at most n + width; a swap moves f_cd by exactly +-n.  Budget 30 s.
    """
    t0 = time.monotonic()
    rng = np.random.default_rng(7)

    for _ in range(10_000):
        x = random_interface(rng, 30)
        n = int(rng.integers(1, 9))
        tot, up, down = interface_counts(x, n)
        assert up == down + n
        assert tot <= n + width(x)

    for _ in range(10_000):
        x = random_interface(rng, 30)
        n = int(rng.integers(1, 9))
        m = int(rng.integers(0, n))
        up, down = thinned_counts(x, n, m)
        assert up == down + 1

    checked = 0
    while checked < 10_000:
        x = random_interface(rng, 30)
        n = int(rng.integers(1, 9))
        i = int(rng.integers(x.offset - 8, x.rightmost_zero + 9))
        if x.value(i) == x.value(i + n):
            continue
        moved = f_cd(swap(x, i, i + n)) - f_cd(x)
        assert moved == (n if x.value(i) == 0 else -n)
        checked += 1

    assert time.monotonic() - t0 < 30.0


def test_walk_rate_moment_identity():
    """First moment of the dominating-walk rates, exactly, on 100 kernels.

    sum_n a(n) n equals sum_k 2 (q_s + p)(k) k(k+1)/2 in Fraction
    arithmetic.  Budget 5 s.
    """
    t0 = time.monotonic()
    rng = np.random.default_rng(23)
    for _ in range(100):
        q, p = rational_kernel(rng, 8)
        a = tail_rates(q, p)
        lhs = sum((a(n) * n for n in a.support), start=Fraction(0))
        q_s = symmetrize(q)
        top = max(q_s.max_range, p.max_range)
        rhs = sum(
            (2 * (q_s(k) + p(k)) * Fraction(k * (k + 1), 2)
             for k in range(1, top + 1)),
            start=Fraction(0),
        )
        assert lhs == rhs
    assert time.monotonic() - t0 < 5.0


CHECKPOINTS = (1.0, 2.0, 4.0)


def _checkpoint_moments(q, p, trunc, ensemble, seed):
    """Stream an ensemble; keep only per-checkpoint moment accumulators."""
    base = SimulationConfig(q=q, p=p, t_max=CHECKPOINTS[-1], seed=seed,
                            truncation=trunc, track_classes=False)
    acc = {t: [0.0, 0.0, 0.0, 0.0] for t in CHECKPOINTS}  # sr, srr, sn, snn
    for i in range(ensemble):
        rec = run(replace(base, trajectory=i))
        f0 = rec.f_cd[0]
        for t in CHECKPOINTS:
            integral = rec.integral_at(t)
            r = rec.fcd_at(t) - integral - f0
            ne = f0 + integral
            a = acc[t]
            a[0] += r
            a[1] += r * r
            a[2] += ne
            a[3] += ne * ne
    out = {}
    for t, (sr, srr, sn, snn) in acc.items():
        mean_r = sr / ensemble
        se_r = math.sqrt((srr - ensemble * mean_r**2) / (ensemble - 1) / ensemble)
        mean_n = sn / ensemble
        se_n = math.sqrt((snn - ensemble * mean_n**2) / (ensemble - 1) / ensemble)
        out[t] = (mean_r, se_r, mean_n, se_n)
    return out


def test_martingale_and_mean_growth():
    """f_cd minus its compensator centers on 0; mean f_cd stays nonnegative.

    Nearest-neighbour voter and the mixed preset, started from the
    reference step state, checkpoints t in {1, 2, 4}, 5 * 10^4 trajectories
    each: the mean martingale residual must sit within 3 standard errors of
    zero and the estimated mean of f_cd(t) must be >= -3 sigma.
    Budget 10 min.
    """
    t0 = time.monotonic()
    nn_q = RateKernel({1: Fraction(1, 2), -1: Fraction(1, 2)})
    mixed_q, mixed_p, mixed_trunc = preset_kernels("mixed")
    plans = [
        ("nn", nn_q, RateKernel.empty(), None),
        ("mixed", mixed_q, mixed_p, mixed_trunc),
    ]
    for label, q, p, trunc in plans:
        stats = _checkpoint_moments(q, p, trunc, ensemble=50_000, seed=41)
        for t, (mean_r, se_r, mean_n, se_n) in stats.items():
            # pure NN paths stay flat translates, so both sides vanish
            # identically there; only the mixed kernel has spread
            if label == "mixed":
                assert se_r > 0, (label, t)
            assert abs(mean_r) <= 3.0 * se_r, (label, t, mean_r, se_r)
            assert mean_n >= -3.0 * se_n, (label, t, mean_n, se_n)
    assert time.monotonic() - t0 < 600.0


def test_boundary_rate_consistency():
    """The two routes to the disagreement-point rates agree exactly, and
    simulated particle paths conserve count parity.

    200 random states with rational kernels for the exact comparison; 10^3
    paths to t = 10 under the mixed preset for parity.  Budget 2 min.
    """
    t0 = time.monotonic()
    rng = np.random.default_rng(43)
    for _ in range(200):
        x = random_interface(rng, 20)
        q, p = rational_kernel(rng, 6)
        assert boundary_image_rates(x, q, p) == generator_rates(boundary(x), q, p)

    q, p, trunc = preset_kernels("mixed")
    y0 = BoundaryConfig((-2, 0, 1))
    tspec = TruncationSpec(trunc)
    for i in range(1000):
        rec = simulate_boundary(y0, q, p, 10.0, trunc=tspec, seed=47, trajectory=i)
        assert all(len(s) % 2 == 1 for s in rec.states)

    assert time.monotonic() - t0 < 120.0


def test_coupling_domination():
    """The dominating walk never falls below the interface width, and its
    ring sizes follow the design rates.

    10^3 coupled runs to t = 20 under the mixed preset: no violation is
    raised, the recorded walk dominates the recorded width row by row,
    level hit times are ordered, and the pooled ring-size frequencies match
    clock(n)/sum(clock) within 3 sigma per size.  Budget 5 min.
    """
    t0 = time.monotonic()
    q, p, trunc = preset_kernels("mixed")
    clocks = coupled_clock_rates(q, p, TruncationSpec(trunc))
    total = sum(clocks.values())
    levels = (2, 4, 8)
    base = SimulationConfig(q=q, p=p, t_max=20.0, seed=31, truncation=trunc)

    pooled = Counter()
    for i in range(1000):
        rec = run_coupled(replace(base, trajectory=i), n_levels=levels)
        assert rec.clock_rates == clocks
        assert all(w <= r for w, r in zip(rec.widths, rec.walk))
        for lev in levels:
            assert rec.walk_level_hits[lev] <= rec.width_level_hits[lev]
        pooled.update(rec.jump_counts)

    n_jumps = sum(pooled.values())
    assert n_jumps > 10_000
    for n, rate in clocks.items():
        p_exp = rate / total
        expected = n_jumps * p_exp
        sigma = math.sqrt(n_jumps * p_exp * (1.0 - p_exp))
        assert abs(pooled[n] - expected) <= 3.0 * sigma, (n, pooled[n], expected)
    assert set(pooled) <= set(clocks)

    assert time.monotonic() - t0 < 300.0


def test_interface_tightness():
    """Returns to the flat class stay fast and the width occupation is
    stationary under the symmetric nearest-neighbour swapping kernel.

    T = 10^4, 16 trajectories x 5 seeds, processed one seed group at a
    time: per-seed mean return times finite with relative spread
    (max - min)/mean < 20%; pooled first-half vs second-half width
    occupation within total variation 0.1.  Budget 15 min.
    """
    t0 = time.monotonic()
    q, p, _ = preset_kernels("nn-swap")
    seed_means = []
    first_total: dict = {}
    second_total: dict = {}
    for seed in range(5):
        records = [
            run(SimulationConfig(q=q, p=p, t_max=10_000.0, seed=seed, trajectory=i))
            for i in range(16)
        ]
        stats = recurrence_report(records)
        assert stats.mean_return is not None and math.isfinite(stats.mean_return)
        assert len(stats.return_times) > 100
        seed_means.append(stats.mean_return)
        first, second = _split_width_histograms(records)
        for w, mass in first.items():
            first_total[w] = first_total.get(w, 0.0) + mass
        for w, mass in second.items():
            second_total[w] = second_total.get(w, 0.0) + mass
        del records

    spread = (max(seed_means) - min(seed_means)) / statistics.mean(seed_means)
    assert spread < 0.20, seed_means
    assert total_variation(first_total, second_total) < 0.10

    assert time.monotonic() - t0 < 900.0


@pytest.mark.xfail(strict=False,
                   reason="directional contrast only; no sharp constant is "
                          "pinned for the final-width ratio")
def test_heavy_tail_contrast():
    """Slow-decay flip rates spread the interface much faster.

    Truncation 50, T = 10^3, 9 trajectories per kernel on shared seeds:
    the median final width under decay exponent 2.2 should exceed the one
    under exponent 4 by a factor >= 3.  Exploratory, a miss flags
    investigation rather than failure.  Budget 20 min.
    """
    t0 = time.monotonic()
    medians = {}
    for beta in (2.2, 4.0):
        q = from_power_law(1.0, beta, 50)
        widths = []
        for i in range(9):
            cfg = SimulationConfig(
                q=q, p=RateKernel.empty(), t_max=1000.0, truncation=50,
                seed=77, trajectory=i, schedule=RecordSchedule.grid(50.0),
                track_classes=False,
            )
            widths.append(run(cfg).width[-1])
        medians[beta] = statistics.median(widths)
    assert time.monotonic() - t0 < 1200.0
    assert medians[2.2] >= 3 * medians[4.0], medians


def test_deterministic_reruns(tmp_path):
    """Identical config and seed give byte-identical outputs, serial or not.

    The same experiment is run through the library at parallel=1 and
    through the command line at --parallel 3 and --parallel 1; every CSV
    and the summary must match byte for byte across all three runs.
    """
    q, p, _ = preset_kernels("nn-swap")
    spec = ExperimentSpec(
        kind="simulate",
        sim=SimulationConfig(q=q, p=p, t_max=50.0, seed=13),
        ensemble=6,
        out_dir=str(tmp_path / "a"),
    )
    run_experiment(spec)
    snapshots = [{f.name: f.read_bytes() for f in sorted(output_dir(spec).iterdir())}]

    for sub, workers in (("b", "3"), ("c", "1")):
        code = main([
            "simulate", "--preset", "nn-swap", "--t-max", "50.0",
            "--seed", "13", "--ensemble", "6", "--parallel", workers,
            "--out", str(tmp_path / sub),
        ])
        assert code == 0
        got = tmp_path / sub / "simulate"
        snapshots.append({f.name: f.read_bytes() for f in sorted(got.iterdir())})

    assert snapshots[0] == snapshots[1] == snapshots[2]
    assert "summary.json" in snapshots[0]
    assert sum(1 for name in snapshots[0] if name.endswith(".csv")) == 6
