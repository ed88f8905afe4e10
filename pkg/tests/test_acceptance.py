"""Acceptance suite: one criterion per test, one PASS/FAIL line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the lines as they
print.  The trend criteria (5-7) share one batch of desk-scale runs:
arithmetic K=10, geometric delay p=0.01, alpha=1, window 1000, T=50,000,
20 seeds per policy.
"""

import math
import time

import numpy as np
import pytest

from duelsim import (
    DelayCorrectedEstimator,
    DuelingEnvironment,
    ExperimentConfig,
    RucbDelay,
    arithmetic_matrix,
    c_delta,
    deterministic,
    geometric,
    mrr_expected_bound,
    n_schedule,
    rucb_delay_expected_bound,
    run_many,
)
from duelsim.cli import main
from reference_rucb import classical_rucb_actions
from test_bounds import oracle_mrr_expected, oracle_rucb_expected

DESK = dict(
    dataset="arithmetic",
    delay="geometric:0.01",
    horizon=50_000,
    runs=20,
    base_seed=1,
    alpha=1.0,
    window=1000,
    trace_stride=100,
)
TREND_POLICIES = ("rucb-delay", "rucb-baseline", "mrr-delay", "rrdb-delay")


def _report(num: int, description: str, ok: bool) -> None:
    print(f"{'PASS' if ok else 'FAIL'} criterion {num}: {description}")
    assert ok, f"criterion {num}: {description}"


@pytest.fixture(scope="module")
def desk_runs():
    results, timings = {}, {}
    for name in TREND_POLICIES:
        config = ExperimentConfig(policy=name, **DESK)
        start = time.perf_counter()
        results[name] = run_many(config)
        timings[name] = time.perf_counter() - start
    return results, timings


def _quarter_increments(mean: np.ndarray) -> tuple[float, float]:
    q = len(mean) // 4
    first = float(mean[q - 1])
    last = float(mean[-1] - mean[3 * q - 1])
    return first, last


def test_criterion_1_estimator_identity():
    k, m, p, steps = 5, 50, 0.1, 1_000_000
    dist = geometric(p)
    est = DelayCorrectedEstimator(k, m, dist.tau_table(m))
    rng = np.random.default_rng(2024)
    us = rng.integers(k, size=steps)
    vs = rng.integers(k, size=steps)
    xs = rng.random(steps) < 0.5
    ds = rng.geometric(p, size=steps)
    start = time.perf_counter()
    pending: dict[int, list] = {}
    worst = 0.0
    for t in range(1, steps + 1):
        for event in pending.pop(t, ()):
            est.ingest_conversion(*event)
        u = int(us[t - 1])
        v = int(vs[t - 1])
        _, n_tilde, s_ij, s_ji = est.pair_stats(u, v, t)
        gap = abs(s_ij + s_ji - n_tilde) / max(1.0, n_tilde)
        if gap > worst:
            worst = gap
        est.record_play(u, v, t)
        if xs[t - 1]:
            # all conversions are delivered; the estimator discards late ones
            pending.setdefault(t + int(ds[t - 1]), []).append((t, u, v))
        if t % 100_000 == 0:
            _, nt_mat, s_mat = est.matrices(t)
            full_gap = np.abs(s_mat + s_mat.T - nt_mat) / np.maximum(1.0, nt_mat)
            worst = max(worst, float(full_gap.max()))
    elapsed = time.perf_counter() - start
    _report(
        1,
        f"S_ij + S_ji = Ntilde_ij over 1e6 steps, worst relative gap "
        f"{worst:.2e} (tolerance 1e-9), runtime {elapsed:.1f}s < 30s",
        worst <= 1e-9 and elapsed < 30.0,
    )


def test_criterion_2_estimator_unbiased():
    reps, plays, mu_ij, p, m = 20_000, 200, 0.7, 0.1, 100
    dist = geometric(p)
    table = dist.tau_table(m)
    rng = np.random.default_rng(7)
    start = time.perf_counter()
    estimates = np.empty(reps)
    for r in range(reps):
        est = DelayCorrectedEstimator(2, m, table)
        xs = rng.random(plays)
        ds = rng.geometric(p, size=plays)
        pending: dict[int, list] = {}
        for t in range(1, plays + 2):
            for event in pending.pop(t, ()):
                est.ingest_conversion(*event)
            if t <= plays:
                u, v = (0, 1) if t % 2 == 1 else (1, 0)
                win_prob = mu_ij if u == 0 else 1.0 - mu_ij
                est.record_play(u, v, t)
                if xs[t - 1] < win_prob:
                    d = int(ds[t - 1])
                    if d <= m:
                        pending.setdefault(t + d, []).append((t, u, v))
        estimates[r] = est.mu_hat(0, 1, plays + 1)
    elapsed = time.perf_counter() - start
    mean = float(estimates.mean())
    se = float(estimates.std(ddof=1) / math.sqrt(reps))
    _report(
        2,
        f"mean mu_hat {mean:.5f} within 3 SE ({3 * se:.5f}) of 0.7 over "
        f"{reps} replications, runtime {elapsed:.1f}s < 60s",
        abs(mean - mu_ij) <= 3 * se and elapsed < 60.0,
    )


def test_criterion_3_no_delay_reduction():
    matrix = arithmetic_matrix(5)
    horizon, seed = 5000, 20240
    unit = deterministic(1)
    env_seq, pol_seq = np.random.SeedSequence(seed).spawn(2)
    env = DuelingEnvironment(matrix, unit, np.random.default_rng(env_seq))
    policy = RucbDelay(
        5,
        alpha=1.0,
        window=100,
        tau_table=unit.tau_table(100),
        rng=np.random.default_rng(pol_seq),
    )
    actions = []
    for t in range(1, horizon + 1):
        policy.observe(t, env.observe_new(t))
        action = policy.select(t)
        actions.append((action.u, action.v))
        env.step(action.u, action.v)
    reference = classical_rucb_actions(matrix, horizon, seed)
    matching = sum(1 for a, b in zip(actions, reference) if a == b)
    _report(
        3,
        f"unit-delay action sequence identical to the classical reference "
        f"({matching}/{horizon} steps match)",
        actions == reference,
    )


def test_criterion_4_schedule_pins():
    # oracle: single-expression evaluation of the round-size closed form
    g = 0.5
    ed = 100.0
    L = math.log(200_000 * g * g)
    root = math.sqrt(L / 2) + math.sqrt(
        L / 2 + (4 / 3) * g * L + 2 * g * math.sqrt(2 * ed * L) + 2 * g * ed
    )
    schedule_oracle = math.ceil(root * root / (g * g) - 1e-9)
    # oracle: single-expression evaluation of the confidence threshold
    a = 1.0
    cd_oracle = ((4 * a - 1) * (1000 + 1) * 6 * (6 - 1) / ((2 * a - 1) * 0.1)) ** (
        1 / (2 * a - 1)
    )
    got_schedule = n_schedule(1, 200_000, 100.0)
    got_cd = c_delta(1.0, 1000, 6, 0.1)
    _report(
        4,
        f"n_schedule(1, 2e5, 100) = {got_schedule} == oracle {schedule_oracle} == 893; "
        f"c_delta(1, 1000, 6, 0.1) = {got_cd} == oracle {cd_oracle} == 900900",
        schedule_oracle == 893
        and got_schedule == schedule_oracle
        and cd_oracle == 900900.0
        and got_cd == cd_oracle,
    )


def test_criterion_5_winner_never_eliminated(desk_runs):
    results, _ = desk_runs
    winner = arithmetic_matrix(10).winner
    runs = results["mrr-delay"].runs
    safe = sum(1 for tr in runs if tr.active is not None and winner in tr.active)
    _report(
        5,
        f"round-robin elimination kept the true winner active in {safe}/20 runs "
        f"(needs >= 19)",
        safe >= 19,
    )


def test_criterion_6_delay_aware_vs_baseline(desk_runs):
    results, timings = desk_runs
    aware = results["rucb-delay"].mean
    naive = results["rucb-baseline"].mean
    aware_first, aware_last = _quarter_increments(aware)
    naive_first, naive_last = _quarter_increments(naive)
    cond_a = aware[-1] < 0.5 * naive[-1]
    cond_b = aware_last < 0.5 * aware_first
    cond_c = naive_last >= 0.5 * naive_first
    runtime = timings["rucb-delay"] + timings["rucb-baseline"] + timings["mrr-delay"]
    _report(
        6,
        f"(a) final regret {aware[-1]:.0f} < half of baseline {naive[-1]:.0f}; "
        f"(b) delay-aware last/first quarter {aware_last:.0f}/{aware_first:.0f} sublinear; "
        f"(c) baseline last/first quarter {naive_last:.0f}/{naive_first:.0f} "
        f"non-convergent; runtime {runtime:.0f}s < 300s",
        cond_a and cond_b and cond_c and runtime < 300.0,
    )


def test_criterion_7_policy_ordering(desk_runs):
    results, _ = desk_runs
    aware = float(results["rucb-delay"].mean[-1])
    mrr = float(results["mrr-delay"].mean[-1])
    rr = float(results["rrdb-delay"].mean[-1])
    recorded = "RR-DB < MRR" if rr < mrr else "MRR <= RR-DB"
    print(
        f"recorded (not gated): rrdb-delay final {rr:.0f} vs mrr-delay final "
        f"{mrr:.0f} -> {recorded}"
    )
    _report(
        7,
        f"rucb-delay final regret {aware:.0f} below mrr-delay {mrr:.0f} "
        f"within a 10% slack band",
        aware < 1.1 * mrr,
    )


def test_criterion_8_bound_calculators_match_oracles():
    from duelsim import BoundInputs

    rng = np.random.default_rng(88)
    worst = 0.0
    for _ in range(100):
        k = int(rng.integers(2, 8))
        gaps = tuple(float(x) for x in rng.uniform(0.01, 0.5, size=k - 1))
        alpha = float(rng.uniform(1.01, 3.0))
        m = int(rng.integers(1, 2000))
        tau = float(rng.uniform(0.05, 1.0))
        t = int(rng.integers(10, 10**7))
        ed = float(rng.uniform(0.0, 300.0))
        inputs = BoundInputs(
            k=k, t_horizon=t, gaps=gaps, alpha=alpha, m_window=m, tau_1=tau,
            mean_delay=ed,
        )
        got_r = rucb_delay_expected_bound(inputs)
        want_r = oracle_rucb_expected(k, t, gaps, alpha, m, tau)
        got_m = mrr_expected_bound(inputs)
        want_m = oracle_mrr_expected(k, t, gaps, ed)
        worst = max(
            worst,
            abs(got_r - want_r) / abs(want_r),
            abs(got_m - want_m) / abs(want_m),
        )
    _report(
        8,
        f"expected-regret calculators match independent oracles on 100 random "
        f"tuples, worst relative error {worst:.2e} (tolerance 1e-9)",
        worst <= 1e-9,
    )


def test_criterion_9_cli_determinism(tmp_path):
    args = [
        "run", "--dataset", "arithmetic", "--policy", "rucb-delay",
        "--delay", "geometric:0.01", "--T", "2000", "--runs", "3", "--seed", "11",
        "--window", "200", "--stride", "100",
    ]
    code_a = main(args + ["--out", str(tmp_path / "a")])
    code_b = main(args + ["--out", str(tmp_path / "b")])
    same_summary = (tmp_path / "a" / "summary.csv").read_bytes() == (
        tmp_path / "b" / "summary.csv"
    ).read_bytes()
    same_runs = (tmp_path / "a" / "runs.csv").read_bytes() == (
        tmp_path / "b" / "runs.csv"
    ).read_bytes()
    _report(
        9,
        "repeated identical run invocations produce byte-identical summary.csv",
        code_a == 0 and code_b == 0 and same_summary and same_runs,
    )
