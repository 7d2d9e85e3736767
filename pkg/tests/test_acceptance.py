"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line
(visible regardless of pytest capture) and enforcing its runtime budget."""

import time

import numpy as np
import pytest

from ehjam import (
    ChannelGains,
    FixedPower,
    OnThreshold,
    SweepConfig,
    capacity,
    capacity_tau_derivative,
    ne_grid_optimum,
    neutralization_feasible,
    nj_grid_value,
    p_threshold,
    sir_sweep,
    solve_ne,
    solve_nj,
    tau_profile_capacity,
    verify_saddle_point,
)
from ehjam.cli import run
from helpers import (
    GAMMA_MW,
    consistent_instances,
    feasible_instances,
    infeasible_instances,
    params_at_sir,
    random_gains,
    random_instances,
    reference_params,
)

_POOR_HARVEST_GAINS = ChannelGains(0.2, 0.2, 1.0)
_GOOD_HARVEST_GAINS = ChannelGains(1.0, 1.0, 0.2)


def _report(capsys, num, ok, elapsed, budget_s, detail):
    status = "PASS" if ok else "FAIL"
    line = (f"CRITERION {num:2d} [{status}] {detail}"
            f" ({elapsed:.2f}s / budget {budget_s:.0f}s)")
    with capsys.disabled():
        print(line)
    assert ok, line


@pytest.fixture(scope="module")
def mc_sweep():
    """Shared 10,000-draw Monte Carlo sweep at the reference parameters."""
    config = SweepConfig(-30.0, 10.0, 1.0, reference_params(),
                         mc_draws=10_000, rng_seed=7)
    start = time.perf_counter()
    records = sir_sweep(config)
    return records, time.perf_counter() - start


def test_criterion_01_infeasible_harvest_link_never_neutralizes(capsys):
    start = time.perf_counter()
    config = SweepConfig(-30.0, 10.0, 1.0, reference_params(),
                         fixed_gains=_POOR_HARVEST_GAINS)
    records = sir_sweep(config)
    elapsed = time.perf_counter() - start
    ok = (len(records) == 41
          and all(r.c_nj == 0.0 for r in records)
          and elapsed < 1.0)
    _report(capsys, 1, ok, elapsed, 1,
            f"c_nj == 0 exactly at all {len(records)} SIR points of the"
            " poor-harvesting-link sweep")


def test_criterion_02_neutralizing_profile_power_invariant_at_high_sir(capsys):
    start = time.perf_counter()
    gains = _GOOD_HARVEST_GAINS
    top = params_at_sir(10.0)  # top of the sweep: P = 100 mW
    doubled = reference_params(p_max=2.0 * top.p_max)
    res1 = solve_nj(gains, top)
    res2 = solve_nj(gains, doubled)
    dp = abs(res1.profile.legit.p - res2.profile.legit.p)
    dt = abs(res1.profile.legit.tau - res2.profile.legit.tau)
    elapsed = time.perf_counter() - start
    ok = dp <= 1e-9 and dt <= 1e-9 and elapsed < 1.0
    _report(capsys, 2, ok, elapsed, 1,
            f"doubling P at SIR +10 dB moves the neutralizing profile by"
            f" |dp|={dp:.2e}, |dtau|={dt:.2e}")


def test_criterion_03_full_power_solution_dominates(capsys):
    start = time.perf_counter()
    worst = np.inf
    for gains, params in random_instances(101, 1000):
        gap = solve_ne(gains, params).value - solve_nj(gains, params).value
        worst = min(worst, gap)
    elapsed = time.perf_counter() - start
    ok = worst >= -1e-9 and elapsed < 10.0
    _report(capsys, 3, ok, elapsed, 10,
            f"min(c_ne - c_nj) = {worst:.3e} over 1000 random sets")


def test_criterion_04_saddle_point_oracle(capsys):
    start = time.perf_counter()
    sets = consistent_instances(42, 100)
    worst_violation = -np.inf
    worst_tau_gap = 0.0
    tau_step = (1.0 - 1e-9) / 499
    all_ok = True
    for gains, params, ne in sets:
        ok, violation = verify_saddle_point(ne.profile, gains, params,
                                            grid_sizes=(500, 500, 500),
                                            tol=1e-8)
        worst_violation = max(worst_violation, violation)
        tau_grid, _ = ne_grid_optimum(gains, params, n=500)
        gap = abs(ne.profile.legit.tau - tau_grid)
        worst_tau_gap = max(worst_tau_gap, gap)
        all_ok = all_ok and ok and gap <= tau_step + 1e-12
    elapsed = time.perf_counter() - start
    ok = all_ok and elapsed < 120.0
    _report(capsys, 4, ok, elapsed, 120,
            f"100 sets: worst deviation gain {worst_violation:.2e} <= 1e-8,"
            f" worst |tau - grid argmax| {worst_tau_gap:.2e} <= one step"
            f" ({tau_step:.2e})")


def test_criterion_05_neutralizing_is_strictly_improvable(capsys):
    start = time.perf_counter()
    sets = consistent_instances(42, 100)  # the criterion-4 sets
    applicable = strict = 0
    for gains, params, _ in sets:
        nj = solve_nj(gains, params)
        if not nj.feasible:
            continue
        applicable += 1
        deviation = capacity(params.p_max, 0.0, 0.0, gains, params)
        if deviation > nj.value + 1e-9:
            strict += 1
    fraction = strict / applicable if applicable else 1.0
    elapsed = time.perf_counter() - start
    ok = fraction >= 0.95 and elapsed < 5.0
    _report(capsys, 5, ok, elapsed, 5,
            f"full-power-no-harvest deviation beats the neutralizing value in"
            f" {strict}/{applicable} feasible draws ({fraction:.1%});"
            f" {applicable - strict} boundary coincidences reported")


def test_criterion_06_harvesting_gain_largest_at_low_sir(capsys, mc_sweep):
    records, sweep_elapsed = mc_sweep
    start = time.perf_counter()
    f = np.array([r.f for r in records])
    f_low, f_high = f[0], f[-1]
    max_increase = float(np.max(np.diff(f)))
    elapsed = (time.perf_counter() - start) + sweep_elapsed
    ok = (0.85 <= f_low <= 1.0
          and max_increase <= 0.03
          and f_high < 0.3
          and elapsed < 120.0)
    _report(capsys, 6, ok, elapsed, 120,
            f"10k-draw sweep: F(-30dB)={f_low:.4f} in [0.85,1.0], max step"
            f" increase {max_increase:.2e} <= 0.03, F(+10dB)={f_high:.4f} < 0.3")


def test_criterion_07_gain_over_neutralizing_band(capsys, mc_sweep):
    records, sweep_elapsed = mc_sweep
    start = time.perf_counter()
    f_nj = np.array([r.f_nj for r in records])
    mean = float(f_nj.mean())
    low = float(f_nj.min())
    elapsed = (time.perf_counter() - start) + sweep_elapsed
    ok = 0.50 <= mean <= 0.90 and low >= 0.0 and elapsed < 120.0
    _report(capsys, 7, ok, elapsed, 120,
            f"10k-draw sweep: mean F_NJ={mean:.4f} in [0.50,0.90],"
            f" min F_NJ={low:.4f} >= 0")


def test_criterion_08_analytic_derivative_matches_finite_differences(capsys):
    start = time.perf_counter()
    rng = np.random.default_rng(88)
    h = 1e-6
    worst_rel = 0.0
    smallest = np.inf
    checked = {"fixed": 0, "threshold": 0}
    while min(checked.values()) < 100:
        gains = random_gains(rng)
        params = params_at_sir(float(rng.uniform(-30.0, 10.0)),
                               zeta=float(rng.uniform(0.2, 1.0)))
        tau = float(rng.uniform(0.05, 0.9))
        if checked["fixed"] < 100 and gains.h2 > 0:
            profiles = [("fixed", FixedPower(float(rng.uniform(0.1, 30.0)),
                                             float(rng.uniform(0.0, 15.0))))]
        else:
            profiles = []
        if checked["threshold"] < 100 and gains.gb2 > 0 and \
                neutralization_feasible(gains, params):
            profiles.append(("threshold", OnThreshold()))
        for kind, prof in profiles:
            ana = capacity_tau_derivative(prof, tau, gains, params)
            num = (tau_profile_capacity(prof, tau + h, gains, params)
                   - tau_profile_capacity(prof, tau - h, gains, params)) / (2 * h)
            rel = abs(ana - num) / max(abs(ana), 1e-12)
            worst_rel = max(worst_rel, rel)
            smallest = min(smallest, abs(ana))
            checked[kind] += 1
    elapsed = time.perf_counter() - start
    ok = worst_rel <= 1e-6 and elapsed < 1.0
    _report(capsys, 8, ok, elapsed, 1,
            f"worst relative error {worst_rel:.2e} <= 1e-6 over"
            f" {checked['fixed']}+{checked['threshold']} interior points"
            f" (smallest |derivative| {smallest:.2e})")


def test_criterion_09_jamming_power_monotonicity_suite(capsys):
    start = time.perf_counter()
    rng = np.random.default_rng(99)
    gammas = np.linspace(0.0, GAMMA_MW, 100)
    ok = True
    for gains, params in feasible_instances(99, 200):
        tau = float(rng.uniform(0.05, 0.95))
        pth = p_threshold(tau, gains, params)
        if not 0.0 < pth < np.inf:
            continue
        below = capacity(0.5 * pth, tau, gammas, gains, params)
        above = capacity(2.0 * pth, tau, gammas, gains, params)
        onthr = capacity(pth, tau, gammas, gains, params)
        ok = ok and bool(np.all(np.diff(below) >= -1e-12))
        ok = ok and bool(np.all(np.diff(above) <= 1e-12))
        ok = ok and bool(
            np.max(np.abs(onthr - onthr[0])) <= 1e-10 * max(onthr[0], 1e-300))
    for gains, params in infeasible_instances(98, 200):
        tau = float(rng.uniform(0.0, 0.95))
        p = float(rng.uniform(0.0, 2.0) * params.p_max)
        c = capacity(p, tau, gammas, gains, params)
        ok = ok and bool(np.all(np.diff(c) <= 1e-12))
    elapsed = time.perf_counter() - start
    ok = ok and elapsed < 5.0
    _report(capsys, 9, ok, elapsed, 5,
            "capacity monotone rising below the threshold, falling above,"
            " constant on it (200 feasible sets), and falling for all 200"
            " infeasible sets")


def test_criterion_10_full_power_objective_concave(capsys):
    start = time.perf_counter()
    rng = np.random.default_rng(110)
    taus = np.linspace(0.001, 0.999, 1000)
    worst = -np.inf
    for _ in range(200):
        gains = random_gains(rng)
        params = params_at_sir(float(rng.uniform(-30.0, 10.0)),
                               zeta=float(rng.uniform(0.2, 1.0)))
        c = capacity(params.p_max, taus, params.gamma_max, gains, params)
        second = c[2:] - 2.0 * c[1:-1] + c[:-2]
        worst = max(worst, float(np.max(second)))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-9 and elapsed < 5.0
    _report(capsys, 10, ok, elapsed, 5,
            f"largest second difference {worst:.2e} <= 1e-9 over 200 sets")


def test_criterion_11_byte_identical_reruns(capsys, tmp_path):
    start = time.perf_counter()
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    sweep_flags = ["sweep", "--sir-start-db", "-30", "--sir-stop-db", "10",
                   "--sir-step-db", "5", "--draws", "1000", "--seed", "7"]
    code1 = run(sweep_flags + ["--out", str(out1)])
    code2 = run(sweep_flags + ["--out", str(out2)])
    capsys.readouterr()  # drain the sweep status lines
    sweep_same = out1.read_bytes() == out2.read_bytes()

    ne_flags = ["ne", "--h2", "1", "--ga2", "1", "--gb2", "0.2", "--p-dbm", "0"]
    verify_flags = ["verify", "--sets", "4", "--seed", "5",
                    "--legit-grid", "50", "--jammer-grid", "50"]
    outputs = []
    for flags in (ne_flags, ne_flags, verify_flags, verify_flags):
        run(flags)
        outputs.append(capsys.readouterr().out)
    point_same = outputs[0] == outputs[1] and outputs[2] == outputs[3]

    # the parallelism hint must not change oracle results
    gains = ChannelGains(0.9, 1.1, 0.3)
    params = params_at_sir(-5.0)
    oracle_same = (
        ne_grid_optimum(gains, params, n=20_001, workers=1)
        == ne_grid_optimum(gains, params, n=20_001, workers=5)
        and nj_grid_value(gains, params, n=300, workers=1)
        == nj_grid_value(gains, params, n=300, workers=4))
    elapsed = time.perf_counter() - start
    ok = (code1 == 0 and code2 == 0 and sweep_same and point_same
          and oracle_same)
    _report(capsys, 11, ok, elapsed, 120,
            f"sweep bytes identical={sweep_same}, point/verify stdout"
            f" identical={point_same}, worker-count invariant={oracle_same}")
