"""Seeded channel sampling, SIR sweeps with Monte Carlo averaging, and the
machine-readable CSV the sweeps emit.

Reproducibility: channel draw `index` under `seed` is a pure function of
(seed, index) backed by a counter-based generator, so sweeps are byte-stable
across runs and indifferent to evaluation order or chunking. Averages use
compensated summation (math.fsum) for the same reason.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from numpy.random import Generator, Philox
from scipy.special import ndtri

from .model import (
    TAU_LIMIT,
    ChannelGains,
    SystemParams,
    capacity,
    db_to_linear,
    linear_to_db,
)
from .solvers import (
    BRACKET_HI,
    BRACKET_LO,
    FixedPower,
    _profile_coefficients,
    _tau_derivative,
    solve_ne,
    solve_nj,
)

__all__ = [
    "SweepConfig",
    "SweepRecord",
    "metric_f",
    "metric_fnj",
    "sample_channels",
    "sir_points",
    "sir_sweep",
    "write_csv",
]

#: Tolerated float noise below exact dominance before a ratio is a violation.
DOMINANCE_TOL = 1e-9

_CSV_COLUMNS = (
    "sir_db",
    "c_ne",
    "c_nj",
    "c_no_eh",
    "f",
    "f_nj",
    "nj_feasible_fraction",
    "tau_ne_mean",
    "f_ratio_mean",
    "f_nj_ratio_mean",
)

# Fixed bisection depth: halves the (BRACKET_LO, BRACKET_HI) interval down to
# under ROOT_TOL, matching the scalar solver's trajectory exactly.
_BISECT_ITERS = 44


def _gain_block(seed: int, start: int, count: int) -> np.ndarray:
    """(count, 3) squared standard-normal gains for draws start..start+count-1.

    One 4-word counter block per draw (3 words used), so the i-th row only
    depends on (seed, start + i).
    """
    bit_gen = Philox(key=seed)
    if start:
        bit_gen.advance(start)
    raw = Generator(bit_gen).integers(0, 2**64, size=(count, 4), dtype=np.uint64)
    u = ((raw[:, :3] >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53
    return ndtri(u) ** 2


def sample_channels(seed: int, index: int) -> ChannelGains:
    """Channel gains for one fading cycle: squares of three independent
    standard-normal coefficients, deterministic in (seed, index)."""
    if seed < 0:
        raise ValueError("seed must be >= 0")
    if index < 0:
        raise ValueError("index must be >= 0")
    h2, ga2, gb2 = _gain_block(seed, index, 1)[0]
    return ChannelGains(float(h2), float(ga2), float(gb2))


def _relative_gain(c_ref, c_other, other_name: str):
    ref = np.asarray(c_ref, dtype=float)
    other = np.asarray(c_other, dtype=float)
    if np.any(ref < 0.0) or np.any(other < 0.0):
        raise ValueError("capacities must be >= 0")
    if np.any((ref == 0.0) & (other > 0.0)):
        raise ValueError(f"{other_name} > 0 with zero reference capacity")
    with np.errstate(invalid="ignore", divide="ignore"):
        r = (ref - other) / ref
    r = np.where(ref == 0.0, 0.0, r)
    if np.any(r < -DOMINANCE_TOL):
        raise ValueError(f"{other_name} exceeds the reference capacity")
    out = np.maximum(r, 0.0)
    return float(out) if np.ndim(out) == 0 else out


def metric_fnj(c_ne, c_nj):
    """Relative gain of the full-power solution over the neutralizing one:
    (c_ne - c_nj)/c_ne. 1 when c_nj == 0, 0 on a zero reference."""
    return _relative_gain(c_ne, c_nj, "c_nj")


def metric_f(c_ne, c_no_eh):
    """Relative gain of harvesting over the no-EH baseline:
    (c_ne - c_no_eh)/c_ne. 0 when the optimal EH fraction is 0."""
    return _relative_gain(c_ne, c_no_eh, "c_no_eh")


@dataclass(frozen=True)
class SweepConfig:
    """SIR sweep description, SIR in dB.

    The jamming budget gamma_max is held fixed; the transmit budget at each
    point is P = gamma_max * 10**(sir_db/10). params.p_max is ignored (it is
    re-derived per point). fixed_gains switches from Monte Carlo averaging to
    a single deterministic channel.
    """

    sir_start_db: float
    sir_stop_db: float
    sir_step_db: float
    params: SystemParams
    fixed_gains: ChannelGains | None = None
    mc_draws: int = 10_000
    rng_seed: int = 0

    def __post_init__(self):
        if not (math.isfinite(self.sir_start_db) and math.isfinite(self.sir_stop_db)):
            raise ValueError("SIR range must be finite")
        if not self.sir_step_db > 0.0:
            raise ValueError("sir_step_db must be positive")
        if self.sir_stop_db < self.sir_start_db:
            raise ValueError("sir_stop_db must be >= sir_start_db")
        if self.mc_draws < 1:
            raise ValueError("mc_draws must be >= 1")
        if self.rng_seed < 0:
            raise ValueError("rng_seed must be >= 0")
        if not self.params.gamma_max > 0.0:
            raise ValueError("sweep needs gamma_max > 0 to derive P from SIR")


@dataclass(frozen=True)
class SweepRecord:
    """One SIR point. Capacities are Monte Carlo means in MC mode; f and f_nj
    are ratios of those means, while *_ratio_mean average the per-draw ratios."""

    sir_db: float
    c_ne: float
    c_nj: float
    c_no_eh: float
    f: float
    f_nj: float
    nj_feasible_fraction: float
    tau_ne_mean: float
    f_ratio_mean: float
    f_nj_ratio_mean: float


def sir_points(config: SweepConfig) -> list[float]:
    """Inclusive dB grid start, start+step, ... up to stop (1e-9 slack)."""
    n = int(math.floor((config.sir_stop_db - config.sir_start_db)
                       / config.sir_step_db + 1e-9)) + 1
    return [config.sir_start_db + i * config.sir_step_db for i in range(n)]


def _bisect_tau(alpha: np.ndarray, beta: np.ndarray) -> np.ndarray:
    """Vectorized bisection for the derivative root; assumes the derivative is
    positive at BRACKET_LO and negative at BRACKET_HI for every element."""
    lo = np.full(alpha.shape, BRACKET_LO)
    hi = np.full(alpha.shape, BRACKET_HI)
    for _ in range(_BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        pos = _tau_derivative(mid, alpha, beta) > 0.0
        lo = np.where(pos, mid, lo)
        hi = np.where(pos, hi, mid)
    return 0.5 * (lo + hi)


def _optimal_tau(alpha: np.ndarray, beta: np.ndarray) -> np.ndarray:
    """Maximizer of the canonical concave profile per element (0 when the
    derivative starts nonpositive)."""
    tau = np.zeros_like(alpha)
    rising = _tau_derivative(BRACKET_LO, alpha, beta) > 0.0
    if np.any(rising):
        tau[rising] = _bisect_tau(alpha[rising], beta[rising])
    return tau


def _solve_ne_batch(gains: ChannelGains, params: SystemParams):
    """(tau, capacity) of the full-power operating point per channel draw."""
    alpha, beta = _profile_coefficients(
        FixedPower(params.p_max, params.gamma_max), gains, params)
    tau = _optimal_tau(np.asarray(alpha, float), np.asarray(beta, float))
    return tau, capacity(params.p_max, tau, params.gamma_max, gains, params)


def _solve_nj_batch(gains: ChannelGains, params: SystemParams):
    """(capacity, feasible) of the neutralizing optimum per channel draw."""
    h2 = np.asarray(gains.h2, float)
    ga2 = np.asarray(gains.ga2, float)
    gb2 = np.asarray(gains.gb2, float)
    p_max = params.p_max
    feasible = ga2 * params.n_b > gb2 * params.n_a
    gb2_safe = np.where(gb2 > 0.0, gb2, 1.0)
    k = np.where(gb2 > 0.0,
                 (ga2 * params.n_b / gb2_safe - params.n_a) * params.zeta,
                 np.inf)
    k_pos = np.where(k > 0.0, k, 1.0)
    with np.errstate(divide="ignore"):
        p_inv = np.where(k > 0.0, p_max / k_pos, np.inf)
    # threshold-riding profile optimum (only meaningful where feasible, gb2>0)
    tau_hat = _optimal_tau(np.zeros_like(h2),
                           params.zeta * ga2 * h2 / gb2_safe)
    # full-power silent-jammer optimum
    alpha0, beta0 = _profile_coefficients(FixedPower(p_max, 0.0), gains, params)
    tau_tilde = _optimal_tau(np.asarray(alpha0, float), np.asarray(beta0, float))

    case_a = p_inv > 1.0
    k_finite = np.isfinite(k)
    # slope used in products: zero wherever it is not a positive finite number
    # (those entries are masked out or routed through the p_max branch below)
    k_safe = np.where(k_finite & (k > 0.0), k, 0.0)
    p_a = np.where(case_a, tau_hat * k_safe, 0.0)
    v_a = capacity(p_a, np.where(case_a, tau_hat, 0.0), 0.0, gains, params)

    tau1 = np.minimum(tau_hat, p_inv)
    p1 = np.minimum(np.where(k_finite, tau1 * k_safe, p_max), p_max)
    tau2 = np.minimum(np.maximum(tau_tilde, p_inv), TAU_LIMIT)
    v1 = capacity(p1, tau1, 0.0, gains, params)
    v2 = capacity(p_max, tau2, 0.0, gains, params)
    v_b = np.maximum(v1, v2)

    value = np.where(feasible, np.where(case_a, v_a, v_b), 0.0)
    return value, feasible


def _mean(values) -> float:
    arr = np.asarray(values, dtype=float)
    return math.fsum(arr) / arr.size


def _make_record(sir_db, c_ne, c_nj, c_no_eh, nj_frac, tau_ne) -> SweepRecord:
    m_ne, m_nj, m_0 = _mean(c_ne), _mean(c_nj), _mean(c_no_eh)
    return SweepRecord(
        sir_db=sir_db,
        c_ne=m_ne,
        c_nj=m_nj,
        c_no_eh=m_0,
        f=metric_f(m_ne, m_0),
        f_nj=metric_fnj(m_ne, m_nj),
        nj_feasible_fraction=nj_frac,
        tau_ne_mean=_mean(tau_ne),
        f_ratio_mean=_mean(metric_f(c_ne, c_no_eh)),
        f_nj_ratio_mean=_mean(metric_fnj(c_ne, c_nj)),
    )


def sir_sweep(config: SweepConfig) -> list[SweepRecord]:
    """One SweepRecord per SIR point, ascending.

    Fixed gains solve each point once; Monte Carlo mode draws mc_draws
    channels (indices 0..mc_draws-1 under rng_seed, shared by all SIR points)
    and averages the capacities before taking the efficiency ratios.
    """
    points = sir_points(config)
    records = []
    if config.fixed_gains is not None:
        gains = config.fixed_gains
        for sir_db in points:
            p_max = config.params.gamma_max * db_to_linear(sir_db)
            params = replace(config.params, p_max=p_max)
            ne = solve_ne(gains, params)
            nj = solve_nj(gains, params)
            c_no_eh = capacity(p_max, 0.0, params.gamma_max, gains, params)
            records.append(_make_record(
                sir_db, [ne.value], [nj.value], [c_no_eh],
                1.0 if nj.feasible else 0.0, [ne.profile.legit.tau],
            ))
        return records
    block = _gain_block(config.rng_seed, 0, config.mc_draws)
    gains = ChannelGains(block[:, 0], block[:, 1], block[:, 2])
    for sir_db in points:
        p_max = config.params.gamma_max * db_to_linear(sir_db)
        params = replace(config.params, p_max=p_max)
        tau_ne, c_ne = _solve_ne_batch(gains, params)
        c_nj, feasible = _solve_nj_batch(gains, params)
        c_no_eh = capacity(p_max, 0.0, params.gamma_max, gains, params)
        records.append(_make_record(
            sir_db, c_ne, c_nj, c_no_eh,
            float(np.count_nonzero(feasible)) / config.mc_draws, tau_ne,
        ))
    return records


def _config_echo(config: SweepConfig) -> list[str]:
    p = config.params
    fmt = lambda x: format(x, ".12g")
    lines = [
        "# ehjam sir sweep",
        f"# na_dbm={fmt(linear_to_db(p.n_a))} nb_dbm={fmt(linear_to_db(p.n_b))}"
        f" gamma_dbm={fmt(linear_to_db(p.gamma_max))} zeta={fmt(p.zeta)}",
        f"# sir_db={fmt(config.sir_start_db)}..{fmt(config.sir_stop_db)}"
        f" step {fmt(config.sir_step_db)}",
    ]
    if config.fixed_gains is not None:
        g = config.fixed_gains
        lines.append(
            f"# mode=fixed-gains h2={fmt(g.h2)} ga2={fmt(g.ga2)} gb2={fmt(g.gb2)}")
    else:
        lines.append(
            f"# mode=monte-carlo draws={config.mc_draws} seed={config.rng_seed}"
            " gains=squared-standard-normal")
    lines.append(
        "# aggregation=ratio-of-averaged-capacities"
        " (per-draw ratio means in f_ratio_mean,f_nj_ratio_mean)")
    return lines


def write_csv(records, destination, config: SweepConfig | None = None) -> None:
    """Write sweep records as CSV, sorted by sir_db ascending, 17 significant
    digits per value (round-trips exactly). With a config, '#'-prefixed
    comment lines echo the run parameters first."""
    if not records:
        raise ValueError("no records to write")
    lines = []
    if config is not None:
        lines.extend(_config_echo(config))
    lines.append(",".join(_CSV_COLUMNS))
    for rec in sorted(records, key=lambda r: r.sir_db):
        lines.append(",".join(
            format(getattr(rec, col), ".17g") for col in _CSV_COLUMNS))
    path = Path(destination)
    try:
        path.write_text("\n".join(lines) + "\n", encoding="ascii")
    except OSError as exc:
        raise OSError(f"could not write sweep CSV to {path}: {exc}") from exc
