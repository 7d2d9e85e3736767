"""Solvers for the two closed-form operating points of the link game, plus
independent brute-force grid oracles used to cross-check them.

Every one-dimensional profile handled here reduces to the same family
``C(tau) = (1-tau)/2 * log2(1 + (alpha + beta*tau)/(1-tau))`` whose second
derivative is ``-(alpha+beta)^2 / (2 ln2 (1-tau) D^2) <= 0``: the profiles
are concave in tau, so a single sign change of the first derivative locates
the maximizer and bisection is enough.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Union

import numpy as np

from .model import (
    TAU_LIMIT,
    ChannelGains,
    JammerRegime,
    LegitStrategy,
    NeutralizationInfeasible,
    StrategyProfile,
    SystemParams,
    capacity,
    jammer_best_response,
    k_constant,
    neutralization_feasible,
    p_threshold,
    profile_capacity,
)

__all__ = [
    "BRACKET_HI",
    "BRACKET_LO",
    "BracketError",
    "EquilibriumResult",
    "FixedPower",
    "OnThreshold",
    "ROOT_TOL",
    "RootSolveReport",
    "SolutionRegime",
    "TauOptimum",
    "TauProfile",
    "capacity_tau_derivative",
    "find_root_bracketed",
    "ne_grid_optimum",
    "nj_grid_value",
    "solve_ne",
    "solve_nj",
    "tau_hat",
    "tau_profile_capacity",
    "tau_star",
    "tau_tilde",
    "verify_saddle_point",
]

_LN2 = math.log(2.0)

#: Ends of the derivative sign scan; roots are bracketed inside (0, 1).
BRACKET_LO = 1e-6
BRACKET_HI = 1.0 - 1e-6

#: Bisection interval tolerance. Tight enough that the derivative residual at
#: the returned root stays below 1e-10 for slopes up to ~1e3.
ROOT_TOL = 1e-13

_MAX_ITER = 200


class BracketError(ValueError):
    """f(lo) and f(hi) do not straddle zero."""


@dataclass(frozen=True)
class FixedPower:
    """tau-profile with transmit and jamming powers held fixed."""

    p: float
    gamma: float


@dataclass(frozen=True)
class OnThreshold:
    """tau-profile riding the neutralization threshold: p = tau*K, jammer silent."""


TauProfile = Union[FixedPower, OnThreshold]


def _profile_coefficients(profile: TauProfile, gains: ChannelGains, params: SystemParams):
    """Reduce a tau-profile to the (alpha, beta) pair of the canonical family."""
    if isinstance(profile, FixedPower):
        scale = gains.h2 / (profile.gamma * gains.gb2 + params.n_b)
        alpha = profile.p * scale
        beta = params.zeta * (profile.gamma * gains.ga2 + params.n_a) * scale
        return alpha, beta
    if isinstance(profile, OnThreshold):
        if not neutralization_feasible(gains, params):
            raise NeutralizationInfeasible(
                "threshold profile requires ga2/n_a > gb2/n_b"
            )
        if np.any(np.asarray(gains.gb2) == 0.0):
            raise ValueError("threshold profile is undefined when gb2 == 0")
        return 0.0, params.zeta * gains.ga2 * gains.h2 / gains.gb2
    raise TypeError(f"unknown tau-profile: {profile!r}")


def _tau_derivative(tau, alpha, beta):
    """d/dtau of the canonical profile capacity, in bits per channel use."""
    x = (alpha + beta * tau) / (1.0 - tau)
    d = (1.0 - tau) + alpha + beta * tau
    return (-np.log1p(x) + (alpha + beta) / d) / (2.0 * _LN2)


def capacity_tau_derivative(profile: TauProfile, tau, gains: ChannelGains,
                            params: SystemParams):
    """Analytic derivative of capacity along a tau-profile."""
    t = np.asarray(tau)
    if np.any(t < 0.0) or np.any(t >= 1.0):
        raise ValueError("tau must lie in [0, 1)")
    alpha, beta = _profile_coefficients(profile, gains, params)
    out = _tau_derivative(tau, alpha, beta)
    return float(out) if np.ndim(out) == 0 else out


def tau_profile_capacity(profile: TauProfile, tau, gains: ChannelGains,
                         params: SystemParams):
    """Capacity along a tau-profile (accepts tau arrays)."""
    if isinstance(profile, FixedPower):
        return capacity(profile.p, tau, profile.gamma, gains, params)
    k = k_constant(gains, params)
    return capacity(np.asarray(tau) * k, tau, 0.0, gains, params)


@dataclass(frozen=True)
class RootSolveReport:
    """Outcome of a bracketed scalar root search."""

    root: float
    residual: float
    iterations: int
    bracket: tuple[float, float]


def find_root_bracketed(f: Callable[[float], float], lo: float, hi: float,
                        tol: float = ROOT_TOL) -> RootSolveReport:
    """Bisect a sign change of f on [lo, hi] down to an interval of width tol.

    The root stays bracketed throughout; the reported root is the midpoint of
    the final interval. Raises BracketError when f(lo) and f(hi) share a sign.
    """
    if not lo < hi:
        raise ValueError("need lo < hi")
    if not tol > 0.0:
        raise ValueError("tol must be positive")
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return RootSolveReport(lo, 0.0, 0, (lo, hi))
    if fhi == 0.0:
        return RootSolveReport(hi, 0.0, 0, (lo, hi))
    if (flo > 0.0) == (fhi > 0.0):
        raise BracketError(f"no sign change on [{lo}, {hi}]")
    a, b, fa = lo, hi, flo
    iterations = 0
    while b - a > tol and iterations < _MAX_ITER:
        mid = 0.5 * (a + b)
        if not a < mid < b:  # float resolution floor
            break
        fm = f(mid)
        iterations += 1
        if fm == 0.0:
            a = b = mid
            break
        if (fm > 0.0) == (fa > 0.0):
            a, fa = mid, fm
        else:
            b = mid
    root = 0.5 * (a + b)
    return RootSolveReport(root, abs(f(root)), iterations, (lo, hi))


@dataclass(frozen=True)
class TauOptimum:
    """Maximizer of a concave tau-profile.

    boundary is True when the derivative kept one sign over the scan bracket
    and an endpoint won by direct value comparison (ties prefer tau = 0);
    report carries the root search details otherwise.
    """

    tau: float
    boundary: bool
    report: RootSolveReport | None


def _maximize_profile(profile: TauProfile, gains: ChannelGains,
                      params: SystemParams) -> TauOptimum:
    def deriv(t):
        return capacity_tau_derivative(profile, t, gains, params)

    if deriv(BRACKET_LO) <= 0.0:
        # concave and already nonincreasing: the maximum sits at tau = 0
        return TauOptimum(0.0, True, None)
    if deriv(BRACKET_HI) > 0.0:
        v_lo = tau_profile_capacity(profile, 0.0, gains, params)
        v_hi = tau_profile_capacity(profile, TAU_LIMIT, gains, params)
        return TauOptimum(0.0 if v_lo >= v_hi else TAU_LIMIT, True, None)
    report = find_root_bracketed(deriv, BRACKET_LO, BRACKET_HI)
    return TauOptimum(report.root, False, report)


def tau_hat(gains: ChannelGains, params: SystemParams) -> TauOptimum:
    """EH fraction maximizing capacity while riding the neutralization threshold."""
    return _maximize_profile(OnThreshold(), gains, params)


def tau_tilde(gains: ChannelGains, params: SystemParams) -> TauOptimum:
    """EH fraction maximizing capacity at full transmit power, jammer silent."""
    if not neutralization_feasible(gains, params):
        raise NeutralizationInfeasible(
            "silent-jammer profile is only used when neutralization is feasible"
        )
    return _maximize_profile(FixedPower(params.p_max, 0.0), gains, params)


def tau_star(gains: ChannelGains, params: SystemParams) -> TauOptimum:
    """EH fraction maximizing capacity with both powers at their budgets."""
    return _maximize_profile(FixedPower(params.p_max, params.gamma_max), gains, params)


class SolutionRegime(Enum):
    NJ_CASE_A = "NJ-case-a"
    NJ_CASE_B_CANDIDATE1 = "NJ-case-b-candidate1"
    NJ_CASE_B_CANDIDATE2 = "NJ-case-b-candidate2"
    NJ_INFEASIBLE = "NJ-infeasible"
    NE_TAU_ZERO = "NE-tau-zero"
    NE_TAU_INTERIOR = "NE-tau-interior"


@dataclass(frozen=True)
class EquilibriumResult:
    """A solved operating point.

    feasible means: for neutralization results, the jammer can be silenced at
    all; for full-power results, full-power jamming is actually a best
    response to the returned legitimate strategy (see solve_ne).
    """

    profile: StrategyProfile
    value: float
    regime: SolutionRegime
    feasible: bool


def _tau_reaching_power(tau: float, k: float, p: float) -> float:
    """Nudge tau up by ulps until tau*k >= p (rounding guard at the corner)."""
    while tau * k < p and tau < TAU_LIMIT:
        tau = math.nextafter(tau, 1.0)
    return min(tau, TAU_LIMIT)


def solve_nj(gains: ChannelGains, params: SystemParams) -> EquilibriumResult:
    """Best capacity achievable while keeping the jammer's best response silent.

    Infeasible harvesting links get value 0 with an all-zero profile. With a
    finite threshold slope K the optimum either rides the threshold (case a,
    active when P/K > 1; independent of P) or is the better of the two corner
    candidates (case b): the clipped threshold optimum and full power with
    enough harvesting time. Ties prefer the threshold-riding candidate. With
    an unbounded threshold (gb2 == 0) every strategy neutralizes and the
    problem degenerates to the best response to a silent jammer.
    """
    if not neutralization_feasible(gains, params):
        prof = StrategyProfile(LegitStrategy(0.0, 0.0), 0.0)
        return EquilibriumResult(
            prof, capacity(0.0, 0.0, 0.0, gains, params),
            SolutionRegime.NJ_INFEASIBLE, False,
        )
    k = k_constant(gains, params)
    p_max = params.p_max
    if math.isinf(k):
        tld = tau_tilde(gains, params)
        candidates = [
            (p_max, 0.0, SolutionRegime.NJ_CASE_B_CANDIDATE1),
            (p_max, tld.tau, SolutionRegime.NJ_CASE_B_CANDIDATE2),
        ]
    else:
        p_inv = math.inf if k <= 0.0 else p_max / k
        hat = tau_hat(gains, params)
        if p_inv > 1.0:
            tau_a = hat.tau
            p_a = p_threshold(tau_a, gains, params)
            prof = StrategyProfile(LegitStrategy(p_a, tau_a), 0.0)
            return EquilibriumResult(
                prof, capacity(p_a, tau_a, 0.0, gains, params),
                SolutionRegime.NJ_CASE_A, True,
            )
        tld = tau_tilde(gains, params)
        tau1 = min(hat.tau, p_inv)
        p1 = min(p_threshold(tau1, gains, params), p_max)
        tau2 = _tau_reaching_power(min(max(tld.tau, p_inv), TAU_LIMIT), k, p_max)
        candidates = [
            (p1, tau1, SolutionRegime.NJ_CASE_B_CANDIDATE1),
            (p_max, tau2, SolutionRegime.NJ_CASE_B_CANDIDATE2),
        ]
    (p1, t1, r1), (p2, t2, r2) = candidates
    v1 = capacity(p1, t1, 0.0, gains, params)
    v2 = capacity(p2, t2, 0.0, gains, params)
    p, tau, regime, value = (p1, t1, r1, v1) if v1 >= v2 else (p2, t2, r2, v2)
    prof = StrategyProfile(LegitStrategy(p, tau), 0.0)
    return EquilibriumResult(prof, value, regime, True)


def solve_ne(gains: ChannelGains, params: SystemParams) -> EquilibriumResult:
    """Full-power operating point: both sides spend their whole budget and the
    EH fraction maximizes capacity under full-power jamming.

    feasible reports whether full-power jamming is a best response to the
    returned legitimate strategy, i.e. whether the profile is mutually stable.
    At low SIR with a strong harvesting link the jammer would rather stay
    silent than feed the harvester; the profile is still returned, flagged
    infeasible, and verify_saddle_point will show the jammer-side deviation.
    """
    star = tau_star(gains, params)
    tau = star.tau
    value = capacity(params.p_max, tau, params.gamma_max, gains, params)
    _, regime = jammer_best_response(params.p_max, tau, gains, params)
    feasible = regime is not JammerRegime.SILENT_OPTIMAL
    tag = SolutionRegime.NE_TAU_ZERO if tau == 0.0 else SolutionRegime.NE_TAU_INTERIOR
    prof = StrategyProfile(LegitStrategy(params.p_max, tau), params.gamma_max)
    return EquilibriumResult(prof, value, tag, feasible)


def verify_saddle_point(profile: StrategyProfile, gains: ChannelGains,
                        params: SystemParams,
                        grid_sizes: tuple[int, int, int] = (500, 500, 500),
                        tol: float = 1e-8):
    """Grid check of the two stability inequalities at a profile.

    Sweeps the legitimate grid against the profile's jamming power and the
    jammer grid against the profile's legitimate strategy. Returns
    (ok, worst_violation) where a positive violation is the largest capacity
    improvement any grid deviation achieves.
    """
    n_p, n_tau, n_gamma = grid_sizes
    if min(n_p, n_tau, n_gamma) < 2:
        raise ValueError("grid sizes must be >= 2")
    c_star = profile_capacity(profile, gains, params)
    ps = np.linspace(0.0, params.p_max, n_p)
    taus = np.linspace(0.0, TAU_LIMIT, n_tau)
    gammas = np.linspace(0.0, params.gamma_max, n_gamma)
    legit = capacity(ps[:, None], taus[None, :], profile.gamma, gains, params)
    jam = capacity(profile.legit.p, profile.legit.tau, gammas, gains, params)
    legit_violation = float(np.max(legit)) - c_star
    jammer_violation = c_star - float(np.min(jam))
    worst = max(legit_violation, jammer_violation)
    return worst <= tol, worst


def _chunks(n: int, workers: int):
    workers = max(1, min(int(workers), n))
    step = -(-n // workers)
    return [(i, min(i + step, n)) for i in range(0, n, step)]


def ne_grid_optimum(gains: ChannelGains, params: SystemParams, n: int = 100_000,
                    workers: int = 1):
    """Dense-grid argmax of capacity at full powers; independent check of tau_star.

    The workers hint only chunks the evaluation; the reduction is index-ordered,
    so the result is identical for any worker count.
    """
    taus = np.linspace(0.0, TAU_LIMIT, n)
    best_idx, best_val = 0, -math.inf
    for lo, hi in _chunks(n, workers):
        vals = capacity(params.p_max, taus[lo:hi], params.gamma_max, gains, params)
        i = int(np.argmax(vals))
        if vals[i] > best_val:
            best_idx, best_val = lo + i, float(vals[i])
    return float(taus[best_idx]), best_val


def nj_grid_value(gains: ChannelGains, params: SystemParams, n: int = 500,
                  workers: int = 1) -> float:
    """Constrained 2-D grid oracle: best capacity over a silent jammer with
    p <= min(P, tau*K), n points per axis. Returns 0 when infeasible."""
    if not neutralization_feasible(gains, params):
        return 0.0
    k = k_constant(gains, params)
    taus = np.linspace(0.0, TAU_LIMIT, n)
    if math.isinf(k):
        p_cap = np.full(n, params.p_max)
    else:
        p_cap = np.minimum(params.p_max, taus * k)
    frac = np.linspace(0.0, 1.0, n)
    best = -math.inf
    for lo, hi in _chunks(n, workers):
        p_grid = frac[:, None] * p_cap[None, lo:hi]
        vals = capacity(p_grid, taus[None, lo:hi], 0.0, gains, params)
        best = max(best, float(np.max(vals)))
    return best
