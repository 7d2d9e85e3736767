"""Command-line front end.

Engineer-facing units at the boundary: powers in dBm (or linear mW via the
``--*-mw`` twins), gains unitless, SIR in dB. Everything inside runs in
linear milliwatts.

Exit codes: 0 success, 1 configuration error, 2 infeasibility where the
subcommand requires feasibility, 3 verification failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import replace
from pathlib import Path

from .experiments import SweepConfig, sample_channels, sir_sweep, write_csv
from .model import ChannelGains, SystemParams, db_to_linear, linear_to_db
from .solvers import solve_ne, solve_nj, verify_saddle_point

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_INFEASIBLE = 2
EXIT_VERIFY = 3

#: Default directory for sweep output when --out is not given.
ENV_OUTPUT_DIR = "EHJAM_OUTPUT_DIR"

_VERIFY_SIRS_DB = (-30.0, -10.0, 0.0, 10.0)


class _Parser(argparse.ArgumentParser):
    """argparse with config errors mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _fmt(x) -> str:
    return format(float(x), ".12g")


def _fmt_exact(x) -> str:
    return format(float(x), ".17g")


def _dbm_or_inf(mw: float) -> str:
    return _fmt(linear_to_db(mw)) if mw > 0 else "-inf"


def _add_power_pair(parser, name, help_base, default_dbm=None):
    group = parser.add_mutually_exclusive_group()
    group.add_argument(f"--{name}-dbm", type=float, default=None,
                       help=f"{help_base} in dBm"
                            + (f" (default {default_dbm})" if default_dbm is not None else ""))
    group.add_argument(f"--{name}-mw", type=float, default=None,
                       help=f"{help_base} in linear mW")


def _resolve_power(args, name, default_dbm):
    dbm = getattr(args, f"{name.replace('-', '_')}_dbm")
    mw = getattr(args, f"{name.replace('-', '_')}_mw")
    if mw is not None:
        return mw
    if dbm is not None:
        return db_to_linear(dbm)
    return db_to_linear(default_dbm)


def _add_param_flags(parser):
    _add_power_pair(parser, "na", "noise power at the harvesting side", -10.0)
    _add_power_pair(parser, "nb", "noise power at the receiver", -7.0)
    _add_power_pair(parser, "gamma", "jamming power budget", 10.0)
    parser.add_argument("--zeta", type=float, default=0.8,
                        help="harvesting efficiency in [0, 1] (default 0.8)")


def _add_gain_flags(parser, required):
    parser.add_argument("--h2", type=float, required=required,
                        help="power gain of the useful link (unitless)")
    parser.add_argument("--ga2", type=float, required=required,
                        help="power gain of the harvesting link (unitless)")
    parser.add_argument("--gb2", type=float, required=required,
                        help="power gain of the interference link (unitless)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ehjam",
                     description="Anti-jamming link solver with RF energy harvesting")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    common = dict(formatter_class=argparse.ArgumentDefaultsHelpFormatter)

    p_nj = sub.add_parser("nj", help="solve the jammer-neutralizing optimum", **common)
    _add_param_flags(p_nj)
    _add_power_pair(p_nj, "p", "transmit power budget", 0.0)
    _add_gain_flags(p_nj, required=True)
    p_nj.add_argument("--echo-config", action="store_true",
                      help="print a flag line that reproduces this run")

    p_ne = sub.add_parser("ne", help="solve the full-power operating point", **common)
    _add_param_flags(p_ne)
    _add_power_pair(p_ne, "p", "transmit power budget", 0.0)
    _add_gain_flags(p_ne, required=True)
    p_ne.add_argument("--echo-config", action="store_true",
                      help="print a flag line that reproduces this run")

    p_sw = sub.add_parser("sweep", help="run an SIR sweep and write CSV", **common)
    _add_param_flags(p_sw)
    p_sw.add_argument("--sir-start-db", type=float, default=-30.0)
    p_sw.add_argument("--sir-stop-db", type=float, default=10.0)
    p_sw.add_argument("--sir-step-db", type=float, default=1.0)
    p_sw.add_argument("--draws", type=int, default=10_000,
                      help="Monte Carlo channel draws per sweep")
    p_sw.add_argument("--seed", type=int, default=0, help="channel sampling seed")
    _add_gain_flags(p_sw, required=False)
    p_sw.add_argument("--out", type=str, default=None,
                      help=f"output CSV path (default: ${ENV_OUTPUT_DIR}/sweep.csv"
                           " or ./sweep.csv)")
    p_sw.add_argument("--echo-config", action="store_true",
                      help="print a flag line that reproduces this run")

    p_vf = sub.add_parser("verify",
                          help="stability and dominance checks on random channels",
                          **common)
    _add_param_flags(p_vf)
    p_vf.add_argument("--sets", type=int, default=20, help="random parameter sets")
    p_vf.add_argument("--seed", type=int, default=0, help="channel sampling seed")
    p_vf.add_argument("--legit-grid", type=int, default=200,
                      help="grid points per legitimate axis")
    p_vf.add_argument("--jammer-grid", type=int, default=200,
                      help="grid points for the jamming power")
    p_vf.add_argument("--tol", type=float, default=1e-8,
                      help="largest tolerated capacity improvement")
    p_vf.add_argument("--echo-config", action="store_true",
                      help="print a flag line that reproduces this run")
    return parser


def _build_params(args, p_max) -> SystemParams:
    return SystemParams(
        n_a=_resolve_power(args, "na", -10.0),
        n_b=_resolve_power(args, "nb", -7.0),
        p_max=p_max,
        gamma_max=_resolve_power(args, "gamma", 10.0),
        zeta=args.zeta,
    )


def _param_flags(params: SystemParams) -> list[str]:
    return [
        "--na-mw", _fmt_exact(params.n_a),
        "--nb-mw", _fmt_exact(params.n_b),
        "--gamma-mw", _fmt_exact(params.gamma_max),
        "--zeta", _fmt_exact(params.zeta),
    ]


def _echo(flags: list[str]) -> None:
    print("# flags: " + " ".join(flags))


def _print_point(res) -> None:
    legit = res.profile.legit
    print(f"regime={res.regime.value}")
    print(f"feasible={'true' if res.feasible else 'false'}")
    print(f"p_mw={_fmt(legit.p)} p_dbm={_dbm_or_inf(legit.p)}")
    print(f"tau={_fmt(legit.tau)}")
    print(f"gamma_mw={_fmt(res.profile.gamma)} gamma_dbm={_dbm_or_inf(res.profile.gamma)}")
    print(f"capacity_bpcu={_fmt(res.value)}")


def _cmd_point(args, kind: str) -> int:
    params = _build_params(args, p_max=_resolve_power(args, "p", 0.0))
    gains = ChannelGains(args.h2, args.ga2, args.gb2)
    if args.echo_config:
        _echo([kind] + _param_flags(params)
              + ["--p-mw", _fmt_exact(params.p_max),
                 "--h2", _fmt_exact(gains.h2), "--ga2", _fmt_exact(gains.ga2),
                 "--gb2", _fmt_exact(gains.gb2)])
    if kind == "nj":
        res = solve_nj(gains, params)
        if not res.feasible:
            print("neutralization infeasible", file=sys.stderr)
            return EXIT_INFEASIBLE
    else:
        res = solve_ne(gains, params)
    _print_point(res)
    return EXIT_OK


def _default_out() -> Path:
    return Path(os.environ.get(ENV_OUTPUT_DIR, ".")) / "sweep.csv"


def _cmd_sweep(args) -> int:
    params = _build_params(args, p_max=1.0)  # p_max is re-derived per SIR point
    gains_given = [g for g in (args.h2, args.ga2, args.gb2) if g is not None]
    if gains_given and len(gains_given) != 3:
        print("ehjam sweep: error: give all of --h2/--ga2/--gb2 or none",
              file=sys.stderr)
        return EXIT_CONFIG
    fixed = ChannelGains(args.h2, args.ga2, args.gb2) if gains_given else None
    config = SweepConfig(
        sir_start_db=args.sir_start_db,
        sir_stop_db=args.sir_stop_db,
        sir_step_db=args.sir_step_db,
        params=params,
        fixed_gains=fixed,
        mc_draws=args.draws,
        rng_seed=args.seed,
    )
    out = Path(args.out) if args.out else _default_out()
    if args.echo_config:
        flags = (["sweep"] + _param_flags(params)
                 + ["--sir-start-db", _fmt_exact(args.sir_start_db),
                    "--sir-stop-db", _fmt_exact(args.sir_stop_db),
                    "--sir-step-db", _fmt_exact(args.sir_step_db),
                    "--draws", str(args.draws), "--seed", str(args.seed),
                    "--out", str(out)])
        if fixed is not None:
            flags += ["--h2", _fmt_exact(fixed.h2), "--ga2", _fmt_exact(fixed.ga2),
                      "--gb2", _fmt_exact(fixed.gb2)]
        _echo(flags)
    records = sir_sweep(config)
    write_csv(records, out, config)
    print(f"wrote {out} ({len(records)} SIR points)")
    return EXIT_OK


def _cmd_verify(args) -> int:
    params0 = _build_params(args, p_max=1.0)
    if args.echo_config:
        _echo(["verify"] + _param_flags(params0)
              + ["--sets", str(args.sets), "--seed", str(args.seed),
                 "--legit-grid", str(args.legit_grid),
                 "--jammer-grid", str(args.jammer_grid),
                 "--tol", _fmt_exact(args.tol)])
    if args.sets < 1:
        print("ehjam verify: error: --sets must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    grid = (args.legit_grid, args.legit_grid, args.jammer_grid)
    checked = skipped = failures = 0
    worst_saddle = -math.inf
    worst_dominance = -math.inf
    for i in range(args.sets):
        gains = sample_channels(args.seed, i)
        sir_db = _VERIFY_SIRS_DB[i % len(_VERIFY_SIRS_DB)]
        params = replace(params0, p_max=params0.gamma_max * db_to_linear(sir_db))
        ne = solve_ne(gains, params)
        nj = solve_nj(gains, params)
        dominance_gap = nj.value - ne.value  # positive would violate dominance
        worst_dominance = max(worst_dominance, dominance_gap)
        if dominance_gap > 1e-9:
            failures += 1
        if not ne.feasible:
            # full-power jamming is not a best response here; the saddle check
            # does not apply to this draw
            skipped += 1
            continue
        checked += 1
        ok, violation = verify_saddle_point(ne.profile, gains, params, grid, args.tol)
        worst_saddle = max(worst_saddle, violation)
        if not ok:
            failures += 1
    print(f"sets={args.sets} saddle_checked={checked} skipped_inconsistent={skipped}")
    print(f"worst_saddle_violation={_fmt(worst_saddle) if checked else 'n/a'}")
    print(f"worst_dominance_violation={_fmt(worst_dominance)}")
    print(f"result={'pass' if failures == 0 else 'fail'}")
    return EXIT_OK if failures == 0 else EXIT_VERIFY


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "nj":
            return _cmd_point(args, "nj")
        if args.command == "ne":
            return _cmd_point(args, "ne")
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "verify":
            return _cmd_verify(args)
    except (ValueError, OSError) as exc:
        print(f"ehjam: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    raise AssertionError(f"unhandled command {args.command!r}")


def main() -> None:
    raise SystemExit(run())
