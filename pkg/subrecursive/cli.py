"""Command line entry point: tables, verification suites and exports.

Exit codes: 0 success, 1 failed check or error, 2 usage error, 3 guarded
divergence.
"""
import argparse
import json
import os
import sys

from subrecursive import beaver, diagonal, enumerator, omega
from subrecursive.codec import constants_text, index_of
from subrecursive.config import load_config, set_capacity
from subrecursive.dyadic import Dyadic
from subrecursive.errors import ConfigError, DecodeError
from subrecursive.log import get_logger, setup_logging
from subrecursive.submachine import TimeFn
from subrecursive.vm import Diverged, Fuel, Halted, UNBOUNDED, run, schedule_text

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_DIVERGED = 0, 1, 2, 3
SUITES = ("totality", "witness", "dominance", "incompressibility", "oracle")

logger = get_logger(__name__)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="subrecursive",
        description="Time-bounded halting probabilities and Busy Beaver Plus on a frozen prefix-free language.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--time-fn", help="time function, e.g. poly:2,1 or diag:poly:2,1")
    common.add_argument("--n", type=int, help="level N (defaults to the horizon)")
    common.add_argument("--horizon", type=int, help="enumeration horizon in bits")
    common.add_argument("--workers", type=int, help="parallel workers for sweeps")
    common.add_argument("--cache", help="record cache directory")
    common.add_argument("--format", choices=("text", "csv", "json"), help="output format")
    common.add_argument("--guard", type=int, help="search guard for pi-omega")
    common.add_argument("--config", help="YAML file overriding the packaged defaults")
    common.add_argument("--out", help="directory to write tables and reports into")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("omega", parents=[common], help="psum table for levels 0..N")
    sub.add_parser("bb", parents=[common], help="BB and BB+ table for levels 0..N")
    pi = sub.add_parser("pi-omega", parents=[common], help="run pi'_Omega on a binary fraction")
    pi.add_argument("--rho", required=True, help='binary fraction: "0.0110", "0110" or "1"')
    verify = sub.add_parser("verify", parents=[common], help="run a verification suite")
    verify.add_argument("which", choices=SUITES)
    sub.add_parser("sweep", parents=[common], help="fill the record cache up to N bits")
    sub.add_parser("export", parents=[common], help="write omega, bb and hierarchy tables")
    run_cmd = sub.add_parser("run", parents=[common], help="execute one program on U")
    run_cmd.add_argument("program", help="program bits")
    run_cmd.add_argument("--fuel", type=int, help="step budget (unbounded when omitted)")
    run_cmd.add_argument("--trace", action="store_true", help="print one line per step to stderr")
    sub.add_parser("constants", parents=[common], help="print the codeword table and cost schedule")
    return parser


def _emit_frame(frame, config, out, name):
    if out:
        os.makedirs(out, exist_ok=True)
        if config.format == "json":
            frame.to_json(os.path.join(out, f"{name}.json"), orient="records")
        else:
            frame.to_csv(os.path.join(out, f"{name}.csv"), index=False)
        logger.info("wrote %s table to %s", name, out)
    elif config.format == "csv":
        print(frame.to_csv(index=False), end="")
    elif config.format == "json":
        print(frame.to_json(orient="records"))
    else:
        print(frame.to_string(index=False))


def _emit_report(report, out, name):
    text = json.dumps(report, indent=2, sort_keys=True, default=str)
    if out:
        os.makedirs(out, exist_ok=True)
        with open(os.path.join(out, f"{name}.json"), "w") as f:
            f.write(text + "\n")
        logger.info("wrote %s report to %s", name, out)
    else:
        print(text)


def _inner(tf):
    return tf.inner if tf.family == "diag" else tf


def cmd_omega(config, args):
    tf = TimeFn.parse(config.time_fn)
    n = config.horizon if args.n is None else args.n
    _emit_frame(omega.omega_frame(omega.omega_table(tf, n)), config, args.out, "omega")
    return EXIT_OK


def cmd_bb(config, args):
    tf = TimeFn.parse(config.time_fn)
    n = config.horizon if args.n is None else args.n
    _emit_frame(beaver.bb_frame(beaver.bb_table(tf, n)), config, args.out, "bb")
    return EXIT_OK


def cmd_pi_omega(config, args):
    tf = TimeFn.parse(config.time_fn)
    rho = Dyadic.parse(args.rho)
    result = beaver.pi_omega(tf, rho, config.effective_guard)
    if isinstance(result, Diverged):
        print(f"Diverged: no level up to {result.guard} reaches rho = {rho}")
        return EXIT_DIVERGED
    print(result)
    return EXIT_OK


def cmd_verify(config, args):
    tf = TimeFn.parse(config.time_fn)
    which = args.which
    if which == "totality":
        horizon = config.diagonal_horizon if args.horizon is None else config.horizon
        report = diagonal.verify_totality(_inner(tf), horizon, config.witness_horizon)
    elif which == "witness":
        report = diagonal.witness_table(_inner(tf), range(1, config.witness_horizon + 1))
    elif which == "dominance":
        n = config.dominance_horizon if args.n is None else args.n
        report = beaver.dominance_report(tf, n)
    elif which == "incompressibility":
        n = config.horizon if args.n is None else args.n
        report = beaver.incompressibility_report(tf, n)
    else:
        n = config.horizon if args.n is None else args.n
        cache = enumerator.RecordCache(config.cache)
        with cache.locked():
            report = enumerator.oracle_check(tf, n, cache=cache, workers=config.workers)
    _emit_report(report, args.out, which)
    return EXIT_OK if report["passed"] else EXIT_FAILED


def cmd_sweep(config, args):
    tf = TimeFn.parse(config.time_fn)
    n = config.horizon if args.n is None else args.n
    cache = enumerator.RecordCache(config.cache)
    with cache.locked():
        records = enumerator.sweep(tf, n, cache=cache, workers=config.workers,
                                   progress=config.progress and sys.stderr.isatty())
    halted = sum(r.halted_in_bound for r in records)
    print(f"{tf.spec}: {len(records)} programs up to {n} bits, {halted} halt in time, "
          f"psum = {enumerator.records_psum(records, n)}")
    return EXIT_OK


def cmd_export(config, args):
    tf = TimeFn.parse(config.time_fn)
    n = config.horizon if args.n is None else args.n
    out = args.out or "./subrecursive_tables"
    _emit_frame(omega.omega_frame(omega.omega_table(tf, n)), config, out, "omega")
    _emit_frame(beaver.bb_frame(beaver.bb_table(tf, n)), config, out, "bb")
    chain = [_inner(tf), TimeFn.diagonal(_inner(tf))]
    depth = min(n, config.diagonal_horizon)
    _emit_frame(beaver.hierarchy_table(chain, depth), config, out, "hierarchy")
    return EXIT_OK


def cmd_run(config, args):
    budget = UNBOUNDED if args.fuel is None else Fuel(args.fuel)
    trace = (lambda line: print(line, file=sys.stderr)) if args.trace else None
    outcome = run(args.program, budget, trace=trace)
    if isinstance(outcome, Halted):
        print(f"output {outcome.output} (num {index_of(outcome.output) - 1}) in {outcome.steps} steps")
        return EXIT_OK
    print(f"Exhausted after {outcome.fuel} steps")
    return EXIT_DIVERGED


def cmd_constants(config, args):
    print(constants_text() + schedule_text(), end="")
    return EXIT_OK


COMMANDS = {
    "omega": cmd_omega,
    "bb": cmd_bb,
    "pi-omega": cmd_pi_omega,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
    "export": cmd_export,
    "run": cmd_run,
    "constants": cmd_constants,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config).with_overrides(
            time_fn=args.time_fn,
            horizon=args.horizon,
            workers=args.workers,
            cache=args.cache,
            format=args.format,
            guard=args.guard,
        )
        if args.n is not None and not 0 <= args.n <= config.capacity:
            raise ConfigError(f"--n must lie in [0, {config.capacity}], got {args.n}")
        TimeFn.parse(config.time_fn)
        if args.command == "pi-omega":
            Dyadic.parse(args.rho)
        if (args.command == "verify" and args.which == "witness"
                and config.horizon < config.witness_horizon):
            raise ConfigError(
                f"horizon {config.horizon} is below witness horizon {config.witness_horizon}")
    except (ConfigError, DecodeError) as e:
        parser.error(str(e))
    setup_logging(config.log_level)
    set_capacity(config.capacity)
    try:
        return COMMANDS[args.command](config, args)
    except Exception as e:
        print(f"Error running {args.command}: {e}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
