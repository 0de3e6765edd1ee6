"""Command-line entry point: ``latticeconcat <command> [options]``."""

from __future__ import annotations

import argparse
import sys

from .exceptions import ConfigError, LatticeConcatError
from .harness import (EXIT_CONFIG, EXIT_OK, EXIT_RUNTIME, EXIT_USAGE, build_inner, build_point, load_config,
                      run_experiment, sweep_points, validate_config)
from .inner import estimate_inner_pe


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser, config_required=True):
    p.add_argument("--config", required=config_required, help="JSON experiment config")
    p.add_argument("--seed", type=int, help="override the master seed")
    p.add_argument("--trials", type=int, help="override trials per sweep point")
    p.add_argument("--out", help="override the output CSV path")
    p.add_argument("--threads", type=int, default=1, help="worker threads (results do not depend on it)")


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="latticeconcat", description="Concatenated nested-lattice code experiments.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    _common(sub.add_parser("plan", help="print the outer-code plan for each sweep point"))
    _common(sub.add_parser("estimate-inner", help="Monte Carlo inner symbol error rate per SNR"))
    _common(sub.add_parser("run", help="run the full sweep and write CSV + JSON"))
    _common(sub.add_parser("cf", help="run a compute-and-forward sweep (config needs a 'cf' section)"))
    _common(sub.add_parser("verify", help="run the built-in oracle checks"), config_required=False)
    return parser


def _config(args) -> dict:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.trials is not None:
        cfg["trials"] = args.trials
    if args.out is not None:
        cfg["out"] = args.out
    return validate_config(cfg)


def _cmd_plan(cfg, args):
    for snr, N, i in sweep_points(cfg):
        setup = build_point(cfg, snr, N, i)
        pl = setup.planner
        head = f"snr_db={snr} N_out={N}"
        if "k0" in pl:
            slack = "satisfied" if pl["slack_ok"] else "VIOLATED"
            print(f"{head} k0={pl['k0']} d0={pl['d0']} lambda={pl['lam']:.4f} "
                  f"threshold={pl['threshold']} dim={pl['dimension']} slack={slack} rate={pl['rate']:.6g}")
        else:
            extra = f" p_in_hat={pl['p_in_hat']:.4g} (ci_hi {pl['p_in_ci_hi']:.4g})" if "p_in_hat" in pl else ""
            print(f"{head} K_out={pl['K_out']}{extra} rate={pl['rate']:.6g}")


def _cmd_estimate(cfg, args):
    for snr in cfg["sweep"]["snr_db"]:
        codec = build_inner(cfg, snr)
        est = estimate_inner_pe(codec, cfg["trials"], seed=cfg["seed"], threads=args.threads)
        print(f"snr_db={snr} p_in_hat={est.p_hat:.6g} ci=[{est.ci_lo:.6g}, {est.ci_hi:.6g}] "
              f"errors={est.errors} trials={est.trials} alpha={codec.alpha_:.6g}")


def _cmd_run(cfg, args):
    def show(r):
        print(f"snr_db={r.snr_db} N_out={r.N_out} dim={r.K_out_or_dim} rate={r.rate_bits_per_dim:.6g} "
              f"errors={r.errors}/{r.trials} p_hat={r.p_hat:.4g} ci=[{r.ci_lo:.4g}, {r.ci_hi:.4g}]", flush=True)
    run_experiment(cfg, threads=args.threads, progress=show)
    print(f"wrote {cfg['out']}")


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    if args.command == "verify":
        from .verify import run_all
        return EXIT_OK if run_all() else EXIT_RUNTIME
    if args.threads < 1:
        print("--threads must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        cfg = _config(args)
        if args.command == "cf" and "cf" not in cfg:
            raise ConfigError("cf", "the cf command needs a 'cf' section")
        if args.command == "run" and "cf" in cfg:
            print("note: config has a 'cf' section; running compute-and-forward", file=sys.stderr)
        {"plan": _cmd_plan, "estimate-inner": _cmd_estimate, "run": _cmd_run, "cf": _cmd_run}[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error at {exc.path}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (LatticeConcatError, OSError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
