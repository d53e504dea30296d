import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path
from typing import List, Optional

from .bounds_api import compute_bound
from .channels import make_spec
from .config import load_numerics_config
from .errors import FblError, exit_code_for
from .logging_config import configure_logging
from .query import BoundQuery
from .selftest import run_selftest
from .specs import snr_from_ebn0_db
from .sweep_config import load_sweep_config
from .waterfill import WaterfillConfig, load_waterfill_config, read_noise_csv, run_waterfill
from .workflow import run_sweep_sync


def _add_bound_parser(sub: argparse._SubParsersAction) -> None:
    parser = sub.add_parser("bound", help="Evaluate one bound at one operating point")
    parser.add_argument(
        "--channel",
        required=True,
        choices=["awgn", "parallel-awgn", "biawgn", "bsc"],
    )
    parser.add_argument(
        "--snr", type=float, help="Linear SNR Omega (awgn, biawgn; bsc via p = Q(sqrt(snr)))"
    )
    parser.add_argument("--snr-db", type=float, help="SNR in dB; wins over --snr")
    parser.add_argument(
        "--ebn0-db",
        type=float,
        help="Eb/N0 in dB, converted as Omega = 2 R Eb/N0 (real signalling); needs --rate",
    )
    parser.add_argument(
        "--snr-list", type=float, nargs="+", help="Per-sub-channel linear SNRs (parallel-awgn)"
    )
    parser.add_argument("--pbit", type=float, help="BSC crossover probability")
    parser.add_argument("--n", type=int, required=True, help="Blocklength")
    target = parser.add_mutually_exclusive_group(required=True)
    target.add_argument("--rate", type=float, help="Rate in bits per channel use (solve for Pe)")
    target.add_argument("--pe", type=float, help="Error probability (solve for the rate)")
    parser.add_argument(
        "--kind",
        default="meta-converse",
        help="meta-converse | rcu | kappa-beta | normal-approx (default: meta-converse)",
    )
    parser.add_argument(
        "--method",
        default=None,
        help=(
            "exact | integral | asym1 | asym2 | monte-carlo (env: FBL_DEFAULT_METHOD); "
            "integral needs moderate n, below about 10 the descent path can leave the strip"
        ),
    )
    parser.add_argument("--samples", type=int, help="Monte-Carlo draws (env: FBL_MC_SAMPLES)")
    parser.add_argument("--seed", type=int, default=0)


def _add_sweep_parser(sub: argparse._SubParsersAction) -> None:
    parser = sub.add_parser("sweep", help="Evaluate bounds over a grid from a YAML config")
    parser.add_argument("--config", required=True, help="Path to the sweep YAML")
    parser.add_argument("--output", help="Output path; overrides output_path in the config")
    parser.add_argument("--format", choices=["csv", "json"], help="Overrides format in the config")
    parser.add_argument("--threads", type=int, help="Overrides threads in the config")


def _add_waterfill_parser(sub: argparse._SubParsersAction) -> None:
    parser = sub.add_parser("waterfill", help="Classical vs finite-n power allocation")
    parser.add_argument("--config", help="Path to a waterfill YAML")
    parser.add_argument("--noise-file", help="CSV of (index, sigma2) rows")
    parser.add_argument("--total-power", type=float)
    parser.add_argument("--n", type=int, action="append", help="Blocklength; can be repeated")
    parser.add_argument("--pe", type=float, default=1e-3)
    parser.add_argument("--order", type=int, default=2, choices=[1, 2])


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(prog="fbl-bounds")
    parser.add_argument(
        "--log-level", default=None, help="Logging level (default: LOG_LEVEL env or INFO)"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    _add_bound_parser(sub)
    _add_sweep_parser(sub)
    _add_waterfill_parser(sub)
    sub.add_parser("selftest", help="Run the fast numerical oracle suite")
    return parser.parse_args(argv)


def _bound_query(args: argparse.Namespace) -> BoundQuery:
    numerics = load_numerics_config()
    snr = args.snr_list if args.channel == "parallel-awgn" else args.snr
    snr_db = args.snr_db
    if args.ebn0_db is not None and snr_db is None:
        if args.rate is None:
            raise ValueError("--ebn0-db needs --rate to convert to an SNR")
        snr = snr_from_ebn0_db(args.ebn0_db, args.rate)
    spec = make_spec(
        args.channel,
        snr=snr,
        snr_db=snr_db,
        p_bit=args.pbit,
        quadrature_order=numerics.quadrature_order,
    )
    return BoundQuery(
        channel=spec,
        n=args.n,
        rate=args.rate,
        pe=args.pe,
        kind=args.kind,
        method=args.method or numerics.default_method,
        samples=args.samples or numerics.mc_samples,
        seed=args.seed,
    )


def cmd_bound(args: argparse.Namespace) -> int:
    result = compute_bound(_bound_query(args))
    print(json.dumps(result.to_dict()))
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    config = load_sweep_config(Path(args.config))
    overrides = {}
    if args.output:
        overrides["output_path"] = Path(args.output)
    if args.format:
        overrides["format"] = args.format
    if args.threads:
        overrides["threads"] = args.threads
    if overrides:
        config = replace(config, **overrides)
    state = run_sweep_sync(config)
    if state.written is None:
        sys.stdout.write(state.table or "")
    else:
        summary = {
            "rows": len(state.rows),
            "errors": len(state.errors),
            "output": str(state.written),
        }
        print(json.dumps(summary))
    return 0 if len(state.errors) < len(state.rows) else 1


def cmd_waterfill(args: argparse.Namespace) -> int:
    if args.config:
        config = load_waterfill_config(Path(args.config))
    else:
        if not (args.noise_file and args.total_power):
            raise ValueError("waterfill needs --config, or --noise-file with --total-power")
        noise = read_noise_csv(Path(args.noise_file))
        config = WaterfillConfig(
            noise=noise,
            total_power=args.total_power,
            blocklengths=tuple(args.n or [len(noise)]),
            pe=args.pe,
            order=args.order,
        )
    print(json.dumps(run_waterfill(config)))
    return 0


def cmd_selftest(args: argparse.Namespace) -> int:
    report = run_selftest()
    print(json.dumps(report))
    return 0 if report["passed"] else 1


COMMANDS = {
    "bound": cmd_bound,
    "sweep": cmd_sweep,
    "waterfill": cmd_waterfill,
    "selftest": cmd_selftest,
}


def main(argv: Optional[List[str]] = None) -> None:
    args = parse_args(argv)
    configure_logging(args.log_level, force=True)
    try:
        code = COMMANDS[args.command](args)
    except (FblError, ValueError, OSError) as e:
        kind = getattr(e, "kind", type(e).__name__)
        print(json.dumps({"error": kind, "message": str(e)}), file=sys.stderr)
        raise SystemExit(2 if isinstance(e, OSError) else exit_code_for(e)) from e
    raise SystemExit(code)


if __name__ == "__main__":
    main()
