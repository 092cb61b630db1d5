#!/usr/bin/env python3
"""Command line for q-Gaussian fits, relative risk measures and backtests.

Usage:
    python cli.py fit returns.csv --ticker SPX
    python cli.py risk prices.csv --ticker AAPL --reference SPX --measure tre
    python cli.py ks prices.csv --ticker SPX --bootstrap 1000 --seed 7
    python cli.py simulate --q 1.5 --B 50000 --M 0 --n 5000 --seed 1 --out sim.csv
    python cli.py backtest --config run.env --prices prices/ --out results/
    python cli.py diversify --config run.env --prices prices/ --out sweep/ --per-bin 10,25,50

Results go to stdout as JSON; logs go to stderr. Exit codes: 0 success,
1 invalid input or configuration, 2 runtime failure.
"""

import argparse
import json
import logging
import sys
from typing import List, Optional

import risk_api
from core.config import get_settings
from core.errors import InputError, QRiskError
from core.measures import Period

logger = logging.getLogger("qrisk.cli")

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_RUNTIME = 2


def _period(value: str) -> Period:
    try:
        return Period.from_string(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def build_parser(settings) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qrisk", description="Tsallis relative entropy risk toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="Fit a q-Gaussian to one ticker's returns")
    fit.add_argument("data", help="Returns CSV, price CSV or directory of price CSVs")
    fit.add_argument("--ticker", required=True)
    fit.add_argument("--from", dest="start", help="First date (inclusive)")
    fit.add_argument("--to", dest="end", help="Last date (inclusive)")
    fit.add_argument("--fix-q", type=float, help="Hold q fixed and fit only M and B")
    fit.add_argument("--period", type=_period, default=Period.MONTHLY, help="daily or monthly (default: monthly)")
    fit.add_argument("--alpha", type=float, default=0.05, help="KS significance level (default: 0.05)")

    risk = sub.add_parser("risk", help="Score a ticker against a reference")
    risk.add_argument("data")
    risk.add_argument("--ticker", required=True)
    risk.add_argument("--reference", required=True)
    risk.add_argument("--measure", required=True, help="tre, klre, beta or relstd")
    risk.add_argument("--from", dest="start")
    risk.add_argument("--to", dest="end")
    risk.add_argument("--period", type=_period, default=Period.MONTHLY)

    ks = sub.add_parser("ks", help="Kolmogorov-Smirnov verdict for a ticker's q-Gaussian fit")
    ks.add_argument("data")
    ks.add_argument("--ticker", required=True)
    ks.add_argument("--alpha", type=float, default=0.05)
    ks.add_argument("--bootstrap", type=int, metavar="N", help="Parametric bootstrap with N resamples")
    ks.add_argument("--seed", type=int)
    ks.add_argument("--period", type=_period, default=Period.MONTHLY)

    sim = sub.add_parser("simulate", help="Write synthetic q-Gaussian returns")
    sim.add_argument("--q", type=float, required=True)
    sim.add_argument("--B", type=float, required=True)
    sim.add_argument("--M", type=float, default=0.0)
    sim.add_argument("--n", type=int, required=True)
    sim.add_argument("--seed", type=int, required=True)
    sim.add_argument("--ticker", default="SIM")
    sim.add_argument("--period", type=_period, default=Period.DAILY, help="Date spacing (default: daily)")
    sim.add_argument("--out", required=True)

    bt = sub.add_parser("backtest", help="Run Procedure I or II")
    bt.add_argument("--config", help="dotenv-style config file (defaults when omitted)")
    bt.add_argument("--prices", required=True)
    bt.add_argument("--out", required=True)
    bt.add_argument("--plot", action="store_true", default=settings.plots, help="Also write SVG profiles")
    bt.add_argument("--workers", type=int, default=settings.workers)

    div = sub.add_parser("diversify", help="Profile fits for several portfolio sizes")
    div.add_argument("--config")
    div.add_argument("--prices", required=True)
    div.add_argument("--out", required=True)
    div.add_argument("--per-bin", required=True, help="Comma-separated sizes, e.g. 10,25,50")
    div.add_argument("--workers", type=int, default=settings.workers)
    return p


def dispatch(args: argparse.Namespace) -> dict:
    if args.command == "fit":
        return risk_api.fit_series(args.data, args.ticker, args.start, args.end,
                                   fix_q=args.fix_q, period=args.period, alpha=args.alpha)
    if args.command == "risk":
        return risk_api.risk_between(args.data, args.ticker, args.reference, args.measure,
                                     args.start, args.end, period=args.period)
    if args.command == "ks":
        return risk_api.ks_series(args.data, args.ticker, alpha=args.alpha,
                                  bootstrap=args.bootstrap, seed=args.seed, period=args.period)
    if args.command == "simulate":
        return risk_api.simulate(args.q, args.B, args.M, args.n, args.seed, args.out,
                                 ticker=args.ticker, period=args.period)
    if args.command == "backtest":
        if args.workers < 1:
            raise InputError(f"--workers must be >= 1, got {args.workers}")
        return risk_api.backtest(args.config, args.prices, args.out, plots=args.plot, workers=args.workers)
    if args.command == "diversify":
        if args.workers < 1:
            raise InputError(f"--workers must be >= 1, got {args.workers}")
        return risk_api.diversify(args.config, args.prices, args.out,
                                  risk_api.parse_sizes(args.per_bin), workers=args.workers)
    raise InputError(f"unknown command '{args.command}'")


def main(argv: Optional[List[str]] = None) -> int:
    try:
        settings = get_settings()
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT

    logging.basicConfig(
        level=getattr(logging, settings.log_level),
        format="%(asctime)s %(levelname)s %(name)s %(message)s",
        stream=sys.stderr,
    )
    try:
        args = build_parser(settings).parse_args(argv)
    except SystemExit as exit_:
        # argparse exits 2 on usage errors; those are input errors here
        return EXIT_OK if exit_.code in (0, None) else EXIT_INPUT

    try:
        result = dispatch(args)
    except InputError as e:
        logger.error(f"{args.command}: {e}")
        return EXIT_INPUT
    except (QRiskError, ValueError) as e:
        logger.error(f"{args.command} failed: {e}")
        return EXIT_RUNTIME
    except OSError as e:
        logger.error(f"{args.command}: I/O error: {e}")
        return EXIT_RUNTIME

    print(json.dumps(result, indent=2, sort_keys=True))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
