"""Command-line front end.

Usage:
    shiftlike analyze --system paper-example-sec4 --horizon 100 --q-max 4
    shiftlike series  --system paper-example-sec4 --what dissipative-products --q 0 --horizon 50
    shiftlike witness --system paper-example-sec4 --epsilon 0.1 --cells=-3:3 --k-max 60
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys

from .config import resolve_system
from .correspondence import weights_from_profile
from .criteria import (
    build_transitivity_witness,
    dissipative_product_sequence,
    general_condition_search,
    shift_product_sequence,
    verify_witness,
)
from .errors import ConfigError, EpsilonTooLarge, NotFound, ShiftlikeError
from .operator_core import StepFunction
from .report import analyze
from .system_model import DensityLineSystem, distortion_scan

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_NOT_FOUND = 4


def _positive_int(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return value


def _p_value(text):
    value = float(text)
    if not 1 <= value < math.inf:
        raise argparse.ArgumentTypeError("p must lie in [1, inf)")
    return value


def parse_cells(text: str, refinement: int) -> list[tuple[int, int]]:
    """``"-3:3"`` (whole cells k = -3..3) or a comma list of ``k`` or ``k.j`` items."""
    n = 2**refinement
    text = text.strip()
    if ":" in text and "," not in text:
        lo, hi = (int(s) for s in text.split(":"))
        return [(k, j) for k in range(lo, hi + 1) for j in range(n)]
    cells = []
    for item in text.split(","):
        item = item.strip()
        if "." in item:
            k, j = item.split(".")
            cells.append((int(k), int(j)))
        else:
            cells.extend((int(item), j) for j in range(n))
    return cells


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--system", required=True, help="built-in name or path to a JSON config")
    common.add_argument("--p", type=_p_value, default=2.0)
    common.add_argument("--horizon", type=_positive_int, default=1000)
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--threads", type=int, default=1)

    parser = argparse.ArgumentParser(prog="shiftlike", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", parents=[common], help="full JSON report")
    a.add_argument("--q-max", type=_positive_int, default=8)
    a.add_argument("--log-tol", type=float, default=math.log(1e-12))
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--no-timestamp", action="store_true")
    a.add_argument("--epsilon", type=float, help="also search a witness for this epsilon")

    s = sub.add_parser("series", parents=[common], help="CSV series n,log_value")
    s.add_argument("--what", required=True, choices=["shift-products", "dissipative-products", "distortion"])
    s.add_argument("--q", type=int, default=0)

    w = sub.add_parser("witness", parents=[common], help="witness JSON")
    w.add_argument("--epsilon", type=float, required=True)
    w.add_argument("--cells", default="-3:3", help="'lo:hi' or comma list of k / k.j")
    w.add_argument("--refinement", type=_positive_int, default=0)
    w.add_argument("--k-max", type=_positive_int, default=200)
    w.add_argument("--build-v", action="store_true",
                   help="build v = g 1_B' + lambda^-1 (h o f^-k) 1_{f^k B'} with g = h = 1_B")
    w.add_argument("--allow-degenerate", action="store_true")
    return parser


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run_analyze(args) -> int:
    system_id, system = resolve_system(args.system, args.p)
    echo = {
        "system": system.to_config(),
        "p": args.p,
        "horizon": args.horizon,
        "q_max": args.q_max,
        "log_tol": args.log_tol,
        "seed": args.seed,
        "epsilon": args.epsilon,
    }
    report = analyze(
        system_id, system, p=args.p, horizon=args.horizon, q_max=args.q_max, log_tol=args.log_tol,
        threads=args.threads, seed=args.seed, timestamp=not args.no_timestamp,
        witness_epsilon=args.epsilon, config_echo=echo,
    )
    _emit(json.dumps(report, indent=2, allow_nan=False) + "\n", args.out)
    return EXIT_OK


def run_series(args) -> int:
    _, system = resolve_system(args.system, args.p)
    h, q = args.horizon, args.q
    if h == 0:
        rows = []
    elif args.what == "dissipative-products":
        profile = system.profile((q - h, q + h))
        rows = list(enumerate(dissipative_product_sequence(profile, q, h), start=1))
    elif args.what == "shift-products":
        profile = system.profile((q - h, q + h))
        weights = weights_from_profile(profile, args.p)
        rows = list(enumerate(shift_product_sequence(weights, q, h), start=1))
    else:
        if isinstance(system, DensityLineSystem):
            scan = distortion_scan(system, (-h, h))
            rows = [(r.k, r.log_rho_sup - r.log_rho_inf) for r in scan.records]
        else:
            rows = [(k, 0.0) for k in range(-h, h + 1)]
    buf = io.StringIO()
    buf.write("n,log_value\n")
    for n, value in rows:
        buf.write(f"{n},{float(value)!r}\n")
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def run_witness(args) -> int:
    _, system = resolve_system(args.system, args.p)
    cells = parse_cells(args.cells, args.refinement)
    if args.build_v:
        g = StepFunction({c: 1.0 for c in cells}, args.refinement, args.p)
        built = build_transitivity_witness(g, g, system, args.p, args.epsilon, args.k_max)
        payload = built.to_dict()
        if built.witness is not None:
            check = verify_witness(system, built.witness)
            check.pop("log_values")
            payload["verification"] = check
    else:
        wit = general_condition_search(system, cells, args.epsilon, args.k_max, args.p,
                                       refinement=args.refinement, allow_degenerate=args.allow_degenerate)
        check = verify_witness(system, wit)
        check.pop("log_values")
        payload = {**wit.to_dict(), "verification": check}
    _emit(json.dumps(payload, indent=2, allow_nan=False) + "\n", args.out)
    return EXIT_OK


COMMANDS = {"analyze": run_analyze, "series": run_series, "witness": run_witness}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, EpsilonTooLarge) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NotFound as exc:
        lo, hi = exc.scanned or (None, None)
        print(f"not found: {exc} (scanned k in [{lo}, {hi}])", file=sys.stderr)
        return EXIT_NOT_FOUND
    except (ShiftlikeError, ArithmeticError, ValueError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
