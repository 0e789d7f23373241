"""Command-line front end: seeded sweeps to CSV.

Exit codes: 0 success, 2 config/validation error, 3 numerical failure
(singular systems, non-convergent quadrature), 4 I/O failure.
"""

from __future__ import annotations

import argparse
import os
import re
import sys

from .errors import ComputationError, ConfigError
from .experiments import (
    DEFAULT_CRLB_POWER_DBM,
    DEFAULT_LB_SPACINGS,
    DEFAULT_POWER_GRID_DBM,
    DEFAULT_SIZES,
    DEFAULT_SPACING_GRID,
    SweepRequest,
    csv_text,
    dump_model_csv,
    emit_csv,
    run_bias_vs_spacing,
    run_crlb_vs_spacing,
    run_impedance_sweep,
    run_lb_vs_power,
    run_mc_rmse,
)
from .scenario import default_scenario, load_scenario_file


def _float_list(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _size_list(text: str) -> list[tuple[int, int]]:
    sizes = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        parts = tok.lower().split("x")
        if len(parts) != 2:
            raise argparse.ArgumentTypeError(f"expected sizes like 4x4, got {tok!r}")
        try:
            sizes.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected sizes like 4x4, got {tok!r}")
    if not sizes:
        raise argparse.ArgumentTypeError("size list is empty")
    return sizes


def _add_common(parser):
    parser.add_argument("--config", metavar="FILE", help="scenario config (YAML)")
    parser.add_argument("--seed", type=int, metavar="N",
                        help="override the scenario master seed")
    parser.add_argument("--out", metavar="CSV",
                        help="output path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ris-mcrb",
        description="Mutual-coupling impact on RIS-assisted channel estimation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("impedance-sweep",
                       help="two-element mutual impedance vs separation")
    _add_common(p)
    p.add_argument("--distances-over-lambda", type=_float_list,
                   default=DEFAULT_SPACING_GRID, metavar="LIST")

    p = sub.add_parser("lb-vs-power",
                       help="mismatched bound (and optional RMSE) vs transmit power")
    _add_common(p)
    p.add_argument("--powers-dbm", type=_float_list,
                   default=DEFAULT_POWER_GRID_DBM, metavar="LIST")
    p.add_argument("--spacings-over-lambda", type=_float_list,
                   default=DEFAULT_LB_SPACINGS, metavar="LIST")
    p.add_argument("--trials", type=int, default=0, metavar="N",
                   help="Monte-Carlo trials per point (0 = bounds only)")
    p.add_argument("--matched", action="store_true",
                   help="estimate with the coupling-aware model")
    p.add_argument("--dump-model", metavar="DIR",
                   help="debug: write the complex model matrices as CSV")

    p = sub.add_parser("bias-vs-spacing",
                       help="SNR-independent error floor vs element spacing")
    _add_common(p)
    p.add_argument("--spacings-over-lambda", type=_float_list,
                   default=DEFAULT_SPACING_GRID, metavar="LIST")
    p.add_argument("--sizes", type=_size_list, default=DEFAULT_SIZES, metavar="LIST")

    p = sub.add_parser("crlb-vs-spacing",
                       help="matched bound vs element spacing at fixed power")
    _add_common(p)
    p.add_argument("--power-dbm", type=float, default=DEFAULT_CRLB_POWER_DBM,
                   metavar="P")
    p.add_argument("--spacings-over-lambda", type=_float_list,
                   default=DEFAULT_SPACING_GRID, metavar="LIST")
    p.add_argument("--sizes", type=_size_list, default=DEFAULT_SIZES, metavar="LIST")

    p = sub.add_parser("mc-rmse",
                       help="Monte-Carlo estimator RMSE alongside the bounds")
    _add_common(p)
    p.add_argument("--powers-dbm", type=_float_list,
                   default=DEFAULT_POWER_GRID_DBM, metavar="LIST")
    p.add_argument("--spacings-over-lambda", type=_float_list,
                   default=DEFAULT_LB_SPACINGS, metavar="LIST")
    p.add_argument("--trials", type=int, default=500, metavar="N")
    p.add_argument("--matched", action="store_true",
                   help="estimate with the coupling-aware model")
    p.add_argument("--noiseless", action="store_true",
                   help="suppress observation noise (deterministic residual)")
    p.add_argument("--dump-model", metavar="DIR",
                   help="debug: write the complex model matrices as CSV")

    return parser


# argparse only tolerates a leading dash on plain negative numbers, not on
# comma lists like "-10,0,10"; fold such values into --flag=value form.
_LIST_FLAGS = ("--powers-dbm", "--distances-over-lambda",
               "--spacings-over-lambda", "--power-dbm")
_NUMBER_LIST = re.compile(r"^-[0-9.eE+,-]+$")


def _fold_negative_lists(argv):
    out = []
    skip = False
    for i, token in enumerate(argv):
        if skip:
            skip = False
            continue
        if (token in _LIST_FLAGS and i + 1 < len(argv)
                and _NUMBER_LIST.match(argv[i + 1])):
            out.append(f"{token}={argv[i + 1]}")
            skip = True
        else:
            out.append(token)
    return out


def _scenario_from_args(args):
    scenario = load_scenario_file(args.config) if args.config else default_scenario()
    if args.seed is not None:
        scenario = scenario.with_overrides(seed=args.seed)
    return scenario


def _model_sink(directory):
    os.makedirs(directory, exist_ok=True)

    def sink(d_over_lambda, n1, n2, d_true, d_est):
        tag = f"d{d_over_lambda:g}_{n1}x{n2}"
        dump_model_csv(d_true.complex_model,
                       os.path.join(directory, f"b_true_{tag}.csv"))
        dump_model_csv(d_est.complex_model,
                       os.path.join(directory, f"b_est_{tag}.csv"))

    return sink


def _run(args):
    scenario = _scenario_from_args(args)
    if args.command == "impedance-sweep":
        return run_impedance_sweep(scenario, args.distances_over_lambda)
    if args.command == "lb-vs-power":
        request = SweepRequest(
            kind="lb_vs_power", scenario=scenario,
            power_grid=args.powers_dbm,
            spacing_grid=args.spacings_over_lambda,
            trials=args.trials, matched=args.matched,
        )
        sink = _model_sink(args.dump_model) if args.dump_model else None
        return run_lb_vs_power(request, model_sink=sink)
    if args.command == "bias-vs-spacing":
        request = SweepRequest(
            kind="bias_vs_spacing", scenario=scenario,
            spacing_grid=args.spacings_over_lambda, sizes=args.sizes,
        )
        return run_bias_vs_spacing(request)
    if args.command == "crlb-vs-spacing":
        request = SweepRequest(
            kind="crlb_vs_spacing", scenario=scenario,
            power_grid=[args.power_dbm],
            spacing_grid=args.spacings_over_lambda, sizes=args.sizes,
        )
        return run_crlb_vs_spacing(request)
    if args.command == "mc-rmse":
        request = SweepRequest(
            kind="mc_rmse", scenario=scenario,
            power_grid=args.powers_dbm,
            spacing_grid=args.spacings_over_lambda,
            trials=args.trials, matched=args.matched,
            noiseless=args.noiseless,
        )
        sink = _model_sink(args.dump_model) if args.dump_model else None
        return run_mc_rmse(request, model_sink=sink)
    raise ValueError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_fold_negative_lists(argv))
    try:
        result = _run(args)
        if args.out:
            emit_csv(result, args.out)
        else:
            sys.stdout.write(csv_text(result))
    except (ConfigError, ValueError) as exc:
        print(f"ris-mcrb: config error: {exc}", file=sys.stderr)
        return 2
    except ComputationError as exc:
        print(f"ris-mcrb: numerical failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"ris-mcrb: I/O error: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
