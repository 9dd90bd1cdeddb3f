"""
RTT command line: CDFs, quantiles, critical values, the critical-value table,
crossing points and Monte Carlo checks for the robust one-sample t-test.

Run from project root:
  python scripts/robust_t.py critical --model G --dof 3 --alpha 0.025
  python scripts/robust_t.py table --format csv --output out/table.csv
  python scripts/robust_t.py simulate --spec two_point_scale:1,10,0.5 --n 11 --alpha 0.025 --model G --seed 7

Data goes to stdout (or --output); diagnostics to stderr. Exit codes: 0 ok,
2 usage or domain error, 3 infeasible level.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd

PROJECT_ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(PROJECT_ROOT))

from components.records import OutputRecord  # noqa: E402
from models import gmix, symt  # noqa: E402
from models.robust_test import FINITE_MODELS, MODELS, critical_value, evaluate_cdf, evaluate_quantile  # noqa: E402
from utils.config import get_section  # noqa: E402
from utils.errors import (  # noqa: E402
    CapabilityError,
    DomainError,
    InfeasibleLevelError,
    RTTError,
    SpecError,
)
from utils.logging_setup import configure_logging  # noqa: E402
from validation.mcsim import MixtureSpec, adversarial_attainment, type_one_error  # noqa: E402

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3

DEFAULT_DOFS = list(range(2, 26)) + [100, 500, 1000]
DEFAULT_ALPHAS = [0.125, 0.100, 0.050, 0.025]


def _parse_float_list(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _parse_dof_range(text: str) -> List[int]:
    """'2:25' (inclusive), '2,3,100', or a mix like '2:25,100,500'."""
    dofs: List[int] = []
    try:
        for part in text.split(","):
            part = part.strip()
            if not part:
                continue
            if ":" in part:
                lo, hi = part.split(":", 1)
                dofs.extend(range(int(lo), int(hi) + 1))
            else:
                dofs.append(int(part))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad dof range {text!r}") from exc
    return dofs


def _sample_size(args: argparse.Namespace) -> Optional[int]:
    if getattr(args, "n", None) is not None:
        return args.n
    if getattr(args, "dof", None) is not None:
        return args.dof + 1
    return None


def _add_size_options(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--n", type=int, help="sample size")
    group.add_argument("--dof", type=int, help="degrees of freedom (table row label, n - 1)")


def build_parser() -> argparse.ArgumentParser:
    output_cfg = get_section("output")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default=output_cfg.get("format", "csv"))
    common.add_argument("--output", type=Path, default=None, help="write here instead of stdout")
    common.add_argument("--verbose", action="store_true", help="DEBUG logging on stderr")

    parser = argparse.ArgumentParser(prog="robust_t", description="Robust t-test numerics.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cdf", parents=[common], help="CDF and upper tail at a threshold")
    p.add_argument("--model", choices=MODELS, required=True)
    threshold = p.add_mutually_exclusive_group(required=True)
    threshold.add_argument("--x", type=float, help="t-statistic threshold")
    threshold.add_argument("--a", type=float, help="ratio-scale threshold")
    _add_size_options(p)

    p = sub.add_parser("quantile", parents=[common], help="left-continuous quantile")
    p.add_argument("--model", choices=MODELS, required=True)
    p.add_argument("--p", type=float, required=True)
    _add_size_options(p)

    p = sub.add_parser("critical", parents=[common], help="critical value at one-sided level alpha")
    p.add_argument("--model", choices=FINITE_MODELS, default="G")
    p.add_argument("--alpha", type=float, required=True)
    _add_size_options(p)

    p = sub.add_parser("table", parents=[common], help="critical-value table, rows by degrees of freedom")
    p.add_argument("--model", choices=("classic", "G"), default="G")
    p.add_argument("--dof-range", type=_parse_dof_range, default=None, help="e.g. 2:25,100,500,1000")
    p.add_argument("--alphas", type=_parse_float_list, default=None, help="e.g. 0.125,0.1,0.05,0.025")

    p = sub.add_parser("crossings", parents=[common], help="crossing points of consecutive k-curves")
    p.add_argument("--k-max", type=int, default=10)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo type-I error or attainment")
    p.add_argument("--spec", required=True, help="mixture kind[:params], or 'adversarial'")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha", type=float, default=0.025)
    p.add_argument("--model", choices=FINITE_MODELS, default="G")
    p.add_argument("--a", type=float, default=None, help="ratio threshold for --spec adversarial")
    p.add_argument("--reps", type=int, default=None)
    p.add_argument("--seed", type=int, required=True)
    return parser


def _frame(rows: Sequence[dict]) -> pd.DataFrame:
    return pd.DataFrame(list(rows))


def cmd_cdf(args: argparse.Namespace) -> OutputRecord:
    n = _sample_size(args)
    value = evaluate_cdf(args.model, x=args.x, a=args.a, n=n)
    row = {
        "model": value.model,
        "n": value.n if value.n is not None else "",
        "x": value.x,
        "a": value.a,
        "cdf": value.cdf,
        "tail": value.tail,
    }
    if args.model == "S" and value.provenance == "exact":
        row["m"] = int(round(value.tail * 2 ** value.n))
    row["provenance"] = value.provenance
    inputs = {"model": args.model, "x": args.x, "a": args.a, "n": n}
    return OutputRecord(command="cdf", inputs=inputs, outputs=_frame([row]))


def cmd_quantile(args: argparse.Namespace) -> OutputRecord:
    n = _sample_size(args)
    value = evaluate_quantile(args.model, args.p, n=n)
    row = {
        "model": value.model,
        "n": value.n if value.n is not None else "",
        "p": value.p,
        "x": value.x,
        "provenance": value.provenance,
    }
    return OutputRecord(command="quantile", inputs={"model": args.model, "p": args.p, "n": n}, outputs=_frame([row]))


def cmd_critical(args: argparse.Namespace) -> OutputRecord:
    n = _sample_size(args)
    if n is None:
        raise DomainError("critical needs --n or --dof")
    value = critical_value(args.model, n, args.alpha)
    row = {
        "model": value.model,
        "n": value.n,
        "dof": value.n - 1,
        "alpha": value.alpha,
        "x": value.x,
        "a": value.a,
        "provenance": value.provenance,
    }
    inputs = {"model": args.model, "n": n, "alpha": args.alpha}
    return OutputRecord(command="critical", inputs=inputs, outputs=_frame([row]))


def cmd_table(args: argparse.Namespace) -> OutputRecord:
    cfg = get_section("table")
    dofs = args.dof_range if args.dof_range is not None else [int(d) for d in cfg.get("dof", DEFAULT_DOFS)]
    alphas = args.alphas if args.alphas is not None else [float(a) for a in cfg.get("alphas", DEFAULT_ALPHAS)]
    if args.model == "G":
        frame = gmix.generate_table(dofs, alphas).to_frame()
    else:
        values = np.array([[gmix.classical_critical_value(d + 1, a) for a in alphas] for d in dofs])
        frame = gmix.CriticalTable(dofs=dofs, alphas=alphas, values=values).to_frame()
    frame["provenance"] = "exact"
    inputs = {"model": args.model, "dofs": ",".join(str(d) for d in dofs), "alphas": ",".join(f"{a:g}" for a in alphas)}
    return OutputRecord(command="table", inputs=inputs, outputs=frame)


def cmd_crossings(args: argparse.Namespace) -> OutputRecord:
    if args.k_max < 2:
        raise DomainError(f"--k-max must be >= 2, got {args.k_max}")
    rows = []
    for k in range(2, args.k_max + 1):
        point = gmix.crossing_point(k)
        rows.append({"k": point.k, "a_star": point.a_star, "a_star_squared": point.a_star_squared, "provenance": "exact"})
    return OutputRecord(command="crossings", inputs={"k_max": args.k_max}, outputs=_frame(rows))


def cmd_simulate(args: argparse.Namespace) -> OutputRecord:
    cfg = get_section("simulation")
    reps = args.reps if args.reps is not None else int(cfg.get("reps", 100_000))
    block_size = int(cfg.get("block_size", 1000))
    inputs = {"spec": args.spec, "n": args.n, "reps": reps, "seed": args.seed}

    if args.spec == "adversarial":
        if args.a is None:
            raise DomainError("--spec adversarial needs --a")
        epsilon = float(cfg.get("adversarial_epsilon", 1e-9))
        report = adversarial_attainment(args.n, args.a, reps, args.seed, epsilon=epsilon, block_size=block_size)
        inputs["a"] = args.a
        row = {
            "n": report.n,
            "a": report.a,
            "k": report.k,
            "reps": report.reps,
            "seed": report.seed,
            "hits": report.hits,
            "empirical": report.empirical,
            "theoretical": report.theoretical,
            "std_error": report.std_error,
            "consistent": report.consistent,
            "provenance": "monte-carlo",
        }
        return OutputRecord(command="simulate", inputs=inputs, outputs=_frame([row]))

    spec = MixtureSpec.parse(args.spec)
    mu = float(cfg.get("mu", 0.0))
    report = type_one_error(spec, args.n, args.alpha, args.model, reps, args.seed, mu=mu, block_size=block_size)
    inputs.update({"alpha": args.alpha, "model": args.model})
    row = {
        "spec": spec.label,
        "n": report.n,
        "alpha": report.alpha,
        "mu": report.mu,
        "model": report.model,
        "reps": report.reps,
        "seed": report.seed,
        "critical_value": report.critical_value,
        "rejections": report.rejections,
        "estimate": report.estimate,
        "std_error": report.std_error,
        "nominal": report.nominal,
        "conservative": report.conservative,
        "provenance": "monte-carlo",
    }
    return OutputRecord(command="simulate", inputs=inputs, outputs=_frame([row]))


COMMANDS = {
    "cdf": cmd_cdf,
    "quantile": cmd_quantile,
    "critical": cmd_critical,
    "table": cmd_table,
    "crossings": cmd_crossings,
    "simulate": cmd_simulate,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    configure_logging(verbose=args.verbose)

    digits = int(get_section("output").get("significant_digits", 6))
    try:
        record = COMMANDS[args.command](args)
    except InfeasibleLevelError as exc:
        print(f"error: {exc} (minimum level {exc.minimum_level:g})", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (DomainError, SpecError, CapabilityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RTTError as exc:
        logger.error("%s failed: %s", args.command, exc)
        return 1

    text = record.write(args.output, fmt=args.format, digits=digits)
    if args.output is None:
        sys.stdout.write(text)
    else:
        logger.info("wrote %s", args.output)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
