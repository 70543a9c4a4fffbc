"""
Command-line subcommands: sample, theoretical, enumerate, diagnose, posterior, compare
"""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from pydantic import ValidationError

from models import (
    ConfigError,
    DistributionKind,
    EstimatorMode,
    PlotKind,
    PropertyKind,
    PropertySpec,
    RunConfig,
)
from repositories.table_repository import TableFormatError
from services.cardinality import EnumerationRefused
from services.ccm_service import CcmService
from services.graph_codec import GraphParseError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_RUNTIME = 2

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

# Errors in the user's input rather than in the run
INPUT_ERRORS = (ConfigError, GraphParseError, TableFormatError, EnumerationRefused, json.JSONDecodeError,
                FileNotFoundError)

_UNION_TAGS = {k.value for k in DistributionKind}


def format_location(loc: Sequence[Any]) -> str:
    """('model', 'distributions', 0, 'poisson', 'lambda') -> 'model.distributions[0].lambda'"""
    out = ""
    previous_index = False
    for part in loc:
        if isinstance(part, int):
            out += f"[{part}]"
            previous_index = True
            continue
        if previous_index and part in _UNION_TAGS:
            # discriminated-union branch name, not a field
            previous_index = False
            continue
        out += f".{part}" if out else str(part)
        previous_index = False
    return out


def format_validation_error(error: ValidationError) -> List[str]:
    """Path-addressed messages, one per pydantic error"""
    lines = []
    for err in error.errors():
        path = format_location(err.get("loc", ()))
        message = err.get("msg", "")
        cause = (err.get("ctx") or {}).get("error")
        if isinstance(cause, ConfigError):
            if cause.path:
                path = f"{path}.{cause.path}" if path else cause.path
            message = cause.message
        lines.append(f"{path}: {message}" if path else message)
    return lines


# ----------------------------------------------------------------------
# Subcommand handlers
# ----------------------------------------------------------------------

def _apply_overrides(config: RunConfig, args: argparse.Namespace) -> RunConfig:
    model = config.model
    sampler = config.sampler
    if getattr(args, "table", None):
        cardinality = model.cardinality.model_copy(
            update={"mode": EstimatorMode.ORACLE_TABLE, "table_path": Path(args.table)}
        )
        model = model.model_copy(update={"cardinality": cardinality})
    if getattr(args, "debug", False):
        sampler = sampler.model_copy(update={"debug": True})
    return config.model_copy(update={"model": model, "sampler": sampler})


def cmd_sample(service: CcmService, args: argparse.Namespace) -> int:
    config = _apply_overrides(service.load_run_config(args.config), args)
    if args.two_stage:
        diagnostic, ensemble = service.run_two_stage(config, ensemble_size=args.ensemble_size, seed=args.seed)
        print(service.describe_output(config, diagnostic))
        print()
        print(service.describe_output(config, ensemble))
        return EXIT_OK
    outputs = service.sample(config, chains=args.chains, seed=args.seed)
    for i, output in enumerate(outputs):
        if len(outputs) > 1:
            print(f"Chain {i} (seed {output.seed})")
        print(service.describe_output(config, output))
    return EXIT_OK


def cmd_theoretical(service: CcmService, args: argparse.Namespace) -> int:
    config = service.load_run_config(args.config)
    draws = service.theoretical(config, count=args.count, seed=args.seed)
    print(f"Theoretical draws: {len(draws)} rows x {len(draws.columns)} cols")
    return EXIT_OK


def _parse_covariate(text: Optional[str]) -> Optional[List[int]]:
    if not text:
        return None
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError("covariate", f"expected comma-separated integers, got '{text}'")


def cmd_enumerate(service: CcmService, args: argparse.Namespace) -> int:
    covariate = _parse_covariate(args.covariate)
    if covariate is not None and len(covariate) != args.n:
        raise ConfigError("covariate", f"length {len(covariate)} does not match n={args.n}")
    if covariate is not None and args.groups is not None:
        out_of_range = sorted({c for c in covariate if not 0 <= c < args.groups})
        if out_of_range:
            raise ConfigError(
                "covariate", f"labels {out_of_range} outside 0..{args.groups - 1} (--groups {args.groups})"
            )
    specs = []
    for kind in args.property:
        spec = PropertySpec(kind=kind)
        if spec.kind in (PropertyKind.DEGREEDIST, PropertyKind.DEGMIXING, PropertyKind.DEGREEDIST_BY_GROUP):
            spec.max_degree = args.max_degree
        if spec.kind in (PropertyKind.MIXING, PropertyKind.DEGREEDIST_BY_GROUP):
            if covariate is None:
                raise ConfigError("covariate", f"{spec.kind.value} requires --covariate")
            spec.groups = args.groups
        specs.append(spec)

    table = service.enumerate(args.n, specs, covariate, workers=args.workers, path=args.out_table)
    print(f"Classes for n={table.n}: {', '.join(table.names)}")
    for key, size in sorted(table.entries.items()):
        print(f"{' '.join(_format_value(x) for x in key)}\t{size}")
    if table.outside:
        print(f"outside support\t{table.outside}")
    print(f"total\t{table.total}")
    return EXIT_OK


def _format_value(x: Any) -> str:
    return str(int(x)) if float(x).is_integer() else repr(x)


def cmd_diagnose(service: CcmService, args: argparse.Namespace) -> int:
    config = service.load_run_config(args.config)
    kinds = [PlotKind(k) for k in args.kind] if args.kind else None
    summary, report = service.diagnose(
        config, args.stats, theoretical=args.theoretical, seed=args.seed, kinds=kinds
    )
    print(summary)
    for c in report.comparisons:
        ess = f"{c.ess:.1f}" if c.ess is not None else "n/a"
        print(f"{c.name}: KS={c.ks_statistic:.4f} ESS={ess}")
    return EXIT_OK


def cmd_posterior(service: CcmService, args: argparse.Namespace) -> int:
    request = service.load_posterior_request(args.input)
    post, _ = service.posterior(request)
    print(json.dumps(
        {"family": post.family, "mean": post.mean, "sd": post.sd, "a": post.a, "b": post.b}, indent=2
    ))
    return EXIT_OK


def cmd_compare(service: CcmService, args: argparse.Namespace) -> int:
    request = service.load_posterior_request(args.input)
    frame = service.compare(request, seed=args.seed)
    sd = frame.std(ddof=1)
    mean = frame.mean()
    for column in frame.columns:
        print(f"{column:>10}: mean={mean[column]:.5f} sd={sd[column]:.5f}")
    return EXIT_OK


COMMANDS = {
    "sample": cmd_sample,
    "theoretical": cmd_theoretical,
    "enumerate": cmd_enumerate,
    "diagnose": cmd_diagnose,
    "posterior": cmd_posterior,
    "compare": cmd_compare,
}


# ----------------------------------------------------------------------
# Parser
# ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ccmnet",
        description="Congruence class model sampling, enumeration and diagnostics",
    )
    parser.add_argument("--log-level", default="INFO",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"])
    parser.add_argument("--out", type=Path, default=None,
                        help="Output directory (default: run config, then CCM_OUTPUT_DIR)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="Run the MCMC sampler")
    p.add_argument("--config", required=True, type=Path)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--chains", type=int, default=1)
    p.add_argument("--two-stage", action="store_true",
                   help="Diagnostic run, then an ensemble run from its final state")
    p.add_argument("--ensemble-size", type=int, default=10)
    p.add_argument("--table", type=Path, default=None, help="Enumeration table (switches to oracle mode)")
    p.add_argument("--debug", action="store_true", help="Verify cached statistics and rejected moves")

    p = sub.add_parser("theoretical", help="Draw directly from the class distributions")
    p.add_argument("--config", required=True, type=Path)
    p.add_argument("--count", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("enumerate", help="Exact congruence class sizes for small n")
    p.add_argument("--n", required=True, type=int)
    p.add_argument("--property", required=True, action="append",
                   choices=[k.value for k in PropertyKind])
    p.add_argument("--max-degree", type=int, default=None)
    p.add_argument("--groups", type=int, default=None)
    p.add_argument("--covariate", default=None, help="Comma-separated group label per node")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out-table", type=Path, default=None, help="Table file (default: <out>/table_n<N>.json)")

    p = sub.add_parser("diagnose", help="Summaries, comparison and plot data for a stats table")
    p.add_argument("--config", required=True, type=Path)
    p.add_argument("--stats", required=True, type=Path)
    p.add_argument("--theoretical", type=Path, default=None)
    p.add_argument("--kind", action="append", choices=[k.value for k in PlotKind])
    p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("posterior", help="Posterior over density and a ready-to-run CCM config")
    p.add_argument("--input", required=True, type=Path)

    p = sub.add_parser("compare", help="Posterior CCM against G(n,m) and Bernoulli comparators")
    p.add_argument("--input", required=True, type=Path)
    p.add_argument("--seed", type=int, default=None)
    return parser


def configure_logging(level: str) -> None:
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr)
    logging.getLogger().setLevel(level)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one subcommand; returns the process exit code"""
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        # argparse has already printed usage; --help exits 0
        return EXIT_OK if e.code in (0, None) else EXIT_INVALID
    configure_logging(args.log_level)
    service = CcmService(output_dir=args.out)
    try:
        return COMMANDS[args.command](service, args)
    except ValidationError as e:
        for line in format_validation_error(e):
            print(f"error: {line}", file=sys.stderr)
        return EXIT_INVALID
    except INPUT_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as e:
        logger.error(f"{args.command} failed: {type(e).__name__}: {e}", exc_info=True)
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_RUNTIME


__all__ = ["main", "build_parser", "format_location", "format_validation_error"]
