import argparse
import json
import logging
import sys
from typing import List, Optional, Tuple

from pydantic import TypeAdapter, ValidationError
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from pareto_preprocess.config import settings
from pareto_preprocess.core.errors import (
    GenerationRetryExceeded,
    InstanceValidationError,
    ParetoError,
    VerificationFailure,
)
from pareto_preprocess.core.generator import (
    GeneratorConfig,
    GeneratorMode,
    PointMode,
    generate,
)
from pareto_preprocess.core.processor import ParetoProcessor, bench
from pareto_preprocess.core.schema import BenchRecord
from pareto_preprocess.output.renderer import render_svg
from pareto_preprocess.utils.io import read_instance, write_model, write_text

# Configure Rich Logging
logging.basicConfig(
    level="INFO",
    format="%(message)s",
    datefmt="[%X]",
    handlers=[RichHandler(rich_tracebacks=True)],
)

console = Console()

EXIT_VALIDATION = 1
EXIT_VERIFICATION = 2
EXIT_IO = 3


def parse_ratios(text: str) -> Tuple[float, float]:
    try:
        r, p = (float(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'r,p', got {text!r}")
    return r, p


def build_parser(version: str) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pareto-preprocess",
        description=f"""
Pareto front reconstruction for uncertain points (v{version})
=============================================================
Preprocesses disjoint uncertainty rectangles, then rebuilds the Pareto front
of the hidden points with as few metered retrievals as possible.

Examples:
  1. Generate an instance:
     $ pareto-preprocess gen --seed 1 --n 16 --mode staircase --points corners --out inst.json

  2. Reconstruct and report the cost:
     $ pareto-preprocess run --instance inst.json --cost 10

  3. Check a run against the brute-force front and the lower bound:
     $ pareto-preprocess verify --instance inst.json --ratios 8,8 --debug-assert

  4. Preprocessing counts over n = 2^10 .. 2^14:
     $ pareto-preprocess bench --min-exp 10 --max-exp 14
""",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument(
        "-v", "--verbose", action="store_true", help="Enable verbose debug logging."
    )
    parser.add_argument(
        "--version", action="store_true", help="Show version info and exit."
    )

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--instance", help="Instance JSON file.")
    common.add_argument("-o", "--out", help="Output file (stdout when omitted).")
    common.add_argument(
        "--cost", type=float, default=None, help="Retrieval cost C (default 10)."
    )
    common.add_argument(
        "--ratios",
        type=parse_ratios,
        default=None,
        help="Allowed retrieval and predicate ratios as 'r,p' (default 8,8).",
    )
    common.add_argument(
        "--debug-assert",
        action="store_true",
        help="Cross-check every reconstruction step against brute force.",
    )

    gen_opts = argparse.ArgumentParser(add_help=False)
    gen_opts.add_argument("--seed", type=int, default=0, help="Random seed.")
    gen_opts.add_argument(
        "--mode",
        type=GeneratorMode,
        choices=list(GeneratorMode),
        default=GeneratorMode.SPLIT,
        help="Region layout.",
    )
    gen_opts.add_argument(
        "--points",
        type=PointMode,
        choices=list(PointMode),
        default=PointMode.UNIFORM,
        help="Point placement inside regions.",
    )

    sub = parser.add_subparsers(dest="command")
    gen = sub.add_parser("gen", parents=[common, gen_opts], help="Generate an instance.")
    gen.add_argument("--n", type=int, default=8, help="Number of regions.")
    sub.add_parser("preprocess", parents=[common], help="Write the auxiliary structure.")
    sub.add_parser("run", parents=[common], help="Reconstruct the front.")
    sub.add_parser("verify", parents=[common], help="Verify a run against oracles.")
    sub.add_parser("bound", parents=[common], help="Write the lower-bound report.")
    bench_cmd = sub.add_parser(
        "bench", parents=[common, gen_opts], help="Measure cost scaling."
    )
    bench_cmd.add_argument("--min-exp", type=int, default=10, help="Smallest n = 2^k.")
    bench_cmd.add_argument("--max-exp", type=int, default=14, help="Largest n = 2^k.")
    sub.add_parser("svg", parents=[common], help="Render a debug picture.")
    return parser


def _emit(args: argparse.Namespace, text: str) -> None:
    if args.out:
        write_text(args.out, text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def _require_instance(parser: argparse.ArgumentParser, args: argparse.Namespace) -> None:
    if not args.instance:
        parser.error(f"{args.command} needs --instance")


def dispatch(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    processor = ParetoProcessor(
        retrieval_cost=args.cost,
        debug=args.debug_assert or None,
        ratios=args.ratios,
    )

    if args.command == "gen":
        config = GeneratorConfig(
            seed=args.seed, n=args.n, mode=args.mode, point_mode=args.points
        )
        _emit(args, generate(config).model_dump_json(indent=2))
        return 0

    if args.command == "bench":
        sizes = [2**k for k in range(args.min_exp, args.max_exp + 1)]
        records = bench(sizes, seed=args.seed, mode=args.mode, point_mode=args.points)
        table = Table(title="Preprocessing and reconstruction counts")
        for column in ("n", "preprocess ops", "ops / n log n", "retrievals", "evals"):
            table.add_column(column, justify="right")
        for r in records:
            norm = r.preprocess_ops / (r.n * max(1.0, r.n.bit_length() - 1))
            table.add_row(
                str(r.n),
                f"{r.preprocess_ops:.0f}",
                f"{norm:.2f}",
                str(r.retrievals),
                str(r.predicate_evals),
            )
        console.print(table)
        payload = TypeAdapter(List[BenchRecord]).dump_json(records, indent=2)
        if args.out:
            write_text(args.out, payload.decode() + "\n")
        return 0

    _require_instance(parser, args)
    inst = read_instance(args.instance)

    if args.command == "preprocess":
        _emit(args, processor.prepare(inst).model_dump_json(indent=2))
    elif args.command == "run":
        report = processor.run_report(inst)
        console.print(
            f"[bold green]Front reconstructed[/]: {len(report.front)} entries, "
            f"{report.ledger.retrievals} retrievals, cp={report.cp.value:.2f}",
            highlight=False,
        )
        if args.out:
            write_model(args.out, report)
        else:
            print(report.model_dump_json(indent=2))
    elif args.command == "verify":
        verdict = processor.verify(inst)
        console.print(
            f"[bold green]Verified[/]: retrievals={verdict.retrievals} "
            f"(lower bound {verdict.retrieval_lower_bound}), "
            f"ratios {verdict.retrieval_ratio:.2f}/{verdict.predicate_ratio:.2f}",
            highlight=False,
        )
        if args.out:
            write_model(args.out, verdict)
    elif args.command == "bound":
        _emit(args, processor.bound(inst).model_dump_json(indent=2))
    elif args.command == "svg":
        aux, front, _ = processor.run(inst)
        _emit(args, render_svg(inst, aux, front))
    return 0


def run_cli(argv: Optional[List[str]] = None) -> int:
    try:
        from importlib.metadata import version

        __version__ = version("pareto-preprocess")
    except Exception:
        __version__ = "unknown"

    parser = build_parser(__version__)
    args = parser.parse_args(argv)

    if args.version:
        print(f"pareto-preprocess v{__version__}")
        return 0
    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)
    if not args.command:
        parser.print_help()
        return 0
    logging.getLogger(__name__).debug(f"Settings: {settings.model_dump()}")

    try:
        return dispatch(parser, args)
    except InstanceValidationError as e:
        console.print(f"[bold red]Error:[/] invalid instance: {e} (ids: {e.ids})")
        return EXIT_VALIDATION
    except VerificationFailure as e:
        console.print(f"[bold red]Error:[/] verification failed: {e}")
        return EXIT_VERIFICATION
    except (OSError, json.JSONDecodeError, ValidationError) as e:
        console.print(f"[bold red]Error:[/] {e}")
        return EXIT_IO
    except (GenerationRetryExceeded, ParetoError) as e:
        console.print(f"[bold red]Error:[/] {e}")
        if args.verbose:
            console.print_exception()
        return EXIT_VALIDATION


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
