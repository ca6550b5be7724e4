"""
--- Command Line ---

Loads spec files, dispatches the commands coeffs, check, flow, lvdef, lie
and catalog and writes the report to stdout as JSON, or as text with
`--text`. Diagnostics go to stderr through the run logger.

Exit codes: 0 success, 1 failed check verdict, 2 spec or parse error,
3 domain error at a point, 4 missing required input.

License:  Apache-2.0 license
"""

import sys
import argparse
from typing import List, Optional

try:
    from src.SubRiem.manifold import ManifoldSpec, load_spec, to_document
    from src.SubRiem.catalog import load_catalog, get_entry, export_specs, golden_error
    from src.SubRiem.subriem import SubRiem, render_text
    from src.SubRiem.utils.cons import OPERATOR_NAMES, SPECS_DIRECTORY_PATH
    from src.SubRiem.utils.errors import SubRiemError, SpecError
    from src.SubRiem.utils.fileutils import can_read
    from src.SubRiem.utils.runlogger import RunLogger, get_run_id
    from src.SubRiem.utils.serialization import dumps
    from src.SubRiem.utils.utils import handle_exception, parse_csv_floats
except ImportError:
    from manifold import ManifoldSpec, load_spec, to_document
    from catalog import load_catalog, get_entry, export_specs, golden_error
    from subriem import SubRiem, render_text
    from utils.cons import OPERATOR_NAMES, SPECS_DIRECTORY_PATH
    from utils.errors import SubRiemError, SpecError
    from utils.fileutils import can_read
    from utils.runlogger import RunLogger, get_run_id
    from utils.serialization import dumps
    from utils.utils import handle_exception, parse_csv_floats


def resolve_spec(argument: str) -> ManifoldSpec:
    """
    Load a spec from a file path, or a built-in spec by name when no such
    file exists.

    Raises:
        SpecError: If neither a readable file nor a built-in name matches.
    """

    if can_read(argument):
        return load_spec(argument)

    try:
        return get_entry(argument).spec
    except KeyError:
        pass

    raise SpecError(f"{argument}: cannot read spec file")


def parse_vector(value: Optional[str], option: str) -> Optional[List[float]]:
    """
    Parse a comma separated option value.

    Raises:
        SpecError: If an item is not a number.
    """

    if value is None:
        return None

    try:
        return parse_csv_floats(value)
    except ValueError as exc:
        raise SpecError(f"{option}: {exc}") from exc


def parse_points(values: Optional[List[str]]) -> Optional[List[List[float]]]:
    if not values:
        return None

    return [parse_vector(value, "--point") for value in values]


def build_parser() -> argparse.ArgumentParser:
    """
    The argument parser with one sub-command per report.
    """

    common = argparse.ArgumentParser(add_help = False)
    common.add_argument("--threads", type = int, default = None,
                        help = "worker threads, capped by SUBRIEM_THREADS")
    common.add_argument("--vertical-scaling", "--lambda", dest = "vertical_scaling",
                        type = float, default = None, help = "override the spec's λ")
    common.add_argument("--text", action = "store_true", help = "human readable output")

    parser = argparse.ArgumentParser(
        prog = "subriem", description = "Sub-Laplacians of sub-Riemannian frames."
    )
    commands = parser.add_subparsers(dest = "command", required = True)

    coeffs = commands.add_parser("coeffs", parents = [common], help = "local coefficients")
    coeffs.add_argument("spec", help = "spec file or built-in spec name")
    coeffs.add_argument("operator", choices = OPERATOR_NAMES)
    coeffs.add_argument("--tau", default = None, help = "density expression or name")
    coeffs.add_argument("--point", action = "append", default = None,
                        help = "comma separated point, repeatable")

    check = commands.add_parser("check", parents = [common],
                                help = "is m·L^V the divergence of grad_H for τ")
    check.add_argument("spec")
    check.add_argument("--tau", default = None)
    check.add_argument("--tol", type = float, default = None)
    check.add_argument("--point", action = "append", default = None)

    flow = commands.add_parser("flow", parents = [common], help = "Hamilton-Jacobi flow")
    flow.add_argument("spec")
    flow.add_argument("--x", default = None)
    flow.add_argument("--p", default = None)
    flow.add_argument("--t", type = float, default = None)
    flow.add_argument("--steps", type = int, default = None)
    flow.add_argument("--sample-every", dest = "sample_every", type = int, default = None)

    lvdef = commands.add_parser("lvdef", parents = [common], help = "definitional L^V")
    lvdef.add_argument("spec")
    lvdef.add_argument("--f", default = None)
    lvdef.add_argument("--point", action = "append", default = None)
    lvdef.add_argument("--samples", type = int, default = None)
    lvdef.add_argument("--h", type = float, default = None)
    lvdef.add_argument("--seed", type = int, default = None)
    lvdef.add_argument("--steps", type = int, default = None)
    lvdef.add_argument("--richardson", action = "store_true", default = None)

    lie = commands.add_parser("lie", parents = [common], help = "Lie group data")
    lie.add_argument("spec")
    lie.add_argument("--seed", type = int, default = None)

    catalog = commands.add_parser("catalog", parents = [common], help = "built-in specs")
    catalog.add_argument("--out", default = None,
                         help = f"write spec files, e.g. {SPECS_DIRECTORY_PATH}")
    catalog.add_argument("--verify", action = "store_true",
                         help = "recompute every golden value")

    return parser


def _settings(arguments: argparse.Namespace) -> dict:
    settings = {
        "threads": arguments.threads,
        "vertical_scaling": arguments.vertical_scaling
    }

    for key in ("steps", "samples", "h", "seed", "richardson", "sample_every"):
        if hasattr(arguments, key):
            settings[key] = getattr(arguments, key)

    return settings


def catalog_report(out: Optional[str] = None, verify: bool = False) -> dict:
    """
    List the built-in specs, write them as files with `out` and check
    their golden values with `verify`.
    """

    entries = load_catalog()
    file_paths = export_specs(out) if out is not None else [None] * len(entries)

    report_entries = []
    for entry, file_path in zip(entries, file_paths):
        item = {
            "name": entry.name,
            "dimension": entry.spec.dimension,
            "horizontal_rank": entry.spec.horizontal_rank,
            "goldens": len(entry.goldens)
        }

        if file_path is not None:
            item["file"] = file_path
        else:
            item["document"] = to_document(entry.spec)

        if verify:
            failed = [
                golden.name for golden in entry.goldens
                if golden_error(entry.spec, golden) > golden.tolerance
            ]
            item["failed_goldens"] = failed

        report_entries.append(item)

    return {"command": "catalog", "entries": report_entries}


def run(arguments: argparse.Namespace) -> tuple:
    """
    Execute a parsed command.

    Returns:
        tuple: The report and the exit code.
    """

    if arguments.command == "catalog":
        report = catalog_report(arguments.out, arguments.verify)
        failed = any(entry.get("failed_goldens") for entry in report["entries"])
        return report, 1 if failed else 0

    spec = resolve_spec(arguments.spec)
    subriem = SubRiem(spec, _settings(arguments), arguments.command)

    exit_code = 0
    if arguments.command == "coeffs":
        report = subriem.coeffs_report(
            arguments.operator, arguments.tau, parse_points(arguments.point)
        )
    elif arguments.command == "check":
        report = subriem.check_report(arguments.tau, arguments.tol, parse_points(arguments.point))
        exit_code = 0 if report["verdict"] == "pass" else 1
    elif arguments.command == "flow":
        report = subriem.flow_report(
            parse_vector(arguments.x, "--x"), parse_vector(arguments.p, "--p"), arguments.t
        )
    elif arguments.command == "lvdef":
        report = subriem.lvdef_report(arguments.f, parse_points(arguments.point))
    else:
        report = subriem.lie_report()

    subriem.run_logger.log(exit_code = exit_code, end_of_information = True)
    return report, exit_code


def main(argv: Optional[List[str]] = None) -> int:
    """
    Entry point of the command line interface.

    Args:
        argv (Optional[List[str]]): Arguments without the program name,
                                    sys.argv[1:] when omitted.

    Returns:
        int: The process exit code.
    """

    parser = build_parser()
    arguments = parser.parse_args(argv)

    try:
        report, exit_code = run(arguments)
    except SubRiemError as exc:
        run_logger = RunLogger(get_run_id([arguments.command, getattr(arguments, "spec", "")]))
        run_logger.log(
            command = arguments.command, error = type(exc).__name__,
            message = str(exc), exit_code = exc.exit_code, end_of_information = True
        )
        handle_exception(f"error: {exc}")
        return exc.exit_code
    except ValueError as exc:
        handle_exception(f"error: {exc}")
        return SpecError.exit_code

    if arguments.text:
        sys.stdout.write(render_text(report))
    else:
        sys.stdout.write(dumps(report) + "\n")

    return exit_code


if __name__ == "__main__":
    print("cli.py: This file is not designed to be executed.")
