"""``angular-ur`` entry point.

Exit codes: 0 when every evaluated relation and suite assertion matches its
expectation, 1 when an assertion failed (the report lists which), 2 for input
or usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys

from .. import __version__
from ..errors import AngularURError
from ..numerics import DEFAULT_PERIODIC_SIZE
from ..relations import DEFAULT_TOL
from . import documents as docs
from . import suites

TOOL = "angular-ur"
DEFAULT_SEED = 12345
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

CSV_COLUMNS = ("section", "name", "lhs", "rhs", "gap", "status", "computed", "expected",
               "error", "tol", "passed")

log = logging.getLogger("angular_ur")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _positive_float(text: str) -> float:
    v = float(text)
    if not (math.isfinite(v) and v > 0):
        raise argparse.ArgumentTypeError(f"expected a positive finite number, got {text!r}")
    return v


def _grid_size(text: str) -> int:
    v = int(text)
    if v < 16:
        raise argparse.ArgumentTypeError("grid needs at least 16 nodes")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--hbar", type=_positive_float, default=1.0, help="reduced Planck constant (default 1)")
    common.add_argument("--grid", type=_grid_size, default=DEFAULT_PERIODIC_SIZE,
                        help="periodic grid size for sampled adjusting functions (default 2048)")
    common.add_argument("--tol", type=_positive_float, default=DEFAULT_TOL,
                        help="verdict tolerance on lhs - rhs (default 1e-10)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"master seed (default {DEFAULT_SEED})")
    common.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")

    p = _Parser(prog=TOOL, description="Fluctuation relations for angular observables.")
    p.add_argument("--version", action="version", version=f"{TOOL} {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", parents=[common], help="moments and all applicable relations of one state")
    a.add_argument("--state", required=True, help="state document: file path, inline JSON, or - for stdin")

    v = sub.add_parser("verify", parents=[common], help="run a reproduction suite")
    v.add_argument("--suite", required=True, choices=(*suites.SUITES, "all"))

    s = sub.add_parser("search", parents=[common], help="coefficient search on one shell")
    s.add_argument("--config", required=True, help="search config: file path, inline JSON, or -")

    sub.add_parser("oracle-check", parents=[common], help="coefficient path against grid and closed forms")
    return p


def _dispatch(args, settings: suites.Settings) -> dict:
    if args.command == "analyze":
        spec, hbar = docs.parse_state_document(docs.read_json_argument(args.state, "state"), args.hbar)
        return suites.analyze(spec, hbar, settings)
    if args.command == "verify":
        return suites.verify(args.suite, settings)
    if args.command == "search":
        raw = docs.read_json_argument(args.config, "config")
        return suites.run_search(docs.parse_search_config(raw, args.seed, args.hbar))
    return suites.oracle_check(settings)


def _csv_rows(node, section: str = ""):
    if isinstance(node, dict):
        sec = node.get("suite") or node.get("family") or section
        if "relation" in node and "status" in node:
            yield {"section": sec, "name": node["relation"], **{k: node.get(k) for k in ("lhs", "rhs", "gap", "status")}}
        elif "passed" in node and "name" in node:
            row = {k: node.get(k) for k in ("computed", "error", "tol", "passed")}
            row["expected"] = node.get("expected", node.get("bound"))
            yield {"section": sec, "name": node["name"], **row}
        elif "operator" in node and "stddev" in node:
            yield {"section": sec, "name": f"stddev({node['operator']})", "computed": node["stddev"]}
        elif "quantity" in node and "delta" in node:
            yield {"section": sec, "name": node["quantity"], "error": node["delta"]}
        for key, value in node.items():
            if key != "details":
                yield from _csv_rows(value, sec)
    elif isinstance(node, list):
        for item in node:
            yield from _csv_rows(item, section)


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, list):
        return json.dumps(v)
    return repr(v) if isinstance(v, float) else str(v)


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return docs.dumps_report(report)
    plain = docs.to_jsonable(report)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    w.writerow({"section": "settings", "name": "tool", "computed": f"{TOOL} {__version__}"})
    for key, value in plain["settings"].items():
        w.writerow({"section": "settings", "name": key, "computed": _cell(value)})
    for row in _csv_rows({k: v for k, v in plain.items() if k != "settings"}, plain["command"]):
        w.writerow({k: _cell(row.get(k)) for k in CSV_COLUMNS})
    return buf.getvalue()


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    settings = suites.Settings(hbar=args.hbar, grid=args.grid, tol=args.tol, seed=args.seed)
    try:
        report = _dispatch(args, settings)
    except docs.DocumentError as exc:
        field = f" (field {exc.field!r})" if exc.field else ""
        print(f"{TOOL}: input error{field}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AngularURError as exc:
        print(f"{TOOL}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE

    report = {"tool": TOOL, "version": __version__, "settings": settings.as_dict(), **report}
    sys.stdout.write(render(report, args.format))
    if not report["passed"]:
        for name in report["failed"]:
            print(f"{TOOL}: FAILED {name}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
