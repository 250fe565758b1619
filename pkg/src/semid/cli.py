"""Command-line interface: ``semid analyze|decompose|paths|verify|export-dot``."""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .diagram import enumerate_unblocked_paths, ordering_delta
from .exceptions import ModelFileError, NotIdentified, SemIdError, UnknownVariable
from .ident import DEFAULT_BUDGET, IDENTIFIED, INCONCLUSIVE, NO_AUXILIARY_SET, analyze
from .modelfile import load_model
from .recover import round_trip_verify
from .report import dependence_dot, diagram_dot, render_summary, render_verdict, verdict_payload
from .wright import Parameterization, decompose, standardize

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_INPUT = 2
EXIT_PRECONDITION = 3
VERDICT_CODES = {IDENTIFIED: 0, NO_AUXILIARY_SET: 10, INCONCLUSIVE: 11}
EXIT_ANALYSIS_ERROR = 12


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False)


def _ordering(d, delta_seed):
    return ordering_delta(d, seed=delta_seed)


def cmd_analyze(args, out) -> int:
    d = load_model(args.model).diagram()
    try:
        v = analyze(d, _ordering(d, args.delta_seed), budget=args.budget)
        payload = verdict_payload(d, v)
        if args.check_orderings:
            disagreements = []
            for k in range(1, args.check_orderings + 1):
                alt = analyze(d, ordering_delta(d, seed=k), budget=args.budget)
                if alt.status != v.status:
                    disagreements.append(
                        {"delta_seed": k, "verdict": alt.status, "headline": alt.headline(), "ordering": list(alt.order)}
                    )
            payload["ordering_check"] = {"runs": args.check_orderings, "disagreements": disagreements}
    except SemIdError as exc:
        print(f"error: analysis failed: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS_ERROR if args.exit_verdict else EXIT_INPUT
    out.write((_dump(payload) if args.json else render_verdict(payload)) + "\n")
    return VERDICT_CODES[v.status] if args.exit_verdict else EXIT_OK


def cmd_decompose(args, out) -> int:
    model = load_model(args.model)
    d = model.diagram()
    poly = decompose(d, args.x, args.y)
    line = str(poly)
    if args.evaluate:
        if not model.params:
            print("error: --evaluate needs a params block in the model file", file=sys.stderr)
            return EXIT_INPUT
        std, rho = standardize(d, Parameterization(model.params))
        line += f" = {poly.evaluate(std.coeffs):.12g}"
    out.write(line + "\n")
    return EXIT_OK


def cmd_paths(args, out) -> int:
    d = load_model(args.model).diagram()
    paths = enumerate_unblocked_paths(d, args.x, args.y)
    if args.json:
        out.write(_dump([{"path": str(p), "term": "*".join(p.params)} for p in paths]) + "\n")
        return EXIT_OK
    out.write(f"{len(paths)} unblocked path(s) between {args.x} and {args.y}\n")
    for p in paths:
        out.write(f"  {p}    [{'*'.join(p.params)}]\n")
    return EXIT_OK


def cmd_verify(args, out) -> int:
    d = load_model(args.model).diagram()
    v = analyze(d, _ordering(d, args.delta_seed), budget=args.budget)
    try:
        summary = round_trip_verify(d, args.seed, args.trials, scale=args.scale, verdict=v)
    except NotIdentified as exc:
        print(f"error: model is not identified ({exc}); nothing to verify", file=sys.stderr)
        return EXIT_PRECONDITION
    out.write((_dump(summary.as_dict()) if args.json else render_summary(summary)) + "\n")
    return EXIT_OK if not summary.failures else EXIT_VERIFY_FAILED


def cmd_export_dot(args, out) -> int:
    d = load_model(args.model).diagram()
    if args.what == "diagram":
        text = diagram_dot(d)
    else:
        v = analyze(d, _ordering(d, args.delta_seed), budget=args.budget)
        if v.dependence is None:
            print(f"error: no dependence graph: {v.headline()}", file=sys.stderr)
            return EXIT_PRECONDITION
        text = dependence_dot(v.dependence)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semid", description="Graphical identification of recursive linear structural equation models."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def model_arg(p):
        p.add_argument("model", help="model file (YAML) or fixture name: SMOKE, IV, COLL, BOW, WIDE12")

    def search_args(p):
        p.add_argument("--delta-seed", type=int, default=None, help="shuffle equal-depth ties in the ordering")
        p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="cap on candidate combinations")

    p = sub.add_parser("analyze", help="decide identification")
    model_arg(p)
    search_args(p)
    p.add_argument("--json", action="store_true")
    p.add_argument("--check-orderings", type=int, default=0, metavar="N", help="rerun under N shuffled orderings")
    p.add_argument("--exit-verdict", action="store_true", help="exit 0/10/11/12 for identified/no-aux/inconclusive/error")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("decompose", help="path-sum polynomial of a correlation")
    model_arg(p)
    p.add_argument("x")
    p.add_argument("y")
    p.add_argument("--evaluate", action="store_true", help="evaluate at the file's params (standardized)")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("paths", help="list unblocked paths")
    model_arg(p)
    p.add_argument("x")
    p.add_argument("y")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_paths)

    p = sub.add_parser("verify", help="round-trip parameter recovery on random parameterizations")
    model_arg(p)
    search_args(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("export-dot", help="write the diagram or dependence graph as DOT")
    model_arg(p)
    search_args(p)
    p.add_argument("--what", choices=("diagram", "dependence"), default="diagram")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_export_dot)
    return parser


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except ModelFileError as exc:
        print(f"error: {args.model}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except UnknownVariable as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (SemIdError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
