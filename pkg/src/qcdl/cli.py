"""Command-line driver.

Argument handling and I/O live here; all circuit work goes through the
service handlers, so the CLI sees exactly what an HTTP client would.
Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

import argparse
import sys

from fastapi import HTTPException
from pydantic import ValidationError

from .service import models
from .service import app as _service

# flag spelling for each example parameter, for usage diagnostics
_FLAG_OF = {"n": "-n", "l": "-l", "t": "-t", "expr": "--expr",
            "reversible": "--reversible", "oracle_only": "--oracle-only"}


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


def _call(fn, req=None):
    """Invoke a service handler, mapping error bodies to exit codes."""
    try:
        return fn(req) if req is not None else fn()
    except HTTPException as e:
        detail = e.detail if isinstance(e.detail, dict) else {}
        kind = detail.get("kind", "domain")
        message = detail.get("message", str(e.detail))
        raise CliError(2 if kind == "bad-request" else 1, message) from e


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcdl", description="circuit-description toolkit")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    sub.add_parser("list", help="list the example generators")

    ex = sub.add_parser("example", help="build an example circuit")
    ex.add_argument("name", help="example name (see 'qcdl list')")
    ex.add_argument("-n", type=int, default=None, help="size parameter")
    ex.add_argument("-l", type=int, default=None, help="register width")
    ex.add_argument("-t", type=float, default=None, help="rotation angle")
    ex.add_argument("--expr", default=None, help="boolean expression, e.g. '(xor v0 v1)'")
    ex.add_argument("--reversible", action="store_true",
                    help="emit the (x,y) -> (x, y xor f(x)) embedding")
    ex.add_argument("--oracle-only", dest="oracle_only", action="store_true",
                    help="emit the bare lifted oracle (default)")
    ex.add_argument("--with-w", dest="with_w", action="store_true",
                    help="register the W matrix and inverse metadata")
    ex.add_argument("-f", "--format", choices=("text", "ascii", "gatecount"),
                    default="text", help="output format (default text)")
    ex.add_argument("--decompose", choices=("none", "toffoli", "binary"),
                    default="none", help="rewrite to a smaller gate base")
    ex.add_argument("--reverse", action="store_true", help="reverse the circuit")
    ex.add_argument("--inline", action="store_true", help="flatten all calls")
    ex.add_argument("--simulate", action="store_true",
                    help="run the circuit and print the result instead")
    ex.add_argument("--input", default=None,
                    help="input bit string for --simulate (default all zeros)")
    ex.add_argument("--seed", type=int, default=0, help="simulation seed")
    ex.add_argument("--shots", type=int, default=1,
                    help="repeat the run and print classical-output counts")
    ex.add_argument("--plain", action="store_true", help="7-bit ascii art")
    ex.add_argument("--width", type=int, default=100, help="ascii art width")

    ck = sub.add_parser("check", help="parse and validate a circuit file")
    ck.add_argument("file", nargs="?", default="-",
                    help="text-format circuit file ('-' or omitted: stdin)")

    sv = sub.add_parser("serve", help="run the HTTP service")
    sv.add_argument("--host", default="127.0.0.1")
    sv.add_argument("--port", type=int, default=8000)
    return parser


def _cmd_list() -> int:
    listing = _call(_service.list_examples)
    name_w = max(len(e.name) for e in listing.examples)
    flag_strs = [" ".join(_FLAG_OF[p] for p in e.params) or "-"
                 for e in listing.examples]
    flags_w = max(len(s) for s in flag_strs)
    for e, flags in zip(listing.examples, flag_strs):
        print(f"{e.name:<{name_w}}  {flags:<{flags_w}}  {e.description}")
    return 0


def _example_params(args) -> dict:
    params: dict[str, bool | int | float | str] = {}
    if args.n is not None:
        params["n"] = args.n
    if args.l is not None:
        params["l"] = args.l
    if args.t is not None:
        params["t"] = args.t
    if args.expr is not None:
        params["expr"] = args.expr
    if args.reversible:
        params["reversible"] = True
    if args.oracle_only:
        params["oracle_only"] = True
    return params


def _cmd_example(args) -> int:
    listing = _call(_service.list_examples)
    spec = next((e for e in listing.examples if e.name == args.name), None)
    if spec is None:
        raise CliError(2, f"unknown example '{args.name}' (see 'qcdl list')")
    params = _example_params(args)
    for key in params:
        if key not in spec.params:
            raise CliError(2, f"example '{args.name}' does not take {_FLAG_OF[key]}")

    built = _call(_service.build_example, models.BuildRequest(
        name=args.name, params=params, with_w=args.with_w))
    text = built.text
    if args.reverse or args.decompose != "none" or args.inline:
        text = _call(_service.transform, models.TransformRequest(
            text=text, reverse=args.reverse, decompose=args.decompose,
            inline=args.inline)).text

    if args.simulate:
        result = _call(_service.simulate, models.SimulateRequest(
            text=text, input=args.input, seed=args.seed, shots=args.shots))
        sys.stdout.write(result.text)
        return 0
    rendered = _call(_service.render, models.RenderRequest(
        text=text, format=args.format, plain=args.plain, width=args.width))
    sys.stdout.write(rendered.output)
    return 0


def _cmd_check(args) -> int:
    if args.file == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(args.file, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as e:
            raise CliError(1, str(e)) from e
    verdict = _call(_service.validate, models.ValidateRequest(text=text))
    if not verdict.ok:
        for problem in verdict.problems:
            print(problem, file=sys.stderr)
        return 1
    print(f"ok: {verdict.gates} gates, {verdict.inputs} inputs, "
          f"{verdict.outputs} outputs, {verdict.subroutines} subroutines")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("qcdl.service.app:app", host=args.host, port=args.port)
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "list":
            return _cmd_list()
        if args.command == "example":
            return _cmd_example(args)
        if args.command == "check":
            return _cmd_check(args)
        return _cmd_serve(args)
    except CliError as e:
        print(f"qcdl: {e.message}", file=sys.stderr)
        return e.code
    except ValidationError as e:
        # request models enforce value floors (render width, shot count)
        first = e.errors()[0]
        field = ".".join(str(part) for part in first["loc"])
        print(f"qcdl: {field}: {first['msg']}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
