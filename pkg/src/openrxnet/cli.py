"""Command-line driver.

Subcommands::

    openrxnet compose a.orn b.orn -o out.orn   # glue a's outputs to b's inputs
    openrxnet tensor a.orn b.orn -o out.orn    # side-by-side union
    openrxnet equations f.orn --format text    # open rate equation
    openrxnet simulate f.orn --c0 A=1,B=2 --inflow 1=0.5 --t-end 10 --dt 0.01
    openrxnet blackbox f.orn --samples 20 --seed 1 --json out.json [--linear]
    openrxnet check-laws --seed 0 --cases 50

Exit codes: 0 on success, 1 on a domain error (bad document, mismatched
boundaries, non-finite states, ...), 2 on a usage error.  Every stochastic
path is controlled by ``--seed``; outputs are bit-stable given the seed.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from collections.abc import Sequence
from fractions import Fraction
from pathlib import Path

from .blackbox import (STEADY_TOL, LinearRelation, SteadyTuple,
                       linear_blackbox, partition, sample_blackbox)
from .dsl import parse, render
from .dynamics import (FlowSpec, Profile, Trajectory, emit_equations,
                       grey_box, simulate)
from .errors import DslError, OpenRxnetError
from .finset import DecoratedCospan, compose_open, tensor_open
from .laws import all_suites
from .poly import Poly


def _load(path: str) -> DecoratedCospan:
    text = Path(path).read_text(encoding="utf-8")
    try:
        return parse(text)
    except DslError as exc:
        raise OpenRxnetError(f"{path}: {exc}") from exc


def _write(path: str | None, content: str) -> None:
    if path is None:
        sys.stdout.write(content)
    else:
        Path(path).write_text(content, encoding="utf-8")


def _parse_assignments(text: str | None, what: str) -> dict[str, str]:
    out: dict[str, str] = {}
    if not text:
        return out
    for item in text.split(","):
        if "=" not in item:
            raise OpenRxnetError(f"bad {what} entry {item!r}, expected name=value")
        name, value = item.split("=", 1)
        out[name.strip()] = value.strip()
    return out


_EXPR_TOKEN = re.compile(r"\s*(?:(?P<num>\d+/\d+|\d+\.\d+|\d+)"
                         r"|(?P<t>t)|(?P<op>[*^+-]))")


def parse_time_poly(text: str) -> Poly:
    """Parse a polynomial in ``t``: e.g. ``0.5``, ``1/2 + 0.1*t``, ``t^2``."""
    tokens: list[tuple[str, str]] = []
    pos = 0
    while pos < len(text):
        match = _EXPR_TOKEN.match(text, pos)
        if match is None:
            if text[pos:].strip():
                raise OpenRxnetError(
                    f"bad flow expression {text!r} at position {pos}")
            break
        tokens.append((match.lastgroup, match.group().strip()))
        pos = match.end()

    index = 0

    def peek():
        return tokens[index] if index < len(tokens) else (None, "")

    def factor() -> Poly:
        nonlocal index
        kind, text_ = peek()
        index += 1
        if kind == "num":
            return Poly.constant(Fraction(text_))
        if kind == "t":
            exponent = 1
            if peek() == ("op", "^"):
                index += 1
                kind2, text2 = peek()
                if kind2 != "num" or not text2.isdigit():
                    raise OpenRxnetError(f"bad exponent in {text!r}")
                index += 1
                exponent = int(text2)
            return Poly.monomial({"t": exponent})
        raise OpenRxnetError(f"bad flow expression {text!r}")

    def term() -> Poly:
        nonlocal index
        result = factor()
        while peek() == ("op", "*"):
            index += 1
            result = result * factor()
        return result

    def expr() -> Poly:
        nonlocal index
        negate = False
        if peek() == ("op", "-"):
            index += 1
            negate = True
        result = -term() if negate else term()
        while peek()[0] == "op" and peek()[1] in "+-":
            op = peek()[1]
            index += 1
            nxt = term()
            result = result + nxt if op == "+" else result - nxt
        return result

    if not tokens:
        raise OpenRxnetError("empty flow expression")
    result = expr()
    if index != len(tokens):
        raise OpenRxnetError(f"trailing input in flow expression {text!r}")
    return result


def emit_csv(trajectory: Trajectory) -> str:
    """Rows of ``t`` plus species in canonical order, 17 significant digits."""
    lines = ["t," + ",".join(trajectory.species)]
    for t, row in zip(trajectory.times, trajectory.states):
        lines.append(",".join(f"{value:.17g}" for value in (t, *row)))
    return "\n".join(lines) + "\n"


def _system_info(sys_open: DecoratedCospan) -> dict:
    return {
        "species": list(sys_open.apex),
        "inputs": {p: sys_open.cospan.i(p) for p in sys_open.left},
        "outputs": {p: sys_open.cospan.o(p) for p in sys_open.right},
    }


def emit_json(sys_open: DecoratedCospan,
              result: list[SteadyTuple] | LinearRelation,
              tolerance: float = STEADY_TOL) -> str:
    """Serialize sampled tuples or an exact relation, self-describingly."""
    payload: dict = {"system": _system_info(sys_open)}
    if isinstance(result, LinearRelation):
        coords = ([f"x_conc {p}" for p in sys_open.left]
                  + [f"inflow {p}" for p in sys_open.left]
                  + [f"y_conc {p}" for p in sys_open.right]
                  + [f"outflow {p}" for p in sys_open.right])
        payload["coordinates"] = coords
        payload["basis"] = [[str(q) for q in row] for row in result.basis]
    else:
        payload["tolerance"] = tolerance
        payload["tuples"] = [{
            "x_conc": t.x_conc,
            "inflow": t.inflow,
            "y_conc": t.y_conc,
            "outflow": t.outflow,
        } for t in result]
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _cmd_compose(args) -> int:
    first = _load(args.first)
    second = _load(args.second)
    _write(args.output, render(compose_open(second, first)))
    return 0


def _cmd_tensor(args) -> int:
    first = _load(args.first)
    second = _load(args.second)
    _write(args.output, render(tensor_open(first, second)))
    return 0


def _cmd_equations(args) -> int:
    system = grey_box(_load(args.file))
    text = emit_equations(system, format=args.format)
    sys.stdout.write(text + ("\n" if text else ""))
    return 0


def _cmd_simulate(args) -> int:
    open_net = _load(args.file)
    system = grey_box(open_net)
    c0 = {s: 0.0 for s in system.apex}
    for name, value in _parse_assignments(args.c0, "--c0").items():
        if name not in system.apex:
            raise OpenRxnetError(f"--c0 names unknown species {name!r}")
        c0[name] = float(Fraction(value))
    flows = FlowSpec(
        tuple((p, Profile.polynomial(parse_time_poly(v)))
              for p, v in _parse_assignments(args.inflow, "--inflow").items()),
        tuple((p, Profile.polynomial(parse_time_poly(v)))
              for p, v in _parse_assignments(args.outflow, "--outflow").items()))
    trajectory = simulate(system, c0, flows, args.t_end, args.dt,
                          clamp_nonnegative=args.clamp_nonnegative)
    _write(args.csv, emit_csv(trajectory))
    return 0


def _cmd_blackbox(args) -> int:
    open_net = _load(args.file)
    system = grey_box(open_net)
    if args.linear:
        _write(args.json, emit_json(system, linear_blackbox(system)))
        return 0
    try:
        lo, hi = (float(x) for x in args.box.split(","))
    except ValueError as exc:
        raise OpenRxnetError(f"bad --box {args.box!r}, expected lo,hi") from exc
    boundary = partition(system).boundary
    box = {s: (lo, hi) for s in boundary}
    for name, value in _parse_assignments(args.at, "--at").items():
        if name not in boundary:
            raise OpenRxnetError(f"--at names non-boundary species {name!r}")
        pinned = float(Fraction(value))
        box[name] = (pinned, pinned)
    tuples = sample_blackbox(system, args.samples, box, seed=args.seed)
    _write(args.json, emit_json(system, tuples))
    return 0


def _cmd_check_laws(args) -> int:
    failed = False
    for report in all_suites(seed=args.seed, cases=args.cases):
        print(report.line())
        for failure in report.failures[:5]:
            print(f"  {failure}")
        failed = failed or not report.passed
    return 1 if failed else 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="openrxnet",
        description="Compose, simulate and black-box open reaction networks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compose", help="glue two open networks in sequence")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("-o", "--output")
    p.set_defaults(run=_cmd_compose)

    p = sub.add_parser("tensor", help="place two open networks side by side")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("-o", "--output")
    p.set_defaults(run=_cmd_tensor)

    p = sub.add_parser("equations", help="print the open rate equation")
    p.add_argument("file")
    p.add_argument("--format", choices=("text", "latex"), default="text")
    p.set_defaults(run=_cmd_equations)

    p = sub.add_parser("simulate", help="integrate the open rate equation")
    p.add_argument("file")
    p.add_argument("--c0", help="initial concentrations, e.g. A=1,B=0.5")
    p.add_argument("--inflow", help="per-point inflow polynomials in t")
    p.add_argument("--outflow", help="per-point outflow polynomials in t")
    p.add_argument("--t-end", type=float, default=10.0)
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--csv", help="output path (default: stdout)")
    p.add_argument("--clamp-nonnegative", action="store_true")
    p.set_defaults(run=_cmd_simulate)

    p = sub.add_parser("blackbox",
                       help="sample steady-state behavior, or extract it "
                            "exactly for linear systems")
    p.add_argument("file")
    p.add_argument("--samples", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", help="output path (default: stdout)")
    p.add_argument("--linear", action="store_true")
    p.add_argument("--box", default="0.25,2.0",
                   help="boundary sampling range lo,hi")
    p.add_argument("--at", help="pin boundary species, e.g. A=1,B=1")
    p.set_defaults(run=_cmd_blackbox)

    p = sub.add_parser("check-laws", help="run the randomized law suites")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cases", type=int, default=None)
    p.set_defaults(run=_cmd_check_laws)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.run(args)
    except OpenRxnetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(str(exc), file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
