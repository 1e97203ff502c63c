"""Command-line front end: ``qftarith {compute,verify,count,export}``.

Exit codes: 0 success, 1 verification failures, 2 bad range or widths,
3 division by zero, 4 negative exponent, 5 unsupported export, 6 a sweep
over the qubit cap.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from .errors import (DivisionByZero, NegativeExponent, RangeError, ResourceBound, UnknownOp,
                     UnsupportedExport, WidthError)
from .ir import Register, dumps
from .blocks import build_iqft, build_qft
from .ops import UNARY, canonical, compute, make_circuit
from .qasm import to_qasm
from .resources import ALL_OPS, BASELINES, BLOCK_OPS, comparison_rows, comparison_table, report
from .verify import SweepSpec, run_properties, run_sweep, sweep_json, sweep_junit

EXIT_CODES = [
    (RangeError, 2), (WidthError, 2), (DivisionByZero, 3), (NegativeExponent, 4),
    (UnsupportedExport, 5), (ResourceBound, 6),
]

LOOP_OPS = ("qnmmul", "qnmmulv2", "qnmdiv", "qexp")
VERIFY_ALL = ("qnmadd", "qnmsub", "qmadd", "qmsub", "qtc", "qabs", "qcomp", "qnmmul",
              "qnmmulv2", "qnmdiv", "qexp")


def parse_range(text: str) -> list[int]:
    """``"4"`` or ``"2..8"`` (inclusive)."""
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(text)]


def _builder_options(args) -> dict:
    opts = {}
    if getattr(args, "result_width", None) is not None:
        opts["result_width"] = args.result_width
    if getattr(args, "preserve", None) is not None:
        opts["preserve"] = args.preserve
    if getattr(args, "sign_prep", None):
        opts["sign_prep"] = args.sign_prep
    return opts


def _resolve_options(name: str, opts: dict) -> dict:
    out = dict(opts)
    preserve = out.pop("preserve", None)
    if preserve is not None:
        key = {"qnmmul": "preserve_b", "qexp": "preserve_b"}.get(name, "preserve_inputs")
        if name in UNARY or name == "qcomp" or name == "qnmmulv2":
            raise WidthError(f"{name} has no input-preservation option")
        out[key] = preserve
    if "sign_prep" in out and name not in ("qnmadd", "qnmsub"):
        out.pop("sign_prep")
    return out


# -- compute ----------------------------------------------------------------

def cmd_compute(args) -> int:
    name = canonical(args.op, args.modular)
    opts = _resolve_options(name, _builder_options(args))
    if name not in UNARY and (args.b is None or args.nb is None):
        raise WidthError(f"{name} needs --b and --nb")
    out = compute(name, args.a, args.na, args.b, args.nb, seed=args.seed, **opts)
    regs = out.circuit.register_map()
    if args.format == "json":
        payload = {
            "format_version": 1, "op": out.op, "result": out.value,
            "registers": {k: {"qubits": regs[k], "value": v} for k, v in out.registers.items()},
            "iterations": out.iterations, "deterministic": out.deterministic,
        }
        if args.counts:
            payload["resources"] = report(name, args.na, args.nb, **opts).to_dict()
        print(json.dumps(payload, indent=2))
        return 0
    print(out.value)
    for k, v in out.registers.items():
        print(f"  {k:<8} = {v:>6}   qubits {regs[k]}")
    if out.iterations:
        print("  iterations: " + ", ".join(f"{k}={v}" for k, v in out.iterations.items()))
    if args.counts:
        r = report(name, args.na, args.nb, **opts)
        print(f"  weighted {r.weighted_total}, formula {r.paper_formula_value}, delta {r.delta}")
    return 0


# -- verify -------------------------------------------------------------------

def cmd_verify(args) -> int:
    ops = VERIFY_ALL if args.op == "all" else (canonical(args.op, args.modular),)
    reports = []
    for name in ops:
        max_n = args.max_n if args.max_n is not None else (3 if name in LOOP_OPS else 4)
        n_range = tuple(parse_range(args.n)) if args.n else tuple(range(2, max_n + 1))
        m_range = tuple(parse_range(args.m)) if args.m else None
        opts = _resolve_options(name, _builder_options(args))
        spec = SweepSpec(name, n_range, m_range, options=tuple(sorted(opts.items())))
        reports.append(run_sweep(spec, workers=args.workers))
    props = run_properties() if args.properties else []
    ok = all(r.ok for r in reports) and all(p.passed for p in props)
    if args.format == "json":
        text = sweep_json(reports)
        if props:
            data = json.loads(text)
            data["properties"] = [p.__dict__ for p in props]
            text = json.dumps(data, indent=2)
    elif args.format == "junit":
        text = sweep_junit(reports)
    else:
        lines = []
        for r in reports:
            lines.append(f"{r.summary()} ({r.elapsed:.1f}s)")
            lines += [f"  n={f.n} m={f.m} inputs={f.inputs}: expected {f.expected}, "
                      f"got {f.got} ({f.reason})" for f in r.failures[:10]]
        lines += [f"property {p.name}: {'pass' if p.passed else 'FAIL'} ({p.detail})"
                  for p in props]
        text = "\n".join(lines)
    _emit(text, args.output)
    return 0 if ok else 1


# -- count ----------------------------------------------------------------------

def cmd_count(args) -> int:
    ops = ALL_OPS if args.op == "all" else (_count_name(args.op, args.modular),)
    n_range = parse_range(args.n)
    m_range = parse_range(args.m) if args.m else None
    if args.format in ("csv", "json"):
        _emit(comparison_table(ops, n_range, m_range, args.format), args.output)
        return 0
    for row in comparison_rows(ops, n_range, m_range):
        formula = row["paper_formula"]
        print(f"{row['op']} n={row['n']} m={row['m']}: weighted {row['weighted_total']}, "
              f"formula {formula}, delta {row['delta']}, qubits {row['qubits_total']}, "
              f"ancilla {row['ancilla']}")
    return 0


def _count_name(op: str, modular: bool) -> str:
    if op in BLOCK_OPS or op in BASELINES:
        return op
    return canonical(op, modular)


# -- export ------------------------------------------------------------------------

def cmd_export(args) -> int:
    if args.op in ("qft", "iqft"):
        reg = Register("x", tuple(range(args.n)))
        program = build_qft(reg) if args.op == "qft" else build_iqft(reg)
        registers = {"x": list(reg.qubits)}
        name = args.op
    else:
        name = canonical(args.op, args.modular)
        opts = _resolve_options(name, _builder_options(args))
        circuit = make_circuit(name, args.n, args.m if args.m is not None else args.n, **opts)
        program, registers = circuit.program, circuit.register_map()
    if args.format == "qasm":
        text = to_qasm(program)
    else:
        text = dumps(program, format_version=1, op=name, registers=registers)
    _emit(text, args.output)
    return 0


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text.rstrip("\n"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qftarith", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--op", required=True)
        p.add_argument("--modular", action="store_true",
                       help="use the wrap-around adder/subtractor")
        p.add_argument("--result-width", type=int)
        p.add_argument("--preserve", dest="preserve", action="store_true", default=None,
                       help="work on copies so inputs survive")
        p.add_argument("--no-preserve", dest="preserve", action="store_false")
        p.add_argument("--sign-prep", choices=("extend", "literal"))

    p = sub.add_parser("compute", help="run one operation on classical inputs")
    common(p)
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--na", type=int, required=True)
    p.add_argument("--b", type=int)
    p.add_argument("--nb", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--counts", action="store_true", help="also print the resource summary")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("verify", help="exhaustive oracle sweep")
    common(p)
    p.add_argument("--max-n", type=int)
    p.add_argument("--n")
    p.add_argument("--m")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--properties", action="store_true", help="also run the property suite")
    p.add_argument("--format", choices=("text", "json", "junit"), default="text")
    p.add_argument("--output")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("count", help="gate counts against the closed forms")
    p.add_argument("--op", required=True)
    p.add_argument("--modular", action="store_true")
    p.add_argument("--n", required=True)
    p.add_argument("--m")
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.add_argument("--output")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("export", help="write a circuit as JSON or OpenQASM 2.0")
    common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int)
    p.add_argument("--format", choices=("json", "qasm"), default="json")
    p.add_argument("--output")
    p.set_defaults(func=cmd_export)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UnknownOp as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return 2
    except tuple(cls for cls, _ in EXIT_CODES) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return next(code for cls, code in EXIT_CODES if isinstance(exc, cls))


if __name__ == "__main__":
    sys.exit(main())
