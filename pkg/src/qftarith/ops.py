"""Build, simulate and decode one arithmetic operation on classical inputs."""
from __future__ import annotations

from dataclasses import dataclass

from .builders import ArithCircuit, build
from .errors import DivisionByZero, LoopBoundExceeded, NegativeExponent, UnknownOp
from .ir import encode_signed
from .simulator import RunResult, run

ALIASES = {
    "add": "qnmadd", "sub": "qnmsub", "mul": "qnmmul", "mulv2": "qnmmulv2",
    "div": "qnmdiv", "exp": "qexp", "tc": "qtc", "neg": "qtc", "abs": "qabs",
    "cmp": "qcomp", "comp": "qcomp",
}
OPS = ("qnmadd", "qmadd", "qnmsub", "qmsub", "qtc", "qabs", "qcomp", "qnmmul", "qnmmulv2",
       "qnmdiv", "qexp")
UNARY = ("qtc", "qabs")
COMPARISON = {(1, 0, 0): "a>b", (0, 1, 0): "a<b", (0, 0, 1): "a=b"}


def canonical(op: str, modular: bool = False) -> str:
    name = ALIASES.get(op, op)
    if modular and name in ("qnmadd", "qnmsub"):
        name = "qm" + name[3:]
    if name not in OPS:
        raise UnknownOp(f"unknown operation {op!r}")
    return name


@dataclass
class Outcome:
    op: str
    value: int | str
    registers: dict[str, int]
    iterations: dict[str, int]
    deterministic: bool
    circuit: ArithCircuit
    run: RunResult


def make_circuit(op: str, na: int, nb: int | None = None, modular: bool = False,
                 **options) -> ArithCircuit:
    name = canonical(op, modular)
    if name in UNARY:
        return build(name, na)
    return build(name, na, nb, **{k: v for k, v in options.items() if v is not None})


def decode(circuit: ArithCircuit, result: RunResult) -> tuple[int | str, dict[str, int]]:
    state = result.final_state
    regs = circuit.read(state)
    if circuit.name == "qcomp":
        flags = tuple(state.read(circuit.registers[c], signed=False) for c in ("c0", "c1", "c2"))
        return COMPARISON.get(flags, "invalid"), regs
    return regs["result"], regs


def execute(circuit: ArithCircuit, a: int, b: int | None = None, seed: int = 0) -> Outcome:
    values = {"a": a} if "b" not in circuit.inputs else {"a": a, "b": b}
    for name, v in values.items():
        encode_signed(v, circuit.registers[name].width)
    if circuit.name == "qnmdiv" and b == 0:
        raise DivisionByZero("divisor is zero")
    if circuit.name == "qexp" and b < 0:
        raise NegativeExponent("exponent must be >= 0")
    try:
        res = run(circuit.program, circuit.initial_bits(**values), seed=seed)
    except LoopBoundExceeded as exc:
        if exc.label == "div":
            raise DivisionByZero("divisor is zero") from exc
        if exc.label.startswith("exp"):
            raise NegativeExponent("exponent must be >= 0") from exc
        raise
    value, regs = decode(circuit, res)
    return Outcome(circuit.name, value, regs, dict(res.iterations_used), res.deterministic,
                   circuit, res)


def compute(op: str, a: int, na: int, b: int | None = None, nb: int | None = None,
            modular: bool = False, seed: int = 0, **options) -> Outcome:
    """Run one operation, e.g. ``compute("mul", 3, 3, -2, 3).value == -6``."""
    circuit = make_circuit(op, na, nb, modular, **options)
    if circuit.name not in UNARY:
        encode_signed(a, na)
        encode_signed(b, nb)
    return execute(circuit, a, b, seed)
