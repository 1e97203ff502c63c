"""Exhaustive basis-input sweeps against the reference oracles."""
from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable

from ..builders import ArithCircuit
from ..errors import ResourceBound
from ..ir import signed_range
from ..ops import UNARY, canonical, execute, make_circuit
from . import oracles

MAX_QUBITS = 24

Expect = Callable[[int, int, int, int, ArithCircuit], Any]

ORACLES: dict[str, Expect] = {
    "add": lambda a, b, n, m, c: oracles.add(a, b),
    "sub": lambda a, b, n, m, c: oracles.sub(a, b),
    "mod_add": lambda a, b, n, m, c: oracles.mod_add(a, b, n),
    "mod_sub": lambda a, b, n, m, c: oracles.mod_sub(a, b, n),
    "negate": lambda a, b, n, m, c: oracles.negate(a, n),
    "absolute": lambda a, b, n, m, c: oracles.absolute(a, n),
    "compare": lambda a, b, n, m, c: oracles.compare(a, b),
    "multiply": lambda a, b, n, m, c: oracles.multiply(a, b, c.result.width),
    "trunc_div": lambda a, b, n, m, c: oracles.trunc_div(a, b),
    "power": lambda a, b, n, m, c: oracles.power(a, b, c.result.width),
}

PREDICATES: dict[str, Callable[[int, int, int, int], bool]] = {
    "b_nonzero": lambda a, b, n, m: b != 0,
    "b_nonnegative": lambda a, b, n, m: b >= 0,
    "a_not_min": lambda a, b, n, m: a != -(1 << (n - 1)),
}

DEFAULTS = {
    "qnmadd": ("add", None), "qnmsub": ("sub", None),
    "qmadd": ("mod_add", None), "qmsub": ("mod_sub", None),
    "qtc": ("negate", None), "qabs": ("absolute", None),
    "qcomp": ("compare", None),
    "qnmmul": ("multiply", None), "qnmmulv2": ("multiply", None),
    "qnmdiv": ("trunc_div", "b_nonzero"), "qexp": ("power", "b_nonnegative"),
}


def expected_iterations(op: str, a: int, b: int) -> dict[str, int]:
    if op in ("qnmmul", "qnmmulv2"):
        return {"mul": abs(b)}
    if op == "qnmdiv":
        return {"div": abs(a) // abs(b) + 1}
    if op == "qexp":
        return {"exp": b}
    return {}


@dataclass(frozen=True)
class SweepSpec:
    """One operation swept over every signed input at each ``(n, m)``.

    ``oracle`` and ``predicate`` default per operation; ``options`` go to
    the circuit builder, and a callable value is evaluated at each width,
    e.g. ``(("result_width", lambda n, m: n + 1),)``.
    """

    op: str
    n_range: tuple[int, ...]
    m_range: tuple[int, ...] | None = None
    predicate: str | None = None
    oracle: str | None = None
    options: tuple[tuple[str, Any], ...] = ()
    modular: bool = False
    max_qubits: int = MAX_QUBITS

    @property
    def name(self) -> str:
        return canonical(self.op, self.modular)

    def widths(self) -> list[tuple[int, int]]:
        out = []
        for n in self.n_range:
            if self.name in UNARY:
                out.append((n, 0))
                continue
            ms = self.m_range if self.m_range is not None else range(2, n + 1)
            out += [(n, m) for m in ms if 2 <= m <= n]
        return out


@dataclass(frozen=True)
class Failure:
    n: int
    m: int
    inputs: tuple[int, ...]
    expected: Any
    got: Any
    reason: str


@dataclass
class WidthResult:
    n: int
    m: int
    qubits: int
    cases: int
    failures: list[Failure]


@dataclass
class SweepReport:
    op: str
    widths: list[WidthResult]
    elapsed: float = field(default=0.0, compare=False)

    @property
    def cases(self) -> int:
        return sum(w.cases for w in self.widths)

    @property
    def failures(self) -> list[Failure]:
        return [f for w in self.widths for f in w.failures]

    @property
    def ok(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        return f"{self.op}: {self.cases} cases, {len(self.failures)} failures"


def _build(spec: SweepSpec, n: int, m: int) -> ArithCircuit:
    opts = {k: v(n, m) if callable(v) else v for k, v in spec.options}
    return make_circuit(spec.op, n, m or None, spec.modular, **opts)


def _check_case(spec: SweepSpec, circuit: ArithCircuit, oracle: Expect,
                a: int, b: int, n: int, m: int) -> Failure | None:
    unary = circuit.name in UNARY
    inputs = (a,) if unary else (a, b)
    want = oracle(a, b, n, m, circuit)
    try:
        out = execute(circuit, a, None if unary else b)
    except Exception as exc:  # a raised error is a failed case, not a crashed sweep
        return Failure(n, m, inputs, want, None, f"{type(exc).__name__}: {exc}")
    if out.value != want:
        return Failure(n, m, inputs, want, out.value, "wrong result")
    if not out.deterministic:
        return Failure(n, m, inputs, want, out.value, "non-deterministic measurement")
    initial = {"a": a, "b": b}
    for name in circuit.kept:
        if out.registers[name] != initial[name]:
            return Failure(n, m, inputs, initial[name], out.registers[name],
                           f"input {name} not preserved")
    for label, count in expected_iterations(circuit.name, a, b).items():
        if out.iterations.get(label) != count:
            return Failure(n, m, inputs, count, out.iterations.get(label),
                           f"loop {label} iteration count")
    return None


def _run_width(spec: SweepSpec, n: int, m: int, a_values=None) -> WidthResult:
    circuit = _build(spec, n, m)
    oracle_name, pred_name = DEFAULTS[circuit.name]
    oracle = ORACLES[spec.oracle or oracle_name]
    pred_name = spec.predicate or pred_name
    pred = PREDICATES[pred_name] if pred_name else (lambda a, b, n, m: True)
    b_values = [0] if circuit.name in UNARY else list(signed_range(m))
    a_values = list(signed_range(n)) if a_values is None else a_values
    cases = 0
    failures = []
    for a in a_values:
        for b in b_values:
            if not pred(a, b, n, m):
                continue
            cases += 1
            f = _check_case(spec, circuit, oracle, a, b, n, m)
            if f is not None:
                failures.append(f)
    return WidthResult(n, m, circuit.total_qubits, cases, failures)


def _job(args):
    spec, n, m, a_values = args
    return _run_width(spec, n, m, a_values)


def run_sweep(spec: SweepSpec, workers: int = 1) -> SweepReport:
    """Run every case; ``workers > 1`` splits cases over processes.

    The report lists widths in order and failures in input order, so the
    result does not depend on ``workers``.
    """
    start = time.perf_counter()
    widths = spec.widths()
    for n, m in widths:
        q = _build(spec, n, m).total_qubits
        if q > spec.max_qubits:
            raise ResourceBound(f"{spec.name} at n={n}, m={m} needs {q} qubits "
                                f"(cap {spec.max_qubits})")
    results = []
    if workers <= 1:
        results = [_run_width(spec, n, m) for n, m in widths]
    else:
        jobs = []
        for n, m in widths:
            values = list(signed_range(n))
            for i in range(workers):
                jobs.append((spec, n, m, values[i::workers]))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_job, jobs))
        for i, (n, m) in enumerate(widths):
            chunk = parts[i * workers:(i + 1) * workers]
            fails = sorted((f for p in chunk for f in p.failures), key=lambda f: f.inputs)
            results.append(WidthResult(n, m, chunk[0].qubits, sum(p.cases for p in chunk), fails))
    return SweepReport(spec.name, results, time.perf_counter() - start)
