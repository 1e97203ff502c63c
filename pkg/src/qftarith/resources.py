"""Gate counting under the basic-gate cost model, and published closed forms.

Weights: an uncontrolled gate or a singly-controlled gate costs 1, a
doubly-controlled gate (Toffoli) costs 6, and a gate with ``c >= 3``
controls is expanded into ``2c-1`` Toffolis plus one CNOT. Each negative
control adds two sandwiching NOTs. Multi-controlled PHASE gates are
weighed exactly like multi-controlled NOTs with the same control count.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .builders import ArithCircuit, build, copy_gates, swap_with_zero_gates
from .blocks import PhaseBlockSpec, iqft_gates, phase_add_gates, qft_gates
from .errors import UnknownOp
from .ir import Gate, Program, Register, RepeatUntil


@dataclass(frozen=True)
class CostModel:
    single_qubit: int = 1
    one_control: int = 1
    toffoli: int = 6
    negative_control: int = 2

    def toffoli_equivalents(self, n_controls: int) -> tuple[int, int]:
        """(Toffolis, extra CNOTs) a gate with ``n_controls`` controls expands to."""
        if n_controls < 2:
            return 0, 0
        if n_controls == 2:
            return 1, 0
        return 2 * n_controls - 1, 1

    def weight(self, gate: Gate) -> int:
        c = len(gate.controls)
        neg = gate.n_negative * self.negative_control
        if c == 0:
            return self.single_qubit
        if c == 1:
            return self.one_control + neg
        tof, cx = self.toffoli_equivalents(c)
        return tof * self.toffoli + cx * self.one_control + neg


DEFAULT_MODEL = CostModel()


@dataclass
class ResourceReport:
    raw_counts: dict[str, int]
    weighted_total: int
    total_qubits: int
    ancilla_by_role: dict[str, int] = field(default_factory=dict)
    per_iteration: bool = False
    loops: dict[str, dict[str, int]] = field(default_factory=dict)
    op: str | None = None
    n: int | None = None
    m: int | None = None
    paper_formula_value: int | None = None
    deviation_note: str | None = None

    @property
    def delta(self) -> int | None:
        if self.paper_formula_value is None:
            return None
        return self.weighted_total - self.paper_formula_value

    @property
    def ancilla(self) -> int:
        return sum(self.ancilla_by_role.values())

    def to_dict(self) -> dict:
        d = asdict(self)
        d["delta"] = self.delta
        return d


def _tally(gates: Iterable[Gate], model: CostModel) -> tuple[dict[str, int], int]:
    raw = {"raw_1q": 0, "raw_cx": 0, "raw_ccx_equiv": 0}
    total = 0
    for g in gates:
        c = len(g.controls)
        raw["raw_1q"] += model.negative_control * g.n_negative if c else 1
        if c == 1:
            raw["raw_cx"] += 1
        else:
            tof, cx = model.toffoli_equivalents(c)
            raw["raw_ccx_equiv"] += tof
            raw["raw_cx"] += cx
        total += model.weight(g)
    return raw, total


def _flat_gates(items) -> Iterable[Gate]:
    for item in items:
        if isinstance(item, Gate):
            yield item
        elif isinstance(item, RepeatUntil):
            yield from _flat_gates(item.body)


def _loop_weights(items, model: CostModel, out: dict[str, dict[str, int]]) -> None:
    for item in items:
        if isinstance(item, RepeatUntil):
            own = [g for g in item.body if isinstance(g, Gate)]
            out[item.label] = {"body_weighted": _tally(_flat_gates(item.body), model)[1],
                               "own_weighted": _tally(own, model)[1],
                               "max_iters": item.max_iters}
            _loop_weights(item.body, model, out)


def count(program: Program, model: CostModel = DEFAULT_MODEL) -> ResourceReport:
    """Static tally; every loop body is counted once.

    ``loops`` records, per loop label, the weight of one pass
    (``body_weighted``, nested loops counted once), the weight of the
    body's own gates excluding nested loops (``own_weighted``) and the
    loop's ``max_iters``.
    """
    raw, total = _tally(program.gates(), model)
    loops: dict[str, dict[str, int]] = {}
    _loop_weights(program.items, model, loops)
    return ResourceReport(raw, total, program.total_qubits, per_iteration=bool(loops),
                          loops=loops)


def executed_weight(program: Program, iterations_used: dict[str, int],
                    model: CostModel = DEFAULT_MODEL) -> int:
    """Weighted gate total actually applied, given a run's loop pass counts."""
    top = [g for g in program.items if isinstance(g, Gate)]
    total = _tally(top, model)[1]
    loops: dict[str, dict[str, int]] = {}
    _loop_weights(program.items, model, loops)
    for label, info in loops.items():
        total += info["own_weighted"] * iterations_used.get(label, 0)
    return total


# -- published closed forms -------------------------------------------------

def _half(v: int) -> int:
    assert v % 2 == 0, v
    return v // 2


PAPER_FORMULAS: dict[str, Callable[[int, int], int]] = {
    "qft": lambda n, m: _half(n * (n + 1)),
    "iqft": lambda n, m: _half(n * (n + 1)),
    "nmadd": lambda n, m: _half(m * (m + 1)) + m * (n + 1 - m),
    "nmsub": lambda n, m: _half(m * (m + 1)) + m * (n + 1 - m),
    "madd": lambda n, m: _half(m * (m + 1)) + m * (n - m),
    "msub": lambda n, m: _half(m * (m + 1)) + m * (n - m),
    "qnmadd": lambda n, m: n * n + 3 * n + 18 + _half(m * (2 * n - m + 3)),
    "qnmsub": lambda n, m: n * n + 3 * n + 18 + _half(m * (2 * n - m + 3)),
    "qmadd": lambda n, m: n * n + n + _half(m * (2 * n - m + 1)),
    "qmsub": lambda n, m: n * n + n + _half(m * (2 * n - m + 1)),
    "qnmmul": lambda n, m: _half(5 * n * n + n) + 4 * m * m + 4 * n * m + 6 * m + 7,
    "qnmdiv": lambda n, m: 3 * n * n + 12 * n + n * m + _half(m * m + 11 * m) + 36,
    "qexp": lambda n, m: _half(21 * n * n + 15 * n + 3 * (m * m + m)) + 9,
    "qtc": lambda n, m: n * n + 3 * n,
    "qabs": lambda n, m: n * n + 3 * n + 2,
    "qcomp": lambda n, m: n * n + 3 * n + 41 + _half(m * (2 * n - m + 3)),
    "uc": lambda n, m: n,
    "ur": lambda n, m: 2 * n,
    "add-baseline": lambda n, m: _half(3 * (n * n + 3 * n + 2)),
    "mul-baseline": lambda n, m: 11 * n * n + 6 * n + 4,
    "comp-baseline": lambda n, m: 48 * n * n - 48 * n + 16,
}

# ancilla budgets: (operating on the inputs, operating on copies)
PAPER_ANCILLA: dict[str, Callable[[int, int], tuple[int, int]]] = {
    "qnmadd": lambda n, m: (1, n + 1),
    "qmadd": lambda n, m: (0, n),
    "qnmsub": lambda n, m: (1, n + 1),
    "qmsub": lambda n, m: (0, n),
    "qnmmul": lambda n, m: (n + m + 2, n + 2 * m + 2),
    "qnmdiv": lambda n, m: (n + 3, 2 * n + m + 3),
    "qexp": lambda n, m: (2 * (n + m), 2 * n + 3 * m),
    "qtc": lambda n, m: (1, 1),
    "qabs": lambda n, m: (2, 2),
    "qcomp": lambda n, m: (3, 3),
}

BASELINE_ANCILLA: dict[str, Callable[[int], int]] = {
    "add-baseline": lambda n: 1,
    "mul-baseline": lambda n: n * n + 4 * n,
    "comp-baseline": lambda n: 2 * n,
}

BASELINES = tuple(BASELINE_ANCILLA)


def paper_formula(op: str, n: int, m: int | None = None) -> int:
    if op not in PAPER_FORMULAS:
        raise UnknownOp(f"no published formula for {op!r}")
    return PAPER_FORMULAS[op](n, n if m is None else m)


def paper_ancilla(op: str, n: int, m: int | None = None, on_copies: bool = True) -> int:
    if op not in PAPER_ANCILLA:
        raise UnknownOp(f"no published ancilla budget for {op!r}")
    direct, copies = PAPER_ANCILLA[op](n, n if m is None else m)
    return copies if on_copies else direct


# -- per-circuit reports ------------------------------------------------------

def _block_program(op: str, n: int, m: int) -> Program:
    if op in ("qft", "iqft"):
        reg = Register("x", tuple(range(n)))
        gates = qft_gates(reg) if op == "qft" else iqft_gates(reg)
        return Program(n, gates)
    if op in ("uc", "ur"):
        src = Register("x", tuple(range(n)))
        dst = Register("y", tuple(range(n, 2 * n)))
        gates = copy_gates(src, dst) if op == "uc" else swap_with_zero_gates(src, dst)
        return Program(2 * n, gates)
    modular = op in ("madd", "msub")
    width = n if modular else n + 1
    target = Register("t", tuple(range(width)))
    addend = Register("b", tuple(range(width, width + m)))
    direction = "add" if op.endswith("add") else "subtract"
    return Program(width + m, phase_add_gates(PhaseBlockSpec(target, addend, direction, modular)))


BLOCK_OPS = ("qft", "iqft", "nmadd", "nmsub", "madd", "msub", "uc", "ur")


def circuit_report(circuit: ArithCircuit, model: CostModel = DEFAULT_MODEL) -> ResourceReport:
    """Count ``circuit.body`` and compare it with the published closed form."""
    rep = count(circuit.body, model)
    rep.op, rep.n, rep.m = circuit.name, circuit.n, circuit.m
    rep.ancilla_by_role = circuit.ancilla_by_role()
    rep.total_qubits = circuit.total_qubits
    key = "qnmmul" if circuit.name == "qnmmulv2" else circuit.name
    if key in PAPER_FORMULAS:
        rep.paper_formula_value = paper_formula(key, circuit.n, circuit.m or circuit.n)
    notes = list(circuit.notes)
    if rep.per_iteration:
        notes.append("loop bodies counted once; see loops for per-pass weights and max_iters")
    if rep.delta:
        notes.append(f"delta {rep.delta:+d} against the closed form")
    rep.deviation_note = "; ".join(notes) or None
    return rep


def report(op: str, n: int, m: int | None = None, model: CostModel = DEFAULT_MODEL,
           **options) -> ResourceReport:
    """Resource report for a named circuit, phase block or baseline."""
    m = n if m is None else m
    if op in BASELINES:
        value = paper_formula(op, n, m)
        return ResourceReport({}, value, 0, {"baseline": BASELINE_ANCILLA[op](n)},
                              op=op, n=n, m=m, paper_formula_value=value,
                              deviation_note="published formula only; circuit not implemented")
    if op in BLOCK_OPS:
        prog = _block_program(op, n, m)
        rep = count(prog, model)
        rep.op, rep.n, rep.m = op, n, m
        rep.paper_formula_value = paper_formula(op, n, m)
        return rep
    return circuit_report(build(op, n, m, **options), model)


# -- comparison tables --------------------------------------------------------

CSV_COLUMNS = ("op", "n", "m", "raw_1q", "raw_cx", "raw_ccx_equiv", "weighted_total",
               "paper_formula", "delta", "qubits_total", "ancilla")

ALL_OPS = ("qft", "iqft", "nmadd", "nmsub", "madd", "msub", "qnmadd", "qnmsub", "qmadd",
           "qmsub", "qtc", "qabs", "qcomp", "uc", "ur", "qnmmul", "qnmdiv", "qexp",
           "add-baseline", "mul-baseline", "comp-baseline")

_SINGLE_WIDTH = {"qft", "iqft", "qtc", "qabs", "uc", "ur"} | set(BASELINES)


def _row(rep: ResourceReport) -> dict:
    return {
        "op": rep.op, "n": rep.n, "m": rep.m,
        "raw_1q": rep.raw_counts.get("raw_1q", ""),
        "raw_cx": rep.raw_counts.get("raw_cx", ""),
        "raw_ccx_equiv": rep.raw_counts.get("raw_ccx_equiv", ""),
        "weighted_total": rep.weighted_total,
        "paper_formula": "" if rep.paper_formula_value is None else rep.paper_formula_value,
        "delta": "" if rep.delta is None else rep.delta,
        "qubits_total": rep.total_qubits or "",
        "ancilla": "" if rep.op in BLOCK_OPS else rep.ancilla,
    }


def comparison_rows(ops: Sequence[str], n_range: Iterable[int],
                    m_range: Iterable[int] | None = None) -> list[dict]:
    rows = []
    n_values = list(n_range)
    for op in ops:
        if op not in PAPER_FORMULAS and op not in ("qnmmulv2",):
            raise UnknownOp(f"unknown operation {op!r}")
        for n in n_values:
            if op in _SINGLE_WIDTH:
                ms = [n]
            else:
                ms = [m for m in (m_range if m_range is not None else range(2, n + 1))
                      if 2 <= m <= n]
            for m in ms:
                rows.append(_row(report(op, n, m)))
    return rows


def comparison_table(ops: Sequence[str], n_range: Iterable[int],
                     m_range: Iterable[int] | None = None, format: str = "csv") -> str:
    rows = comparison_rows(ops, n_range, m_range)
    if format == "json":
        return json.dumps({"format_version": 1, "columns": list(CSV_COLUMNS), "rows": rows},
                          indent=2)
    if format != "csv":
        raise ValueError(f"unsupported table format {format!r}")
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def quadratic_fit(op: str, n_values: Sequence[int] = range(2, 9)) -> np.ndarray:
    """Least-squares ``[c2, c1, c0]`` of the static count over ``n = m``."""
    ns = np.array(list(n_values), dtype=float)
    totals = np.array([report(op, int(n), int(n)).weighted_total for n in ns], dtype=float)
    return np.polyfit(ns, totals, 2)
