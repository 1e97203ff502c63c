"""OpenQASM 2.0 export.

Only ``h``, ``x``, ``cx``, ``ccx`` and ``cp`` are emitted. Negative controls
become X sandwiches; a PHASE with ``k`` controls is reduced exactly by

    C^k P(t) = CP(t/2)[c_k, tgt] . C^(k-1)X[rest -> c_k] . CP(-t/2)[c_k, tgt]
               . C^(k-1)X[rest -> c_k] . C^(k-1)P(t/2)[rest, tgt]

and ``C^k X = H . C^k P(pi) . H``. Halving ``2*pi/2**k`` gives
``2*pi/2**(k+1)``, so every rotation stays a PHASE of the IR.
"""
from __future__ import annotations

from .errors import UnsupportedExport
from .ir import Gate, GateKind, Program, h, phase, x


def _phase_gates(target: int, k: int, controls: tuple[int, ...], inverse: bool) -> list[Gate]:
    if len(controls) <= 1:
        return [phase(target, k, *controls, inverse=inverse)]
    *rest, last = controls
    rest = tuple(rest)
    flip = _x_gates(last, rest)
    return (_phase_gates(target, k + 1, (last,), inverse)
            + flip
            + _phase_gates(target, k + 1, (last,), not inverse)
            + flip
            + _phase_gates(target, k + 1, rest, inverse))


def _x_gates(target: int, controls: tuple[int, ...]) -> list[Gate]:
    if len(controls) <= 2:
        return [x(target, *controls)]
    return [h(target)] + _phase_gates(target, 1, controls, False) + [h(target)]


def expand_gate(gate: Gate) -> list[Gate]:
    """Equivalent gates with positive controls only, at most 2 on X and 1 on PHASE."""
    negs = [c.qubit for c in gate.controls if not c.positive]
    ctrls = tuple(c.qubit for c in gate.controls)
    if gate.kind is GateKind.H:
        if ctrls:
            raise UnsupportedExport("controlled H has no expansion in the export gate set")
        core = [gate]
    elif gate.kind is GateKind.X:
        core = _x_gates(gate.target, ctrls)
    else:
        core = _phase_gates(gate.target, gate.k, ctrls, gate.inverse)
    sandwich = [x(q) for q in negs]
    return sandwich + core + sandwich


def expand_for_qasm(program: Program) -> Program:
    if not program.is_pure:
        raise UnsupportedExport("programs with measurements or repeat-until loops export "
                                "only as JSON")
    out: list[Gate] = []
    for g in program.items:
        out.extend(expand_gate(g))
    return Program(program.total_qubits, out)


def _angle(k: int, inverse: bool) -> str:
    text = "pi" if k == 1 else f"pi/{1 << (k - 1)}"
    return "-" + text if inverse else text


def _line(g: Gate) -> str:
    q = [f"q[{c.qubit}]" for c in g.controls] + [f"q[{g.target}]"]
    if g.kind is GateKind.H:
        return f"h {q[0]};"
    if g.kind is GateKind.X:
        return f"{('x', 'cx', 'ccx')[len(g.controls)]} {','.join(q)};"
    if g.controls:
        return f"cp({_angle(g.k, g.inverse)}) {','.join(q)};"
    return f"u1({_angle(g.k, g.inverse)}) {q[0]};"


def to_qasm(program: Program) -> str:
    expanded = expand_for_qasm(program)
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{program.total_qubits}];"]
    lines += [_line(g) for g in expanded.items]
    return "\n".join(lines) + "\n"
