"""QFT, inverse QFT and the phase-space add/subtract blocks.

After :func:`build_qft` on a ``k``-qubit register holding ``x``, qubit
``reg[j]`` carries the phase ``2*pi*x / 2**(k - j)``. The transform has no
trailing swaps, so Fourier-space qubits are read least significant first;
``build_iqft`` undoes exactly that layout.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import WidthError
from .ir import Control, Gate, Program, Register, h, phase


def _program(gates: list[Gate], regs: Sequence[Register], extra: Sequence[Control] = ()) -> Program:
    top = max([q for r in regs for q in r.qubits] + [c.qubit for c in extra])
    return Program(top + 1, gates)


def qft_gates(reg: Register) -> list[Gate]:
    q = reg.qubits
    gates = []
    for j in range(len(q)):
        gates.append(h(q[j]))
        for l in range(j + 1, len(q)):
            gates.append(phase(q[j], l - j + 1, q[l]))
    return gates


def iqft_gates(reg: Register) -> list[Gate]:
    q = reg.qubits
    gates = []
    for j in reversed(range(len(q))):
        for l in reversed(range(j + 1, len(q))):
            gates.append(phase(q[j], l - j + 1, q[l], inverse=True))
        gates.append(h(q[j]))
    return gates


def build_qft(reg: Register) -> Program:
    """QFT on ``reg``: ``k`` Hadamards plus ``k(k-1)/2`` controlled rotations."""
    return _program(qft_gates(reg), [reg])


def build_iqft(reg: Register) -> Program:
    return _program(iqft_gates(reg), [reg])


@dataclass(frozen=True)
class PhaseBlockSpec:
    """Parameters of one phase-space add/subtract block.

    ``target`` must already be in Fourier space. ``signed`` treats
    ``addend[0]`` as a sign bit (value sign-extended to the target width);
    with ``signed=False`` the addend is a plain unsigned magnitude.
    Extra ``controls`` gate the whole block.
    """

    target: Register
    addend: Register
    direction: str = "add"
    modular: bool = False
    signed: bool = True
    controls: tuple[Control, ...] = ()

    def __post_init__(self):
        if self.direction not in ("add", "subtract"):
            raise ValueError(f"direction must be 'add' or 'subtract', not {self.direction!r}")
        limit = self.target.width if self.modular else self.target.width - 1
        if self.addend.width > limit:
            kind = "modular" if self.modular else "non-modular"
            raise WidthError(f"{kind} block needs addend width <= {limit}, got {self.addend.width}")
        overlap = set(self.target.qubits) & set(self.addend.qubits)
        overlap |= {c.qubit for c in self.controls} & (set(self.target.qubits) | set(self.addend.qubits))
        if overlap:
            raise ValueError(f"target, addend and controls overlap on {sorted(overlap)}")


def phase_add_gates(spec: PhaseBlockSpec) -> list[Gate]:
    t, b = spec.target.qubits, spec.addend.qubits
    T, m = len(t), len(b)
    subtract = spec.direction == "subtract"
    gates = []
    for j in range(T):
        for i in range(m):
            # addend bit i weighs 2**(m-1-i); target j rotates by x / 2**(T-j)
            k = T - j - m + 1 + i
            if k < 1:
                continue
            # a sign bit weighs -2**(m-1): the folded sign extension
            negative = spec.signed and i == 0
            gates.append(phase(t[j], k, b[i], *spec.controls, inverse=negative != subtract))
    return gates


def build_phase_add(spec: PhaseBlockSpec) -> Program:
    """``|phi(t)>|b> -> |phi(t +- b)>|b>`` modulo ``2**target.width``.

    One rotation per (addend bit, target qubit) pair whose angle is not a
    multiple of ``2*pi``: ``m(m+1)/2 + m(T-m)`` gates for target width ``T``.
    """
    return _program(phase_add_gates(spec), [spec.target, spec.addend], spec.controls)


