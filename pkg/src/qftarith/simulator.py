"""Dense statevector simulator.

Amplitude index bit ``N-1-q`` belongs to qubit ``q``, so qubit 0 is the
highest-order bit and a basis index prints as the program's bitstring.
Gates are applied in place by a compiled kernel that walks amplitude pairs
with stride ``2**bit`` and skips pairs whose control bits do not match.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numba
import numpy as np

from .errors import LoopBoundExceeded, NormError, NotPure
from .ir import Gate, GateKind, Measure, Program, Register, RepeatUntil, decode_signed

NORM_TOL = 1e-8
DETERMINISTIC_TOL = 1e-9

_KIND_CODE = {GateKind.H: 0, GateKind.X: 1, GateKind.PHASE: 2}


@numba.njit(cache=True, nogil=True)
def _kernel(amps, kind, tbit, cmask, cval, phase):
    tb = 1 << tbit
    low = tb - 1
    for j in range(amps.shape[0] >> 1):
        i0 = ((j >> tbit) << (tbit + 1)) | (j & low)
        if (i0 & cmask) != cval:
            continue
        i1 = i0 | tb
        if kind == 2:
            amps[i1] *= phase
        elif kind == 1:
            a = amps[i0]
            amps[i0] = amps[i1]
            amps[i1] = a
        else:
            a = amps[i0]
            b = amps[i1]
            amps[i0] = (a + b) * 0.7071067811865476
            amps[i1] = (a - b) * 0.7071067811865476


@numba.njit(cache=True, nogil=True)
def _prob_one(amps, tbit):
    tb = 1 << tbit
    p = 0.0
    for i in range(amps.shape[0]):
        if i & tb:
            a = amps[i]
            p += a.real * a.real + a.imag * a.imag
    return p


@numba.njit(cache=True, nogil=True)
def _collapse(amps, tbit, outcome, scale):
    tb = 1 << tbit
    want = tb if outcome else 0
    for i in range(amps.shape[0]):
        if (i & tb) == want:
            amps[i] *= scale
        else:
            amps[i] = 0.0


def phase_factor(k: int, inverse: bool = False) -> complex:
    """``exp(+-2*pi*i / 2**k)``; the angle is computed fresh for every gate."""
    angle = 2.0 * math.pi / (1 << k)
    return complex(math.cos(angle), -math.sin(angle) if inverse else math.sin(angle))


def _apply(amps: np.ndarray, n_qubits: int, gate: Gate, offset: int = 0) -> None:
    top = n_qubits - 1 + offset
    if gate.target >= n_qubits or any(c.qubit >= n_qubits for c in gate.controls):
        raise IndexError(f"{gate} touches a qubit outside 0..{n_qubits - 1}")
    cmask = cval = 0
    for c in gate.controls:
        bit = 1 << (top - c.qubit)
        cmask |= bit
        if c.positive:
            cval |= bit
    ph = phase_factor(gate.k, gate.inverse) if gate.kind is GateKind.PHASE else 0j
    _kernel(amps, _KIND_CODE[gate.kind], top - gate.target, cmask, cval, ph)


class StateVector:
    """Dense amplitudes over ``num_qubits`` qubits (qubit 0 = high-order bit)."""

    def __init__(self, amplitudes: np.ndarray, num_qubits: int | None = None):
        amps = np.ascontiguousarray(amplitudes, dtype=np.complex128)
        if num_qubits is None:
            num_qubits = int(amps.shape[0]).bit_length() - 1
        if amps.ndim != 1 or amps.shape[0] != 1 << num_qubits:
            raise ValueError(f"expected {1 << num_qubits} amplitudes, got {amps.shape}")
        self.amplitudes = amps
        self.num_qubits = num_qubits

    @classmethod
    def from_bits(cls, bits: str) -> "StateVector":
        if any(ch not in "01" for ch in bits):
            raise ValueError(f"bad bitstring {bits!r}")
        amps = np.zeros(1 << len(bits), dtype=np.complex128)
        amps[int(bits, 2) if bits else 0] = 1.0
        return cls(amps, len(bits))

    @classmethod
    def zeros(cls, num_qubits: int) -> "StateVector":
        return cls.from_bits("0" * num_qubits)

    def copy(self) -> "StateVector":
        return StateVector(self.amplitudes.copy(), self.num_qubits)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def dominant(self) -> tuple[str, float]:
        """Most likely basis bitstring and its probability."""
        idx = int(np.argmax(np.abs(self.amplitudes)))
        p = float(abs(self.amplitudes[idx]) ** 2)
        return format(idx, f"0{self.num_qubits}b") if self.num_qubits else "", p

    def read(self, reg: Register, signed: bool = True) -> int:
        """Decode ``reg`` from the dominant basis state."""
        bits, _ = self.dominant()
        sub = "".join(bits[q] for q in reg.qubits)
        return decode_signed(sub) if signed else int(sub, 2)

    def dumps(self) -> str:
        return json.dumps([[float(a.real), float(a.imag)] for a in self.amplitudes])


@dataclass
class RunResult:
    final_state: StateVector
    classical_bits: dict[str, int] = field(default_factory=dict)
    iterations_used: dict[str, int] = field(default_factory=dict)
    deterministic: bool = True


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    """Apply ``gate`` in place and return the same state object."""
    _apply(state.amplitudes, state.num_qubits, gate)
    return state


class _Runner:
    def __init__(self, state: StateVector, rng: np.random.Generator, check_every_gate: bool):
        self.state = state
        self.rng = rng
        self.check_every_gate = check_every_gate
        self.result = RunResult(state)

    def check_norm(self, tol: float = NORM_TOL) -> None:
        nrm = self.state.norm()
        if abs(nrm - 1.0) > tol:
            raise NormError(f"norm drifted to {nrm!r}")

    def measure(self, qubit: int) -> int:
        amps, n = self.state.amplitudes, self.state.num_qubits
        tbit = n - 1 - qubit
        p1 = min(max(_prob_one(amps, tbit), 0.0), 1.0)
        if p1 >= 1.0 - DETERMINISTIC_TOL:
            outcome = 1
        elif p1 <= DETERMINISTIC_TOL:
            outcome = 0
        else:
            self.result.deterministic = False
            outcome = int(self.rng.random() < p1)
        p = p1 if outcome else 1.0 - p1
        _collapse(amps, tbit, outcome, 1.0 / math.sqrt(p))
        return outcome

    def execute(self, items) -> None:
        n = self.state.num_qubits
        for item in items:
            if isinstance(item, Gate):
                _apply(self.state.amplitudes, n, item)
                if self.check_every_gate:
                    self.check_norm()
            elif isinstance(item, Measure):
                self.result.classical_bits[item.slot] = self.measure(item.qubit)
            elif isinstance(item, RepeatUntil):
                self.loop(item)
            else:
                raise TypeError(f"unknown program item {item!r}")

    def loop(self, block: RepeatUntil) -> None:
        used = self.result.iterations_used
        used.setdefault(block.label, 0)
        passes = 0
        while True:
            bit = self.measure(block.flag)
            self.result.classical_bits[block.label] = bit
            if bit == block.expect:
                return
            if passes == block.max_iters:
                raise LoopBoundExceeded(block.label, block.max_iters)
            self.execute(block.body)
            self.check_norm()
            passes += 1
            used[block.label] += 1


def _initial_state(program: Program, initial) -> StateVector:
    if initial is None:
        return StateVector.zeros(program.total_qubits)
    if isinstance(initial, str):
        if len(initial) != program.total_qubits:
            raise ValueError(f"initial bitstring has {len(initial)} bits, program has "
                             f"{program.total_qubits} qubits")
        return StateVector.from_bits(initial)
    state = initial.copy() if isinstance(initial, StateVector) else StateVector(np.array(initial))
    if state.num_qubits != program.total_qubits:
        raise ValueError("initial state does not match program width")
    return state


def run(program: Program, initial: str | StateVector | np.ndarray | None = None,
        seed: int = 0, check_every_gate: bool = False) -> RunResult:
    """Execute ``program``.

    ``initial`` is a bitstring, a :class:`StateVector` (copied, not mutated)
    or a raw amplitude array; ``None`` means all zeros. Measurements whose
    outcome has probability within 1e-9 of certainty snap to that outcome;
    others are sampled from ``seed`` and clear ``deterministic``.
    """
    state = _initial_state(program, initial)
    basis_input = np.count_nonzero(np.abs(state.amplitudes) > 1e-12) == 1
    runner = _Runner(state, np.random.default_rng(seed), check_every_gate)
    runner.execute(program.items)
    runner.check_norm()
    runner.result.deterministic = runner.result.deterministic and basis_input
    return runner.result


def unitary_of(program: Program) -> np.ndarray:
    """Matrix of a gate-only program; column ``j`` is the image of basis ``j``.

    All columns are propagated at once: the column index rides along as
    extra low-order qubits that no gate touches.
    """
    if not program.is_pure:
        raise NotPure("program contains measurements or loops")
    n = program.total_qubits
    if n > 12:
        raise ValueError("unitary_of is limited to 12 qubits")
    dim = 1 << n
    amps = np.eye(dim, dtype=np.complex128).reshape(-1)
    for gate in program.items:
        _apply(amps, n, gate, offset=n)
    return amps.reshape(dim, dim)
