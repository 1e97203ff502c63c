"""Circuit constructors for the signed arithmetic operations.

Every builder returns an :class:`ArithCircuit`: the emitted program, a
register map, which register holds the result, and the role of each
ancilla. Inputs ``a`` (``n`` qubits) and ``b`` (``m`` qubits) are signed
two's-complement registers, MSB first, with ``2 <= m <= n``.

Constant ``|1>`` qubits are prepared by X gates at the start of
``program``; ``body`` is the same circuit without that preparation, which
is what the resource counter compares against the closed-form counts.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from .blocks import PhaseBlockSpec, iqft_gates, phase_add_gates, qft_gates
from .errors import UnknownOp, WidthError
from .ir import (Control, Gate, Item, Program, Register, RepeatUntil, Measure,
                 encode_signed, neg, x)
from .simulator import StateVector

SIGN_PREP_MODES = ("extend", "literal")


@dataclass(frozen=True)
class ArithCircuit:
    name: str
    n: int
    m: int
    body: Program
    registers: dict[str, Register]
    inputs: tuple[str, ...]
    result: Register
    ancilla: tuple[tuple[Register, str], ...]
    kept: tuple[str, ...]
    constants: tuple[int, ...] = ()
    notes: tuple[str, ...] = ()
    loops: dict[str, int] = field(default_factory=dict)

    @property
    def program(self) -> Program:
        prep = [x(q) for q in self.constants]
        return Program(self.body.total_qubits, prep + list(self.body.items))

    @property
    def preserves_inputs(self) -> bool:
        """True when every input register ends holding its initial value."""
        return set(self.kept) == set(self.inputs)

    @property
    def total_qubits(self) -> int:
        return self.body.total_qubits

    @property
    def input_qubits(self) -> int:
        return sum(self.registers[name].width for name in self.inputs)

    @property
    def ancilla_count(self) -> int:
        return self.total_qubits - self.input_qubits

    def ancilla_by_role(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for reg, role in self.ancilla:
            out[role] = out.get(role, 0) + reg.width
        return out

    def register_map(self) -> dict[str, list[int]]:
        regs = {name: list(r.qubits) for name, r in self.registers.items()}
        regs["result"] = list(self.result.qubits)
        return regs

    def initial_bits(self, **values: int) -> str:
        """Basis bitstring with the named input registers encoded."""
        bits = ["0"] * self.total_qubits
        for name, value in values.items():
            if name not in self.inputs:
                raise KeyError(f"{self.name} has no input register {name!r}")
            reg = self.registers[name]
            for q, ch in zip(reg.qubits, encode_signed(value, reg.width)):
                bits[q] = ch
        return "".join(bits)

    def read(self, state: StateVector) -> dict[str, int]:
        """Value of every register and the result view; one-qubit registers read unsigned."""
        out = {name: state.read(reg, signed=reg.width > 1) for name, reg in self.registers.items()}
        out["result"] = state.read(self.result, signed=self.name != "qcomp")
        return out


class _Layout:
    def __init__(self):
        self.size = 0
        self.registers: dict[str, Register] = {}

    def add(self, name: str, width: int) -> Register:
        reg = Register(name, tuple(range(self.size, self.size + width)))
        self.size += width
        self.registers[name] = reg
        return reg


def _check_widths(n: int, m: int) -> None:
    if not 2 <= m <= n:
        raise WidthError(f"need 2 <= m <= n, got n={n}, m={m}")


def _join(name: str, *regs: Register) -> Register:
    return Register(name, tuple(q for r in regs for q in r.qubits))


# -- reusable gate sequences -----------------------------------------------

def copy_gates(src: Register, dst: Register) -> list[Gate]:
    if src.width != dst.width:
        raise WidthError("copy needs equal widths")
    return [x(d, s) for s, d in zip(src.qubits, dst.qubits)]


def swap_with_zero_gates(src: Register, zero: Register) -> list[Gate]:
    if src.width != zero.width:
        raise WidthError("swap needs equal widths")
    gates = []
    for s, z in zip(src.qubits, zero.qubits):
        gates += [x(z, s), x(s, z)]
    return gates


def zero_test_gates(reg: Register, flag: int) -> list[Gate]:
    """Flip ``flag`` when every qubit of ``reg`` is 0."""
    return [x(flag, *(neg(q) for q in reg.qubits))]


def _add_in_fourier(target: Register, addend: Register, **spec) -> list[Gate]:
    return (qft_gates(target)
            + phase_add_gates(PhaseBlockSpec(target, addend, **spec))
            + iqft_gates(target))


def qtc_gates(reg: Register, one: int) -> list[Gate]:
    """Invert every bit, then add the |1> constant modulo ``2**width``."""
    one_reg = Register("one", (one,))
    return [x(q) for q in reg.qubits] + _add_in_fourier(reg, one_reg, modular=True, signed=False)


def negate_if_gates(reg: Register, one: int, control: int) -> list[Gate]:
    """Two's-complement negation of ``reg`` when ``control`` is 1.

    The sign qubit's NOT is applied last: flipping the MSB adds
    ``2**(w-1)`` modulo ``2**w`` and so commutes with the increment.
    """
    one_reg = Register("one", (one,))
    return ([x(q, control) for q in reg.qubits[1:]]
            + _add_in_fourier(reg, one_reg, modular=True, signed=False,
                              controls=(Control(control),))
            + [x(reg[0], control)])


# -- addition / subtraction -------------------------------------------------

def _build_add_sub(direction: str, n: int, m: int, modular: bool,
                   preserve_inputs: bool, sign_prep: str) -> ArithCircuit:
    _check_widths(n, m)
    if sign_prep not in SIGN_PREP_MODES:
        raise ValueError(f"sign_prep must be one of {SIGN_PREP_MODES}")
    stem = "add" if direction == "add" else "sub"
    name = ("qm" if modular else "qnm") + stem
    lay = _Layout()
    ancilla = []
    gates: list[Gate] = []
    notes = []
    if not preserve_inputs:
        if not modular:
            a0 = lay.add("a0", 1)
            ancilla.append((a0, "overflow"))
        a = lay.add("a", n)
        b = lay.add("b", m)
        work = a
    else:
        a = lay.add("a", n)
        b = lay.add("b", m)
        if not modular:
            a0 = lay.add("a0", 1)
            ancilla.append((a0, "overflow"))
        work = lay.add("a_copy", n)
        ancilla.append((work, "copy_a"))
        gates += copy_gates(a, work)
    acc = work if modular else _join("acc", a0, work)
    if not modular:
        if sign_prep == "literal":
            gates += [x(a0[0], neg(work[0]), b[0]), x(a0[0], work[0], neg(b[0]))]
        else:
            gates.append(x(a0[0], work[0]))
            notes.append("sign preparation: CNOT a1->a0 replaces the two mixed-polarity "
                         "Toffolis; the literal pair is off by 2**n whenever b "
                         "is negative")
    gates += _add_in_fourier(acc, b, direction=direction, modular=modular)
    return ArithCircuit(name, n, m, Program(lay.size, gates), dict(lay.registers), ("a", "b"),
                        acc, tuple(ancilla), ("a", "b") if preserve_inputs else ("b",),
                        notes=tuple(notes))


def build_qnmadd(n: int, m: int, preserve_inputs: bool = False,
                 sign_prep: str = "extend") -> ArithCircuit:
    """Non-modular add: the ``n+1``-qubit accumulator ends holding ``a+b`` exactly."""
    return _build_add_sub("add", n, m, False, preserve_inputs, sign_prep)


def build_qnmsub(n: int, m: int, preserve_inputs: bool = False,
                 sign_prep: str = "extend") -> ArithCircuit:
    return _build_add_sub("subtract", n, m, False, preserve_inputs, sign_prep)


def build_qmadd(n: int, m: int, preserve_inputs: bool = False) -> ArithCircuit:
    """Modular add: ``a <- a+b`` wrapped to ``n`` bits, no ancilla."""
    return _build_add_sub("add", n, m, True, preserve_inputs, "extend")


def build_qmsub(n: int, m: int, preserve_inputs: bool = False) -> ArithCircuit:
    return _build_add_sub("subtract", n, m, True, preserve_inputs, "extend")


# -- sign operations --------------------------------------------------------

def build_qtc(n: int) -> ArithCircuit:
    """In-place negation ``a <- -a mod 2**n`` using one |1> ancilla."""
    if n < 2:
        raise WidthError("QTC needs n >= 2")
    lay = _Layout()
    a = lay.add("a", n)
    one = lay.add("one", 1)
    return ArithCircuit("qtc", n, 0, Program(lay.size, qtc_gates(a, one[0])),
                        dict(lay.registers), ("a",), a, ((one, "one"),), (),
                        constants=(one[0],))


def build_qabs(n: int) -> ArithCircuit:
    """``a <- |a|``; the sign store ``s`` keeps the original sign bit.

    ``-2**(n-1)`` has no positive ``n``-bit image and maps to itself.
    """
    if n < 2:
        raise WidthError("QABS needs n >= 2")
    lay = _Layout()
    a = lay.add("a", n)
    s = lay.add("s", 1)
    one = lay.add("one", 1)
    gates = [x(s[0], a[0])] + negate_if_gates(a, one[0], s[0])
    return ArithCircuit("qabs", n, 0, Program(lay.size, gates), dict(lay.registers), ("a",), a,
                        ((s, "sign_store"), (one, "one")), (), constants=(one[0],))


def build_qcomp(n: int, m: int) -> ArithCircuit:
    """Signed comparison into flags ``c0`` (a>b), ``c1`` (a<b), ``c2`` (a=b).

    ``c1`` doubles as the overflow qubit of the subtraction: after ``a-b`` it
    is the difference's sign. Adding ``b`` back restores ``a``, and ``c1`` is
    then rebuilt from the other two flags, so only three ancillas are used.
    """
    _check_widths(n, m)
    lay = _Layout()
    a = lay.add("a", n)
    b = lay.add("b", m)
    c0 = lay.add("c0", 1)[0]
    c1 = lay.add("c1", 1)[0]
    c2 = lay.add("c2", 1)[0]
    acc = _join("acc", Register("c1", (c1,)), a)
    gates = [x(c1, a[0])]
    gates += _add_in_fourier(acc, b, direction="subtract")
    gates.append(x(c2, *(neg(q) for q in acc.qubits)))
    gates.append(x(c0, neg(c1), neg(c2)))
    gates += _add_in_fourier(acc, b, direction="add")
    gates.append(x(c1, a[0]))
    gates.append(x(c1, neg(c0), neg(c2)))
    flags = Register("flags", (c0, c1, c2))
    regs = dict(lay.registers)
    return ArithCircuit("qcomp", n, m, Program(lay.size, gates), regs, ("a", "b"), flags,
                        ((flags, "flags"),), ("a", "b"),
                        notes=("c1 serves as the subtraction's overflow qubit; a is restored "
                               "by adding b back",))


# -- copy / swap utilities ---------------------------------------------------

def build_uc(src: Register, dst: Register) -> Program:
    """``|x>|0> -> |x>|x>`` with one CNOT per qubit pair."""
    gates = copy_gates(src, dst)
    return Program(max(src.qubits + dst.qubits) + 1, gates)


def build_ur(src: Register, zero: Register) -> Program:
    """``|x>|0> -> |0>|x>`` with two CNOTs per qubit pair."""
    gates = swap_with_zero_gates(src, zero)
    return Program(max(src.qubits + zero.qubits) + 1, gates)


# -- loop-bearing operations ---------------------------------------------------

def build_qnmmul(n: int, m: int, preserve_b: bool = True) -> ArithCircuit:
    """Signed product into an ``n+m-1``-qubit result by repeated addition.

    ``a`` is added ``|b|`` times in Fourier space while a working copy of
    ``|b|`` counts down to zero; ``sctrl`` holds b's sign and negates the
    result at the end. With ``preserve_b=False`` the count-down runs on
    ``b`` itself, which ends at 0.
    """
    _check_widths(n, m)
    lay = _Layout()
    a = lay.add("a", n)
    b = lay.add("b", m)
    ancilla = []
    if preserve_b:
        work = lay.add("b_copy", m)
        ancilla.append((work, "copy_b"))
    else:
        work = b
    sctrl = lay.add("sctrl", 1)[0]
    one = lay.add("one", 1)[0]
    ctrl = lay.add("ctrl", 1)[0]
    result = lay.add("result", n + m - 1)
    regs = lay.registers
    ancilla += [(regs["sctrl"], "sctrl"), (regs["one"], "one"), (regs["ctrl"], "ctrl"),
                (result, "result")]
    one_reg = regs["one"]

    gates: list[Item] = [x(sctrl, b[0])]
    if preserve_b:
        gates += copy_gates(b, work)
    gates += negate_if_gates(work, one, sctrl)
    gates += qft_gates(result)
    gates += zero_test_gates(work, ctrl)
    body = (phase_add_gates(PhaseBlockSpec(result, a))
            + _add_in_fourier(work, one_reg, direction="subtract", modular=True, signed=False)
            + zero_test_gates(work, ctrl))
    gates.append(RepeatUntil(tuple(body), flag=ctrl, expect=1, max_iters=1 << (m - 1), label="mul"))
    gates += iqft_gates(result)
    gates += negate_if_gates(result, one, sctrl)
    name = "qnmmul" if preserve_b else "qnmmulv2"
    return ArithCircuit(name, n, m, Program(lay.size, gates), dict(regs), ("a", "b"), result,
                        tuple(ancilla), ("a", "b") if preserve_b else ("a",), constants=(one,),
                        loops={"mul": 1 << (m - 1)})


def build_qnmdiv(n: int, m: int, preserve_inputs: bool = True,
                 result_width: int | None = None) -> ArithCircuit:
    """Truncating signed division: ``result = sign(a*b) * (|a| // |b|)``.

    ``|b|`` is subtracted from a working ``|a|`` until it turns negative;
    every subtraction that leaves it non-negative increments the quotient.
    The loop therefore runs ``quotient + 1`` times. A zero divisor never
    terminates and surfaces as :class:`LoopBoundExceeded`.
    """
    _check_widths(n, m)
    width = n if result_width is None else result_width
    if width < n:
        raise WidthError("division result needs at least n qubits")
    lay = _Layout()
    a = lay.add("a", n)
    b = lay.add("b", m)
    ancilla = []
    if preserve_inputs:
        wa = lay.add("a_copy", n)
        wb = lay.add("b_copy", m)
        ancilla += [(wa, "copy_a"), (wb, "copy_b")]
    else:
        wa, wb = a, b
    sctrl = lay.add("sctrl", 1)[0]
    one = lay.add("one", 1)[0]
    ctrl = lay.add("ctrl", 1)[0]
    regs = lay.registers
    ancilla += [(regs["sctrl"], "sctrl"), (regs["one"], "one"), (regs["ctrl"], "ctrl")]
    notes = []
    if not preserve_inputs:
        sa = lay.add("sign_a", 1)[0]
        ancilla.append((regs["sign_a"], "sign_store"))
        notes.append("in-place variant keeps a's sign in one extra qubit: |a|, |b| and the "
                     "sign parity alone do not determine (a, b)")
    result = lay.add("result", width)
    ancilla.append((result, "result"))
    one_reg = regs["one"]

    gates: list[Item] = [x(sctrl, neg(a[0]), b[0]), x(sctrl, a[0], neg(b[0]))]
    if preserve_inputs:
        gates += copy_gates(a, wa) + copy_gates(b, wb)
        gates += negate_if_gates(wa, one, a[0]) + negate_if_gates(wb, one, b[0])
    else:
        gates.append(x(sa, a[0]))
        gates += negate_if_gates(a, one, sa)
        gates.append(x(sctrl, sa))
        gates += negate_if_gates(b, one, sctrl)
        gates.append(x(sctrl, sa))
    gates += qft_gates(result)
    body = (_add_in_fourier(wa, wb, direction="subtract", modular=True, signed=False)
            + [x(ctrl, wa[0])]
            + phase_add_gates(PhaseBlockSpec(result, one_reg, modular=True, signed=False,
                                             controls=(neg(ctrl),))))
    max_iters = (1 << (n - 1)) + 1
    gates.append(RepeatUntil(tuple(body), flag=ctrl, expect=1, max_iters=max_iters, label="div"))
    gates += iqft_gates(result)
    gates += negate_if_gates(result, one, sctrl)
    return ArithCircuit("qnmdiv", n, m, Program(lay.size, gates), dict(regs), ("a", "b"), result,
                        tuple(ancilla), ("a", "b") if preserve_inputs else (), constants=(one,),
                        notes=tuple(notes),
                        loops={"div": max_iters})


def build_qexp(n: int, m: int, result_width: int | None = None,
               preserve_b: bool = False) -> ArithCircuit:
    """``result = a**b mod 2**result_width`` for ``b >= 0``.

    Each outer pass multiplies the running result by ``a`` into the
    garbage register ``grb`` (the result is consumed as the multiplier's
    count-down), swaps ``grb`` back with :func:`build_ur`'s two-CNOT swap,
    and decrements ``b``. The inner count-down treats the running result as
    an unsigned counter, which is exact modulo ``2**result_width`` and
    needs no sign qubit, so ``ctrl`` is shared by both loops.
    """
    _check_widths(n, m)
    width = n + m - 1 if result_width is None else result_width
    if width < n:
        raise WidthError("result_width must be at least n")
    lay = _Layout()
    a = lay.add("a", n)
    b = lay.add("b", m)
    ancilla = []
    if preserve_b:
        work = lay.add("b_copy", m)
        ancilla.append((work, "copy_b"))
    else:
        work = b
    result = lay.add("result", width)
    grb = lay.add("grb", width)
    one = lay.add("one", 1)[0]
    ctrl = lay.add("ctrl", 1)[0]
    regs = lay.registers
    ancilla += [(result, "result"), (grb, "garbage"), (regs["one"], "one"), (regs["ctrl"], "ctrl")]
    one_reg = regs["one"]

    gates: list[Item] = [Measure(b[0], "exponent_sign")]
    if preserve_b:
        gates += copy_gates(b, work)
    gates += zero_test_gates(work, ctrl)
    mul_body = (phase_add_gates(PhaseBlockSpec(grb, a, modular=True))
                + _add_in_fourier(result, one_reg, direction="subtract", modular=True,
                                  signed=False)
                + zero_test_gates(result, ctrl))
    outer: list[Item] = zero_test_gates(result, ctrl) + qft_gates(grb)
    outer.append(RepeatUntil(tuple(mul_body), flag=ctrl, expect=1, max_iters=1 << width,
                             label="exp_mul"))
    outer += iqft_gates(grb)
    outer += zero_test_gates(result, ctrl)
    outer += swap_with_zero_gates(grb, result)
    outer += _add_in_fourier(work, one_reg, direction="subtract", modular=True, signed=False)
    outer += zero_test_gates(work, ctrl)
    gates.append(RepeatUntil(tuple(outer), flag=ctrl, expect=1, max_iters=1 << (m - 1),
                             label="exp"))
    return ArithCircuit("qexp", n, m, Program(lay.size, gates), dict(regs), ("a", "b"), result,
                        tuple(ancilla), ("a", "b") if preserve_b else ("a",),
                        constants=(one, result[-1]),
                        loops={"exp": 1 << (m - 1), "exp_mul": 1 << width})


BUILDERS = {
    "qnmadd": build_qnmadd,
    "qmadd": build_qmadd,
    "qnmsub": build_qnmsub,
    "qmsub": build_qmsub,
    "qtc": build_qtc,
    "qabs": build_qabs,
    "qcomp": build_qcomp,
    "qnmmul": build_qnmmul,
    "qnmdiv": build_qnmdiv,
    "qexp": build_qexp,
}


def build(op: str, n: int, m: int | None = None, **options) -> ArithCircuit:
    if op not in BUILDERS and op != "qnmmulv2":
        raise UnknownOp(f"unknown operation {op!r}")
    if op in ("qtc", "qabs"):
        return BUILDERS[op](n)
    if op == "qnmmulv2":
        return build_qnmmul(n, m, preserve_b=False)
    return BUILDERS[op](n, m, **options)
