"""Algebraic and numerical properties of the blocks, circuits and counts."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from ..blocks import (PhaseBlockSpec, build_iqft, build_phase_add, build_qft, iqft_gates,
                      phase_add_gates, qft_gates)
from ..builders import (build_qabs, build_qcomp, build_qmadd, build_qmsub, build_qnmadd,
                        build_qnmdiv, build_qnmmul, build_qnmsub, build_qtc)
from ..ir import Program, Register, compose, signed_range
from ..ops import execute
from ..resources import BLOCK_OPS, quadratic_fit, report
from ..simulator import StateVector, _apply, run, unitary_of
from . import oracles

UNITARY_TOL = 1e-9
AMPLITUDE_TOL = 1e-10


@dataclass(frozen=True)
class PropertyResult:
    name: str
    passed: bool
    detail: str = ""


def _reg(name: str, start: int, width: int) -> Register:
    return Register(name, tuple(range(start, start + width)))


def bit_reversed_dft(k: int) -> np.ndarray:
    """Matrix of the swap-free QFT: ``U[y, x] = w**(x * rev(y)) / sqrt(2**k)``."""
    dim = 1 << k
    rev = [int(format(y, f"0{k}b")[::-1], 2) for y in range(dim)]
    x = np.arange(dim)
    omega = np.exp(2j * np.pi / dim)
    return np.array([omega ** (x * rev[y]) for y in range(dim)]) / math.sqrt(dim)


def qft_matches_dft(max_k: int = 5) -> PropertyResult:
    worst = 0.0
    for k in range(1, max_k + 1):
        prog = build_qft(_reg("x", 0, k))
        for x in range(1 << k):
            state = run(prog, format(x, f"0{k}b")).final_state.amplitudes
            worst = max(worst, float(np.abs(state - bit_reversed_dft(k)[:, x]).max()))
    return PropertyResult("qft_matches_dft", worst <= AMPLITUDE_TOL, f"max error {worst:.2e}")


def qft_inverse_identity(max_k: int = 5) -> PropertyResult:
    worst = 0.0
    for k in range(1, max_k + 1):
        reg = _reg("x", 0, k)
        u = unitary_of(compose([build_qft(reg), build_iqft(reg)]))
        worst = max(worst, float(np.abs(u - np.eye(1 << k)).max()))
    return PropertyResult("qft_inverse_identity", worst <= UNITARY_TOL, f"max error {worst:.2e}")


def pure_programs(max_qubits: int = 10) -> Iterable[tuple[str, Program]]:
    """Every gate-only block and circuit that fits in ``max_qubits``."""
    for k in range(1, 6):
        yield f"qft{k}", build_qft(_reg("x", 0, k))
        yield f"iqft{k}", build_iqft(_reg("x", 0, k))
    for t in range(2, 5):
        for m in range(1, t + 1):
            for modular in (False, True):
                if not modular and m > t - 1:
                    continue
                for direction in ("add", "subtract"):
                    spec = PhaseBlockSpec(_reg("t", 0, t), _reg("b", t, m), direction, modular)
                    yield f"phase_{direction}_{t}_{m}_{modular}", build_phase_add(spec)
    for n in range(2, 5):
        yield f"qtc{n}", build_qtc(n).program
        yield f"qabs{n}", build_qabs(n).program
        for m in range(2, n + 1):
            for build in (build_qnmadd, build_qnmsub, build_qmadd, build_qmsub):
                for pre in (False, True):
                    c = build(n, m, pre)
                    if c.total_qubits <= max_qubits:
                        yield f"{c.name}{n}x{m}{'_copy' if pre else ''}", c.program
            c = build_qcomp(n, m)
            if c.total_qubits <= max_qubits:
                yield f"qcomp{n}x{m}", c.program


def unitarity(max_qubits: int = 10) -> PropertyResult:
    worst, where, count = 0.0, "", 0
    for name, prog in pure_programs(max_qubits):
        u = unitary_of(prog)
        err = float(np.abs(u.conj().T @ u - np.eye(u.shape[0])).max())
        count += 1
        if err > worst:
            worst, where = err, name
    return PropertyResult("unitarity", worst <= UNITARY_TOL,
                          f"{count} programs, max error {worst:.2e} ({where})")


def phase_add_inversion(max_width: int = 4) -> PropertyResult:
    worst = 0.0
    for t in range(2, max_width + 2):
        for m in range(1, min(t, max_width) + 1):
            for modular in (False, True):
                if not modular and m > t - 1:
                    continue
                target, addend = _reg("t", 0, t), _reg("b", t, m)
                add = phase_add_gates(PhaseBlockSpec(target, addend, "add", modular))
                sub = phase_add_gates(PhaseBlockSpec(target, addend, "subtract", modular))
                u = unitary_of(Program(t + m, add + sub))
                worst = max(worst, float(np.abs(u - np.eye(u.shape[0])).max()))
    return PropertyResult("phase_add_inversion", worst <= UNITARY_TOL, f"max error {worst:.2e}")


def phase_add_commutation(max_width: int = 3) -> PropertyResult:
    worst = 0.0
    for t in range(2, max_width + 1):
        for mb in range(1, t + 1):
            for mc in range(1, t + 1):
                target, b, c = _reg("t", 0, t), _reg("b", t, mb), _reg("c", t + mb, mc)
                gb = phase_add_gates(PhaseBlockSpec(target, b, modular=True))
                gc = phase_add_gates(PhaseBlockSpec(target, c, modular=True))
                total = t + mb + mc
                diff = unitary_of(Program(total, gb + gc)) - unitary_of(Program(total, gc + gb))
                worst = max(worst, float(np.abs(diff).max()))
    return PropertyResult("phase_add_commutation", worst <= UNITARY_TOL, f"max error {worst:.2e}")


def add_sub_restore(max_n: int = 4) -> PropertyResult:
    """QNMAdd followed by a phase-space subtraction of ``b`` gives back ``a``."""
    bad = cases = 0
    for n in range(2, max_n + 1):
        for m in range(2, n + 1):
            c = build_qnmadd(n, m)
            acc, b = c.result, c.registers["b"]
            undo = qft_gates(acc) + phase_add_gates(PhaseBlockSpec(acc, b, "subtract")) + iqft_gates(acc)
            prog = Program(c.total_qubits, list(c.program.items) + undo)
            for a in signed_range(n):
                for bv in signed_range(m):
                    cases += 1
                    st = run(prog, c.initial_bits(a=a, b=bv)).final_state
                    if st.read(acc) != a or st.read(b) != bv:
                        bad += 1
    return PropertyResult("add_sub_restore", bad == 0, f"{cases} cases, {bad} failures")


def qtc_involution(max_n: int = 4) -> PropertyResult:
    bad = cases = 0
    for n in range(2, max_n + 1):
        c = build_qtc(n)
        prog = Program(c.total_qubits, list(c.program.items) + list(c.body.items))
        for a in signed_range(n):
            cases += 1
            if run(prog, c.initial_bits(a=a)).final_state.read(c.result) != a:
                bad += 1
    return PropertyResult("qtc_involution", bad == 0, f"{cases} cases, {bad} failures")


def qabs_idempotence(max_n: int = 4) -> PropertyResult:
    """``|(|a|)| == |a|`` on the number register; ``-2**(n-1)`` is excluded."""
    bad = cases = 0
    for n in range(2, max_n + 1):
        c = build_qabs(n)
        s, a_reg = c.registers["s"][0], c.registers["a"]
        for a in signed_range(n):
            if a == -(1 << (n - 1)):
                continue
            cases += 1
            once = run(c.program, c.initial_bits(a=a)).final_state
            bits = list(once.dominant()[0])
            bits[s] = "0"  # fresh sign store for the second pass
            twice = run(c.body, "".join(bits)).final_state
            if twice.read(a_reg) != once.read(a_reg) or once.read(a_reg) != abs(a):
                bad += 1
    return PropertyResult("qabs_idempotence", bad == 0, f"{cases} cases, {bad} failures")


def _random_state(rng: np.random.Generator, n_qubits: int) -> np.ndarray:
    v = rng.normal(size=1 << n_qubits) + 1j * rng.normal(size=1 << n_qubits)
    return v / np.linalg.norm(v)


def linearity(seed: int = 7, trials: int = 5) -> PropertyResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for c in (build_qnmadd(3, 2), build_qcomp(3, 2), build_qabs(3)):
        nq = c.total_qubits
        for _ in range(trials):
            x, y = rng.integers(0, 1 << nq, size=2)
            alpha, beta = rng.normal(size=2) + 1j * rng.normal(size=2)
            norm = math.hypot(abs(alpha), abs(beta)) if x != y else abs(alpha + beta)
            alpha, beta = alpha / norm, beta / norm
            psi = np.zeros(1 << nq, dtype=complex)
            psi[x] += alpha
            psi[y] += beta
            out = run(c.program, StateVector(psi, nq)).final_state.amplitudes
            ox = run(c.program, format(int(x), f"0{nq}b")).final_state.amplitudes
            oy = run(c.program, format(int(y), f"0{nq}b")).final_state.amplitudes
            worst = max(worst, float(np.abs(out - (alpha * ox + beta * oy)).max()))
    return PropertyResult("linearity", worst <= AMPLITUDE_TOL, f"max error {worst:.2e}")


def norm_preservation(seed: int = 11, max_qubits: int = 10) -> PropertyResult:
    """Norm stays within 1e-10 after every gate, on random superpositions."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _, prog in pure_programs(max_qubits):
        n = prog.total_qubits
        amps = _random_state(rng, n)
        for g in prog.items:
            _apply(amps, n, g)
            worst = max(worst, abs(float(np.linalg.norm(amps)) - 1.0))
    return PropertyResult("norm_preservation", worst <= AMPLITUDE_TOL, f"max drift {worst:.2e}")


def count_formulas(max_n: int = 8) -> PropertyResult:
    """Blocks and adder circuits against their closed forms for ``2 <= m <= n <= max_n``.

    With the default CNOT sign preparation the non-modular circuits must be
    off by one constant; with the literal preparation they must match.
    """
    problems = []
    deltas: dict[str, set[int]] = {"qnmadd": set(), "qnmsub": set()}
    for n in range(2, max_n + 1):
        for m in range(2, n + 1):
            for op in BLOCK_OPS:
                if op in ("uc", "ur") and m != n:
                    continue
                r = report(op, n, m)
                if r.delta != 0:
                    problems.append(f"{op}({n},{m}) delta {r.delta}")
            for op in ("qmadd", "qmsub"):
                if report(op, n, m).delta != 0:
                    problems.append(f"{op}({n},{m})")
            for op in ("qnmadd", "qnmsub"):
                if report(op, n, m, sign_prep="literal").delta != 0:
                    problems.append(f"{op}-literal({n},{m})")
                deltas[op].add(report(op, n, m).delta)
        if report("qtc", n).delta != 0:
            problems.append(f"qtc({n})")
    for op, ds in deltas.items():
        if len(ds) != 1:
            problems.append(f"{op} delta not constant: {sorted(ds)}")
    detail = "; ".join(problems) or f"fallback deltas {deltas['qnmadd']} (add), {deltas['qnmsub']} (sub)"
    return PropertyResult("count_formulas", not problems, detail)


SCALING_OPS = ("qft", "qnmadd", "qnmsub", "qmadd", "qmsub", "qtc", "qabs", "qcomp",
               "qnmmul", "qnmdiv", "qexp")


def quadratic_scaling(ops: Iterable[str] = SCALING_OPS) -> PropertyResult:
    """A quadratic least-squares fit over ``n = m = 2..8`` has a positive leading term
    and leaves almost nothing unexplained."""
    problems = []
    for op in ops:
        ns = np.arange(2, 9)
        coef = quadratic_fit(op, ns)
        totals = np.array([report(op, int(n), int(n)).weighted_total for n in ns], dtype=float)
        resid = totals - np.polyval(coef, ns)
        r2 = 1 - resid.var() / totals.var()
        if coef[0] <= 0 or r2 < 0.999:
            problems.append(f"{op}: c2={coef[0]:.3f} r2={r2:.5f}")
    return PropertyResult("quadratic_scaling", not problems, "; ".join(problems) or "all quadratic")


def mul_div_duality(max_n: int = 3) -> PropertyResult:
    """``div(mul(q, b), b) == q`` whenever the product fits its register."""
    bad = cases = 0
    for n in range(2, max_n + 1):
        for m in range(2, n + 1):
            mul = build_qnmmul(n, m, preserve_b=False)
            width = n + m - 1
            div = build_qnmdiv(width, m, preserve_inputs=False)
            for q in signed_range(n):
                for b in signed_range(m):
                    if b == 0 or not oracles.fits(q * b, width):
                        continue
                    cases += 1
                    prod = execute(mul, q, b).value
                    if execute(div, prod, b).value != q:
                        bad += 1
    return PropertyResult("mul_div_duality", bad == 0, f"{cases} cases, {bad} failures")


PROPERTIES: dict[str, Callable[[], PropertyResult]] = {
    "qft_matches_dft": qft_matches_dft,
    "qft_inverse_identity": qft_inverse_identity,
    "unitarity": unitarity,
    "phase_add_inversion": phase_add_inversion,
    "phase_add_commutation": phase_add_commutation,
    "add_sub_restore": add_sub_restore,
    "qtc_involution": qtc_involution,
    "qabs_idempotence": qabs_idempotence,
    "linearity": linearity,
    "norm_preservation": norm_preservation,
    "count_formulas": count_formulas,
    "quadratic_scaling": quadratic_scaling,
    "mul_div_duality": mul_div_duality,
}


def run_properties(names: Iterable[str] | None = None) -> list[PropertyResult]:
    return [PROPERTIES[name]() for name in (names or PROPERTIES)]
