import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qftarith.blocks import build_iqft, build_qft
from qftarith.builders import build_qnmadd
from qftarith.errors import LoopBoundExceeded, NormError, NotPure
from qftarith.ir import Measure, Program, Register, RepeatUntil, compose, h, neg, phase, x
from qftarith.simulator import StateVector, apply_gate, phase_factor, run, unitary_of

S = 1 / math.sqrt(2)


def test_hadamard_on_zero():
    st_ = apply_gate(StateVector.zeros(1), h(0))
    assert np.allclose(st_.amplitudes, [S, S])


def test_phase_k1_on_one():
    st_ = apply_gate(StateVector.from_bits("1"), phase(0, 1))
    assert np.allclose(st_.amplitudes, [0, -1])


def test_negative_control_fires_on_zero():
    st_ = apply_gate(StateVector.from_bits("00"), x(1, neg(0)))
    assert st_.dominant() == ("01", 1.0)
    st_ = apply_gate(StateVector.from_bits("10"), x(1, neg(0)))
    assert st_.dominant() == ("10", 1.0)


def test_qubit_zero_is_high_order_bit():
    st_ = apply_gate(StateVector.zeros(3), x(0))
    assert int(np.argmax(np.abs(st_.amplitudes))) == 0b100


def test_apply_gate_bad_index():
    with pytest.raises(IndexError):
        apply_gate(StateVector.zeros(2), x(2))


def test_phase_factor_is_exact_per_k():
    assert phase_factor(2) == pytest.approx(1j)
    assert phase_factor(2, inverse=True) == pytest.approx(-1j)
    assert abs(phase_factor(40)) == pytest.approx(1.0)


def test_empty_program_identity():
    res = run(Program(4), "0101")
    assert res.final_state.dominant() == ("0101", 1.0)
    assert res.deterministic


def test_qft_then_iqft_restores():
    reg = Register("r", (0, 1, 2))
    res = run(compose([build_qft(reg), build_iqft(reg)]), "011")
    assert res.final_state.dominant()[0] == "011"
    assert res.final_state.dominant()[1] == pytest.approx(1.0)


def test_two_qubit_qft_of_one():
    # the register is read least-significant qubit first after the swap-free QFT
    amps = run(build_qft(Register("r", (0, 1))), "01").final_state.amplitudes
    reordered = amps[[0b00, 0b10, 0b01, 0b11]]
    assert np.allclose(reordered, np.array([1, 1j, -1, -1j]) / 2, atol=1e-12)


def test_initial_length_mismatch():
    with pytest.raises(ValueError):
        run(Program(3), "01")


def test_initial_state_not_mutated():
    psi = StateVector.zeros(1)
    run(Program(1, [x(0)]), psi)
    assert psi.dominant()[0] == "0"


def test_unitary_examples():
    assert np.allclose(unitary_of(Program(1)), np.eye(2))
    assert np.allclose(unitary_of(Program(1, [h(0)])), np.array([[1, 1], [1, -1]]) * S)


def test_unitary_of_qft3_is_dft_up_to_bit_reversal():
    u = unitary_of(build_qft(Register("r", (0, 1, 2))))
    w = np.exp(2j * np.pi / 8)
    rev = [int(format(y, "03b")[::-1], 2) for y in range(8)]
    dft = np.array([[w ** (xx * yy) for xx in range(8)] for yy in range(8)]) / math.sqrt(8)
    assert np.allclose(u, dft[rev], atol=1e-12)


def test_unitary_of_rejects_loops():
    with pytest.raises(NotPure):
        unitary_of(Program(1, [Measure(0, "m")]))


def test_measurement_snaps_and_samples():
    res = run(Program(1, [x(0), Measure(0, "m")]))
    assert res.classical_bits == {"m": 1} and res.deterministic
    outcomes = {run(Program(1, [h(0), Measure(0, "m")]), seed=s).classical_bits["m"]
                for s in range(20)}
    assert outcomes == {0, 1}
    res = run(Program(1, [h(0), Measure(0, "m")]), seed=3)
    assert not res.deterministic
    assert res.final_state.norm() == pytest.approx(1.0)
    again = run(Program(1, [h(0), Measure(0, "m")]), seed=3)
    assert again.classical_bits == res.classical_bits


def test_superposed_input_is_not_deterministic():
    psi = StateVector(np.array([S, S]), 1)
    assert not run(Program(1, [x(0)]), psi).deterministic


def test_repeat_until_counts_passes():
    # counter on qubits 1..2 incremented until it reaches 3, flag on qubit 0
    body = (x(1, 2), x(2), x(0, 1, 2))
    prog = Program(3, [RepeatUntil(body, flag=0, expect=1, max_iters=5, label="count")])
    res = run(prog, "000")
    assert res.iterations_used == {"count": 3}
    assert res.final_state.dominant()[0] == "111"


def test_repeat_until_zero_passes_when_flag_set():
    prog = Program(2, [RepeatUntil((x(1),), flag=0)])
    res = run(prog, "10")
    assert res.iterations_used == {"loop": 0}
    assert res.final_state.dominant()[0] == "10"


def test_loop_bound():
    prog = Program(2, [RepeatUntil((x(1),), flag=0, max_iters=3, label="never")])
    with pytest.raises(LoopBoundExceeded) as info:
        run(prog, "00")
    assert info.value.label == "never" and info.value.max_iters == 3


def test_norm_error_on_bad_initial_state():
    with pytest.raises(NormError):
        run(Program(1, [h(0)]), StateVector(np.array([1.0, 1.0]), 1))


def test_state_dump_is_json_pairs():
    import json
    pairs = json.loads(StateVector.from_bits("1").dumps())
    assert pairs == [[0.0, 0.0], [1.0, 0.0]]


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 7 - 1), st.integers(0, 2 ** 7 - 1),
       st.complex_numbers(max_magnitude=1, min_magnitude=0.1),
       st.complex_numbers(max_magnitude=1, min_magnitude=0.1))
def test_linearity(xi, yi, alpha, beta):
    c = build_qnmadd(3, 3)
    n = c.total_qubits
    psi = np.zeros(1 << n, complex)
    psi[xi] += alpha
    psi[yi] += beta
    scale = np.linalg.norm(psi)
    if scale < 1e-6:
        return
    psi /= scale
    out = run(c.program, StateVector(psi, n), check_every_gate=True).final_state.amplitudes
    ox = run(c.program, format(xi, f"0{n}b")).final_state.amplitudes
    oy = run(c.program, format(yi, f"0{n}b")).final_state.amplitudes
    assert np.allclose(out, (alpha * ox + beta * oy) / scale, atol=1e-10)


def test_norm_after_every_gate():
    rng = np.random.default_rng(0)
    c = build_qnmadd(4, 3)
    n = c.total_qubits
    psi = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    state = StateVector(psi / np.linalg.norm(psi), n)
    for g in c.program.items:
        apply_gate(state, g)
        assert abs(state.norm() - 1) < 1e-10
