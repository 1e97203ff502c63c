import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qftarith.blocks import (PhaseBlockSpec, build_iqft, build_phase_add, build_qft, iqft_gates,
                             phase_add_gates, qft_gates)
from qftarith.errors import WidthError
from qftarith.ir import Control, GateKind, Program, Register, compose, encode_signed, signed_range
from qftarith.simulator import run, unitary_of


def reg(name, start, width):
    return Register(name, tuple(range(start, start + width)))


def wrap(v, w):
    v &= (1 << w) - 1
    return v - (1 << w) if v >> (w - 1) else v


def test_qft_one_qubit_is_hadamard():
    prog = build_qft(reg("x", 0, 1))
    assert len(prog) == 1 and prog.items[0].kind is GateKind.H


@pytest.mark.parametrize("k", range(1, 7))
def test_qft_gate_tally(k):
    prog = build_qft(reg("x", 0, k))
    hs = sum(1 for g in prog.items if g.kind is GateKind.H)
    cps = sum(1 for g in prog.items if g.kind is GateKind.PHASE and len(g.controls) == 1)
    assert (hs, cps, len(prog)) == (k, k * (k - 1) // 2, k * (k + 1) // 2)
    inv = build_iqft(reg("x", 0, k))
    assert len(inv) == k * (k + 1) // 2
    assert all(g.inverse for g in inv.items if g.kind is GateKind.PHASE)


@pytest.mark.parametrize("k", range(1, 6))
def test_iqft_inverts_qft(k):
    r = reg("x", 0, k)
    u = unitary_of(compose([build_qft(r), build_iqft(r)]))
    assert np.abs(u - np.eye(1 << k)).max() < 1e-9


def test_iqft_exhaustive_k4():
    r = reg("x", 0, 4)
    prog = compose([build_qft(r), build_iqft(r)])
    for v in range(16):
        bits = format(v, "04b")
        assert run(prog, bits).final_state.dominant()[0] == bits


def test_qft_phase_layout():
    # after the QFT, qubit j carries phase 2*pi*x / 2**(k-j)
    k, xv = 4, 11
    amps = run(build_qft(reg("x", 0, k)), format(xv, "04b")).final_state.amplitudes
    for j in range(k):
        bit = 1 << (k - 1 - j)
        ratio = amps[bit] / amps[0]
        assert np.isclose(ratio, np.exp(2j * np.pi * xv / 2 ** (k - j)))


def test_phase_block_validation():
    with pytest.raises(WidthError):
        PhaseBlockSpec(reg("t", 0, 3), reg("b", 3, 3))          # non-modular needs m <= T-1
    PhaseBlockSpec(reg("t", 0, 3), reg("b", 3, 3), modular=True)
    with pytest.raises(ValueError):
        PhaseBlockSpec(reg("t", 0, 3), reg("b", 2, 2))
    with pytest.raises(ValueError):
        PhaseBlockSpec(reg("t", 0, 3), reg("b", 3, 2), direction="sideways")


@pytest.mark.parametrize("n", range(2, 9))
def test_phase_block_counts(n):
    for m in range(2, n + 1):
        nm = phase_add_gates(PhaseBlockSpec(reg("t", 0, n + 1), reg("b", n + 1, m)))
        md = phase_add_gates(PhaseBlockSpec(reg("t", 0, n), reg("b", n, m), modular=True))
        assert len(nm) == m * (m + 1) // 2 + m * (n + 1 - m)
        assert len(md) == m * (m + 1) // 2 + m * (n - m)


def test_nmadd_count_n3():
    assert len(build_phase_add(PhaseBlockSpec(reg("t", 0, 4), reg("b", 4, 3)))) == 9


def _in_fourier(t, b, **kw):
    spec = PhaseBlockSpec(t, b, **kw)
    return Program(t.width + b.width, qft_gates(t) + phase_add_gates(spec) + iqft_gates(t))


def test_add_zero_keeps_phase_state():
    t, b = reg("t", 0, 5), reg("b", 5, 3)
    prog = compose([build_qft(t), build_phase_add(PhaseBlockSpec(t, b))])
    ref = run(build_qft(t).widened(8), "00000000").final_state.amplitudes
    assert np.allclose(run(prog, "00000000").final_state.amplitudes, ref)


def test_add_minus_two_to_three():
    t, b = reg("t", 0, 5), reg("b", 5, 3)
    st_ = run(_in_fourier(t, b), encode_signed(3, 5) + encode_signed(-2, 3)).final_state
    assert st_.read(t) == 1 and st_.read(b) == -2


@pytest.mark.parametrize("direction", ["add", "subtract"])
@pytest.mark.parametrize("modular", [False, True])
def test_sign_extension_exhaustive(direction, modular):
    for tw in range(2, 6):
        for m in range(1, 5):
            if m > (tw if modular else tw - 1):
                continue
            t, b = reg("t", 0, tw), reg("b", tw, m)
            prog = _in_fourier(t, b, direction=direction, modular=modular)
            for tv in signed_range(tw):
                for bv in signed_range(m):
                    st_ = run(prog, encode_signed(tv, tw) + encode_signed(bv, m)).final_state
                    want = wrap(tv + bv if direction == "add" else tv - bv, tw)
                    assert st_.read(t) == want, (tw, m, tv, bv)
                    assert st_.read(b) == bv


def test_unsigned_addend():
    t, b = reg("t", 0, 4), reg("b", 4, 2)
    prog = _in_fourier(t, b, modular=True, signed=False)
    for tv in range(-8, 8):
        for bv in range(4):
            st_ = run(prog, encode_signed(tv, 4) + format(bv, "02b")).final_state
            assert st_.read(t) == wrap(tv + bv, 4)


def test_controlled_block_respects_controls():
    t, b = reg("t", 0, 3), reg("b", 3, 1)
    spec = PhaseBlockSpec(t, b, modular=True, signed=False, controls=(Control(4),))
    prog = Program(5, qft_gates(t) + phase_add_gates(spec) + iqft_gates(t))
    assert run(prog, "001" + "1" + "0").final_state.read(t) == 1
    assert run(prog, "001" + "1" + "1").final_state.read(t) == 2


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 4), st.data())
def test_add_then_subtract_identity(tw, data):
    m = data.draw(st.integers(1, tw))
    t, b = reg("t", 0, tw), reg("b", tw, m)
    add = phase_add_gates(PhaseBlockSpec(t, b, modular=True))
    sub = phase_add_gates(PhaseBlockSpec(t, b, "subtract", modular=True))
    u = unitary_of(Program(tw + m, add + sub))
    assert np.abs(u - np.eye(u.shape[0])).max() < 1e-9


def test_blocks_commute():
    t, b, c = reg("t", 0, 3), reg("b", 3, 2), reg("c", 5, 2)
    gb = phase_add_gates(PhaseBlockSpec(t, b, modular=True))
    gc = phase_add_gates(PhaseBlockSpec(t, c, "subtract", modular=True))
    assert np.allclose(unitary_of(Program(7, gb + gc)), unitary_of(Program(7, gc + gb)))
