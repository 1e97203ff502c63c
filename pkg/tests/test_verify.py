import ast
import json
import pathlib
import xml.etree.ElementTree as ET

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qftarith.errors import ResourceBound, UnknownOp
from qftarith.verify import (PropertyResult, SweepSpec, run_properties, run_sweep, sweep_json,
                             sweep_junit)
from qftarith.verify import oracles
from qftarith.verify.properties import PROPERTIES, bit_reversed_dft
from qftarith.verify.sweep import expected_iterations


def test_oracles_import_nothing_from_the_package():
    src = pathlib.Path(oracles.__file__).read_text()
    for node in ast.walk(ast.parse(src)):
        if isinstance(node, ast.ImportFrom):
            assert node.level == 0 and node.module == "__future__", node.module
        elif isinstance(node, ast.Import):
            assert not any(a.name.startswith("qftarith") for a in node.names)


@given(st.integers(-1000, 1000), st.integers(1, 12))
def test_wrap_lands_in_range(v, w):
    r = oracles.wrap(v, w)
    assert oracles.fits(r, w) and (r - v) % (1 << w) == 0


def test_oracle_values():
    assert oracles.trunc_div(-7, 2) == -3 and oracles.trunc_div(7, -2) == -3
    assert oracles.trunc_div(-7, -2) == 3
    assert oracles.compare(-3, 2) == "a<b" and oracles.compare(2, 2) == "a=b"
    assert oracles.compare(5, -5) == "a>b"
    assert oracles.negate(-8, 4) == -8 and oracles.absolute(-8, 4) == -8
    assert oracles.multiply(-4, -4, 5) == -16
    assert oracles.power(3, 3, 5) == -5 and oracles.power(2, 0, 5) == 1
    assert oracles.mod_add(7, 1, 4) == -8


def test_qnmadd_sweep_n4():
    rep = run_sweep(SweepSpec("qnmadd", (4,), (4,)))
    assert (rep.cases, rep.failures) == (256, [])


def test_qcomp_sweep_n4_m3():
    rep = run_sweep(SweepSpec("qcomp", (4,), (3,)))
    assert (rep.cases, rep.failures) == (128, [])


def test_modular_flag_selects_wrapping_adder():
    rep = run_sweep(SweepSpec("add", (3,), modular=True))
    assert rep.op == "qmadd" and rep.ok and rep.cases == 8 * (4 + 8)


def test_qnmdiv_sweep_n3():
    wide = run_sweep(SweepSpec("qnmdiv", (3,), (3,), options=(("result_width", lambda n, m: n + 1),)))
    assert (wide.cases, wide.failures) == (56, [])
    narrow = run_sweep(SweepSpec("qnmdiv", (3,), (3,)))
    assert narrow.cases == 56
    assert [(f.inputs, f.expected, f.got) for f in narrow.failures] == [((-4, -1), 4, -4)]


def test_predicate_override_and_failures_reported():
    # a deliberately wrong oracle shows up as failures with inputs
    rep = run_sweep(SweepSpec("qmadd", (2,), (2,), oracle="add"))
    assert not rep.ok
    assert all(f.reason == "wrong result" for f in rep.failures)
    assert {f.inputs for f in rep.failures} == {(1, 1), (-2, -1), (-2, -2), (-1, -2)}


def test_sweep_is_reproducible():
    spec = SweepSpec("qnmmulv2", (2, 3))
    first, second = run_sweep(spec), run_sweep(spec)
    assert first == second
    assert sweep_json([first]) == sweep_json([second])


def test_workers_do_not_change_the_report():
    spec = SweepSpec("qnmsub", (3, 4), (2, 3))
    assert run_sweep(spec, workers=1) == run_sweep(spec, workers=3)


def test_qubit_cap():
    with pytest.raises(ResourceBound):
        run_sweep(SweepSpec("qexp", (4,), (4,), max_qubits=20))


def test_unknown_op():
    with pytest.raises(UnknownOp):
        SweepSpec("qsqrt", (3,)).widths()


def test_widths():
    assert SweepSpec("qtc", (2, 3)).widths() == [(2, 0), (3, 0)]
    assert SweepSpec("qnmadd", (2, 3)).widths() == [(2, 2), (3, 2), (3, 3)]
    assert SweepSpec("qnmadd", (3,), (2, 5)).widths() == [(3, 2)]


def test_expected_iterations():
    assert expected_iterations("qnmmul", 3, -2) == {"mul": 2}
    assert expected_iterations("qnmdiv", -7, 2) == {"div": 4}
    assert expected_iterations("qexp", 2, 3) == {"exp": 3}
    assert expected_iterations("qtc", 2, 0) == {}


def test_json_report():
    data = json.loads(sweep_json([run_sweep(SweepSpec("qtc", (2, 3)))]))
    assert data["format_version"] == 1
    sweep = data["sweeps"][0]
    assert sweep["op"] == "qtc" and sweep["cases"] == 12 and sweep["failures"] == []
    assert [w["n"] for w in sweep["widths"]] == [2, 3]


def test_junit_report():
    good = run_sweep(SweepSpec("qtc", (2, 3)))
    bad = run_sweep(SweepSpec("qmadd", (2,), (2,), oracle="add"))
    root = ET.fromstring(sweep_junit([good, bad]))
    suites = root.findall("testsuite")
    assert [s.get("name") for s in suites] == ["qtc", "qmadd"]
    assert suites[0].get("failures") == "0" and len(suites[0].findall("testcase")) == 2
    failure = suites[1].find("testcase/failure")
    assert failure is not None and "inputs=(1, 1)" in failure.text


def test_bit_reversed_dft_is_unitary():
    u = bit_reversed_dft(3)
    assert np.allclose(u.conj().T @ u, np.eye(8))


@pytest.mark.parametrize("name", ["qft_inverse_identity", "phase_add_commutation",
                                  "qtc_involution", "linearity"])
def test_quick_properties(name):
    (res,) = run_properties([name])
    assert isinstance(res, PropertyResult) and res.passed, res.detail


def test_property_registry():
    assert {"unitarity", "add_sub_restore", "qtc_involution", "linearity", "norm_preservation",
            "count_formulas"} <= set(PROPERTIES)
