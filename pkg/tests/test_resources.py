import csv
import io
import json

import numpy as np
import pytest

from qftarith.builders import build_qnmmul
from qftarith.errors import UnknownOp
from qftarith.ir import Program, RepeatUntil, h, neg, phase, x
from qftarith.ops import execute
from qftarith.resources import (CSV_COLUMNS, CostModel, comparison_rows, comparison_table, count,
                                executed_weight, paper_ancilla, paper_formula, quadratic_fit,
                                report)

MODEL = CostModel()


@pytest.mark.parametrize("gate,w", [
    (h(0), 1), (x(0), 1), (x(1, 0), 1), (phase(1, 2, 0), 1),
    (x(2, 0, 1), 6), (x(2, neg(0), 1), 8), (x(2, neg(0), neg(1)), 10),
    (x(3, 0, 1, 2), 5 * 6 + 1), (x(4, 0, 1, 2, 3), 7 * 6 + 1),
    (x(3, neg(0), neg(1), neg(2)), 31 + 6), (x(1, neg(0)), 3),
    (phase(2, 1, 0, 1), 6),
])
def test_gate_weights(gate, w):
    assert MODEL.weight(gate) == w


def test_weighted_total_is_raw_sum():
    rep = report("qcomp", 4, 3)
    raw = rep.raw_counts
    assert rep.weighted_total == raw["raw_1q"] + raw["raw_cx"] + 6 * raw["raw_ccx_equiv"]


def test_empty_program():
    rep = count(Program(3, []))
    assert rep.weighted_total == 0 and set(rep.raw_counts.values()) == {0}
    assert not rep.per_iteration and rep.loops == {}


def test_qft5():
    assert report("qft", 5).weighted_total == 15 == paper_formula("qft", 5)


def test_qmadd_4():
    rep = report("qmadd", 4, 4)
    assert rep.weighted_total == 30 and rep.delta == 0 and rep.deviation_note is None


@pytest.mark.parametrize("op", ["qft", "iqft", "nmadd", "nmsub", "madd", "msub", "uc", "ur"])
def test_blocks_match_formulas(op):
    for n in range(2, 9):
        for m in range(2, n + 1):
            assert report(op, n, m).delta == 0, (op, n, m)


@pytest.mark.parametrize("op", ["qmadd", "qmsub"])
def test_modular_circuits_match_formulas(op):
    for n in range(2, 9):
        for m in range(2, n + 1):
            assert report(op, n, m).delta == 0


@pytest.mark.parametrize("op", ["qnmadd", "qnmsub"])
def test_non_modular_delta_is_constant(op):
    deltas = {report(op, n, m).delta for n in range(2, 9) for m in range(2, n + 1)}
    assert deltas == {-15}
    assert "delta -15" in report(op, 4, 4).deviation_note
    literal = {report(op, n, m, sign_prep="literal").delta
               for n in range(2, 9) for m in range(2, n + 1)}
    assert literal == {0}


def test_published_values():
    assert paper_formula("qnmadd", 4, 4) == 60
    assert paper_formula("qnmadd", 3, 3) == 45
    assert paper_formula("qcomp", 3, 3) == 68
    assert paper_formula("qtc", 4) == 28
    assert paper_formula("qabs", 4) == 30
    assert paper_formula("qnmmul", 2, 2) == 11 + 16 + 16 + 12 + 7


def test_qnmadd_simplified_form():
    # the general form collapses to 3(n^2+3n+12)/2 at n = m
    for n in range(2, 9):
        assert 2 * paper_formula("qnmadd", n, n) == 3 * (n * n + 3 * n + 12)
        assert 2 * paper_formula("qmadd", n, n) == 3 * (n * n + n)
        assert 2 * paper_formula("qcomp", n, n) == 3 * n * n + 9 * n + 82


def test_qtc_matches():
    for n in range(2, 9):
        assert report("qtc", n).delta == 0


def test_unknown_op():
    with pytest.raises(UnknownOp):
        paper_formula("qsqrt", 3, 3)
    with pytest.raises(UnknownOp):
        paper_ancilla("qsqrt", 3, 3)
    with pytest.raises(UnknownOp):
        comparison_rows(["qsqrt"], [3])


def test_baselines():
    assert report("comp-baseline", 4).weighted_total == 592
    assert report("mul-baseline", 4).ancilla == 32
    assert report("qcomp", 4, 4).ancilla == 3


def test_loop_reports_carry_per_pass_weights():
    rep = report("qnmmul", 3, 3)
    assert rep.per_iteration
    assert rep.loops["mul"]["max_iters"] == 4
    assert rep.loops["mul"]["body_weighted"] > 0
    assert "loop bodies counted once" in rep.deviation_note
    exp = report("qexp", 3, 2)
    assert set(exp.loops) == {"exp", "exp_mul"}
    assert exp.loops["exp"]["body_weighted"] > exp.loops["exp"]["own_weighted"]


def test_executed_weight_scales_with_iterations():
    c = build_qnmmul(3, 3)
    rep = count(c.body)
    per_pass = rep.loops["mul"]["own_weighted"]
    static = rep.weighted_total - per_pass
    out = execute(c, 2, -3)
    prep = len(c.constants)
    assert executed_weight(c.program, out.iterations) == static + prep + 3 * per_pass


def test_executed_weight_ignores_unlisted_loops():
    prog = Program(2, [h(0), RepeatUntil((x(1),), flag=1, max_iters=1)])
    assert executed_weight(prog, {}) == 1


def test_csv_table():
    text = comparison_table(["qmadd", "qtc", "comp-baseline"], range(2, 5))
    rows = list(csv.DictReader(io.StringIO(text)))
    assert tuple(rows[0]) == CSV_COLUMNS
    qm = [r for r in rows if r["op"] == "qmadd" and r["n"] == "4" and r["m"] == "4"][0]
    assert (qm["weighted_total"], qm["paper_formula"], qm["delta"], qm["ancilla"]) == \
        ("30", "30", "0", "0")
    assert sum(r["op"] == "qtc" for r in rows) == 3


def test_json_table():
    data = json.loads(comparison_table(["qft"], [3], format="json"))
    assert data["format_version"] == 1 and data["columns"] == list(CSV_COLUMNS)
    assert data["rows"][0]["weighted_total"] == 6
    with pytest.raises(ValueError):
        comparison_table(["qft"], [3], format="xlsx")


@pytest.mark.parametrize("op", ["qft", "qmadd", "qnmadd", "qtc", "qabs", "qcomp",
                                "qnmmul", "qnmdiv", "qexp"])
def test_quadratic_scaling(op):
    c2, c1, c0 = quadratic_fit(op)
    assert c2 > 0
    ns = np.arange(2, 9)
    fitted = c2 * ns ** 2 + c1 * ns + c0
    actual = np.array([report(op, n, n).weighted_total for n in ns])
    assert np.abs(fitted - actual).max() / actual.max() < 0.05


def test_report_to_dict_round_trips_json():
    d = report("qnmdiv", 3, 2).to_dict()
    assert json.loads(json.dumps(d))["delta"] == d["delta"]
