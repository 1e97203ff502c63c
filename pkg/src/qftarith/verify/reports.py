"""JSON and JUnit-style XML emission for sweep reports."""
from __future__ import annotations

import json
import xml.etree.ElementTree as ET
from dataclasses import asdict
from typing import Sequence

from .sweep import SweepReport


def sweep_dict(report: SweepReport) -> dict:
    return {
        "op": report.op,
        "cases": report.cases,
        "failures": [asdict(f) for f in report.failures],
        "widths": [{"n": w.n, "m": w.m, "qubits": w.qubits, "cases": w.cases,
                    "failures": len(w.failures)} for w in report.widths],
    }


def sweep_json(reports: Sequence[SweepReport]) -> str:
    return json.dumps({"format_version": 1, "sweeps": [sweep_dict(r) for r in reports]},
                      indent=2)


def sweep_junit(reports: Sequence[SweepReport]) -> str:
    """One ``testsuite`` per operation, one ``testcase`` per ``(n, m)``."""
    root = ET.Element("testsuites")
    for rep in reports:
        suite = ET.SubElement(root, "testsuite", name=rep.op, tests=str(len(rep.widths)),
                              failures=str(sum(1 for w in rep.widths if w.failures)),
                              time=f"{rep.elapsed:.3f}")
        for w in rep.widths:
            case = ET.SubElement(suite, "testcase", classname=rep.op, name=f"n{w.n}_m{w.m}")
            if w.failures:
                lines = [f"inputs={f.inputs} expected={f.expected} got={f.got} ({f.reason})"
                         for f in w.failures]
                fail = ET.SubElement(case, "failure",
                                     message=f"{len(w.failures)} of {w.cases} cases failed")
                fail.text = "\n".join(lines)
    return ET.tostring(root, encoding="unicode")
