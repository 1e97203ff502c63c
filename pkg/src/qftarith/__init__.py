"""Signed QFT-based quantum arithmetic: circuit builders, simulator and gate counts."""
from .builders import ArithCircuit, build
from .ops import compute, execute, make_circuit
from .resources import report
from .simulator import StateVector, run

__version__ = "0.1.0"

__all__ = ["ArithCircuit", "StateVector", "build", "compute", "execute", "make_circuit",
           "report", "run"]
