"""Exhaustive oracle sweeps and property checks."""
from .properties import PropertyResult, run_properties
from .reports import sweep_json, sweep_junit
from .sweep import SweepReport, SweepSpec, run_sweep

__all__ = ["PropertyResult", "SweepReport", "SweepSpec", "run_properties", "run_sweep",
           "sweep_json", "sweep_junit"]
