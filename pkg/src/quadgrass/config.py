"""Central tolerance record shared by every module."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    feasibility: float = 1e-10
    residual: float = 1e-10
    gap: float = 1e-8
    # relative asymmetry of loaded matrices: warn above `sym_warn`, refuse above `sym_hard`
    sym_warn: float = 1e-8
    sym_hard: float = 1e-4


DEFAULT_TOL = Tolerances()
