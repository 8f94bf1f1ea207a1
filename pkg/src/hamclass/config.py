"""Library-wide numerical constants and size caps."""

from __future__ import annotations

import os
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    norm: float = 1e-9
    unitarity: float = 1e-10
    hermiticity: float = 1e-12
    # relative to (lambda_max - lambda_min + 1)
    degeneracy: float = 1e-7
    lp_tie: float = 1e-12


TOL = Tolerances()

MAX_QUBITS = int(os.environ.get("HAMCLASS_MAX_QUBITS", "24"))
ORACLE_MAX_QUBITS = 14
MAX_LOCAL_QUBITS = 6
