"""Trotterized adiabatic evolution over three scheduled term families."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels
from .model import TrainingLayout
from .tensor import StateVector, WeightedTermList, check_register, data_marginal

Breakpoints = tuple[tuple[float, float], ...]


@dataclass(frozen=True)
class AnnealConfig:
    R: int = 100
    n_T: int = 30
    tau: float = 20.0

    def __post_init__(self):
        if self.R < 1 or self.n_T < 1:
            raise ValueError("R and n_T must be >= 1")
        if not self.tau > 0:
            raise ValueError("tau must be positive")
        if not (5 <= self.R <= 150 and 5 <= self.n_T <= 150):
            warnings.warn(
                f"(R={self.R}, n_T={self.n_T}) outside the benchmarked range 5..150",
                stacklevel=2,
            )

    def to_json(self) -> dict:
        return {"R": self.R, "n_T": self.n_T, "tau": self.tau}


def _check_curve(name: str, pts: Breakpoints) -> Breakpoints:
    pts = tuple((float(t), float(s)) for t, s in pts)
    ts = [t for t, _ in pts]
    if len(pts) < 2 or ts[0] != 0.0 or ts[-1] != 1.0 or any(b < a for a, b in zip(ts, ts[1:])):
        raise ValueError(f"{name} schedule must be breakpoints from t=0 to t=1, sorted")
    return pts


@dataclass(frozen=True)
class AnnealSchedule:
    """Piecewise-linear strength curves for the driver, data and control families."""

    driver: Breakpoints = ((0.0, 1.0), (0.125, 1.0), (1.0, 0.0))
    data: Breakpoints = ((0.0, 0.0), (0.125, 0.25), (1.0, 1.0))
    control: Breakpoints = ((0.0, 0.0), (0.125, 0.0), (1.0, 1.0))

    def __post_init__(self):
        for name in ("driver", "data", "control"):
            object.__setattr__(self, name, _check_curve(name, getattr(self, name)))

    def to_json(self) -> dict:
        return {k: [list(p) for p in getattr(self, k)] for k in ("driver", "data", "control")}

    @classmethod
    def from_json(cls, obj: dict) -> AnnealSchedule:
        base = cls()
        return cls(**{k: tuple(map(tuple, obj.get(k, getattr(base, k)))) for k in ("driver", "data", "control")})


DEFAULT_SCHEDULE = AnnealSchedule()


def schedule_strengths(schedule: AnnealSchedule, t: float) -> tuple[float, float, float]:
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"schedule time {t} outside [0, 1]")
    out = []
    for pts in (schedule.driver, schedule.data, schedule.control):
        ts, ss = zip(*pts)
        out.append(float(np.interp(t, ts, ss)))
    return out[0], out[1], out[2]


def initial_state(n: int) -> StateVector:
    """Uniform superposition, the ground state of -sum X."""
    return StateVector.uniform(n)


# ---------------------------------------------------------------------------
# Trotter stages
# ---------------------------------------------------------------------------


def _compile(H: WeightedTermList, n: int) -> list:
    """Split H into ordered stages; runs of diagonal terms fuse into one vector.

    Diagonal terms commute, so fusing a run leaves the product formula exact
    with respect to that run.
    """
    stages: list = []
    run = None
    for c, term in H:
        if c == 0.0:
            continue
        d = term.diagonal(n)
        if d is not None:
            run = c * d if run is None else run + c * d
            continue
        if run is not None:
            stages.append(("diag", run))
            run = None
        stages.append(("gate", c, term))
    if run is not None:
        stages.append(("diag", run))
    return stages


def _materialize(stages, strength: float, dt: float) -> list:
    ops = []
    if strength == 0.0:
        return ops
    for st in stages:
        if st[0] == "diag":
            ops.append(("diag", np.exp(-1j * strength * dt * st[1])))
        else:
            ops.append(("gate",) + st[2].gate(strength * st[1] * dt))
    return ops


def _apply_ops(psi: np.ndarray, n: int, ops: list) -> None:
    for op in ops:
        if op[0] == "diag":
            psi *= op[1]
        else:
            _kernels.apply_matrix(psi, n, op[1], op[2], op[3], op[4])


def trotter_evolve(state: StateVector, H: WeightedTermList, t: float, n_T: int) -> StateVector:
    """(prod_i exp(-i a_i h_i t/n_T))^n_T |state>, terms in list order."""
    out = state.copy()
    ops = _materialize(_compile(H, state.n), 1.0, t / n_T)
    for _ in range(n_T):
        _apply_ops(out.amplitudes, state.n, ops)
    return out


# ---------------------------------------------------------------------------
# anneal
# ---------------------------------------------------------------------------


@dataclass
class ControlStats:
    per_control: np.ndarray  # p(|1>) per control qubit
    blocks: np.ndarray  # distribution over the whole control register
    term_marginals: np.ndarray  # per term instance: probability its block is on


@dataclass
class AnnealResult:
    state: StateVector
    data_distribution: np.ndarray | None = None
    controls: ControlStats | None = None
    strengths: list[tuple[float, float, float]] = field(default_factory=list)


def control_statistics(state: StateVector, layout: TrainingLayout) -> ControlStats:
    """Control-qubit marginals and block probabilities for a training layout."""
    if state.n != layout.n_qubits:
        raise ValueError(f"state has {state.n} qubits, layout needs {layout.n_qubits}")
    probs = state.probabilities()
    cq = list(layout.control_qubits)
    per_control = np.array([register_p1(probs, state.n, q) for q in cq])
    blocks = data_marginal(state, cq) if cq else np.ones(1)
    terms = np.empty(len(layout.controls))
    cache: dict[tuple[int, ...], np.ndarray] = {}
    for i, (qubits, pattern) in enumerate(layout.controls):
        if qubits not in cache:
            cache[qubits] = data_marginal(state, qubits)
        code = int("".join(map(str, pattern)), 2)
        terms[i] = cache[qubits][code]
    return ControlStats(per_control, blocks, terms)


def register_p1(probs: np.ndarray, n: int, q: int) -> float:
    return float(probs.reshape((2,) * n).sum(axis=tuple(a for a in range(n) if a != q))[1])


def run_anneal(
    driver: WeightedTermList,
    data: WeightedTermList,
    control: WeightedTermList,
    config: AnnealConfig,
    schedule: AnnealSchedule = DEFAULT_SCHEDULE,
    n: int | None = None,
    *,
    layout: TrainingLayout | None = None,
    data_qubits: Sequence[int] | None = None,
    record_strengths: bool = False,
) -> AnnealResult:
    """Anneal from the uniform superposition under the scheduled families.

    Step r = 1..R sits at t = r/R and evolves for tau/R using n_T first-order
    Trotter slices; within a slice the driver terms come first, then data
    terms, then control terms, each family in list order. Sign conventions
    (e.g. the data family entering as -delta * projector) belong to the
    caller's term coefficients.
    """
    qubits = driver.qubits | data.qubits | control.qubits
    if n is None:
        n = (max(qubits) + 1) if qubits else 0
    check_register(n)
    if qubits and max(qubits) >= n:
        raise ValueError("term lists reach beyond the register")

    families = [_compile(driver, n), _compile(data, n), _compile(control, n)]
    state = initial_state(n)
    psi = state.amplitudes
    dt = config.tau / (config.R * config.n_T)
    strengths = []
    for r in range(1, config.R + 1):
        s = schedule_strengths(schedule, r / config.R)
        if record_strengths:
            strengths.append(s)
        ops = []
        for fam, strength in zip(families, s):
            ops.extend(_materialize(fam, strength, dt))
        for _ in range(config.n_T):
            _apply_ops(psi, n, ops)

    result = AnnealResult(state, strengths=strengths)
    if data_qubits is not None:
        result.data_distribution = data_marginal(state, data_qubits)
    if layout is not None:
        result.controls = control_statistics(state, layout)
    return result
