"""Training schemes for classifier Hamiltonians.

* ``train_one_shot``: two anneals (YES projector, NO projector) over the
  controlled training Hamiltonian; weights come from control marginals.
* ``train_serial``: one anneal per datum with a rank-one projector.
* ``train_exact_lp``: closed-form optimum of the energy-expectation linear
  program over a box.
* ``train_projected_oracle``: dense, small-size evaluation of the projected
  training Hamiltonian traced down to the control register.

Every scheme ends with the same orientation check: if YES data end up with a
higher mean energy than NO data, the weights are reflected within the range.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .anneal import DEFAULT_SCHEDULE, AnnealConfig, AnnealSchedule, run_anneal
from .config import ORACLE_MAX_QUBITS, TOL
from .model import (
    InteractionGraph,
    LabeledDataset,
    TrainedClassifier,
    TrainingLayout,
    data_projector,
    driver_hamiltonian,
    training_hamiltonian,
)
from .tensor import check_register


@dataclass
class TrainingReport:
    method: str
    trained: TrainedClassifier
    layout: dict | None = None
    config: dict = field(default_factory=dict)
    raw_marginals: dict[str, list[float]] = field(default_factory=dict)
    shifted_marginals: dict[str, list[float]] = field(default_factory=dict)
    raw_weights: list[float] | None = None
    serial_sets: dict[str, list[str]] | None = None
    lp: dict | None = None
    projected: dict | None = None
    calibrated: bool = False

    def to_json(self) -> dict:
        g = self.trained.graph
        weights = [
            {
                "key": inst.key,
                "edge": inst.edge,
                "vertex": inst.vertex,
                "term": inst.term,
                "label": inst.label,
                "weight": float(a),
            }
            for inst, a in zip(g.instances, self.trained.coefficients)
        ]
        return {
            "method": self.method,
            "graph": g.to_json(),
            "weight_range": list(self.trained.weight_range),
            "weights": weights,
            "layout": self.layout,
            "config": self.config,
            "seed": g.seed,
            "raw_marginals": self.raw_marginals,
            "shifted_marginals": self.shifted_marginals,
            "raw_weights": self.raw_weights,
            "serial_sets": self.serial_sets,
            "lp": self.lp,
            "projected": self.projected,
            "calibrated": self.calibrated,
        }


def classifier_from_report(obj: dict) -> TrainedClassifier:
    graph = InteractionGraph.from_json(obj["graph"])
    weights = {w["key"]: w["weight"] for w in obj["weights"]}
    return TrainedClassifier.from_weights(graph, weights, tuple(obj["weight_range"]))


# ---------------------------------------------------------------------------
# shared helpers
# ---------------------------------------------------------------------------


def energy_coefficients(graph: InteractionGraph, strings: Sequence[str]) -> np.ndarray:
    """c[l, i] = <l| tr_h(h_i) |l> / dim_h for every datum and term instance.

    The trace over hidden qubits is normalized by their dimension, so
    ``c @ a`` is the energy of |l> with maximally mixed hidden spins.
    """
    dq = graph.data_qubits
    pos = {q: j for j, q in enumerate(dq)}
    out = np.zeros((len(strings), len(graph.instances)))
    for i, inst in enumerate(graph.instances):
        op = inst.operator
        diag = np.real(np.diag(op.matrix))
        k = op.k
        data_slots = [(b, pos[q]) for b, q in enumerate(op.targets) if q in pos]
        for li, s in enumerate(strings):
            sel = [
                j
                for j in range(1 << k)
                if all(((j >> (k - 1 - b)) & 1) == int(s[p]) for b, p in data_slots)
            ]
            out[li, i] = diag[sel].mean()
    return out


def datum_energies(classifier: TrainedClassifier, strings: Sequence[str]) -> np.ndarray:
    return energy_coefficients(classifier.graph, strings) @ classifier.coefficients


def minmax(x: np.ndarray) -> np.ndarray:
    """Rescale to [0, 1]; a constant vector maps to zeros."""
    x = np.asarray(x, dtype=float)
    span = x.max() - x.min() if x.size else 0.0
    if span <= 1e-12:
        return np.zeros_like(x)
    return (x - x.min()) / span


def reshift(raw: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """Affinely map raw weights onto [lo, hi]; constant input maps to clip(0)."""
    raw = np.asarray(raw, dtype=float)
    if raw.size and raw.max() - raw.min() <= 1e-12:
        return np.full_like(raw, float(np.clip(0.0, lo, hi)))
    return lo + minmax(raw) * (hi - lo)


def _energy_gap(w, c_yes, c_no) -> float:
    return float((c_yes @ w).mean() - (c_no @ w).mean())


def calibrate(
    weights: np.ndarray, graph: InteractionGraph, dataset: LabeledDataset, weight_range
) -> tuple[np.ndarray, bool]:
    """Reflect weights within the range when YES data sit above NO data."""
    lo, hi = weight_range
    c_yes = energy_coefficients(graph, dataset.yes)
    c_no = energy_coefficients(graph, dataset.no)
    gap = _energy_gap(weights, c_yes, c_no)
    if gap <= 1e-12:
        return weights, False
    flipped = lo + hi - weights
    if _energy_gap(flipped, c_yes, c_no) < gap:
        return flipped, True
    return weights, False


def _check_inputs(graph, dataset, need_both=True):
    dataset.check_graph(graph)
    if need_both and (not dataset.yes or not dataset.no):
        raise ValueError("training needs YES and NO data")


def _anneal_marginals(graph, layout, strings, config, schedule):
    Hc = training_hamiltonian(graph, layout)
    drv = driver_hamiltonian(layout.n_qubits)
    data = data_projector(graph, strings).scaled(-layout.delta)
    res = run_anneal(drv, data, Hc, config, schedule, layout.n_qubits, layout=layout)
    return res.controls.term_marginals


# ---------------------------------------------------------------------------
# schemes
# ---------------------------------------------------------------------------


def train_one_shot(
    graph: InteractionGraph,
    dataset: LabeledDataset,
    layout: TrainingLayout,
    config: AnnealConfig = AnnealConfig(),
    schedule: AnnealSchedule = DEFAULT_SCHEDULE,
    weight_range: tuple[float, float] = (-1.0, 1.0),
) -> TrainingReport:
    """One anneal per data side; weights = re-shifted (NO - YES) marginals."""
    _check_inputs(graph, dataset)
    raw_m, shifted = {}, {}
    for side in ("YES", "NO"):
        m = _anneal_marginals(graph, layout, dataset.side(side), config, schedule)
        raw_m[side] = m
        shifted[side] = minmax(m)
    raw = shifted["NO"] - shifted["YES"]
    w = reshift(raw, *weight_range)
    w, flipped = calibrate(w, graph, dataset, weight_range)
    return TrainingReport(
        "one-shot",
        TrainedClassifier(graph, w, tuple(weight_range)),
        layout=layout.summary(),
        config={"anneal": config.to_json(), "schedule": schedule.to_json()},
        raw_marginals={k: v.tolist() for k, v in raw_m.items()},
        shifted_marginals={k: v.tolist() for k, v in shifted.items()},
        raw_weights=raw.tolist(),
        calibrated=flipped,
    )


def train_serial(
    graph: InteractionGraph,
    dataset: LabeledDataset,
    layout: TrainingLayout,
    config: AnnealConfig = AnnealConfig(),
    schedule: AnnealSchedule = DEFAULT_SCHEDULE,
    weight_range: tuple[float, float] = (-1.0, 1.0),
    max_workers: int = 1,
) -> TrainingReport:
    """One anneal per datum; weights count set membership per side.

    A term belongs to M_l when its run-normalized control marginal exceeds
    one half.
    """
    _check_inputs(graph, dataset)
    labelled = dataset.labelled()

    def job(item):
        return _anneal_marginals(graph, layout, [item[0]], config, schedule)

    if max_workers > 1:
        with ThreadPoolExecutor(max_workers) as pool:
            marginals = list(pool.map(job, labelled))
    else:
        marginals = [job(item) for item in labelled]

    n_terms = len(graph.instances)
    counts = {"YES": np.zeros(n_terms), "NO": np.zeros(n_terms)}
    sets = {}
    for (s, lab), m in zip(labelled, marginals):
        member = minmax(m) > 0.5
        counts[lab] += member
        sets[s] = [graph.instances[i].key for i in np.flatnonzero(member)]
    raw = counts["YES"] / len(dataset.yes) - counts["NO"] / len(dataset.no)
    lo, hi = weight_range
    w = lo + (raw + 1.0) / 2.0 * (hi - lo)
    w, flipped = calibrate(w, graph, dataset, weight_range)
    return TrainingReport(
        "serial",
        TrainedClassifier(graph, w, tuple(weight_range)),
        layout=layout.summary(),
        config={"anneal": config.to_json(), "schedule": schedule.to_json()},
        raw_marginals={s: m.tolist() for (s, _), m in zip(labelled, marginals)},
        raw_weights=raw.tolist(),
        serial_sets=sets,
        calibrated=flipped,
    )


def train_exact_lp(
    graph: InteractionGraph,
    dataset: LabeledDataset,
    weight_range: tuple[float, float] = (-1.0, 1.0),
) -> TrainingReport:
    """Minimize mean YES energy minus mean NO energy over a box.

    The objective sum_i a_i kappa_i is separable, so each coordinate sits at
    the box end opposite to the sign of kappa_i; ties (|kappa| <= 1e-12)
    take the point of the box closest to zero.
    """
    _check_inputs(graph, dataset)
    lo, hi = weight_range
    c_yes = energy_coefficients(graph, dataset.yes)
    c_no = energy_coefficients(graph, dataset.no)
    kappa = c_yes.mean(axis=0) - c_no.mean(axis=0)
    tie = float(np.clip(0.0, lo, hi))
    a = np.where(kappa > TOL.lp_tie, lo, np.where(kappa < -TOL.lp_tie, hi, tie))
    a, flipped = calibrate(a, graph, dataset, weight_range)
    return TrainingReport(
        "exact-lp",
        TrainedClassifier(graph, a, tuple(weight_range)),
        lp={
            "c_yes": c_yes.tolist(),
            "c_no": c_no.tolist(),
            "kappa": kappa.tolist(),
            "objective": float(a @ kappa),
        },
        calibrated=flipped,
    )


def block_terms(layout: TrainingLayout) -> list[frozenset[int]]:
    """Term instances switched on in each control-register basis block."""
    nc = layout.n_controls
    base = layout.n_system
    out = []
    for code in range(1 << nc):
        bits = [(code >> (nc - 1 - j)) & 1 for j in range(nc)]
        on = set()
        for i, (qubits, pattern) in enumerate(layout.controls):
            if all(bits[q - base] == p for q, p in zip(qubits, pattern)):
                on.add(i)
        out.append(frozenset(on))
    return out


def projected_trace(graph, dataset, layout, side="YES") -> np.ndarray:
    """Control-register diagonal of tr_system[(1 (x) Pi) H_c (1 (x) Pi)], built densely."""
    n = layout.n_qubits
    check_register(n, ORACLE_MAX_QUBITS)
    Hc = training_hamiltonian(graph, layout).dense(n)
    pi = data_projector(graph, dataset.side(side)).diagonal(n)
    if pi is None:  # empty side
        pi = np.zeros(1 << n)
    H2 = pi[:, None] * Hc * pi[None, :]
    S, C = 1 << layout.n_system, 1 << layout.n_controls
    t = H2.reshape(S, C, S, C)
    return np.real(np.einsum("scsd->cd", t).diagonal())


def train_projected_oracle(
    graph: InteractionGraph,
    dataset: LabeledDataset,
    layout: TrainingLayout,
    side: str = "YES",
    weight_range: tuple[float, float] = (-1.0, 1.0),
) -> TrainingReport:
    """Weight 1 on every term that appears in some minimal traced block."""
    dataset.check_graph(graph)
    diag = projected_trace(graph, dataset, layout, side)
    tol = TOL.degeneracy * (diag.max() - diag.min() + 1.0)
    minimal = np.flatnonzero(diag <= diag.min() + tol)
    blocks = block_terms(layout)
    chosen = set(itertools.chain.from_iterable(blocks[b] for b in minimal))
    w = np.zeros(len(graph.instances))
    w[sorted(chosen)] = 1.0
    w = np.clip(w, *weight_range)
    flipped = False
    if dataset.yes and dataset.no:
        w, flipped = calibrate(w, graph, dataset, weight_range)
    return TrainingReport(
        "projected-oracle",
        TrainedClassifier(graph, w, tuple(weight_range)),
        layout=layout.summary(),
        projected={
            "side": side,
            "traced_diagonal": diag.tolist(),
            "minimal_blocks": minimal.tolist(),
        },
        calibrated=flipped,
    )
