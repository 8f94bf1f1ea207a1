"""Classification of data against a trained Hamiltonian, and benchmark metrics."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from .anneal import DEFAULT_SCHEDULE, AnnealConfig, AnnealSchedule, run_anneal
from .model import (
    LabeledDataset,
    TrainedClassifier,
    assemble_hamiltonian,
    driver_hamiltonian,
)
from .tensor import StateVector, WeightedTermList, expectation_and_std

_ZERO = np.array([1.0, 0.0])
_ONE = np.array([0.0, 1.0])
_PLUS = np.array([1.0, 1.0]) / np.sqrt(2.0)


@dataclass
class EvaluationRecord:
    datum: str
    energy: float
    std: float
    p: float
    label: str | None = None
    predicted: str | None = None
    hue: float | None = None


@dataclass
class BenchmarkMetrics:
    fidelity: float  # percent, from the overlap threshold
    energy_fidelity: float  # percent, from the energy threshold
    delta_e: float
    threshold: float
    energy_threshold: float
    yes_overlap: tuple[float, float]  # mean, std over YES training data
    no_overlap: tuple[float, float]
    yes_energy: tuple[float, float]
    no_energy: tuple[float, float]
    yes_high: bool  # YES data sit above the overlap threshold

    def to_json(self) -> dict:
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in self.__dict__.items()}


def probe_state(classifier: TrainedClassifier, datum: str) -> StateVector:
    """|datum> on data vertices, |+> on hidden vertices."""
    g = classifier.graph
    if len(datum) != len(g.data_qubits):
        raise ValueError(f"datum {datum!r} has {len(datum)} bits, graph has {len(g.data_qubits)} data vertices")
    bits = dict(zip(g.data_qubits, datum))
    factors = [
        (_ONE if bits[q] == "1" else _ZERO) if q in bits else _PLUS for q in range(g.n_vertices)
    ]
    return StateVector.product(factors)


def anneal_trained(
    classifier: TrainedClassifier,
    config: AnnealConfig,
    schedule: AnnealSchedule = DEFAULT_SCHEDULE,
) -> np.ndarray:
    """Anneal the trained H alone and return the data-register distribution."""
    g = classifier.graph
    res = run_anneal(
        driver_hamiltonian(g.n_vertices),
        WeightedTermList(),
        assemble_hamiltonian(classifier),
        config,
        schedule,
        g.n_vertices,
        data_qubits=g.data_qubits,
    )
    return res.data_distribution


def evaluate_datum(
    classifier: TrainedClassifier,
    datum: str,
    config: AnnealConfig = AnnealConfig(),
    schedule: AnnealSchedule = DEFAULT_SCHEDULE,
    *,
    distribution: np.ndarray | None = None,
    label: str | None = None,
) -> EvaluationRecord:
    """Energy of the probe state and annealed ground-state overlap for one datum.

    Pass ``distribution`` (from ``anneal_trained``) to reuse one anneal for
    many data.
    """
    H = assemble_hamiltonian(classifier)
    mean, std = expectation_and_std(probe_state(classifier, datum), H)
    if distribution is None:
        distribution = anneal_trained(classifier, config, schedule)
    return EvaluationRecord(datum, mean, std, float(distribution[int(datum, 2)]), label)


def evaluate_many(
    classifier: TrainedClassifier,
    data: Iterable[str],
    config: AnnealConfig = AnnealConfig(),
    schedule: AnnealSchedule = DEFAULT_SCHEDULE,
    labels: dict[str, str] | None = None,
) -> list[EvaluationRecord]:
    labels = labels or {}
    dist = anneal_trained(classifier, config, schedule)
    return [
        evaluate_datum(classifier, d, config, schedule, distribution=dist, label=labels.get(d))
        for d in data
    ]


def _mean_std(xs) -> tuple[float, float]:
    xs = np.asarray(list(xs), dtype=float)
    return float(xs.mean()), float(xs.std())


def benchmark_metrics(
    records: Sequence[EvaluationRecord], training: LabeledDataset
) -> BenchmarkMetrics:
    """Midpoint-threshold fidelities and the YES/NO training energy gap.

    The overlap threshold sits halfway between mean YES and mean NO training
    overlap; fidelity is the percentage of labelled records on their side.
    """
    if not training.yes or not training.no:
        raise ValueError("fidelity is undefined without both YES and NO training data")
    by_datum = {r.datum: r for r in records}
    missing = [s for s in training.yes + training.no if s not in by_datum]
    if missing:
        raise ValueError(f"records missing training data {missing[:5]}")
    yes = [by_datum[s] for s in training.yes]
    no = [by_datum[s] for s in training.no]
    yp, np_ = _mean_std(r.p for r in yes), _mean_std(r.p for r in no)
    ye, ne = _mean_std(r.energy for r in yes), _mean_std(r.energy for r in no)
    thr = (yp[0] + np_[0]) / 2
    ethr = (ye[0] + ne[0]) / 2
    yes_high = yp[0] >= np_[0]
    yes_low_e = ye[0] <= ne[0]

    labelled = [r for r in records if r.label in ("YES", "NO")]
    if not labelled:
        raise ValueError("no labelled records to score")
    ok = sum(_predict(r.p, thr, yes_high) == r.label for r in labelled)
    ok_e = sum(_predict(-r.energy, -ethr, yes_low_e) == r.label for r in labelled)
    return BenchmarkMetrics(
        fidelity=100.0 * ok / len(labelled),
        energy_fidelity=100.0 * ok_e / len(labelled),
        delta_e=abs(ne[0] - ye[0]),
        threshold=thr,
        energy_threshold=ethr,
        yes_overlap=yp,
        no_overlap=np_,
        yes_energy=ye,
        no_energy=ne,
        yes_high=yes_high,
    )


def _predict(x: float, thr: float, yes_high: bool) -> str:
    above = x >= thr
    return "YES" if above == yes_high else "NO"


def with_predictions(
    records: Sequence[EvaluationRecord], metrics: BenchmarkMetrics
) -> list[EvaluationRecord]:
    return [replace(r, predicted=_predict(r.p, metrics.threshold, metrics.yes_high)) for r in records]


# ---------------------------------------------------------------------------
# plot-series helpers
# ---------------------------------------------------------------------------


def gaussian_moving_average(series: Sequence[float], sigma: float = 3.0) -> np.ndarray:
    """Gaussian-kernel smoothing, kernel truncated at 4 sigma, reflected edges."""
    x = np.asarray(series, dtype=float)
    if x.size == 0:
        raise ValueError("empty series")
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    radius = int(4.0 * sigma + 0.5)
    offsets = np.arange(-radius, radius + 1)
    kernel = np.exp(-0.5 * (offsets / sigma) ** 2)
    kernel /= kernel.sum()
    padded = np.pad(x, radius, mode="symmetric")
    return np.convolve(padded, kernel, mode="valid")


def color_channels(bits: str, bits_per_channel: int) -> tuple[float, float, float]:
    """RGB in [0, 1]; each channel's bits are read most significant first."""
    k = bits_per_channel
    if len(bits) != 3 * k:
        raise ValueError(f"{bits!r} is not a {3 * k}-bit color")
    top = (1 << k) - 1
    return tuple(int(bits[i * k : (i + 1) * k], 2) / top for i in range(3))


def hue(bits: str, bits_per_channel: int) -> float:
    """Hexagonal hue in degrees [0, 360); achromatic colors get 0."""
    r, g, b = color_channels(bits, bits_per_channel)
    mx, mn = max(r, g, b), min(r, g, b)
    d = mx - mn
    if d == 0:
        return 0.0
    if mx == r:
        h = ((g - b) / d) % 6
    elif mx == g:
        h = (b - r) / d + 2
    else:
        h = (r - g) / d + 4
    return 60.0 * h


def hue_sort(colors: Sequence[str], bits_per_channel: int) -> list[int]:
    """Permutation ordering colors by hue, ties by integer value."""
    return sorted(range(len(colors)), key=lambda i: (hue(colors[i], bits_per_channel), int(colors[i], 2)))
