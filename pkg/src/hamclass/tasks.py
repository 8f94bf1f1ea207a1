"""Built-in datasets and end-to-end task pipelines."""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass

import numpy as np

from .anneal import DEFAULT_SCHEDULE, AnnealConfig, AnnealSchedule
from .evaluation import (
    BenchmarkMetrics,
    EvaluationRecord,
    benchmark_metrics,
    evaluate_many,
    hue,
    with_predictions,
)
from .model import (
    InteractionGraph,
    LabeledDataset,
    build_training_layout,
    preset_graph,
)
from .tensor import QubitCapError, check_register
from .train import TrainingReport, train_exact_lp, train_one_shot, train_serial

NOT_TASK = LabeledDataset(yes=("01", "10"), no=("00", "11"))

# Training colors, listed as printed; channels in RGB order.
RED_9 = (
    "110000000", "011000000", "100000000", "111001000", "110010001",
    "110001000", "101000001", "111000000", "100000001", "100001000",
)
BLUE_9 = (
    "000001100", "001001110", "000000010", "000000110", "001010111",
    "001000110", "001001111", "000000111", "000000011", "000001111",
)
RED_6 = ("110001", "110100", "110000", "100000", "100100")
BLUE_6_RAW = ("000001", "000011", "001011", "000111", "00010")


def _normalize_6bit(s: str) -> str:
    if len(s) == 6:
        return s
    fixed = s + "0" * (6 - len(s))
    warnings.warn(
        f"6-bit blue training color {s!r} has {len(s)} bits; using {fixed!r}",
        stacklevel=3,
    )
    return fixed


def color_dataset(bits: int) -> LabeledDataset:
    """Blue colors are the YES side (low energy), red colors the NO side."""
    if bits == 9:
        return LabeledDataset(yes=BLUE_9, no=RED_9)
    if bits == 6:
        return LabeledDataset(yes=tuple(_normalize_6bit(s) for s in BLUE_6_RAW), no=RED_6)
    raise ValueError("color task supports 6 or 9 bits")


def color_graph(bits: int) -> InteractionGraph:
    """Star graph: one data vertex per color bit around a hidden center, Proj couplings."""
    return preset_graph(f"star-{bits}", "Proj")


def all_strings(width: int) -> list[str]:
    return ["".join(p) for p in itertools.product("01", repeat=width)]


@dataclass
class TaskResult:
    report: TrainingReport
    records: list[EvaluationRecord]
    metrics: BenchmarkMetrics


def train_task(
    graph: InteractionGraph,
    dataset: LabeledDataset,
    method: str = "one-shot",
    mode: str = "qudit",
    grouping="all",
    config: AnnealConfig = AnnealConfig(),
    schedule: AnnealSchedule = DEFAULT_SCHEDULE,
    weight_range=(-1.0, 1.0),
    max_workers: int = 1,
) -> TrainingReport:
    if method == "exact-lp":
        return train_exact_lp(graph, dataset, weight_range)
    layout = build_training_layout(graph, mode, grouping)
    try:
        check_register(layout.n_qubits)
    except QubitCapError as exc:
        raise QubitCapError(
            f"{exc}: training register has {layout.n_qubits} qubits in {mode} mode; "
            "use --mode qudit (optionally --group all) to compress the controls"
        ) from None
    if method == "one-shot":
        return train_one_shot(graph, dataset, layout, config, schedule, weight_range)
    if method == "serial":
        return train_serial(graph, dataset, layout, config, schedule, weight_range, max_workers)
    raise ValueError(f"unknown training method {method!r}")


def evaluate_task(
    report: TrainingReport,
    dataset: LabeledDataset,
    data: list[str],
    config: AnnealConfig,
    schedule: AnnealSchedule = DEFAULT_SCHEDULE,
    bits_per_channel: int | None = None,
) -> tuple[list[EvaluationRecord], BenchmarkMetrics]:
    labels = {s: lab for s, lab in dataset.labelled()}
    records = evaluate_many(report.trained, data, config, schedule, labels)
    if bits_per_channel:
        for r in records:
            r.hue = hue(r.datum, bits_per_channel)
    metrics = benchmark_metrics(records, dataset)
    return with_predictions(records, metrics), metrics


def run_color_task(
    bits: int,
    config: AnnealConfig = AnnealConfig(),
    schedule: AnnealSchedule = DEFAULT_SCHEDULE,
    method: str = "one-shot",
    mode: str = "qudit",
    grouping="all",
    weight_range=(-1.0, 1.0),
) -> TaskResult:
    """Train on the embedded colors, then evaluate every color of the given depth."""
    if bits not in (6, 9):
        raise ValueError("color task supports 6 or 9 bits")
    graph = color_graph(bits)
    dataset = color_dataset(bits)
    report = train_task(graph, dataset, method, mode, grouping, config, schedule, weight_range)
    records, metrics = evaluate_task(
        report, dataset, all_strings(bits), config, schedule, bits_per_channel=bits // 3
    )
    return TaskResult(report, records, metrics)


def random_labelings(width: int, count: int, seed: int) -> list[LabeledDataset]:
    """Seeded balanced YES/NO splits of all ``width``-bit strings."""
    rng = np.random.default_rng(seed)
    strings = all_strings(width)
    out = []
    for _ in range(count):
        perm = rng.permutation(len(strings))
        half = len(strings) // 2
        out.append(
            LabeledDataset(
                yes=tuple(strings[i] for i in sorted(perm[:half])),
                no=tuple(strings[i] for i in sorted(perm[half:])),
            )
        )
    return out
