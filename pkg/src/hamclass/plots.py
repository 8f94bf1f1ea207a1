"""SVG figures for evaluation runs. Uses the non-interactive Agg backend."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .evaluation import EvaluationRecord, gaussian_moving_average, hue_sort  # noqa: E402

_COLORS = {"YES": "tab:blue", "NO": "tab:red", None: "0.6"}


def _save(fig, path: Path, config: dict | None) -> Path:
    meta = {"Description": json.dumps(config or {}, sort_keys=True)}
    fig.savefig(path, format="svg", metadata=meta)
    plt.close(fig)
    return path


def plot_energy_sorted(records: Sequence[EvaluationRecord], path, config: dict | None = None) -> Path:
    """Energies sorted ascending, with one-sigma error bars."""
    order = np.argsort([r.energy for r in records], kind="stable")
    e = np.array([records[i].energy for i in order])
    s = np.array([records[i].std for i in order])
    x = np.arange(len(e))
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.errorbar(x, e, yerr=s, fmt=".", color="0.5", ecolor="0.8", ms=3, zorder=1)
    for lab in ("YES", "NO"):
        pts = [(j, records[i].energy) for j, i in enumerate(order) if records[i].label == lab]
        if pts:
            ax.scatter(*zip(*pts), color=_COLORS[lab], s=14, label=f"{lab} training", zorder=2)
    ax.set_xlabel("rank")
    ax.set_ylabel("energy")
    ax.legend(loc="best")
    return _save(fig, Path(path), config)


def plot_hue_sorted(
    records: Sequence[EvaluationRecord],
    bits_per_channel: int,
    path,
    config: dict | None = None,
    sigma: float = 3.0,
) -> Path:
    """Energy against hue order, with a Gaussian moving average and bands at training hues."""
    order = hue_sort([r.datum for r in records], bits_per_channel)
    e = np.array([records[i].energy for i in order])
    x = np.arange(len(e))
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(x, e, ".", color="0.6", ms=3)
    ax.plot(x, gaussian_moving_average(e, sigma), color="k", lw=1.2, label="moving average")
    for j, i in enumerate(order):
        lab = records[i].label
        if lab in ("YES", "NO"):
            ax.axvspan(j - 0.5, j + 0.5, color=_COLORS[lab], alpha=0.25, lw=0)
    ax.set_xlabel("colors sorted by hue")
    ax.set_ylabel("energy")
    ax.legend(loc="best")
    return _save(fig, Path(path), config)


def plot_overlap_scatter(
    records: Sequence[EvaluationRecord], path, config: dict | None = None, floor: float = 1e-16
) -> Path:
    """log10 of annealed ground-state probability per datum."""
    fig, ax = plt.subplots(figsize=(7, 4))
    x = np.arange(len(records))
    logp = np.log10(np.maximum([r.p for r in records], floor))
    colors = [_COLORS.get(r.label, _COLORS[None]) for r in records]
    ax.scatter(x, logp, c=colors, s=8)
    ax.set_xlabel("datum index")
    ax.set_ylabel("log10 overlap")
    return _save(fig, Path(path), config)


def write_figures(
    records: Sequence[EvaluationRecord],
    outdir,
    prefix: str,
    config: dict | None = None,
    bits_per_channel: int | None = None,
) -> list[Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = [
        plot_energy_sorted(records, outdir / f"{prefix}_energy_sorted.svg", config),
        plot_overlap_scatter(records, outdir / f"{prefix}_overlap.svg", config),
    ]
    if bits_per_channel:
        paths.append(plot_hue_sorted(records, bits_per_channel, outdir / f"{prefix}_hue_sorted.svg", config))
    return paths
