"""Command-line entry point: ``hamclass <subcommand> ...``.

Exit codes: 0 success, 1 numeric failure, 2 bad input or configuration.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from .anneal import AnnealConfig, AnnealSchedule
from .evaluation import EvaluationRecord
from .model import (
    SET_NAMES,
    InteractionGraph,
    LabeledDataset,
    build_training_layout,
    load_dataset,
    load_graph,
    preset_graph,
)
from .oracle import overlap_scores
from .tasks import (
    NOT_TASK,
    all_strings,
    color_dataset,
    color_graph,
    evaluate_task,
    random_labelings,
    train_task,
)
from .tensor import QubitCapError
from .train import classifier_from_report, train_projected_oracle


class UsageError(Exception):
    """Bad user input; maps to exit code 2."""


@dataclass
class RunConfig:
    subcommand: str = ""
    graph: str | None = None
    preset: str | None = None
    data: str | None = None
    set_name: str | None = None
    seed: int | None = None
    method: str = "one-shot"
    mode: str = "per-term"
    grouping: str = "all"
    weight_range: tuple[float, float] = (-1.0, 1.0)
    R: int = 100
    n_T: int = 30
    tau: float = 20.0
    schedule: dict = field(default_factory=dict)
    out: str = "."
    workers: int = 1

    def anneal(self) -> AnnealConfig:
        return AnnealConfig(self.R, self.n_T, self.tau)

    def anneal_schedule(self) -> AnnealSchedule:
        return AnnealSchedule.from_json(self.schedule)

    def to_json(self) -> dict:
        d = asdict(self)
        d["weight_range"] = list(self.weight_range)
        d["schedule"] = self.anneal_schedule().to_json()
        return d


_FLAG_FIELDS = {
    "graph": "graph",
    "preset": "preset",
    "data": "data",
    "set": "set_name",
    "seed": "seed",
    "method": "method",
    "mode": "mode",
    "group": "grouping",
    "range": "weight_range",
    "R": "R",
    "nT": "n_T",
    "tau": "tau",
    "out": "out",
    "workers": "workers",
}


def parse_range(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"range must be 'lo,hi', got {text!r}") from None
    if not lo < hi:
        raise argparse.ArgumentTypeError(f"range needs lo < hi, got {text!r}")
    return lo, hi


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _existing(path: str | None, what: str) -> Path | None:
    if path is None:
        return None
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"{what} file not found: {p}")
    return p


def build_config(args: argparse.Namespace, base: RunConfig | None = None) -> RunConfig:
    cfg = replace(base or RunConfig(), subcommand=args.command)
    if getattr(args, "config", None):
        path = _existing(args.config, "config")
        try:
            obj = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise UsageError(f"cannot parse config {path}: {exc}") from None
        known = set(RunConfig.__dataclass_fields__)
        unknown = set(obj) - known
        if unknown:
            raise UsageError(f"unknown config keys {sorted(unknown)} in {path}")
        if "weight_range" in obj:
            obj["weight_range"] = tuple(obj["weight_range"])
        obj.pop("subcommand", None)
        cfg = replace(cfg, **obj)
    for flag, name in _FLAG_FIELDS.items():
        val = getattr(args, flag, None)
        if val is not None:
            setattr(cfg, name, val)
    if cfg.R < 1 or cfg.n_T < 1 or not cfg.tau > 0 or cfg.workers < 1:
        raise UsageError("R, nT, tau and workers must be positive")
    try:
        cfg.anneal_schedule()
    except (ValueError, TypeError) as exc:
        raise UsageError(f"bad schedule override: {exc}") from None
    return cfg


def resolve_graph(cfg: RunConfig, default_preset: str | None = None) -> InteractionGraph:
    if cfg.graph and cfg.preset:
        raise UsageError("give either --graph or --preset, not both")
    if cfg.graph:
        graph = load_graph(_existing(cfg.graph, "graph"))
    elif cfg.preset or default_preset:
        graph = preset_graph(cfg.preset or default_preset, cfg.set_name or "Proj")
    else:
        raise UsageError("a graph is required (--graph FILE or --preset NAME)")
    if cfg.set_name and cfg.graph:
        graph = graph.with_set(cfg.set_name)
    if cfg.seed is not None:
        graph = replace(graph, seed=cfg.seed)
    return graph


def resolve_dataset(cfg: RunConfig, graph: InteractionGraph) -> LabeledDataset:
    if cfg.data is None:
        if len(graph.data_qubits) == 2:
            return NOT_TASK
        raise UsageError("a dataset is required (--data FILE)")
    ds = load_dataset(_existing(cfg.data, "dataset"))
    ds.check_graph(graph)
    return ds


def _write_json(path: Path, obj) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")
    return path


def write_records_csv(path: Path, records: list[EvaluationRecord], config: dict) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write("# config " + json.dumps(config, sort_keys=True) + "\n")
        w = csv.writer(fh)
        w.writerow(["bitstring", "hue", "energy_mean", "energy_std", "overlap_p", "label", "predicted"])
        for r in records:
            w.writerow([
                r.datum,
                "" if r.hue is None else repr(r.hue),
                repr(r.energy),
                repr(r.std),
                repr(r.p),
                r.label or "",
                r.predicted or "",
            ])
    return path


def read_records_csv(path) -> tuple[dict, list[dict]]:
    with open(path) as fh:
        first = fh.readline()
        config = json.loads(first[len("# config "):]) if first.startswith("# config ") else {}
        rows = list(csv.DictReader(fh))
    return config, rows


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_train(cfg: RunConfig) -> int:
    graph = resolve_graph(cfg)
    dataset = resolve_dataset(cfg, graph)
    report = train_task(
        graph, dataset, cfg.method, cfg.mode, cfg.grouping, cfg.anneal(),
        cfg.anneal_schedule(), cfg.weight_range, cfg.workers,
    )
    obj = report.to_json()
    obj["run_config"] = cfg.to_json()
    path = _write_json(Path(cfg.out) / "report.json", obj)
    if report.layout:
        print(f"training qubits: {report.layout['n_qubits']} "
              f"({report.layout['n_system']} graph + {report.layout['n_controls']} control)")
    for w in obj["weights"]:
        print(f"{w['key']:>12s} {w['label']:>8s} {w['weight']:+.4f}")
    print(f"report written to {path}")
    return 0


def cmd_classify(cfg: RunConfig, report_path: str, strings: list[str] | None) -> int:
    path = _existing(report_path, "report")
    obj = json.loads(path.read_text())
    classifier = classifier_from_report(obj)
    graph = classifier.graph
    dataset = resolve_dataset(cfg, graph) if cfg.data else None
    if strings:
        data = strings
    elif dataset is not None:
        data = list(dataset.yes + dataset.no)
    else:
        data = all_strings(len(graph.data_qubits))
    training = dataset
    if training is None or not training.yes or not training.no:
        raise UsageError("classify needs a labelled dataset (--data) with YES and NO data")
    records, metrics = _evaluate(classifier, training, data, cfg)
    out = Path(cfg.out)
    config = cfg.to_json() | {"report": str(path), "graph_seed": graph.seed}
    write_records_csv(out / "classify.csv", records, config)
    _write_json(out / "metrics.json", {"metrics": metrics.to_json(), "run_config": config})
    print(json.dumps(metrics.to_json(), indent=2))
    return 0


def _evaluate(classifier, training, data, cfg: RunConfig, bits_per_channel=None):
    from .train import TrainingReport

    report = TrainingReport("loaded", classifier)
    return evaluate_task(report, training, data, cfg.anneal(), cfg.anneal_schedule(), bits_per_channel)


def run_color(cfg: RunConfig, bits: int):
    if cfg.mode == "per-term":
        raise UsageError(
            f"{bits}-bit color training in per-term mode needs "
            f"{build_training_layout(color_graph(bits)).n_qubits} qubits; "
            "use --mode qudit (default grouping 'all')"
        )
    graph = color_graph(bits)
    dataset = color_dataset(bits)
    report = train_task(
        graph, dataset, cfg.method, cfg.mode, cfg.grouping, cfg.anneal(),
        cfg.anneal_schedule(), cfg.weight_range, cfg.workers,
    )
    records, metrics = evaluate_task(
        report, dataset, all_strings(bits), cfg.anneal(), cfg.anneal_schedule(), bits // 3
    )
    return report, records, metrics


def cmd_color(cfg: RunConfig, bits: int, plots: bool = True) -> int:
    report, records, metrics = run_color(cfg, bits)
    out = Path(cfg.out)
    config = cfg.to_json() | {"bits": bits, "graph_seed": report.trained.graph.seed}
    write_records_csv(out / f"color{bits}.csv", records, config)
    rep = report.to_json() | {"run_config": config}
    _write_json(out / f"color{bits}_report.json", rep)
    _write_json(out / f"color{bits}_metrics.json", {"metrics": metrics.to_json(), "run_config": config})
    if plots:
        from .plots import write_figures

        write_figures(records, out, f"color{bits}", config, bits // 3)
    yes_e, no_e = metrics.yes_energy[0], metrics.no_energy[0]
    print(f"{len(records)} colors evaluated; mean energy blue {yes_e:+.4f}, red {no_e:+.4f}")
    print(f"fidelity {metrics.fidelity:.1f}% (overlap), {metrics.energy_fidelity:.1f}% (energy)")
    return 0


def run_sweep(cfg: RunConfig, bits: int, R_values, nT_values) -> list[dict]:
    cells = [(R, n) for R in R_values for n in nT_values]

    def one(cell):
        R, n = cell
        t0 = time.perf_counter()
        _, _, m = run_color(replace(cfg, R=R, n_T=n), bits)
        return {
            "R": R,
            "n_T": n,
            "fidelity": m.fidelity,
            "energy_fidelity": m.energy_fidelity,
            "delta_e": m.delta_e,
            "seconds": time.perf_counter() - t0,
        }

    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        return list(pool.map(one, cells))


def plateau_report(rows: list[dict], tolerance: float = 5.0) -> dict:
    """Compare every cell with the largest (R * n_T) cell."""
    ref = max(rows, key=lambda r: (r["R"] * r["n_T"], r["n_T"]))
    cells = []
    for r in rows:
        diff = r["fidelity"] - ref["fidelity"]
        cells.append({"R": r["R"], "n_T": r["n_T"], "fidelity_diff": diff, "within": abs(diff) <= tolerance})
    return {"reference": {"R": ref["R"], "n_T": ref["n_T"], "fidelity": ref["fidelity"]},
            "tolerance": tolerance, "cells": cells}


def cmd_sweep(cfg: RunConfig, bits: int, R_values, nT_values) -> int:
    rows = run_sweep(cfg, bits, R_values, nT_values)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    config = cfg.to_json() | {"bits": bits, "R_grid": list(R_values), "nT_grid": list(nT_values)}
    with open(out / "sweep.csv", "w", newline="") as fh:
        fh.write("# config " + json.dumps(config, sort_keys=True) + "\n")
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)
    plateau = plateau_report(rows)
    _write_json(out / "plateau.json", plateau | {"run_config": config})
    for c in plateau["cells"]:
        mark = "ok" if c["within"] else "OFF"
        print(f"R={c['R']:4d} n_T={c['n_T']:4d} diff {c['fidelity_diff']:+6.1f}  {mark}")
    return 0


BENCH_GRAPHS = ("edge", "path-3", "path-4")


def cmd_bench(cfg: RunConfig, presets, sets, labelings: int) -> int:
    rows = []
    seed = cfg.seed or 0
    for name in presets:
        for s in sets:
            graph = preset_graph(name, s)
            if cfg.seed is not None:
                graph = replace(graph, seed=cfg.seed)
            full = build_training_layout(graph).n_qubits
            opt = build_training_layout(graph, "qudit", cfg.grouping).n_qubits
            fids, gaps, secs = [], [], []
            for ds in random_labelings(len(graph.data_qubits), labelings, seed):
                t0 = time.perf_counter()
                report = train_task(graph, ds, cfg.method, "qudit", cfg.grouping, cfg.anneal(),
                                    cfg.anneal_schedule(), cfg.weight_range)
                _, m = evaluate_task(report, ds, list(ds.yes + ds.no), cfg.anneal(), cfg.anneal_schedule())
                secs.append(time.perf_counter() - t0)
                fids.append(m.fidelity)
                gaps.append(m.delta_e)
            rows.append({
                "graph": name, "set": s, "sets_used": labelings, "N": full, "opt": opt,
                "t_avg": float(np.mean(secs)), "fidelity": float(np.mean(fids)),
                "delta_e": float(np.mean(gaps)),
            })
            r = rows[-1]
            print(f"{name:>14s} {s:>6s} N={r['N']:3d} ({r['opt']:2d}) f={r['fidelity']:6.1f} "
                  f"dE={r['delta_e']:.3f} t={r['t_avg']:.2f}s")
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    config = cfg.to_json() | {"presets": list(presets), "sets": list(sets), "labelings": labelings}
    with open(out / "bench_interactions.csv", "w", newline="") as fh:
        fh.write("# config " + json.dumps(config, sort_keys=True) + "\n")
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)
    return 0


def cmd_oracle(cfg: RunConfig, report_path: str | None) -> int:
    if report_path:
        obj = json.loads(_existing(report_path, "report").read_text())
        classifier = classifier_from_report(obj)
        graph = classifier.graph
        dataset = resolve_dataset(cfg, graph)
        from .model import assemble_hamiltonian

        sc = overlap_scores(assemble_hamiltonian(classifier), graph.n_vertices, graph.data_qubits, dataset)
        result = {"overlap_scores": sc.scores, "yes_mean": sc.yes_mean, "no_mean": sc.no_mean}
    else:
        graph = resolve_graph(cfg)
        dataset = resolve_dataset(cfg, graph)
        mode = cfg.mode
        layout = build_training_layout(graph, mode, cfg.grouping)
        rep = train_projected_oracle(graph, dataset, layout, "YES", cfg.weight_range)
        result = rep.to_json()
    result["run_config"] = cfg.to_json()
    path = _write_json(Path(cfg.out) / "oracle.json", result)
    print(json.dumps({k: v for k, v in result.items() if k != "run_config"}, indent=2, default=str)[:4000])
    print(f"written to {path}")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser, graph=True, data=True) -> None:
    p.add_argument("--config", help="JSON run config; flags override its values")
    if graph:
        p.add_argument("--graph", help="graph JSON file")
        p.add_argument("--preset", help="built-in graph: edge, path-3, path-4, cycle-8-chord, star-6, star-9")
        p.add_argument("--set", choices=SET_NAMES, help="interaction set for every edge")
        p.add_argument("--seed", type=int, help="seed for random interaction sets")
    if data:
        p.add_argument("--data", help="dataset file, lines '<bitstring> YES|NO'")
    p.add_argument("--method", choices=("one-shot", "serial", "exact-lp"))
    p.add_argument("--mode", choices=("per-term", "qudit"))
    p.add_argument("--group", help="qudit grouping: all, edge, tuples:k, packed:q")
    p.add_argument("--range", type=parse_range, help="weight range lo,hi")
    p.add_argument("-R", type=int, help="annealing steps")
    p.add_argument("--nT", type=int, help="Trotter slices per step")
    p.add_argument("--tau", type=float, help="total anneal time")
    p.add_argument("--out", help="output directory")
    p.add_argument("--workers", type=int, help="worker threads")


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hamclass", description="Train and evaluate local-Hamiltonian classifiers.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a classifier and write report.json")
    _common(p)

    p = sub.add_parser("classify", help="evaluate a trained report on data")
    p.add_argument("--report", required=True)
    p.add_argument("--strings", nargs="*", help="bitstrings to evaluate (default: the dataset)")
    _common(p, graph=False)

    p = sub.add_parser("color", help="color task: train on embedded colors, evaluate all")
    p.add_argument("--bits", type=int, choices=(6, 9), default=6)
    p.add_argument("--no-plots", action="store_true")
    _common(p, graph=False, data=False)

    p = sub.add_parser("sweep", help="fidelity over an (R, n_T) grid on the color task")
    p.add_argument("--bits", type=int, choices=(6, 9), default=6)
    p.add_argument("--R-grid", type=_int_list, default=[30, 150])
    p.add_argument("--nT-grid", type=_int_list, default=[30, 150])
    _common(p, graph=False, data=False)

    p = sub.add_parser("bench-interactions", help="compare interaction sets on preset graphs")
    p.add_argument("--presets", nargs="+", default=list(BENCH_GRAPHS))
    p.add_argument("--sets", nargs="+", default=list(SET_NAMES), choices=SET_NAMES)
    p.add_argument("--labelings", type=int, default=3)
    _common(p, data=False)

    p = sub.add_parser("oracle", help="exact references: overlap scores or projected training")
    p.add_argument("--report", help="score this trained report exactly")
    _common(p)
    return ap


_COLOR_DEFAULTS = {"mode": "qudit", "grouping": "all"}
_BENCH_DEFAULTS = {"grouping": "packed:4"}


def main(argv=None) -> int:
    ap = make_parser()
    args = ap.parse_args(argv)
    try:
        defaults = {"color": _COLOR_DEFAULTS, "sweep": _COLOR_DEFAULTS, "bench-interactions": _BENCH_DEFAULTS}
        cfg = build_config(args, RunConfig(**defaults.get(args.command, {})))
        if args.command == "train":
            return cmd_train(cfg)
        if args.command == "classify":
            return cmd_classify(cfg, args.report, args.strings)
        if args.command == "color":
            return cmd_color(cfg, args.bits, not args.no_plots)
        if args.command == "sweep":
            return cmd_sweep(cfg, args.bits, args.R_grid, args.nT_grid)
        if args.command == "bench-interactions":
            return cmd_bench(cfg, args.presets, args.sets, args.labelings)
        if args.command == "oracle":
            return cmd_oracle(cfg, args.report)
    except (UsageError, QubitCapError, FileNotFoundError, json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"hamclass: error: {exc}", file=sys.stderr)
        return 2
    except (FloatingPointError, np.linalg.LinAlgError, ArithmeticError, RuntimeError) as exc:
        print(f"hamclass: numeric failure: {exc}", file=sys.stderr)
        return 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
