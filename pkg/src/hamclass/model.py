"""Interaction graphs, interaction sets, datasets and training layouts."""

from __future__ import annotations

import itertools
import json
import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Sequence

import numpy as np

from .config import MAX_QUBITS
from .tensor import (
    BasisProjector,
    ControlledOperator,
    LocalOperator,
    QubitCapError,
    WeightedTermList,
)

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = {"I": I2, "X": X, "Y": Y, "Z": Z}

SET_NAMES = ("Proj", "Pauli", "Rand", "Heis", "Ising")
DATA, HIDDEN = "data", "hidden"


def _kron(*ms):
    out = np.ones((1, 1), dtype=complex)
    for m in ms:
        out = np.kron(out, m)
    return out


def _unit_norm(m: np.ndarray) -> np.ndarray:
    s = np.max(np.abs(np.linalg.eigvalsh(m)))
    return m / s if s > 0 else m


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    """(A + A^dagger)/2 with standard-normal complex A, rescaled to norm 1."""
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return _unit_norm((a + a.conj().T) / 2)


@dataclass(frozen=True, eq=False)
class InteractionSet:
    """Named family of local Hermitian term templates.

    ``field_terms`` are single-qubit terms attached once to every vertex
    touched by an edge carrying this set (used by Ising).
    """

    name: str
    arity: int
    terms: tuple[np.ndarray, ...]
    labels: tuple[str, ...]
    seed: int | None = None
    field_terms: tuple[np.ndarray, ...] = ()
    field_labels: tuple[str, ...] = ()


def builtin_interaction_set(name: str, seed: int = 0, arity: int = 2) -> InteractionSet:
    """Build one of the built-in interaction sets on ``arity`` qubits.

    Proj, Pauli and Rand generalize to 1..3-local edges; Heis and Ising are
    two-local only. Every term is Hermitian with spectral norm 1.
    """
    if name not in SET_NAMES:
        raise ValueError(f"unknown interaction set {name!r}; choose from {SET_NAMES}")
    if not 1 <= arity <= 3:
        raise ValueError(f"arity {arity} unsupported (1..3)")
    if name in ("Heis", "Ising") and arity != 2:
        raise ValueError(f"{name} is a two-local set, got arity {arity}")
    dim = 1 << arity

    if name == "Proj":
        terms, labels = [], []
        for i in range(dim):
            m = np.zeros((dim, dim), dtype=complex)
            m[i, i] = 1.0
            terms.append(m)
            labels.append(f"|{i:0{arity}b}><{i:0{arity}b}|")
        return InteractionSet(name, arity, tuple(terms), tuple(labels))

    if name == "Pauli":
        keys = ["".join(p) for p in itertools.product("IXYZ", repeat=arity)]
        terms = [_kron(*(PAULIS[c] for c in key)) for key in keys]
        return InteractionSet(name, arity, tuple(terms), tuple(keys))

    if name == "Rand":
        rng = np.random.default_rng(seed)
        terms = [random_hermitian(dim, rng) for _ in range(7)]
        labels = [f"rand{j}" for j in range(7)]
        return InteractionSet(name, arity, tuple(terms), tuple(labels), seed=seed)

    if name == "Heis":
        terms = [_kron(p, p) for p in (X, Y, Z)]
        return InteractionSet(name, 2, tuple(terms), ("XX", "YY", "ZZ"))

    return InteractionSet(
        name, 2, (_kron(X, X),), ("XX",), field_terms=(Z,), field_labels=("Z",)
    )


# ---------------------------------------------------------------------------
# graph
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Edge:
    vertices: tuple[int, ...]
    set_name: str


@dataclass(frozen=True)
class TermInstance:
    """One trainable coefficient: a template placed on an edge or a vertex."""

    key: str
    edge: int | None
    vertex: int | None
    term: int
    label: str
    operator: LocalOperator


@dataclass(frozen=True, eq=False)
class InteractionGraph:
    vertex_ids: tuple[str, ...]
    roles: tuple[str, ...]
    edges: tuple[Edge, ...]
    seed: int = 0

    def __post_init__(self):
        if len(self.vertex_ids) != len(self.roles):
            raise ValueError("vertex id and role lists differ in length")
        if set(self.roles) - {DATA, HIDDEN}:
            raise ValueError(f"roles must be {DATA!r} or {HIDDEN!r}")
        if DATA not in self.roles:
            raise ValueError("graph needs at least one data vertex")
        n = len(self.vertex_ids)
        for e in self.edges:
            if not e.vertices:
                raise ValueError("empty hyperedge")
            if len(set(e.vertices)) != len(e.vertices):
                raise ValueError(f"hyperedge {e.vertices} repeats a vertex")
            if any(not 0 <= v < n for v in e.vertices):
                raise ValueError(f"hyperedge {e.vertices} references unknown vertex")
            if e.set_name not in SET_NAMES:
                raise ValueError(f"unknown interaction set {e.set_name!r}")
        if not self.is_connected():
            warnings.warn("interaction graph is not connected", stacklevel=2)

    @property
    def n_vertices(self) -> int:
        return len(self.vertex_ids)

    @property
    def data_qubits(self) -> tuple[int, ...]:
        return tuple(i for i, r in enumerate(self.roles) if r == DATA)

    @property
    def hidden_qubits(self) -> tuple[int, ...]:
        return tuple(i for i, r in enumerate(self.roles) if r == HIDDEN)

    def is_connected(self) -> bool:
        n = self.n_vertices
        parent = list(range(n))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for e in self.edges:
            for v in e.vertices[1:]:
                parent[find(v)] = find(e.vertices[0])
        return len({find(v) for v in range(n)}) == 1

    def with_set(self, set_name: str) -> InteractionGraph:
        return InteractionGraph(
            self.vertex_ids,
            self.roles,
            tuple(Edge(e.vertices, set_name) for e in self.edges),
            self.seed,
        )

    def interaction_set(self, edge_index: int) -> InteractionSet:
        e = self.edges[edge_index]
        # one seed stream per edge, so Rand terms differ from edge to edge
        return builtin_interaction_set(e.set_name, self.seed + edge_index, len(e.vertices))

    @cached_property
    def instances(self) -> tuple[TermInstance, ...]:
        """Edge terms in edge order, then per-vertex field terms."""
        out = []
        field_vertices: dict[int, InteractionSet] = {}
        for ei, e in enumerate(self.edges):
            s = self.interaction_set(ei)
            for ti, (m, lab) in enumerate(zip(s.terms, s.labels)):
                out.append(
                    TermInstance(f"e{ei}:{ti}", ei, None, ti, lab, LocalOperator(m, e.vertices))
                )
            if s.field_terms:
                for v in e.vertices:
                    field_vertices.setdefault(v, s)
        for v in sorted(field_vertices):
            s = field_vertices[v]
            for ti, (m, lab) in enumerate(zip(s.field_terms, s.field_labels)):
                out.append(TermInstance(f"v{v}:{ti}", None, v, ti, lab, LocalOperator(m, (v,))))
        return tuple(out)

    def to_json(self) -> dict:
        return {
            "vertices": [{"id": i, "role": r} for i, r in zip(self.vertex_ids, self.roles)],
            "edges": [
                {"vertices": [self.vertex_ids[v] for v in e.vertices], "set": e.set_name}
                for e in self.edges
            ],
            "seed": self.seed,
        }

    @classmethod
    def from_json(cls, obj: dict) -> InteractionGraph:
        ids = [str(v["id"]) for v in obj["vertices"]]
        roles = [v.get("role", DATA) for v in obj["vertices"]]
        lookup = {vid: i for i, vid in enumerate(ids)}
        if len(lookup) != len(ids):
            raise ValueError("duplicate vertex ids")
        edges = []
        for e in obj["edges"]:
            try:
                verts = tuple(lookup[str(v)] for v in e["vertices"])
            except KeyError as exc:
                raise ValueError(f"edge references unknown vertex {exc}") from None
            edges.append(Edge(verts, e["set"]))
        return cls(tuple(ids), tuple(roles), tuple(edges), int(obj.get("seed", 0)))


def load_graph(path: str | Path) -> InteractionGraph:
    with open(path) as fh:
        return InteractionGraph.from_json(json.load(fh))


def simple_graph(
    n: int,
    edges: Sequence[Sequence[int]],
    set_name: str = "Proj",
    hidden: Sequence[int] = (),
    seed: int = 0,
) -> InteractionGraph:
    ids = tuple(str(i) for i in range(n))
    roles = tuple(HIDDEN if i in set(hidden) else DATA for i in range(n))
    return InteractionGraph(ids, roles, tuple(Edge(tuple(e), set_name) for e in edges), seed)


def _star(n_leaves: int, set_name: str) -> InteractionGraph:
    return simple_graph(
        n_leaves + 1, [(i, n_leaves) for i in range(n_leaves)], set_name, hidden=[n_leaves]
    )


# Stand-in topologies: only vertex/edge counts of the benchmark graphs are known.
PRESETS = {
    "edge": lambda s: simple_graph(2, [(0, 1)], s),
    "path-3": lambda s: simple_graph(3, [(0, 1), (1, 2)], s),
    "path-4": lambda s: simple_graph(4, [(0, 1), (1, 2), (2, 3)], s),
    "cycle-8-chord": lambda s: simple_graph(
        8, [(i, (i + 1) % 8) for i in range(8)] + [(0, 4)], s
    ),
    "star-6": lambda s: _star(6, s),
    "star-9": lambda s: _star(9, s),
}


def preset_graph(name: str, set_name: str = "Proj") -> InteractionGraph:
    try:
        return PRESETS[name](set_name)
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


# ---------------------------------------------------------------------------
# data
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LabeledDataset:
    yes: tuple[str, ...]
    no: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "yes", tuple(self.yes))
        object.__setattr__(self, "no", tuple(self.no))
        strings = self.yes + self.no
        if any(set(s) - {"0", "1"} for s in strings):
            raise ValueError("bitstrings may only contain 0 and 1")
        if len({len(s) for s in strings}) > 1:
            raise ValueError("bitstrings differ in length")
        overlap = set(self.yes) & set(self.no)
        if overlap:
            raise ValueError(f"strings labelled both YES and NO: {sorted(overlap)}")

    @property
    def width(self) -> int:
        return len((self.yes + self.no)[0]) if self.yes or self.no else 0

    def side(self, label: str) -> tuple[str, ...]:
        if label not in ("YES", "NO"):
            raise ValueError(f"label must be YES or NO, got {label!r}")
        return self.yes if label == "YES" else self.no

    def labelled(self) -> list[tuple[str, str]]:
        return [(s, "YES") for s in self.yes] + [(s, "NO") for s in self.no]

    def check_graph(self, graph: InteractionGraph) -> None:
        if self.width != len(graph.data_qubits):
            raise ValueError(
                f"dataset strings have {self.width} bits but graph has "
                f"{len(graph.data_qubits)} data vertices"
            )

    def to_text(self) -> str:
        return "".join(f"{s} {lab}\n" for s, lab in self.labelled())

    @classmethod
    def from_text(cls, text: str) -> LabeledDataset:
        yes, no = [], []
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2 or parts[1].upper() not in ("YES", "NO"):
                raise ValueError(f"line {lineno}: expected '<bitstring> <YES|NO>'")
            (yes if parts[1].upper() == "YES" else no).append(parts[0])
        return cls(tuple(yes), tuple(no))


def load_dataset(path: str | Path) -> LabeledDataset:
    return LabeledDataset.from_text(Path(path).read_text())


def data_projector(
    graph: InteractionGraph, strings: Sequence[str], n: int | None = None
) -> WeightedTermList:
    """Sum of |l><l| on the data register (identity on hidden and controls).

    Each component is a product of 1-local projectors.
    """
    if not strings:
        warnings.warn("empty data side: projector is zero", stacklevel=2)
        return WeightedTermList()
    dq = graph.data_qubits
    out = []
    for s in dict.fromkeys(strings):
        if len(s) != len(dq):
            raise ValueError(f"datum {s!r} does not match {len(dq)} data vertices")
        out.append((1.0, BasisProjector(dq, s)))
    return WeightedTermList(out)


# ---------------------------------------------------------------------------
# trained classifier
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TrainedClassifier:
    graph: InteractionGraph
    coefficients: np.ndarray
    weight_range: tuple[float, float] = (-1.0, 1.0)

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=float)
        object.__setattr__(self, "coefficients", c)
        if c.shape != (len(self.graph.instances),):
            raise ValueError(
                f"expected {len(self.graph.instances)} coefficients, got {c.shape}"
            )
        lo, hi = self.weight_range
        if np.any(c < lo - 1e-12) or np.any(c > hi + 1e-12):
            raise ValueError(f"coefficients leave the weight range [{lo}, {hi}]")

    def weights(self) -> dict[str, float]:
        return {inst.key: float(a) for inst, a in zip(self.graph.instances, self.coefficients)}

    @classmethod
    def from_weights(
        cls, graph: InteractionGraph, weights: dict[str, float], weight_range=(-1.0, 1.0)
    ) -> TrainedClassifier:
        missing = [i.key for i in graph.instances if i.key not in weights]
        if missing:
            raise KeyError(f"missing coefficients for {missing}")
        return cls(graph, np.array([weights[i.key] for i in graph.instances]), tuple(weight_range))


def assemble_hamiltonian(classifier: TrainedClassifier) -> WeightedTermList:
    """H = sum over term instances of a_{e,h} h, placed on the graph register."""
    return WeightedTermList(
        [(a, inst.operator) for a, inst in zip(classifier.coefficients, classifier.graph.instances)]
    )


# ---------------------------------------------------------------------------
# training layout
# ---------------------------------------------------------------------------


def qudit_width(d: int) -> int:
    """Control qubits needed to select one of d terms or none."""
    return math.ceil(math.log2(d + 1))


@dataclass(frozen=True)
class TrainingLayout:
    mode: str
    n_system: int
    groups: tuple[tuple[int, ...], ...]
    # instance index -> (control qubits, pattern)
    controls: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]
    delta: float = 1.0

    @property
    def control_qubits(self) -> tuple[int, ...]:
        return tuple(range(self.n_system, self.n_qubits))

    @property
    def n_controls(self) -> int:
        if self.mode == "per-term":
            return len(self.controls)
        return sum(qudit_width(len(g)) for g in self.groups)

    @property
    def n_qubits(self) -> int:
        return self.n_system + self.n_controls

    def summary(self) -> dict:
        return {
            "mode": self.mode,
            "n_system": self.n_system,
            "n_controls": self.n_controls,
            "n_qubits": self.n_qubits,
            "groups": [list(g) for g in self.groups],
            "delta": self.delta,
        }


def _instance_units(graph: InteractionGraph) -> list[list[int]]:
    """Instance indices bundled per edge (vertex fields form their own units)."""
    units: dict[tuple, list[int]] = {}
    for i, inst in enumerate(graph.instances):
        key = ("e", inst.edge) if inst.edge is not None else ("v", inst.vertex)
        units.setdefault(key, []).append(i)
    return list(units.values())


def resolve_grouping(graph: InteractionGraph, grouping) -> list[list[int]]:
    """Partition term instances for qudit mode.

    ``grouping`` is ``"all"`` (one global group), ``"edge"`` (one group per
    edge / vertex field), ``"tuples:k"`` (consecutive runs of k terms),
    ``"packed:q"`` (whole edges packed greedily while a group fits q control
    qubits), or an explicit list of index lists.
    """
    n = len(graph.instances)
    if isinstance(grouping, str):
        kind, _, arg = grouping.partition(":")
        if kind == "all":
            groups = [list(range(n))]
        elif kind == "edge":
            groups = _instance_units(graph)
        elif kind == "tuples":
            k = int(arg)
            if k < 1:
                raise ValueError("tuple size must be positive")
            groups = [list(range(i, min(i + k, n))) for i in range(0, n, k)]
        elif kind == "packed":
            cap = (1 << int(arg)) - 1
            groups, cur = [], []
            for unit in _instance_units(graph):
                if cur and len(cur) + len(unit) > cap:
                    groups.append(cur)
                    cur = []
                cur = cur + unit
            if cur:
                groups.append(cur)
        else:
            raise ValueError(f"unknown grouping {grouping!r}")
    else:
        groups = [list(g) for g in grouping]
    flat = sorted(i for g in groups for i in g)
    if flat != list(range(n)):
        raise ValueError("grouping must partition the term instances")
    return [g for g in groups if g]


def build_training_layout(
    graph: InteractionGraph, mode: str = "per-term", grouping="all", delta: float = 1.0
) -> TrainingLayout:
    """Assign control qubits (after the graph register) to every term instance."""
    n_sys = graph.n_vertices
    n = len(graph.instances)
    if delta < 1:
        raise ValueError("delta must be >= 1")
    if mode == "per-term":
        ctrl = tuple(((n_sys + i,), (1,)) for i in range(n))
        return TrainingLayout(mode, n_sys, tuple((i,) for i in range(n)), ctrl, delta)
    if mode != "qudit":
        raise ValueError(f"unknown layout mode {mode!r}")
    groups = resolve_grouping(graph, grouping)
    ctrl: list = [None] * n
    nxt = n_sys
    for g in groups:
        w = qudit_width(len(g))
        if w > MAX_QUBITS:
            raise QubitCapError(f"group of {len(g)} terms needs {w} control qubits")
        qubits = tuple(range(nxt, nxt + w))
        for j, inst in enumerate(g):
            code = j + 1  # code 0 selects no term
            ctrl[inst] = (qubits, tuple((code >> (w - 1 - b)) & 1 for b in range(w)))
        nxt += w
    return TrainingLayout(mode, n_sys, tuple(tuple(g) for g in groups), tuple(ctrl), delta)


def training_hamiltonian(graph: InteractionGraph, layout: TrainingLayout) -> WeightedTermList:
    """Controlled training Hamiltonian H_c on graph + control register.

    Per-term mode gives blocks holding every subset sum of terms; qudit mode
    gives blocks diag(0, h_1, ..., h_d) per group, with unused codes zero.
    """
    entries = []
    for inst, (cq, pat) in zip(graph.instances, layout.controls):
        entries.append((1.0, ControlledOperator(inst.operator, cq, pat)))
    return WeightedTermList(entries)


def driver_hamiltonian(n: int) -> WeightedTermList:
    """-sum_i X_i, whose ground state is the uniform superposition."""
    return WeightedTermList([(-1.0, LocalOperator(X, (q,))) for q in range(n)])
