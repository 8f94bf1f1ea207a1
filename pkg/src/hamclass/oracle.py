"""Exact-diagonalization reference for small registers (<= 14 qubits)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import ORACLE_MAX_QUBITS, TOL
from .model import LabeledDataset
from .tensor import WeightedTermList, check_register, register_marginal


@dataclass
class Spectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    tol: float

    @property
    def ground_energy(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def ground_indices(self) -> np.ndarray:
        ev = self.eigenvalues
        cut = ev[0] + self.tol * (ev[-1] - ev[0] + 1.0)
        return np.flatnonzero(ev <= cut)

    @property
    def ground_vectors(self) -> np.ndarray:
        return self.eigenvectors[:, self.ground_indices]

    def ground_projector(self) -> np.ndarray:
        v = self.ground_vectors
        return v @ v.conj().T


def exact_spectrum(H: WeightedTermList, n: int, tol: float = TOL.degeneracy) -> Spectrum:
    check_register(n, ORACLE_MAX_QUBITS)
    w, v = np.linalg.eigh(H.dense(n))
    return Spectrum(w, v, tol)


def ground_space_data_marginal(
    H: WeightedTermList, n: int, keep: Sequence[int], tol: float = TOL.degeneracy
) -> np.ndarray:
    """Uniform mixture over the ground space, reduced to ``keep``, diagonal only."""
    spec = exact_spectrum(H, n, tol)
    v = spec.ground_vectors
    probs = (np.abs(v) ** 2).sum(axis=1) / v.shape[1]
    return register_marginal(probs, n, keep)


def datum_overlap(spec: Spectrum, n: int, data_qubits: Sequence[int], datum: str) -> float:
    """cos^2 of the smallest principal angle between gs(H) and |l> (x) anything.

    Equals the largest eigenvalue of P_gs restricted to the datum's sector.
    """
    v = spec.ground_vectors
    idx = np.arange(1 << n)
    sel = np.ones(1 << n, dtype=bool)
    for q, b in zip(data_qubits, datum):
        sel &= ((idx >> (n - 1 - q)) & 1) == int(b)
    block = v[sel]
    if block.size == 0:
        return 0.0
    s = np.linalg.svd(block, compute_uv=False)
    return float(min(s[0] ** 2, 1.0))


@dataclass
class OverlapScores:
    scores: dict[str, float]
    yes_mean: float
    no_mean: float


def overlap_scores(
    H: WeightedTermList,
    n: int,
    data_qubits: Sequence[int],
    dataset: LabeledDataset,
    tol: float = TOL.degeneracy,
) -> OverlapScores:
    spec = exact_spectrum(H, n, tol)
    scores = {s: datum_overlap(spec, n, data_qubits, s) for s in dataset.yes + dataset.no}
    yes = [scores[s] for s in dataset.yes]
    no = [scores[s] for s in dataset.no]
    return OverlapScores(
        scores,
        float(np.mean(yes)) if yes else float("nan"),
        float(np.mean(no)) if no else float("nan"),
    )


def principal_angles(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Principal angles (radians, ascending) between the column spans of a and b."""
    qa, _ = np.linalg.qr(a)
    qb, _ = np.linalg.qr(b)
    s = np.linalg.svd(qa.conj().T @ qb, compute_uv=False)
    return np.arccos(np.clip(s, 0.0, 1.0))
