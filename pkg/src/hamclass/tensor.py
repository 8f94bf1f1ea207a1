"""Dense state-vector engine.

States are flat ``complex128`` arrays of length ``2**n``; qubit 0 is the
leftmost bitstring character (most significant index bit). Hamiltonians are
kept as weighted lists of local terms and are applied term by term, so the
full ``2**n x 2**n`` matrix is only built on request (``dense``) for small
oracle-sized registers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import _kernels
from .config import MAX_LOCAL_QUBITS, MAX_QUBITS, ORACLE_MAX_QUBITS, TOL


class InvalidOperatorError(ValueError):
    """A matrix failed a Hermiticity, unitarity or shape check."""


class QubitCapError(ValueError):
    """A register exceeds the configured qubit cap."""


def check_register(n: int, cap: int = MAX_QUBITS) -> None:
    if n < 0:
        raise ValueError(f"negative qubit count {n}")
    if n > cap:
        raise QubitCapError(f"{n} qubits exceeds the cap of {cap}")


def _index_bits(n: int, qubits: Sequence[int]) -> np.ndarray:
    """Local index (msb = qubits[0]) of every full-register basis state."""
    idx = np.arange(1 << n, dtype=np.int64)
    local = np.zeros(1 << n, dtype=np.int64)
    for q in qubits:
        local = (local << 1) | ((idx >> (n - 1 - q)) & 1)
    return local


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------


@dataclass
class StateVector:
    amplitudes: np.ndarray
    n: int

    def __post_init__(self):
        check_register(self.n)
        self.amplitudes = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (1 << self.n,):
            raise ValueError(
                f"expected {1 << self.n} amplitudes for {self.n} qubits, "
                f"got shape {self.amplitudes.shape}"
            )

    @classmethod
    def basis(cls, bits: str) -> StateVector:
        n = len(bits)
        psi = np.zeros(1 << n, dtype=np.complex128)
        psi[int(bits, 2) if bits else 0] = 1.0
        return cls(psi, n)

    @classmethod
    def uniform(cls, n: int) -> StateVector:
        check_register(n)
        return cls(np.full(1 << n, 2.0 ** (-n / 2), dtype=np.complex128), n)

    @classmethod
    def product(cls, factors: Sequence[np.ndarray]) -> StateVector:
        """Tensor product of single-qubit states, qubit 0 first."""
        psi = np.ones(1, dtype=np.complex128)
        for f in factors:
            psi = np.kron(psi, np.asarray(f, dtype=np.complex128))
        return cls(psi, len(factors))

    def copy(self) -> StateVector:
        return StateVector(self.amplitudes.copy(), self.n)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


# ---------------------------------------------------------------------------
# terms
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class LocalOperator:
    """A ``2**k x 2**k`` matrix placed on ``k`` ordered qubits.

    Row/column index bit ``j`` (most significant first) belongs to
    ``targets[j]``.
    """

    matrix: np.ndarray
    targets: tuple[int, ...]
    hermitian: bool = True

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        k = len(self.targets)
        if m.shape != (1 << k, 1 << k):
            raise InvalidOperatorError(
                f"matrix shape {m.shape} does not match {k} target qubits"
            )
        if len(set(self.targets)) != k or any(t < 0 for t in self.targets):
            raise InvalidOperatorError(f"invalid target list {self.targets}")
        if k > MAX_LOCAL_QUBITS:
            raise InvalidOperatorError(f"{k}-local operator exceeds {MAX_LOCAL_QUBITS}")
        if self.hermitian and not np.allclose(m, m.conj().T, rtol=0, atol=TOL.hermiticity):
            raise InvalidOperatorError("matrix flagged Hermitian is not Hermitian")

    @property
    def k(self) -> int:
        return len(self.targets)

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.targets

    @cached_property
    def is_diagonal(self) -> bool:
        m = self.matrix
        return bool(np.all(m[~np.eye(m.shape[0], dtype=bool)] == 0))

    @cached_property
    def eigh(self) -> tuple[np.ndarray, np.ndarray]:
        if not self.hermitian:
            raise InvalidOperatorError("eigendecomposition requested for non-Hermitian operator")
        return np.linalg.eigh(self.matrix)

    def placed(self, targets: Sequence[int]) -> LocalOperator:
        return LocalOperator(self.matrix, tuple(targets), self.hermitian)

    def exp(self, theta: float) -> np.ndarray:
        """Matrix of exp(-i theta h)."""
        w, v = self.eigh
        return (v * np.exp(-1j * theta * w)) @ v.conj().T

    def diagonal(self, n: int) -> np.ndarray | None:
        if not (self.hermitian and self.is_diagonal):
            return None
        return np.real(np.diag(self.matrix))[_index_bits(n, self.targets)]

    def accumulate(self, psi, out, n, coef):
        _kernels.accumulate_matrix(psi, out, n, self.matrix, coef, self.targets)

    def evolve(self, psi, n, theta):
        _kernels.apply_matrix(psi, n, self.exp(theta), self.targets)

    def gate(self, theta):
        return self.exp(theta), self.targets, (), ()


@dataclass(frozen=True, eq=False)
class BasisProjector:
    """``|bits><bits|`` on ``qubits`` tensored with identity elsewhere.

    Stored as a product of single-qubit projectors; never materialized as a
    ``2**k`` matrix, so it may span the whole data register.
    """

    qubits: tuple[int, ...]
    bits: str

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if len(self.bits) != len(self.qubits) or set(self.bits) - {"0", "1"}:
            raise InvalidOperatorError(f"bad projector pattern {self.bits!r}")

    def mask(self, n: int) -> np.ndarray:
        idx = np.arange(1 << n, dtype=np.int64)
        m = np.ones(1 << n, dtype=bool)
        for q, b in zip(self.qubits, self.bits):
            m &= ((idx >> (n - 1 - q)) & 1) == int(b)
        return m

    def diagonal(self, n: int) -> np.ndarray:
        return self.mask(n).astype(np.float64)

    def accumulate(self, psi, out, n, coef):
        m = self.mask(n)
        out[m] += coef * psi[m]

    def evolve(self, psi, n, theta):
        psi[self.mask(n)] *= np.exp(-1j * theta)


@dataclass(frozen=True, eq=False)
class ControlledOperator:
    """``|pattern><pattern|_controls (x) op``.

    Its exponential is exactly a controlled-``u`` gate: ``u = exp(-i t op)``
    fires on the control pattern and identity acts everywhere else.
    """

    op: LocalOperator
    controls: tuple[int, ...]
    pattern: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "controls", tuple(int(c) for c in self.controls))
        object.__setattr__(self, "pattern", tuple(int(p) for p in self.pattern))
        if len(self.controls) != len(self.pattern):
            raise InvalidOperatorError("control list and pattern differ in length")
        if set(self.controls) & set(self.op.targets):
            raise InvalidOperatorError("control and target qubits overlap")

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.controls + self.op.targets

    def control_mask(self, n: int) -> np.ndarray:
        return BasisProjector(self.controls, "".join(map(str, self.pattern))).mask(n)

    def diagonal(self, n: int) -> np.ndarray | None:
        d = self.op.diagonal(n)
        if d is None:
            return None
        return np.where(self.control_mask(n), d, 0.0)

    def accumulate(self, psi, out, n, coef):
        _kernels.accumulate_matrix(
            psi, out, n, self.op.matrix, coef, self.op.targets, self.controls, self.pattern
        )

    def evolve(self, psi, n, theta):
        _kernels.apply_matrix(
            psi, n, self.op.exp(theta), self.op.targets, self.controls, self.pattern
        )

    def gate(self, theta):
        return self.op.exp(theta), self.op.targets, self.controls, self.pattern


Term = LocalOperator | BasisProjector | ControlledOperator


@dataclass
class WeightedTermList:
    """H = sum_i a_i h_i, kept as a list of local terms."""

    entries: list[tuple[float, Term]] = field(default_factory=list)

    def __post_init__(self):
        self.entries = [(float(c), t) for c, t in self.entries]
        for c, _ in self.entries:
            if not np.isfinite(c):
                raise ValueError("non-finite coefficient")

    def __iter__(self) -> Iterator[tuple[float, Term]]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __add__(self, other: WeightedTermList) -> WeightedTermList:
        return WeightedTermList(self.entries + other.entries)

    def scaled(self, factor: float) -> WeightedTermList:
        return WeightedTermList([(factor * c, t) for c, t in self.entries])

    @property
    def qubits(self) -> set[int]:
        return {q for _, t in self.entries for q in t.qubits}

    def apply(self, psi: np.ndarray, n: int) -> np.ndarray:
        """Return H|psi> without building H."""
        out = np.zeros_like(psi, dtype=np.complex128)
        for c, t in self.entries:
            if c != 0.0:
                t.accumulate(psi, out, n, c)
        return out

    def diagonal(self, n: int) -> np.ndarray | None:
        """Diagonal of H when every term is diagonal, else None."""
        d = np.zeros(1 << n)
        for c, t in self.entries:
            td = t.diagonal(n)
            if td is None:
                return None
            d += c * td
        return d

    def dense(self, n: int, cap: int = ORACLE_MAX_QUBITS) -> np.ndarray:
        check_register(n, cap)
        eye = np.eye(1 << n, dtype=np.complex128)
        out = np.zeros((1 << n, 1 << n), dtype=np.complex128)
        for c, t in self.entries:
            if c == 0.0:
                continue
            d = t.diagonal(n)
            if d is not None:
                out[np.diag_indices(1 << n)] += c * d
            elif isinstance(t, ControlledOperator):
                _kernels.np_accumulate_matrix(
                    eye, out, n, t.op.matrix, c, t.op.targets, t.controls, t.pattern
                )
            else:
                _kernels.np_accumulate_matrix(eye, out, n, t.matrix, c, t.targets)
        return out


def _check_state_register(state: StateVector, qubits: Iterable[int]) -> None:
    bad = [q for q in qubits if not 0 <= q < state.n]
    if bad:
        raise ValueError(f"qubits {bad} outside a {state.n}-qubit register")


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def matrix_exp_hermitian(h: LocalOperator, theta: float) -> LocalOperator:
    """exp(-i theta h) via eigendecomposition, returned as a unitary operator."""
    if not h.hermitian:
        raise InvalidOperatorError("matrix_exp_hermitian needs a Hermitian operator")
    return LocalOperator(h.exp(theta), h.targets, hermitian=False)


def apply_local_unitary(
    state: StateVector, u: LocalOperator, targets: Sequence[int] | None = None
) -> StateVector:
    """Return a new state with ``u`` applied on ``targets`` (default: u.targets)."""
    targets = u.targets if targets is None else tuple(targets)
    if len(targets) != u.k:
        raise InvalidOperatorError(
            f"{u.k}-qubit matrix applied to {len(targets)} targets"
        )
    if len(set(targets)) != len(targets):
        raise InvalidOperatorError(f"repeated targets {targets}")
    _check_state_register(state, targets)
    m = u.matrix
    if np.max(np.abs(m @ m.conj().T - np.eye(m.shape[0]))) > TOL.norm:
        raise InvalidOperatorError("operator is not unitary")
    out = state.copy()
    _kernels.apply_matrix(out.amplitudes, state.n, m, targets)
    return out


def expectation_and_std(state: StateVector, H: WeightedTermList) -> tuple[float, float]:
    """Mean and standard deviation of H in ``state``, via phi = H psi."""
    _check_state_register(state, H.qubits)
    psi = state.amplitudes
    phi = H.apply(psi, state.n)
    mean = float(np.real(np.vdot(psi, phi)))
    second = float(np.real(np.vdot(phi, phi)))
    return mean, float(np.sqrt(max(second - mean * mean, 0.0)))


def data_marginal(state: StateVector, keep: Sequence[int]) -> np.ndarray:
    """Probability of each kept-register bitstring (index msb = keep[0])."""
    keep = list(keep)
    if not keep:
        raise ValueError("data_marginal needs at least one kept qubit")
    _check_state_register(state, keep)
    return register_marginal(state.probabilities(), state.n, keep)


def register_marginal(probs: np.ndarray, n: int, keep: Sequence[int]) -> np.ndarray:
    t = probs.reshape((2,) * n)
    drop = tuple(q for q in range(n) if q not in set(keep))
    reduced = t.sum(axis=drop) if drop else t
    remaining = [q for q in range(n) if q in set(keep)]
    order = [remaining.index(q) for q in keep]
    return np.transpose(reduced, order).reshape(-1)


def marginal_table(probs: np.ndarray) -> dict[str, float]:
    """Bitstring-keyed view of a marginal array."""
    k = int(np.log2(len(probs)))
    return {format(i, f"0{k}b"): float(p) for i, p in enumerate(probs)}
