import numpy as np
import pytest

from hamclass.model import TrainedClassifier, assemble_hamiltonian, preset_graph
from hamclass.oracle import (
    datum_overlap,
    exact_spectrum,
    ground_space_data_marginal,
    overlap_scores,
    principal_angles,
)
from hamclass.tasks import NOT_TASK
from hamclass.tensor import ControlledOperator, LocalOperator, WeightedTermList, register_marginal
from hamclass.model import X, Z
from oracles import random_hermitian


def target_h():
    g = preset_graph("edge", "Proj")
    return assemble_hamiltonian(TrainedClassifier(g, np.array([1.0, 0, 0, 1.0]), (0, 1)))


def test_spectrum_of_target():
    spec = exact_spectrum(target_h(), 2)
    assert spec.ground_energy == pytest.approx(0.0)
    assert sorted(spec.ground_indices.tolist()) == [0, 1]
    P = spec.ground_projector()
    assert np.allclose(P, np.diag([0, 1, 1, 0]))


def test_overlap_scores_not_target():
    sc = overlap_scores(target_h(), 2, (0, 1), NOT_TASK)
    assert sc.yes_mean == pytest.approx(1.0) and sc.no_mean == pytest.approx(0.0)


def test_overlap_is_principal_angle_cosine(rng):
    n = 3
    H = WeightedTermList([(1.0, LocalOperator(random_hermitian(8, rng), (0, 1, 2)))])
    spec = exact_spectrum(H, n)
    for datum in ("0", "1"):
        sector = np.zeros((8, 4))
        cols = [i for i in range(8) if ((i >> 2) & 1) == int(datum)]
        sector[cols, range(4)] = 1
        theta = principal_angles(spec.ground_vectors, sector)[0]
        assert datum_overlap(spec, n, (0,), datum) == pytest.approx(np.cos(theta) ** 2, abs=1e-10)


def test_principal_angles_identical_and_orthogonal():
    a = np.eye(4)[:, :2]
    assert np.allclose(principal_angles(a, a), 0, atol=1e-7)
    assert np.allclose(principal_angles(a, np.eye(4)[:, 2:]), np.pi / 2)


def test_degenerate_ground_space_detected():
    H = WeightedTermList([(1.0, LocalOperator(Z, (0,)))])
    spec = exact_spectrum(H, 2)
    assert len(spec.ground_indices) == 2


def random_diagonal_training_h(rng, n_terms=3):
    """Per-term training H with random full-support diagonal two-qubit terms."""
    terms = [LocalOperator(np.diag(rng.uniform(-1, 1, 4)), (0, 1)) for _ in range(n_terms)]
    H = WeightedTermList([(1.0, ControlledOperator(t, (2 + i,), (1,))) for i, t in enumerate(terms)])
    return H, terms, 2 + n_terms


def test_nondegenerate_random_diagonal_controls_are_sharp(rng):
    H, terms, n = random_diagonal_training_h(rng)
    spec = exact_spectrum(H, n)
    assert len(spec.ground_indices) == 1
    probs = np.abs(spec.ground_vectors[:, 0]) ** 2
    p1 = [register_marginal(probs, n, [q])[1] for q in range(2, n)]
    assert all(min(p, 1 - p) < 1e-9 for p in p1)
    # the ground state switches on exactly the negative terms of its system state
    s = int(np.argmax(register_marginal(probs, n, [0, 1])))
    expected = [float(np.real(t.matrix[s, s]) < 0) for t in terms]
    assert np.allclose(p1, expected)


def test_ground_mixture_marginal_sums_to_one():
    H = WeightedTermList([(-1.0, LocalOperator(np.kron(X, X), (0, 2)))])
    m = ground_space_data_marginal(H, 3, (0, 2))
    assert m.sum() == pytest.approx(1.0)
    assert np.allclose(m, 0.25)


def test_oracle_cap():
    from hamclass.tensor import QubitCapError

    with pytest.raises(QubitCapError):
        exact_spectrum(WeightedTermList(), 15)
