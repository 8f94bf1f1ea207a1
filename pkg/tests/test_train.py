import itertools
import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hamclass.anneal import AnnealConfig
from hamclass.model import (
    LabeledDataset,
    TrainedClassifier,
    assemble_hamiltonian,
    build_training_layout,
    preset_graph,
    simple_graph,
)
from hamclass.tasks import NOT_TASK
from hamclass.train import (
    calibrate,
    classifier_from_report,
    datum_energies,
    energy_coefficients,
    minmax,
    projected_trace,
    reshift,
    train_exact_lp,
    train_one_shot,
    train_projected_oracle,
    train_serial,
)
from oracles import embed

NOT_CONFIG = AnnealConfig(100, 50, 20.0)


def dense_mixed_energy(classifier, datum):
    """tr[(|l><l| (x) 1/d_h) H] from the dense Hamiltonian."""
    g = classifier.graph
    n = g.n_vertices
    M = assemble_hamiltonian(classifier).dense(n)
    dq = g.data_qubits
    sel = [
        i for i in range(1 << n)
        if all(((i >> (n - 1 - q)) & 1) == int(b) for q, b in zip(dq, datum))
    ]
    return float(np.real(np.trace(M[np.ix_(sel, sel)])) / len(sel))


@pytest.mark.parametrize("set_name", ["Proj", "Pauli", "Rand", "Heis", "Ising"])
def test_energy_coefficients_match_dense(set_name, rng):
    g = simple_graph(3, [(0, 1), (1, 2)], set_name, hidden=[1])
    c = rng.uniform(-1, 1, len(g.instances))
    clf = TrainedClassifier(g, c)
    strings = ["00", "01", "10", "11"]
    got = datum_energies(clf, strings)
    assert np.allclose(got, [dense_mixed_energy(clf, s) for s in strings], atol=1e-12)


def _corner_optimum(graph, dataset, lo, hi):
    c_yes = energy_coefficients(graph, dataset.yes).mean(axis=0)
    c_no = energy_coefficients(graph, dataset.no).mean(axis=0)
    best = None
    for corner in itertools.product((lo, hi), repeat=len(graph.instances)):
        a = np.array(corner)
        val = a @ c_yes - a @ c_no
        if best is None or val < best[0] - 1e-12:
            best = (val, a)
    return best


def test_exact_lp_not_task():
    rep = train_exact_lp(preset_graph("edge"), NOT_TASK)
    assert rep.trained.coefficients.tolist() == [1.0, -1.0, -1.0, 1.0]
    val, a = _corner_optimum(preset_graph("edge"), NOT_TASK, -1.0, 1.0)
    assert np.array_equal(a, rep.trained.coefficients)
    assert rep.lp["objective"] == pytest.approx(val, abs=1e-12)


@given(seed=st.integers(0, 2**31), lo=st.floats(-2, 0.5), span=st.floats(0.1, 3))
def test_exact_lp_matches_corner_enumeration(seed, lo, span):
    rng = np.random.default_rng(seed)
    g = preset_graph("path-3", "Proj")
    perm = rng.permutation(8)
    strings = [format(i, "03b") for i in perm]
    ds = LabeledDataset(tuple(strings[:3]), tuple(strings[3:6]))
    hi = lo + span
    rep = train_exact_lp(g, ds, (lo, hi))
    val, _ = _corner_optimum(g, ds, lo, hi)
    assert rep.lp["objective"] == pytest.approx(val, abs=1e-9)


def test_exact_lp_ties_take_value_nearest_zero():
    g = simple_graph(3, [(0, 1), (1, 2)], "Pauli")
    rep = train_exact_lp(g, LabeledDataset(("000",), ("111",)), (0.5, 1.0))
    ties = np.abs(rep.lp["kappa"]) <= 1e-12
    assert ties.any()
    assert np.all(rep.trained.coefficients[ties] == 0.5)


@given(st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=20), st.floats(-5, 5), st.floats(0.01, 5))
def test_reshift_onto_range(raw, lo, span):
    raw = np.array(raw)
    hi = lo + span
    w = reshift(raw, lo, hi)
    assert np.all(w >= lo - 1e-9) and np.all(w <= hi + 1e-9)
    if raw.max() - raw.min() > 1e-6:
        assert w.min() == pytest.approx(lo) and w.max() == pytest.approx(hi)
        order = np.argsort(raw, kind="stable")
        assert np.all(np.diff(w[order]) >= -1e-9)


def test_reshift_constant_input():
    assert np.all(reshift(np.ones(4), -1, 1) == 0.0)
    assert np.all(reshift(np.ones(4), 0.2, 1) == 0.2)
    assert np.all(minmax(np.full(3, 7.0)) == 0)


def test_calibrate_reflects_wrong_orientation():
    g = preset_graph("edge")
    w, flipped = calibrate(np.array([0.0, 1.0, 1.0, 0.0]), g, NOT_TASK, (0.0, 1.0))
    assert flipped and w.tolist() == [1.0, 0.0, 0.0, 1.0]
    w2, flipped2 = calibrate(w, g, NOT_TASK, (0.0, 1.0))
    assert not flipped2 and np.array_equal(w2, w)


def test_one_shot_not_task_gives_target():
    g = preset_graph("edge", "Proj")
    rep = train_one_shot(g, NOT_TASK, build_training_layout(g), NOT_CONFIG, weight_range=(0.0, 1.0))
    assert np.round(rep.trained.coefficients, 2).tolist() == [1.0, 0.0, 0.0, 1.0]
    assert rep.raw_weights == pytest.approx([-1.0, 1.0, 1.0, -1.0])
    m = rep.raw_marginals["YES"]
    assert m[0] == pytest.approx(m[3]) and m[1] == pytest.approx(m[2])


def test_one_shot_default_range():
    g = preset_graph("edge", "Proj")
    rep = train_one_shot(g, NOT_TASK, build_training_layout(g), NOT_CONFIG)
    assert np.round(rep.trained.coefficients, 2).tolist() == [1.0, -1.0, -1.0, 1.0]


def test_serial_not_task_orientation():
    g = preset_graph("edge", "Proj")
    rep = train_serial(g, NOT_TASK, build_training_layout(g), NOT_CONFIG, weight_range=(0.0, 1.0), max_workers=2)
    a = rep.trained.coefficients
    assert a[0] == a[3] and a[1] == a[2] and a[0] > a[1]
    assert "e0:1" not in rep.serial_sets["01"]


def test_training_requires_both_sides():
    g = preset_graph("edge")
    with pytest.raises(ValueError):
        train_exact_lp(g, LabeledDataset(("01",), ()))


def test_projected_trace_matches_kron_reference():
    g = preset_graph("edge", "Proj")
    lay = build_training_layout(g, "qudit", "all")
    n = lay.n_qubits
    Hc = sum(
        embed(np.diag([0.0] * (c + 1) + [1.0] + [0.0] * (6 - c)), (2, 3, 4), n)
        @ embed(inst.operator.matrix, (0, 1), n)
        for c, inst in enumerate(g.instances)
    )
    pi = np.diag([float(((i >> (n - 2)) & 3) in (1, 2)) for i in range(1 << n)])
    H2 = pi @ Hc @ pi
    ref = [np.trace(H2.reshape(4, 8, 4, 8)[:, c, :, c]).real for c in range(8)]
    assert np.allclose(projected_trace(g, NOT_TASK, lay, "YES"), ref)


@pytest.mark.parametrize("side", ["YES", "NO"])
def test_projected_oracle_not_task(side):
    g = preset_graph("edge", "Proj")
    rep = train_projected_oracle(g, NOT_TASK, build_training_layout(g), side, (0.0, 1.0))
    assert rep.trained.coefficients.tolist() == [1.0, 0.0, 0.0, 1.0]


def test_report_roundtrip():
    g = preset_graph("path-3", "Ising")
    ds = LabeledDataset(("010", "101"), ("000", "111"))
    rep = train_exact_lp(g, ds)
    obj = json.loads(json.dumps(rep.to_json()))
    clf = classifier_from_report(obj)
    assert np.array_equal(clf.coefficients, rep.trained.coefficients)
    assert [w["key"] for w in obj["weights"]] == ["e0:0", "e1:0", "v0:0", "v1:0", "v2:0"]
    assert obj["seed"] == g.seed
