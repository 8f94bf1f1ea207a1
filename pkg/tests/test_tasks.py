import warnings

import numpy as np
import pytest

from hamclass.anneal import AnnealConfig
from hamclass.tasks import (
    BLUE_9,
    RED_6,
    RED_9,
    all_strings,
    color_dataset,
    color_graph,
    random_labelings,
    run_color_task,
    train_task,
)
from hamclass.model import preset_graph
from hamclass.tensor import QubitCapError


def test_nine_bit_lists_verbatim():
    assert RED_9[:2] == ("110000000", "011000000")
    assert BLUE_9[0] == "000001100"
    assert len(RED_9) == len(BLUE_9) == 10
    ds = color_dataset(9)
    assert ds.no == RED_9 and ds.yes == BLUE_9


def test_six_bit_short_entry_normalized_with_warning():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        ds = color_dataset(6)
    assert any("00010" in str(w.message) for w in caught)
    assert "000100" in ds.yes and ds.no == RED_6
    assert ds.width == 6


def test_color_graph_star():
    g = color_graph(9)
    assert g.n_vertices == 10 and g.hidden_qubits == (9,)
    assert all(e.vertices[1] == 9 for e in g.edges)
    with pytest.raises(ValueError):
        color_dataset(5)


def test_per_term_color_hits_qubit_cap():
    with pytest.raises(QubitCapError, match="qudit"):
        train_task(color_graph(9), color_dataset(9), mode="per-term")


def test_unknown_method():
    with pytest.raises(ValueError):
        train_task(preset_graph("edge"), color_dataset(6), method="magic")


def test_random_labelings_balanced_and_seeded():
    a = random_labelings(3, 3, seed=1)
    b = random_labelings(3, 3, seed=1)
    assert [x.yes for x in a] == [x.yes for x in b]
    for ds in a:
        assert len(ds.yes) == len(ds.no) == 4
        assert sorted(ds.yes + ds.no) == all_strings(3)


def test_six_bit_color_run():
    res = run_color_task(6, AnnealConfig(30, 30, 20.0))
    assert len(res.records) == 64
    assert res.metrics.yes_energy[0] < res.metrics.no_energy[0]
    assert res.report.layout["n_qubits"] == 12
    assert {r.label for r in res.records} == {"YES", "NO", None}
    assert all(r.hue is not None for r in res.records)
