import json

import numpy as np
import pytest

import hetsep

SPEC = {
    "num_target_nodes": 60,
    "num_classes": 3,
    "feature_dim": 8,
    "seed": 3,
    "attribute_types": [{"name": "a", "count": 10}, {"name": "b", "count": 12}],
}


@pytest.fixture(scope="module")
def graph():
    return hetsep.generate_synthetic(SPEC)


def test_graph_shape(graph):
    assert graph.node_types == [("target", 60), ("a", 10), ("b", 12)]
    assert graph.relations == ["target-a", "target-b", "target-a_rev", "target-b_rev"]
    assert len(graph.labels) == 60
    assert graph.features(0).shape == (60, 8)
    assert graph.edges("target-a").shape[1] == 2


def test_incidence_invariants(graph):
    rows, cols, shape = hetsep.incidence(graph, "target-a")
    dense = np.zeros(shape)
    dense[rows, cols] = 1
    assert (dense.sum(axis=0) == 2).all()
    degree = hetsep._core.dual_hyperedge_degree(graph, 0)
    assert np.array_equal(degree, dense.sum(axis=1))


def test_save_load_round_trip(graph, tmp_path):
    hetsep.save_graph(graph, tmp_path / "g")
    again = hetsep.load_graph(tmp_path / "g")
    assert again.labels == graph.labels
    assert np.array_equal(again.edges("target-b"), graph.edges("target-b"))


def test_train_export_evaluate(graph, tmp_path):
    config = {"epochs": 3, "hidden_dim": 8, "seed": 2, "precision": 64}
    run = hetsep.train(graph, config, tmp_path / "run")
    assert run["epochs_run"] == 3
    assert len(run["losses"]) == 3
    assert not run["diverged"]
    assert (tmp_path / "run" / "checkpoint.bin").exists()
    emb = hetsep.export_embeddings(run["checkpoint"], graph)
    assert emb.shape == (60, 8)
    ck = hetsep.read_checkpoint(tmp_path / "run" / "checkpoint.bin")
    assert np.array_equal(hetsep.export_embeddings(ck, graph), emb)

    rep = hetsep.evaluate(emb, graph.labels, graph.num_classes, trials=2, train_per_class=5)
    assert rep["trials"] == 2
    mean, std = rep["metrics"]["micro_f1"]
    assert 0 <= mean <= 100 and std >= 0
    assert json.loads(rep["json"])["trials"] == 2

    again = hetsep.train(graph, config)
    assert again["losses"] == run["losses"]


def test_config_validation():
    full = hetsep.validate_config({"lr": 5e-4})
    assert full["lr"] == 5e-4 and full["hidden_dim"] == 64
    with pytest.raises(ValueError, match="unknown config key 'lrate'"):
        hetsep.validate_config({"lrate": 1})
    with pytest.raises(ValueError, match="tau_c"):
        hetsep.validate_config({"tau_c": 2.0})
    assert hetsep.config_hash({}) == hetsep.config_hash({"lr": 1e-3})


def test_metrics():
    assert hetsep.micro_f1([0, 1, 1], [0, 1, 0]) == pytest.approx(200 / 3)
    assert hetsep.ari([0, 0, 1, 1], [1, 1, 0, 0]) == pytest.approx(1.0)
    assert hetsep.nmi([0, 0, 1, 1], [0, 0, 0, 0]) == 0.0
    x = np.eye(3)[[0, 0, 0, 1, 1, 1, 2, 2, 2]] + 0.01
    assert hetsep.sim_at_k(x, [0, 0, 0, 1, 1, 1, 2, 2, 2], 2) == 100.0
    assert "no_hete" in hetsep.ablation_variants()


def test_load_errors_are_value_errors(tmp_path):
    with pytest.raises(ValueError):
        hetsep.load_graph(tmp_path / "missing")
