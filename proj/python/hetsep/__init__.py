"""Python front end for the hetsep core library.

Configs and synthetic specs are plain dicts; they are validated by the core
and unknown keys are rejected.
"""

import json

from . import _core
from ._core import (
    Checkpoint,
    GraphFormatError,
    HeteroGraph,
    ablation_variants,
    ari,
    export_embeddings,
    kmeans,
    load_graph,
    macro_auc,
    macro_f1,
    micro_f1,
    nmi,
    perturb_edges,
    read_checkpoint,
    save_graph,
    sim_at_k,
    xavier_random_features,
)

__version__ = "0.1.0"


def generate_synthetic(spec):
    return _core.generate_synthetic(json.dumps(spec))


def validate_config(config):
    """Return the full config (defaults filled in) or raise ValueError."""
    return json.loads(_core.validate_config(json.dumps(config)))


def config_hash(config):
    return _core.config_hash(json.dumps(config))


def train(graph, config, out_dir=None):
    """Train on `graph`; returns a dict with losses, flags and the checkpoint."""
    return _core.train(graph, json.dumps(config), None if out_dir is None else str(out_dir))


def evaluate(embeddings, labels, num_classes, train_per_class=20, trials=10, seed=0, clustering=True, similarity=True):
    """Metric name -> (mean, std), plus the trial count and the JSON report."""
    return _core.evaluate(embeddings, labels, num_classes, train_per_class, trials, seed, clustering, similarity)


def incidence(graph, relation):
    """(rows, cols, shape) of the nonzeros of one relation's incidence matrix."""
    if isinstance(relation, str):
        relation = graph.relations.index(relation)
    return _core.incidence(graph, relation)
