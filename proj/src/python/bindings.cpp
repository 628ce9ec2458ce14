#include "hetsep/eval/experiments.hpp"
#include "hetsep/eval/metrics.hpp"
#include "hetsep/graph/incidence.hpp"
#include "hetsep/graph/io.hpp"
#include "hetsep/graph/synthetic.hpp"
#include "hetsep/train/trainer.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace hetsep;
using nlohmann::json;

namespace {

// Configs cross the boundary as JSON text; the Python side dumps dicts.
train::TrainConfig config_of(const std::string& text) { return train::config_from_json(json::parse(text)); }

py::dict report_dict(const eval::MetricsReport& r) {
    py::dict metrics;
    for (const auto& [name, st] : r.metrics) metrics[py::str(name)] = py::make_tuple(st.mean, st.std);
    py::dict out;
    out["metrics"] = metrics;
    out["trials"] = r.trials;
    out["json"] = r.to_json().dump();
    return out;
}

std::pair<std::vector<Index>, std::vector<Index>> nonzeros(const SparseMatrix<double>& m) {
    std::vector<Index> rows, cols;
    for (Index r = 0; r < m.outerSize(); ++r) {
        for (SparseMatrix<double>::InnerIterator it(m, r); it; ++it) {
            rows.push_back(r);
            cols.push_back(it.col());
        }
    }
    return {rows, cols};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Core bindings; see the hetsep package for the Python-facing API.";

    py::register_exception<graph::GraphFormatError>(m, "GraphFormatError", PyExc_ValueError);

    py::class_<graph::HeteroGraph>(m, "HeteroGraph")
        .def_property_readonly("node_types",
                               [](const graph::HeteroGraph& g) {
                                   std::vector<std::pair<std::string, Index>> out;
                                   for (const auto& t : g.node_types) out.emplace_back(t.name, t.count);
                                   return out;
                               })
        .def_property_readonly("relations",
                               [](const graph::HeteroGraph& g) {
                                   std::vector<std::string> out;
                                   for (const auto& r : g.relations) out.push_back(r.name);
                                   return out;
                               })
        .def_readonly("target_type", &graph::HeteroGraph::target_type)
        .def_readonly("labels", &graph::HeteroGraph::labels)
        .def_readonly("num_classes", &graph::HeteroGraph::num_classes)
        .def("features", [](const graph::HeteroGraph& g, Index t) { return g.features.at(static_cast<size_t>(t)); })
        .def("edges",
             [](const graph::HeteroGraph& g, const std::string& relation) {
                 const auto& r = g.relations.at(static_cast<size_t>(g.relation_index(relation)));
                 Eigen::Matrix<Index, Eigen::Dynamic, 2, Eigen::RowMajor> e(static_cast<Index>(r.edges.size()), 2);
                 for (size_t k = 0; k < r.edges.size(); ++k) e.row(static_cast<Index>(k)) << r.edges[k].src, r.edges[k].dst;
                 return e;
             })
        .def("edge_count", &graph::HeteroGraph::edge_count);

    m.def("load_graph", [](const std::filesystem::path& dir, std::uint64_t seed) {
        graph::LoadOptions o;
        o.seed = seed;
        return graph::load_graph(dir, o);
    }, py::arg("dir"), py::arg("seed") = 0);
    m.def("save_graph", &graph::save_graph, py::arg("graph"), py::arg("dir"));
    m.def("generate_synthetic",
          [](const std::string& spec) { return graph::generate_synthetic(graph::synthetic_config_from_json(json::parse(spec))); },
          py::arg("spec_json"));
    m.def("perturb_edges", &graph::perturb_edges, py::arg("graph"), py::arg("rate"), py::arg("seed"));
    m.def("xavier_random_features", &graph::xavier_random_features, py::arg("graph"), py::arg("dim"), py::arg("seed"));

    m.def("incidence", [](const graph::HeteroGraph& g, Index relation) {
        const auto inc = graph::build_incidence(g, relation);
        auto [rows, cols] = nonzeros(inc.matrix);
        return py::make_tuple(rows, cols, py::make_tuple(inc.rows(), inc.cols()));
    }, py::arg("graph"), py::arg("relation"));
    m.def("dual_hyperedge_degree", [](const graph::HeteroGraph& g, Index relation) {
        return Vector<double>(graph::dual_transform(graph::build_incidence(g, relation)).hyperedge_degree);
    }, py::arg("graph"), py::arg("relation"));

    py::class_<diff::CheckpointFile>(m, "Checkpoint")
        .def_property_readonly("meta", [](const diff::CheckpointFile& c) { return c.meta.dump(); })
        .def_property_readonly("names",
                               [](const diff::CheckpointFile& c) {
                                   std::vector<std::string> out;
                                   for (const auto& t : c.tensors) out.push_back(t.name);
                                   return out;
                               })
        .def("save", [](const diff::CheckpointFile& c, const std::filesystem::path& p) { diff::write_checkpoint(p, c); });
    m.def("read_checkpoint", &diff::read_checkpoint, py::arg("path"));

    m.def("validate_config", [](const std::string& text) { return train::to_json(config_of(text)).dump(); },
          py::arg("config_json"));
    m.def("config_hash", [](const std::string& text) { return train::config_hash(config_of(text)); }, py::arg("config_json"));

    m.def("train", [](const graph::HeteroGraph& g, const std::string& config, std::optional<std::filesystem::path> out_dir) {
        train::TrainOptions o;
        o.out_dir = std::move(out_dir);
        train::TrainResult r;
        {
            py::gil_scoped_release release;
            r = train::train(g, config_of(config), o);
        }
        py::dict d;
        d["losses"] = r.losses;
        d["epochs_run"] = r.epochs_run;
        d["early_stopped"] = r.early_stopped;
        d["diverged"] = r.diverged;
        d["divergence_message"] = r.divergence_message;
        d["log_tsv"] = r.log_tsv;
        d["checkpoint"] = r.checkpoint;
        return d;
    }, py::arg("graph"), py::arg("config_json"), py::arg("out_dir") = py::none());

    m.def("export_embeddings", [](const diff::CheckpointFile& c, const graph::HeteroGraph& g, const std::string& variant) {
        return train::export_embeddings(c, g, train::embedding_variant_from_string(variant)).values;
    }, py::arg("checkpoint"), py::arg("graph"), py::arg("variant") = "anchor");

    m.def("evaluate", [](const Matrix<double>& emb, const std::vector<int>& labels, int num_classes, int train_per_class,
                         int trials, std::uint64_t seed, bool clustering, bool similarity) {
        eval::EvalOptions o;
        o.train_per_class = train_per_class;
        o.trials = trials;
        o.seed = seed;
        o.clustering = clustering;
        o.similarity = similarity;
        return report_dict(eval::evaluate(emb, labels, num_classes, o));
    }, py::arg("embeddings"), py::arg("labels"), py::arg("num_classes"), py::arg("train_per_class") = 20,
          py::arg("trials") = 10, py::arg("seed") = 0, py::arg("clustering") = true, py::arg("similarity") = true);

    m.def("micro_f1", &eval::micro_f1);
    m.def("macro_f1", &eval::macro_f1);
    m.def("macro_auc", &eval::macro_auc);
    m.def("nmi", &eval::nmi);
    m.def("ari", &eval::ari);
    m.def("sim_at_k", &eval::sim_at_k, py::arg("embeddings"), py::arg("labels"), py::arg("k"));
    m.def("kmeans", &eval::kmeans, py::arg("x"), py::arg("k"), py::arg("seed"), py::arg("max_iter") = 300,
          py::arg("tol") = 1e-4);

    m.def("ablation_variants", &eval::ablation_variants);
}
