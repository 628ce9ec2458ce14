#include "hetsep/eval/experiments.hpp"

#include "hetsep/graph/io.hpp"
#include "hetsep/graph/synthetic.hpp"
#include "hetsep/train/trainer.hpp"

#include <stdexcept>

namespace hetsep::eval {

const std::vector<std::string>& ablation_variants() {
    static const std::vector<std::string> v = {"full", "no_homo", "no_hete", "no_rae", "mean_fusion", "random_single"};
    return v;
}

train::TrainConfig apply_variant(const train::TrainConfig& base, const std::string& variant) {
    train::TrainConfig c = base;
    if (variant == "full") {
    } else if (variant == "no_homo") {
        c.no_homo = true;
    } else if (variant == "no_hete") {
        c.no_hete = true;
    } else if (variant == "no_rae") {
        c.no_rae = true;
    } else if (variant == "mean_fusion") {
        c.loss_mode = model::LossMode::mean_fusion;
    } else if (variant == "random_single") {
        c.loss_mode = model::LossMode::random_single;
    } else {
        throw std::invalid_argument("unknown ablation variant '" + variant +
                                    "' (expected full, no_homo, no_hete, no_rae, mean_fusion or random_single)");
    }
    c.validate();
    return c;
}

MetricsReport train_and_evaluate(const graph::HeteroGraph& graph, const train::TrainConfig& config,
                                 const EvalOptions& eval) {
    const auto run = train::train(graph, config);
    if (run.diverged) throw std::runtime_error("training diverged at " + run.divergence_message);
    const auto emb = train::export_embeddings(run.checkpoint, graph);
    auto rep = evaluate(emb.values, graph.labels, graph.num_classes, eval);
    rep.metadata["config_hash"] = train::config_hash(config);
    rep.metadata["split"] = eval.train_per_class;
    rep.metadata["epochs_run"] = run.epochs_run;
    return rep;
}

std::vector<AblationRow> run_ablation(const graph::HeteroGraph& graph, const train::TrainConfig& config,
                                      const std::vector<std::string>& variants, const EvalOptions& eval) {
    if (variants.empty()) throw std::invalid_argument("no ablation variants given");
    std::vector<train::TrainConfig> configs;
    for (const auto& v : variants) configs.push_back(apply_variant(config, v));
    std::vector<AblationRow> rows;
    for (size_t k = 0; k < variants.size(); ++k) {
        rows.push_back({variants[k], train_and_evaluate(graph, configs[k], eval)});
        rows.back().report.metadata["variant"] = variants[k];
    }
    return rows;
}

std::string ablation_tsv(const std::vector<AblationRow>& rows) {
    if (rows.empty()) return "variant\n";
    std::string out = "variant";
    for (const auto& [name, st] : rows.front().report.metrics) out += '\t' + name + "_mean\t" + name + "_std";
    out += '\n';
    for (const auto& row : rows) {
        out += row.variant;
        for (const auto& [name, st] : row.report.metrics) {
            out += '\t' + graph::format_number(st.mean) + '\t' + graph::format_number(st.std);
        }
        out += '\n';
    }
    return out;
}

std::vector<SweepPoint> robustness_sweep(const graph::HeteroGraph& graph, const train::TrainConfig& config,
                                         const std::vector<double>& rates, const EvalOptions& eval) {
    for (double r : rates) {
        if (!(r >= 0.0 && r < 1.0)) throw std::invalid_argument("perturbation rates must lie in [0, 1)");
    }
    EvalOptions opts = eval;
    opts.clustering = false;
    opts.similarity = false;
    std::vector<SweepPoint> out;
    for (double r : rates) {
        const auto g = r == 0.0 ? graph : graph::perturb_edges(graph, r, config.seed);
        auto rep = train_and_evaluate(g, config, opts);
        rep.metadata["rate"] = r;
        out.push_back({r, std::move(rep)});
    }
    return out;
}

std::string sweep_tsv(const std::vector<SweepPoint>& points) {
    std::string out = "rate\tmicro_f1_mean\tmicro_f1_std\ttrials\n";
    for (const auto& p : points) {
        const auto& st = p.report.metrics.at("micro_f1");
        out += graph::format_number(p.rate) + '\t' + graph::format_number(st.mean) + '\t' + graph::format_number(st.std) +
               '\t' + std::to_string(p.report.trials) + '\n';
    }
    return out;
}

}  // namespace hetsep::eval
