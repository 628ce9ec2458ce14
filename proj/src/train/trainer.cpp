#include "hetsep/train/trainer.hpp"

#include "hetsep/diff/adam.hpp"
#include "hetsep/graph/io.hpp"
#include "hetsep/train/model.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace hetsep::train {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Keys that may change between a run and its resumption.
json resumable_view(const TrainConfig& c) {
    json j = to_json(c);
    j.erase("epochs");
    j.erase("checkpoint_interval");
    j.erase("early_stop_patience");
    return j;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << text;
}

template <typename T>
bool all_finite(const diff::ParameterSet<T>& params) {
    for (const auto& p : params) {
        if (!p.value.allFinite() || !p.m.allFinite() || !p.v.allFinite()) return false;
    }
    return true;
}

template <typename T>
struct Snapshot {
    std::vector<Matrix<T>> value, m, v;

    void take(const diff::ParameterSet<T>& params) {
        value.clear();
        m.clear();
        v.clear();
        for (const auto& p : params) {
            value.push_back(p.value);
            m.push_back(p.m);
            v.push_back(p.v);
        }
    }
    void restore(diff::ParameterSet<T>& params) const {
        size_t k = 0;
        for (auto& p : params) {
            p.value = value[k];
            p.m = m[k];
            p.v = v[k];
            ++k;
        }
    }
};

struct LoopState {
    int next_epoch = 0;
    long adam_t = 0;
    double best = std::numeric_limits<double>::infinity();
    int since_best = 0;
    bool early_stopped = false;
    bool diverged = false;
};

template <typename T>
diff::CheckpointFile make_checkpoint(const Model<T>& model, const TrainConfig& config, const LoopState& s) {
    diff::CheckpointFile f;
    f.dtype = config.precision == 64 ? diff::DType::float64 : diff::DType::float32;
    f.tensors = diff::parameter_records(model.params(), true);
    f.meta = {{"config", to_json(config)},
              {"config_hash", config_hash(config)},
              {"epoch", s.next_epoch},
              {"adam_step", s.adam_t},
              {"best_loss", std::isfinite(s.best) ? json(s.best) : json(nullptr)},
              {"since_best", s.since_best},
              {"early_stopped", s.early_stopped},
              {"diverged", s.diverged},
              {"rng", {{"seed", config.seed}, {"step", s.next_epoch}}}};
    return f;
}

std::string log_rows(int epoch, const model::LossBreakdown& b) {
    std::string out;
    const std::string total = graph::format_number(b.total);
    for (const auto& t : b.terms) {
        out += std::to_string(epoch) + '\t' + t.relation + '\t' + model::to_string(t.kind) + '\t' + t.direction + '\t' +
               graph::format_number(t.value) + '\t' + total + '\n';
    }
    return out;
}

const char* kLogHeader = "epoch\trelation\tkind\tdirection\tvalue\ttotal\n";

template <typename T>
TrainResult train_impl(const graph::HeteroGraph& g, const TrainConfig& config, const TrainOptions& options) {
    Model<T> model(g, config);
    LoopState s;
    if (options.resume) {
        const auto& ck = *options.resume;
        const TrainConfig stored = checkpoint_config(ck);
        if (resumable_view(stored) != resumable_view(config)) {
            throw std::invalid_argument("checkpoint was written with a different config");
        }
        diff::load_parameter_records(model.params(), ck, true);
        s.next_epoch = ck.meta.at("epoch").get<int>();
        s.adam_t = ck.meta.at("adam_step").get<long>();
        if (!ck.meta.at("best_loss").is_null()) s.best = ck.meta.at("best_loss").get<double>();
        s.since_best = ck.meta.at("since_best").get<int>();
    }

    TrainResult result;
    result.first_epoch = s.next_epoch;
    result.log_tsv = kLogHeader;
    if (options.out_dir) fs::create_directories(*options.out_dir);

    auto params = model.params().all();
    Snapshot<T> last_good;
    diff::AdamOptions adam;
    adam.lr = config.lr;

    for (int epoch = s.next_epoch; epoch < config.epochs; ++epoch) {
        last_good.take(model.params());
        try {
            Tape<T> tape(config.lr > 0);
            const auto fwd = model.forward(tape, model::GumbelMode::train, static_cast<std::uint64_t>(epoch), true);
            const auto& loss = *fwd.loss;
            if (!std::isfinite(loss.breakdown.total)) throw std::domain_error("non-finite loss");
            if (config.lr > 0) {
                model.params().zero_grad();
                tape.backward(loss.total);
                diff::adam_step<T>(params, adam, s.adam_t + 1);
                if (!all_finite(model.params())) throw std::domain_error("non-finite parameter after update");
                ++s.adam_t;
            }
            result.losses.push_back(loss.breakdown.total);
            result.breakdowns.push_back(loss.breakdown);
            result.log_tsv += log_rows(epoch, loss.breakdown);
            if (loss.breakdown.total < s.best) {
                s.best = loss.breakdown.total;
                s.since_best = 0;
            } else {
                ++s.since_best;
            }
        } catch (const std::domain_error& e) {
            last_good.restore(model.params());
            s.diverged = true;
            result.diverged = true;
            result.divergence_message = "epoch " + std::to_string(epoch) + ": " + e.what();
            break;
        }
        s.next_epoch = epoch + 1;
        ++result.epochs_run;
        if (options.out_dir && config.checkpoint_interval > 0 && s.next_epoch % config.checkpoint_interval == 0) {
            diff::write_checkpoint(*options.out_dir / "checkpoint.bin", make_checkpoint(model, config, s));
        }
        if (config.early_stop_patience > 0 && s.since_best >= config.early_stop_patience) {
            s.early_stopped = true;
            result.early_stopped = true;
            break;
        }
    }

    result.checkpoint = make_checkpoint(model, config, s);
    if (options.out_dir) {
        diff::write_checkpoint(*options.out_dir / "checkpoint.bin", result.checkpoint);
        write_text(*options.out_dir / "train_log.tsv", result.log_tsv);
    }
    return result;
}

template <typename T>
EmbeddingMatrix export_impl(const diff::CheckpointFile& ck, const graph::HeteroGraph& g, EmbeddingVariant variant) {
    Model<T> model(g, checkpoint_config(ck));
    try {
        diff::load_parameter_records(model.params(), ck, false);
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(std::string("checkpoint/config mismatch: ") + e.what());
    }
    Tape<T> tape(false);
    const auto fwd = model.forward(tape, model::GumbelMode::eval, 0, false);
    EmbeddingMatrix out;
    out.variant = variant;
    const Matrix<double> anchor = fwd.anchor.value().template cast<double>();
    if (variant == EmbeddingVariant::anchor) {
        out.values = anchor;
        return out;
    }
    const Index n = anchor.rows();
    const Index d = anchor.cols();
    Matrix<double> ho = Matrix<double>::Zero(n, d);
    Matrix<double> he = Matrix<double>::Zero(n, d);
    for (const auto& rf : fwd.relations) {
        ho += rf.h_ho.value().template cast<double>();
        he += rf.h_he.value().template cast<double>();
    }
    const double inv = 1.0 / static_cast<double>(fwd.relations.size());
    out.values.resize(n, 3 * d);
    out.values << anchor, ho * inv, he * inv;
    return out;
}

template <typename T>
void dump_impl(const diff::CheckpointFile& ck, const graph::HeteroGraph& g, const fs::path& dir,
               const std::string& only) {
    Model<T> model(g, checkpoint_config(ck));
    diff::load_parameter_records(model.params(), ck, false);
    Tape<T> tape(false);
    const auto fwd = model.forward(tape, model::GumbelMode::eval, 0, false);
    fs::create_directories(dir);
    bool matched = only.empty();
    for (size_t s = 0; s < fwd.relations.size(); ++s) {
        const auto& rf = fwd.relations[s];
        const auto& name = g.relations[static_cast<size_t>(rf.relation)].name;
        if (!only.empty() && name != only) continue;
        matched = true;
        for (auto [rel, sc, w] : {std::tuple{rf.relation, rf.scores, rf.w}, std::tuple{rf.inverse, rf.scores_inv, rf.w_inv}}) {
            const auto& r = g.relations[static_cast<size_t>(rel)];
            std::string text = "edge_index\tsrc\tdst\tscore\tweight\n";
            for (size_t e = 0; e < r.edges.size(); ++e) {
                const auto k = static_cast<Index>(e);
                text += std::to_string(e) + '\t' + std::to_string(r.edges[e].src) + '\t' + std::to_string(r.edges[e].dst) +
                        '\t' + graph::format_number(static_cast<double>(sc.value()(k, 0))) + '\t' +
                        graph::format_number(static_cast<double>(w.value()(k, 0))) + '\n';
            }
            write_text(dir / (r.name + ".weights.tsv"), text);
        }
        model::write_synthesized_graph(dir / (name + ".ho.graph.tsv"), model.pattern(s),
                                       rf.a_ho.value().col(0).template cast<double>());
        model::write_synthesized_graph(dir / (name + ".he.graph.tsv"), model.pattern(s),
                                       rf.a_he.value().col(0).template cast<double>());
    }
    if (!matched) throw std::invalid_argument("relation '" + only + "' is not incident to the target type");
}

}  // namespace

TrainConfig checkpoint_config(const diff::CheckpointFile& checkpoint) {
    if (!checkpoint.meta.contains("config")) throw std::invalid_argument("checkpoint has no config");
    return config_from_json(checkpoint.meta.at("config"));
}

TrainResult train(const graph::HeteroGraph& graph, const TrainConfig& config, const TrainOptions& options) {
    config.validate();
    return config.precision == 64 ? train_impl<double>(graph, config, options)
                                  : train_impl<float>(graph, config, options);
}

EmbeddingVariant embedding_variant_from_string(const std::string& s) {
    if (s == "anchor") return EmbeddingVariant::anchor;
    if (s == "concat_views") return EmbeddingVariant::concat_views;
    throw std::invalid_argument("unknown embedding variant '" + s + "' (expected anchor or concat_views)");
}

std::string to_string(EmbeddingVariant v) { return v == EmbeddingVariant::anchor ? "anchor" : "concat_views"; }

EmbeddingMatrix export_embeddings(const diff::CheckpointFile& checkpoint, const graph::HeteroGraph& graph,
                                  EmbeddingVariant variant) {
    return checkpoint_config(checkpoint).precision == 64 ? export_impl<double>(checkpoint, graph, variant)
                                                         : export_impl<float>(checkpoint, graph, variant);
}

void dump_relation_weights(const diff::CheckpointFile& checkpoint, const graph::HeteroGraph& graph,
                           const fs::path& dir, const std::string& only_relation) {
    if (checkpoint_config(checkpoint).precision == 64) {
        dump_impl<double>(checkpoint, graph, dir, only_relation);
    } else {
        dump_impl<float>(checkpoint, graph, dir, only_relation);
    }
}

void write_embeddings_tsv(const fs::path& path, const EmbeddingMatrix& emb) {
    std::string text;
    for (Index i = 0; i < emb.values.rows(); ++i) {
        text += std::to_string(i);
        for (Index c = 0; c < emb.values.cols(); ++c) text += '\t' + graph::format_number(emb.values(i, c));
        text += '\n';
    }
    write_text(path, text);
}

EmbeddingMatrix read_embeddings_tsv(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::getline(ls, cell, '\t');
        if (std::stol(cell) != static_cast<long>(rows.size())) {
            throw std::runtime_error(path.string() + ": rows must be numbered 0..n-1 in order");
        }
        rows.emplace_back();
        while (std::getline(ls, cell, '\t')) rows.back().push_back(std::stod(cell));
        if (rows.back().size() != rows.front().size()) throw std::runtime_error(path.string() + ": ragged rows");
    }
    EmbeddingMatrix out;
    out.values.resize(static_cast<Index>(rows.size()), rows.empty() ? 0 : static_cast<Index>(rows.front().size()));
    for (size_t i = 0; i < rows.size(); ++i) {
        for (size_t c = 0; c < rows[i].size(); ++c) out.values(static_cast<Index>(i), static_cast<Index>(c)) = rows[i][c];
    }
    return out;
}

}  // namespace hetsep::train
