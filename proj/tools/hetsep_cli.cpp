// hetsep: command-line front end for generating graphs, training, evaluation
// and the ablation / robustness experiments.
//
// Exit codes: 0 success, 1 invalid input or flags, 2 runtime failure.

#include "hetsep/eval/experiments.hpp"
#include "hetsep/eval/metrics.hpp"
#include "hetsep/graph/incidence.hpp"
#include "hetsep/graph/io.hpp"
#include "hetsep/graph/synthetic.hpp"
#include "hetsep/train/trainer.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace hetsep;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Invalid user input; maps to exit code 1.
struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct Flags {
    std::string data;
    std::string config;
    std::string out;
    std::string run;
    std::string spec;
    std::string relation;
    std::string variant = "anchor";
    int split = 20;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> variants;
    std::vector<double> rates;
    std::optional<Index> random_features;
    std::optional<int> precision;
    bool deterministic = false;
};

json read_json(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw UsageError("cannot open " + path.string());
    try {
        return json::parse(is);
    } catch (const json::parse_error& e) {
        throw UsageError(path.string() + ": " + e.what());
    }
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << text;
}

void require_dir(const std::string& value, const char* flag) {
    if (value.empty()) throw UsageError(std::string(flag) + " is required");
    if (!fs::is_directory(value)) throw UsageError(std::string(flag) + " " + value + ": no such directory");
}

graph::HeteroGraph load_data(const Flags& f) {
    require_dir(f.data, "--data");
    graph::LoadOptions lo;
    if (f.seed) lo.seed = *f.seed;
    auto g = graph::load_graph(f.data, lo);
    if (f.random_features) {
        if (*f.random_features < 1) throw UsageError("--random-features must be >= 1");
        g = graph::xavier_random_features(g, *f.random_features, f.seed.value_or(0));
    }
    return g;
}

// The config file (optional unless `required`) with command-line overrides.
train::TrainConfig load_config(const Flags& f, bool required) {
    json j = json::object();
    if (!f.config.empty()) {
        j = read_json(f.config);
    } else if (required) {
        throw UsageError("--config is required");
    }
    if (f.seed) j["seed"] = *f.seed;
    if (f.precision) j["precision"] = *f.precision;
    if (f.deterministic) j["deterministic"] = true;
    return train::config_from_json(j);
}

eval::EvalOptions eval_options(const Flags& f) {
    if (f.split != 20 && f.split != 40 && f.split != 60) throw UsageError("--split must be 20, 40 or 60");
    eval::EvalOptions eo;
    eo.train_per_class = f.split;
    eo.seed = f.seed.value_or(0);
    return eo;
}

fs::path out_dir(const Flags& f) {
    if (f.out.empty()) throw UsageError("--out is required");
    fs::create_directories(f.out);
    return f.out;
}

json run_manifest(const fs::path& run) {
    const fs::path p = run / "run.json";
    if (!fs::exists(p)) throw UsageError(run.string() + " is not a run directory (no run.json); run `hetsep train` first");
    return read_json(p);
}

int cmd_generate(const Flags& f) {
    if (f.spec.empty()) throw UsageError("--spec is required");
    json j = read_json(f.spec);
    if (f.seed) j["seed"] = *f.seed;
    graph::SyntheticConfig sc;
    try {
        sc = graph::synthetic_config_from_json(j);
    } catch (const json::exception& e) {
        throw UsageError(f.spec + ": " + e.what());
    }
    const auto g = graph::generate_synthetic(sc);
    const fs::path out = out_dir(f);
    graph::save_graph(g, out);
    std::cout << "wrote " << g.node_types[static_cast<size_t>(g.target_type)].count << " target nodes, "
              << g.edge_count() << " edges to " << out.string() << '\n';
    return 0;
}

int cmd_train(const Flags& f) {
    const auto g = load_data(f);
    const auto config = load_config(f, true);
    const fs::path out = out_dir(f);
    train::TrainOptions opt;
    opt.out_dir = out;
    const auto r = train::train(g, config, opt);
    train::write_embeddings_tsv(out / "embeddings.tsv", train::export_embeddings(r.checkpoint, g));
    json manifest = {{"data", fs::absolute(f.data).string()},
                     {"config", train::to_json(config)},
                     {"config_hash", train::config_hash(config)},
                     {"epochs_run", r.epochs_run},
                     {"early_stopped", r.early_stopped},
                     {"diverged", r.diverged},
                     {"final_loss", r.losses.empty() ? json(nullptr) : json(r.losses.back())}};
    if (f.random_features) manifest["random_features"] = *f.random_features;
    if (f.seed) manifest["data_seed"] = *f.seed;
    write_text(out / "run.json", manifest.dump(2) + "\n");
    if (r.diverged) {
        std::cerr << "error: training diverged (" << r.divergence_message << "); last good parameters kept in "
                  << (out / "checkpoint.bin").string() << '\n';
        return 2;
    }
    std::cout << "trained " << r.epochs_run << " epochs, final loss "
              << (r.losses.empty() ? std::string("n/a") : graph::format_number(r.losses.back())) << '\n';
    return 0;
}

// Graph of a run directory, rebuilt the way `train` built it.
graph::HeteroGraph run_graph(const Flags& f, const json& manifest) {
    Flags g = f;
    if (g.data.empty()) g.data = manifest.at("data").get<std::string>();
    if (manifest.contains("random_features")) g.random_features = manifest.at("random_features").get<Index>();
    if (manifest.contains("data_seed")) g.seed = manifest.at("data_seed").get<std::uint64_t>();
    return load_data(g);
}

int cmd_eval(const Flags& f) {
    require_dir(f.run, "--run");
    const json manifest = run_manifest(f.run);
    const auto g = run_graph(f, manifest);
    const auto ck = diff::read_checkpoint(fs::path(f.run) / "checkpoint.bin");
    const auto emb = train::export_embeddings(ck, g);
    const auto eo = eval_options(f);
    std::optional<eval::Splits> preset;
    if (g.splits) preset = eval::Splits{g.splits->train, g.splits->val, g.splits->test};
    auto rep = eval::evaluate(emb.values, g.labels, g.num_classes, eo, preset ? &*preset : nullptr);
    rep.metadata["dataset"] = manifest.at("data");
    rep.metadata["config_hash"] = manifest.at("config_hash");
    rep.metadata["split"] = preset ? "preset" : std::to_string(f.split);
    const fs::path base = fs::path(f.run) / ("report_" + std::to_string(f.split));
    write_text(base.string() + ".json", rep.to_json().dump(2) + "\n");
    write_text(base.string() + ".tsv", rep.to_tsv());
    std::cout << rep.to_tsv();
    return 0;
}

std::vector<std::string> variant_list(const Flags& f) {
    if (f.variants.empty()) return eval::ablation_variants();
    return f.variants;
}

int cmd_ablate(const Flags& f) {
    const auto g = load_data(f);
    const auto config = load_config(f, false);
    const auto variants = variant_list(f);
    for (const auto& v : variants) eval::apply_variant(config, v);  // reject typos before training
    auto eo = eval_options(f);
    eo.clustering = false;
    eo.similarity = false;
    const std::string table = eval::ablation_tsv(eval::run_ablation(g, config, variants, eo));
    if (!f.out.empty()) write_text(out_dir(f) / "ablation.tsv", table);
    std::cout << table;
    return 0;
}

int cmd_perturb_sweep(const Flags& f) {
    const auto g = load_data(f);
    const auto config = load_config(f, false);
    if (f.rates.empty()) throw UsageError("--rates is required, e.g. --rates 0,0.2,0.4,0.6");
    for (double r : f.rates) {
        if (!(r >= 0 && r < 1)) throw UsageError("--rates entries must lie in [0, 1)");
    }
    const std::string curve = eval::sweep_tsv(eval::robustness_sweep(g, config, f.rates, eval_options(f)));
    if (!f.out.empty()) write_text(out_dir(f) / "sweep.tsv", curve);
    std::cout << curve;
    return 0;
}

int cmd_transform(const Flags& f) {
    const auto g = load_data(f);
    const fs::path out = out_dir(f);
    bool matched = false;
    for (size_t r = 0; r < g.relations.size(); ++r) {
        const auto& rel = g.relations[r];
        if (!f.relation.empty() && rel.name != f.relation) continue;
        matched = true;
        const auto inc = graph::build_incidence(g, static_cast<Index>(r));
        graph::write_incidence_tsv(out / (rel.name + ".incidence.tsv"), inc);
        graph::write_dual_tsv(out / (rel.name + ".dual.tsv"), graph::dual_transform(inc));
    }
    if (!matched) throw UsageError("--relation " + f.relation + ": no such relation");
    if (!f.run.empty()) {
        require_dir(f.run, "--run");
        const auto ck = diff::read_checkpoint(fs::path(f.run) / "checkpoint.bin");
        train::dump_relation_weights(ck, g, out, f.relation);
    }
    std::cout << "wrote transforms to " << out.string() << '\n';
    return 0;
}

int cmd_export(const Flags& f) {
    require_dir(f.run, "--run");
    const json manifest = run_manifest(f.run);
    const auto g = run_graph(f, manifest);
    const auto ck = diff::read_checkpoint(fs::path(f.run) / "checkpoint.bin");
    const auto emb = train::export_embeddings(ck, g, train::embedding_variant_from_string(f.variant));
    const fs::path out = f.out.empty() ? fs::path(f.run) / ("embeddings_" + f.variant + ".tsv") : fs::path(f.out);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    train::write_embeddings_tsv(out, emb);
    std::cout << "wrote " << emb.values.rows() << " x " << emb.values.cols() << " embeddings to " << out.string() << '\n';
    return 0;
}

void add_common(CLI::App* cmd, Flags& f) {
    cmd->add_option("--seed", f.seed, "Seed override (config seed, splits, featureless types)");
}

void add_train_flags(CLI::App* cmd, Flags& f) {
    cmd->add_option("--random-features", f.random_features, "Replace all features with Xavier-uniform ones of width D");
    cmd->add_option("--precision", f.precision, "Floating-point width (overrides the config)")
        ->check(CLI::IsMember({32, 64}));
    cmd->add_flag("--deterministic", f.deterministic, "Force deterministic mode (overrides the config)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Relation-aware homophily/heterophily separation for heterogeneous graphs", "hetsep"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "hetsep 0.1.0");
    Flags f;

    auto* gen = app.add_subcommand("generate", "Write a planted-partition graph directory from a synthetic spec JSON");
    gen->add_option("--spec", f.spec, "Synthetic graph spec (JSON)")->required();
    gen->add_option("--out", f.out, "Output graph directory")->required();
    add_common(gen, f);

    auto* tr = app.add_subcommand("train", "Train on a graph directory; writes checkpoint, log, embeddings, run.json");
    tr->add_option("--data", f.data, "Graph directory")->required();
    tr->add_option("--config", f.config, "Training config (JSON)")->required();
    tr->add_option("--out", f.out, "Run directory")->required();
    add_common(tr, f);
    add_train_flags(tr, f);

    auto* ev = app.add_subcommand("eval", "Evaluate a run's embeddings; writes report_<split>.json/.tsv");
    ev->add_option("--run", f.run, "Run directory written by train")->required();
    ev->add_option("--split", f.split, "Labelled nodes per class")->check(CLI::IsMember({20, 40, 60}));
    ev->add_option("--data", f.data, "Graph directory (default: the one recorded in run.json)");
    add_common(ev, f);

    auto* ab = app.add_subcommand("ablate", "Train and evaluate ablation variants; prints a TSV table");
    ab->add_option("--data", f.data, "Graph directory")->required();
    ab->add_option("--config", f.config, "Base training config (JSON)");
    ab->add_option("--variants", f.variants, "Comma-separated variants (default: all)")->delimiter(',');
    ab->add_option("--out", f.out, "Directory for ablation.tsv");
    ab->add_option("--split", f.split, "Labelled nodes per class")->check(CLI::IsMember({20, 40, 60}));
    add_common(ab, f);
    add_train_flags(ab, f);

    auto* sw = app.add_subcommand("perturb-sweep", "Drop edges at each rate, retrain, report Micro-F1");
    sw->add_option("--data", f.data, "Graph directory")->required();
    sw->add_option("--config", f.config, "Training config (JSON)");
    sw->add_option("--rates", f.rates, "Comma-separated removal rates in [0, 1)")->delimiter(',')->required();
    sw->add_option("--out", f.out, "Directory for sweep.tsv");
    sw->add_option("--split", f.split, "Labelled nodes per class")->check(CLI::IsMember({20, 40, 60}));
    add_common(sw, f);
    add_train_flags(sw, f);

    auto* tf = app.add_subcommand("transform", "Dump incidence and dual hypergraphs, plus learned weights with --run");
    tf->add_option("--data", f.data, "Graph directory")->required();
    tf->add_option("--out", f.out, "Output directory")->required();
    tf->add_option("--relation", f.relation, "Only this relation (default: all)");
    tf->add_option("--run", f.run, "Run directory whose checkpoint supplies edge weights");
    add_common(tf, f);

    auto* ex = app.add_subcommand("export", "Write a run's embeddings as TSV");
    ex->add_option("--run", f.run, "Run directory written by train")->required();
    ex->add_option("--out", f.out, "Output TSV (default: <run>/embeddings_<variant>.tsv)");
    ex->add_option("--variant", f.variant, "anchor or concat_views")->check(CLI::IsMember({"anchor", "concat_views"}));
    ex->add_option("--data", f.data, "Graph directory (default: the one recorded in run.json)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*gen) return cmd_generate(f);
        if (*tr) return cmd_train(f);
        if (*ev) return cmd_eval(f);
        if (*ab) return cmd_ablate(f);
        if (*sw) return cmd_perturb_sweep(f);
        if (*tf) return cmd_transform(f);
        if (*ex) return cmd_export(f);
    } catch (const graph::GraphFormatError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
