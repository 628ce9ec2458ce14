// One line per acceptance criterion: PASS, FAIL or SKIP, then the measured
// values. Exit status 1 when any required criterion fails.
//
//   hetsep_acceptance [name-substring...]

#include "hetsep/diff/gradcheck.hpp"
#include "hetsep/eval/experiments.hpp"
#include "hetsep/eval/metrics.hpp"
#include "hetsep/graph/incidence.hpp"
#include "hetsep/graph/io.hpp"
#include "hetsep/graph/synthetic.hpp"
#include "hetsep/model/hypergraph.hpp"
#include "hetsep/model/separation.hpp"
#include "hetsep/train/model.hpp"
#include "hetsep/train/trainer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace hetsep;
namespace fs = std::filesystem;

namespace {

enum class Status { pass, fail, skip };

struct Outcome {
    Status status;
    std::string detail;
};

Outcome verdict(bool ok, std::string detail) { return {ok ? Status::pass : Status::fail, std::move(detail)}; }

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), f, a);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---- fixtures --------------------------------------------------------------

graph::HeteroGraph ten_node() {
    graph::HeteroGraph g;
    g.node_types = {{"paper", 6, 3}, {"author", 2, 3}, {"venue", 2, 3}};
    std::mt19937_64 rng(11);
    std::normal_distribution<double> n(0.0, 1.0);
    for (const auto& t : g.node_types) {
        Matrix<double> x(t.count, 3);
        for (Index k = 0; k < x.size(); ++k) x.data()[k] = n(rng);
        g.features.push_back(x);
    }
    g.relations = {{"paper-author", 0, 1, {{0, 0}, {1, 0}, {2, 0}, {2, 1}, {3, 1}, {4, 1}, {5, 0}, {5, 1}}},
                   {"paper-venue", 0, 2, {{0, 0}, {1, 0}, {2, 1}, {3, 1}, {4, 0}, {5, 1}}}};
    g.edge_features.resize(2);
    g.target_type = 0;
    g.num_classes = 2;
    g.labels = {0, 0, 0, 1, 1, 1};
    graph::materialize_inverses(g);
    graph::validate(g);
    return g;
}

graph::HeteroGraph random_bipartite(std::mt19937_64& rng) {
    std::uniform_int_distribution<Index> size(1, 15);
    std::uniform_real_distribution<double> density(0.05, 0.9);
    const Index na = size(rng), nb = size(rng);
    std::bernoulli_distribution keep(density(rng));
    std::vector<graph::Edge> edges;
    for (Index i = 0; i < na; ++i) {
        for (Index j = 0; j < nb; ++j) {
            if (keep(rng)) edges.push_back({i, j});
        }
    }
    if (edges.empty()) edges.push_back({na - 1, nb - 1});
    graph::HeteroGraph g;
    g.node_types = {{"a", na, 1}, {"b", nb, 1}};
    g.features = {Matrix<double>::Zero(na, 1), Matrix<double>::Zero(nb, 1)};
    g.relations = {{"a-b", 0, 1, edges}};
    g.edge_features.resize(1);
    g.target_type = 0;
    g.num_classes = 1;
    g.labels.assign(static_cast<size_t>(na), 0);
    graph::materialize_inverses(g);
    return g;
}

graph::SyntheticConfig planted(double p_in, double p_out, Index targets = 600) {
    graph::SyntheticConfig sc;
    sc.num_target_nodes = targets;
    sc.num_classes = 3;
    sc.p_in = p_in;
    sc.p_out = p_out;
    sc.feature_noise_sigma = 1.0;
    sc.seed = 7;
    sc.attribute_types = {{"a", targets / 10}, {"b", targets * 3 / 20}};
    return sc;
}

eval::EvalOptions micro_only(std::uint64_t seed) {
    eval::EvalOptions eo;
    eo.train_per_class = 20;
    eo.trials = 10;
    eo.seed = seed;
    eo.clustering = false;
    eo.similarity = false;
    return eo;
}

double micro_f1_of(const Matrix<double>& emb, const graph::HeteroGraph& g, std::uint64_t seed) {
    return eval::evaluate(emb, g.labels, g.num_classes, micro_only(seed)).metrics.at("micro_f1").mean;
}

// ---- criteria --------------------------------------------------------------

Outcome gradient_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto g = ten_node();
    train::TrainConfig c;
    c.hidden_dim = 4;
    c.k_pos = 2;
    c.seed = 3;
    c.precision = 64;
    train::Model<double> m(g, c);
    model::PositiveCache frozen;
    {
        diff::Tape<double> t(false);
        frozen = m.forward(t, model::GumbelMode::train, 3, true).loss->positives;
    }
    // The step fixes the Gumbel noise; the positive sets are frozen too.
    auto loss = [&](diff::Tape<double>& t) { return m.forward(t, model::GumbelMode::train, 3, true, &frozen).loss->total; };
    const auto rep = diff::finite_diff_check(loss, m.params().all());
    std::vector<std::string> missing;
    for (const char* family : {"encoder.", "aux.", ".theta", "score.", "filter.", "proj.", ".prelu"}) {
        bool seen = false;
        for (const auto& e : rep.per_param_worst) seen = seen || e.param.find(family) != std::string::npos;
        if (!seen) missing.push_back(family);
    }
    const double secs = seconds_since(t0);
    std::string detail = "max relative error " + fmt("%.3g", rep.max_relative_error) + " (worst " + rep.worst.param +
                         "), " + std::to_string(rep.coordinates_checked) + " coordinates, " + fmt("%.1f s", secs);
    if (!missing.empty()) detail += ", missing family " + missing.front();
    return verdict(rep.max_relative_error < 1e-4 && missing.empty() && secs < 60, detail);
}

Outcome structural_invariants() {
    std::mt19937_64 rng(1000);
    int bad = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto g = random_bipartite(rng);
        const auto inc = graph::build_incidence(g, 0);
        const auto dual = graph::dual_transform(inc);
        const auto back = graph::dual_transform(dual);
        bool ok = (inc.column_sums().array() == 2.0).all();
        ok = ok && back.matrix.rows() == inc.matrix.rows() && back.matrix.cols() == inc.matrix.cols() &&
             Matrix<double>(back.matrix) == Matrix<double>(inc.matrix);
        std::vector<double> degree(static_cast<size_t>(inc.rows()), 0.0);
        for (const auto& e : g.relations[0].edges) {
            degree[static_cast<size_t>(e.src)] += 1;
            degree[static_cast<size_t>(inc.src_count + e.dst)] += 1;
        }
        for (size_t v = 0; v < degree.size(); ++v) ok = ok && dual.hyperedge_degree(static_cast<Index>(v)) == degree[v];
        bad += !ok;
    }
    return verdict(bad == 0, std::to_string(1000 - bad) + "/1000 graphs satisfy all three");
}

Outcome gumbel_limits() {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-30.0, 30.0);
    const Index n = 20000;
    Vector<double> s(n);
    for (Index k = 0; k < n; ++k) s(k) = u(rng);
    s(0) = 0.0;
    s(1) = -0.0;
    long mismatches = 0;
    for (double tau : {0.05, 0.3, 1.0, 2.5}) {
        const Vector<double> noise = Vector<double>::Zero(n);
        const Vector<double> w = model::gumbel_weights(s, tau, noise, model::GumbelMode::eval);
        diff::Tape<double> td(false);
        const Matrix<double> wd = model::gumbel_weights(td.constant(Matrix<double>(s)), tau, noise, model::GumbelMode::eval).value();
        diff::Tape<float> tf(false);
        const Matrix<float> wf =
            model::gumbel_weights(tf.constant(Matrix<float>(s.cast<float>())), tau, noise, model::GumbelMode::eval).value();
        for (Index k = 0; k < n; ++k) {
            const double ref = 1.0 / (1.0 + std::exp(-(s(k) / tau)));
            const float sf = static_cast<float>(s(k));
            const float reff = 1.0f / (1.0f + std::exp(-(sf / static_cast<float>(tau))));
            mismatches += w(k) != ref;
            mismatches += wd(k, 0) != ref;
            mismatches += wf(k, 0) != reff;
        }
    }
    // u = 0.5 gives logistic noise log(u) - log(1 - u) = 0.
    const double u_half = 0.5;
    const double g0 = std::log(u_half) - std::log(1 - u_half);
    const Vector<double> noise = Vector<double>::Constant(n, g0);
    const Vector<double> w = model::gumbel_weights(s, 0.05, noise, model::GumbelMode::train);
    double worst = 0;
    for (Index k = 0; k < n; ++k) {
        if (std::abs(s(k)) >= 0.5) worst = std::max(worst, std::abs(w(k) - std::round(w(k))));
    }
    return verdict(mismatches == 0 && worst < 1e-3, std::to_string(mismatches) + " eval-mode bit mismatches; max |w - round(w)| " +
                                                       fmt("%.3g", worst) + " at tau 0.05, |s| >= 0.5");
}

Outcome separation_complementarity() {
    const auto g = graph::generate_synthetic(planted(0.2, 0.02, 120));
    double ho_rel = 0, he_abs = 0, swap_rel = 0, swap_abs = 0;
    for (Index r : {Index{0}, Index{1}}) {
        const auto& rel = g.relations[static_cast<size_t>(r)];
        const Index inv = rel.inverse;
        const auto pattern = model::build_two_hop_pattern(g, r);
        const Index nt = g.node_types[static_cast<size_t>(rel.src_type)].count;
        const Index na = g.node_types[static_cast<size_t>(rel.dst_type)].count;
        Matrix<double> adj = Matrix<double>::Zero(nt, na);
        for (const auto& e : rel.edges) adj(e.src, e.dst) = 1;
        const Matrix<double> counts = adj * adj.transpose();

        auto weights = [&](double score, Index relation) {
            const Index m = static_cast<Index>(g.relations[static_cast<size_t>(relation)].edges.size());
            return Matrix<double>(model::gumbel_weights(Vector<double>::Constant(m, score), 1.0, Vector<double>::Zero(m),
                                                        model::GumbelMode::eval));
        };
        diff::Tape<double> t(false);
        const auto wp = t.constant(weights(10, r)), wpi = t.constant(weights(10, inv));
        const auto wn = t.constant(weights(-10, r)), wni = t.constant(weights(-10, inv));
        const Matrix<double> ho_p = model::build_homo_graph(wp, wpi, pattern).value();
        const Matrix<double> he_p = model::build_hete_graph(wp, wpi, pattern).value();
        const Matrix<double> ho_n = model::build_homo_graph(wn, wni, pattern).value();
        const Matrix<double> he_n = model::build_hete_graph(wn, wni, pattern).value();
        for (Index i = 0; i < pattern.rows; ++i) {
            for (Index q = pattern.row_ptr[static_cast<size_t>(i)]; q < pattern.row_ptr[static_cast<size_t>(i) + 1]; ++q) {
                const double c = counts(i, pattern.col[static_cast<size_t>(q)]);
                ho_rel = std::max(ho_rel, std::abs(ho_p(q, 0) - c) / c);
                he_abs = std::max(he_abs, he_p(q, 0));
                // Scores -10: the heterophilic graph takes the path counts.
                ho_rel = std::max(ho_rel, std::abs(he_n(q, 0) - c) / c);
                he_abs = std::max(he_abs, ho_n(q, 0));
                swap_rel = std::max(swap_rel, std::abs(ho_n(q, 0) - he_p(q, 0)) / he_p(q, 0));
                swap_rel = std::max(swap_rel, std::abs(he_n(q, 0) - ho_p(q, 0)) / ho_p(q, 0));
                swap_abs = std::max(swap_abs, std::abs(he_n(q, 0) - ho_p(q, 0)));
            }
        }
    }
    return verdict(ho_rel < 1e-4 && he_abs < 1e-6 && swap_rel < 1e-9,
                   "a_ho vs path counts rel " + fmt("%.3g", ho_rel) + ", off-graph max " + fmt("%.3g", he_abs) +
                       ", swap rel " + fmt("%.3g", swap_rel) + " (abs " + fmt("%.3g", swap_abs) + ")");
}

Outcome filter_conservation() {
    const auto g = graph::generate_synthetic(planted(0.2, 0.02, 120));
    long low_bad = 0;
    double high_worst = 0;
    for (Index r : {Index{0}, Index{1}}) {
        const auto pattern = model::build_two_hop_pattern(g, r);
        diff::Tape<double> t(false);
        const auto ones = t.constant(Matrix<double>::Ones(pattern.pairs(), 1));
        for (double value : {0.37, 1.0, -2.5, 3.141592653589793, 1e-3}) {
            const Matrix<double> x = Matrix<double>::Constant(pattern.rows, 5, value);
            for (int layers = 1; layers <= 5; ++layers) {
                const Matrix<double> lo = model::low_pass_filter(t.constant(x), pattern, ones, layers).value();
                low_bad += (lo.array() != x.array()).count();
                const Matrix<double> hi = model::high_pass_filter(t.constant(x), pattern, ones, layers).value();
                for (Index i = 0; i < pattern.rows; ++i) {
                    if (pattern.row_degree(i) > 0) high_worst = std::max(high_worst, hi.row(i).cwiseAbs().maxCoeff());
                }
            }
        }
    }
    return verdict(low_bad == 0 && high_worst <= 1e-12, std::to_string(low_bad) + " low-pass entries differ from the input; "
                                                        "high-pass max |out| " + fmt("%.3g", high_worst));
}

struct E2E {
    graph::HeteroGraph graph;
    train::TrainResult trained;
    train::TrainResult untrained;
    double seconds = 0;
};

train::TrainConfig e2e_config() {
    train::TrainConfig c;
    c.epochs = 200;
    c.seed = 7;
    c.early_stop_patience = 0;
    return c;
}

// Intra- vs inter-class a_ho over every off-diagonal two-hop pair.
std::string separation_stats(const E2E& run, bool& ok) {
    const auto& g = run.graph;
    train::Model<float> m(g, train::checkpoint_config(run.trained.checkpoint));
    diff::load_parameter_records(m.params(), run.trained.checkpoint, false);
    diff::Tape<float> tape(false);
    const auto fwd = m.forward(tape, model::GumbelMode::eval, 0, false);
    std::string out;
    ok = true;
    for (size_t s = 0; s < fwd.relations.size(); ++s) {
        const auto& p = m.pattern(s);
        const Matrix<float>& a = fwd.relations[s].a_ho.value();
        std::vector<double> score;
        std::vector<char> intra;
        double sum_in = 0, sum_out = 0, n_in = 0, n_out = 0;
        for (Index i = 0; i < p.rows; ++i) {
            for (Index q = p.row_ptr[static_cast<size_t>(i)]; q < p.row_ptr[static_cast<size_t>(i) + 1]; ++q) {
                const Index j = p.col[static_cast<size_t>(q)];
                if (i == j) continue;
                const bool same = g.labels[static_cast<size_t>(i)] == g.labels[static_cast<size_t>(j)];
                score.push_back(a(q, 0));
                intra.push_back(same);
                (same ? sum_in : sum_out) += a(q, 0);
                (same ? n_in : n_out) += 1;
            }
        }
        const double auc = eval::roc_auc(score, intra);
        const double mean_in = sum_in / n_in, mean_out = sum_out / n_out;
        ok = ok && mean_in > mean_out && auc >= 0.7;
        if (!out.empty()) out += "; ";
        out += g.relations[static_cast<size_t>(fwd.relations[s].relation)].name + " mean " + fmt("%.3f", mean_in) + " vs " +
               fmt("%.3f", mean_out) + ", AUC " + fmt("%.3f", auc);
    }
    return out;
}

const E2E& e2e_run() {
    static const E2E run = [] {
        E2E r;
        const auto t0 = std::chrono::steady_clock::now();
        r.graph = graph::generate_synthetic(planted(0.2, 0.02));
        r.trained = train::train(r.graph, e2e_config());
        auto c0 = e2e_config();
        c0.epochs = 0;
        r.untrained = train::train(r.graph, c0);
        r.seconds = seconds_since(t0);
        return r;
    }();
    return run;
}

Outcome e2e_gain() {
    const auto& run = e2e_run();
    const auto t0 = std::chrono::steady_clock::now();
    const double trained = micro_f1_of(train::export_embeddings(run.trained.checkpoint, run.graph).values, run.graph, 1);
    const double untrained = micro_f1_of(train::export_embeddings(run.untrained.checkpoint, run.graph).values, run.graph, 1);
    const double secs = run.seconds + seconds_since(t0);
    return verdict(!run.trained.diverged && trained - untrained >= 5 && secs < 300,
                   "Micro-F1@20 trained " + fmt("%.2f", trained) + " vs untrained " + fmt("%.2f", untrained) + " (gain " +
                       fmt("%.2f", trained - untrained) + ", need >= 5), " + fmt("%.0f s", secs));
}

Outcome e2e_separation() {
    bool ok = false;
    const std::string detail = separation_stats(e2e_run(), ok);
    return verdict(ok, detail + " (need intra > inter and AUC >= 0.7)");
}

Outcome ablation_direction() {
    // 300 targets keep five seeds x two variants inside the test timeout.
    const auto g = graph::generate_synthetic(planted(0.02, 0.2, 300));
    int wins = 0;
    std::string per_seed;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        train::TrainConfig c;
        c.epochs = 200;
        c.seed = seed;
        const auto rows = eval::run_ablation(g, c, {"full", "no_hete"}, micro_only(seed));
        const double full = rows[0].report.metrics.at("micro_f1").mean;
        const double no_hete = rows[1].report.metrics.at("micro_f1").mean;
        wins += no_hete < full;
        per_seed += (seed ? ", " : "") + fmt("%.2f", full) + "/" + fmt("%.2f", no_hete);
    }
    return verdict(wins >= 4, "no_hete below full in " + std::to_string(wins) + "/5 seeds (full/no_hete: " + per_seed + ")");
}

Outcome random_features() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto g = graph::xavier_random_features(graph::generate_synthetic(planted(0.2, 0.02)), 128, 7);
    const auto trained = train::train(g, e2e_config());
    auto c0 = e2e_config();
    c0.epochs = 0;
    const auto untrained = train::train(g, c0);
    const double a = micro_f1_of(train::export_embeddings(trained.checkpoint, g).values, g, 1);
    const double b = micro_f1_of(train::export_embeddings(untrained.checkpoint, g).values, g, 1);
    return verdict(!trained.diverged && a - b >= 3, "Micro-F1@20 trained " + fmt("%.2f", a) + " vs untrained " + fmt("%.2f", b) +
                                                        " (gain " + fmt("%.2f", a - b) + ", need >= 3), " +
                                                        fmt("%.0f s", seconds_since(t0)));
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

Outcome determinism() {
    const auto g = graph::generate_synthetic(planted(0.2, 0.02, 150));
    const fs::path root = fs::temp_directory_path() / "hetsep_acceptance_determinism";
    fs::remove_all(root);
    auto run = [&](const std::string& name) {
        train::TrainConfig c;
        c.epochs = 30;
        c.seed = 5;
        c.precision = 64;
        c.deterministic = true;
        train::TrainOptions o;
        o.out_dir = root / name;
        const auto r = train::train(g, c, o);
        eval::EvalOptions eo;
        eo.trials = 3;
        const auto rep = eval::evaluate(train::export_embeddings(r.checkpoint, g).values, g.labels, g.num_classes, eo);
        std::ofstream(root / name / "report.json") << rep.to_json().dump(2);
        std::ofstream(root / name / "report.tsv") << rep.to_tsv();
    };
    run("a");
    run("b");
    int differing = 0;
    int files = 0;
    for (const char* f : {"train_log.tsv", "checkpoint.bin", "report.json", "report.tsv"}) {
        ++files;
        const std::string x = slurp(root / "a" / f), y = slurp(root / "b" / f);
        differing += x.empty() || x != y;
    }
    fs::remove_all(root);
    return verdict(differing == 0, std::to_string(files - differing) + "/" + std::to_string(files) + " artifacts byte-identical");
}

Outcome acm_stretch() {
    const char* dir = std::getenv("HETSEP_ACM_DIR");
    if (dir == nullptr) return {Status::skip, "set HETSEP_ACM_DIR to a converted ACM directory to run"};
    const auto t0 = std::chrono::steady_clock::now();
    const auto g = graph::load_graph(dir);
    train::TrainConfig c;
    c.hidden_dim = 64;
    const auto r = train::train(g, c);
    eval::EvalOptions eo = micro_only(0);
    const auto emb = train::export_embeddings(r.checkpoint, g).values;
    const auto rep = eval::evaluate(emb, g.labels, g.num_classes, eo);
    const auto st = rep.metrics.at("micro_f1");
    const double secs = seconds_since(t0);
    const bool ok = std::abs(st.mean - 93.22) <= 3.0 && secs < 600;
    // Reported but never fatal.
    return {ok ? Status::pass : Status::skip, "Micro-F1@20 " + fmt("%.2f", st.mean) + " +- " + fmt("%.2f", st.std) +
                                                  " (target 93.22 +- 3.0, gap " + fmt("%.2f", st.mean - 93.22) + "), " +
                                                  fmt("%.0f s", secs) + (ok ? "" : " [stretch check missed]")};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"gradient-oracle", gradient_oracle},
        {"structural-invariants", structural_invariants},
        {"gumbel-limits", gumbel_limits},
        {"separation-complementarity", separation_complementarity},
        {"filter-conservation", filter_conservation},
        {"e2e-synthetic-gain", e2e_gain},
        {"e2e-synthetic-separation", e2e_separation},
        {"ablation-direction", ablation_direction},
        {"random-feature-robustness", random_features},
        {"determinism", determinism},
        {"acm-stretch", acm_stretch},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        if (argc > 1) {
            bool wanted = false;
            for (int a = 1; a < argc; ++a) wanted = wanted || name.find(argv[a]) != std::string::npos;
            if (!wanted) continue;
        }
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {Status::fail, std::string("threw: ") + e.what()};
        }
        const char* tag = o.status == Status::pass ? "PASS" : o.status == Status::fail ? "FAIL" : "SKIP";
        std::printf("%s %s: %s\n", tag, name.c_str(), o.detail.c_str());
        std::fflush(stdout);
        failed += o.status == Status::fail;
    }
    return failed == 0 ? 0 : 1;
}
