#include "fixtures.hpp"

#include "hetsep/diff/gradcheck.hpp"
#include "hetsep/eval/experiments.hpp"
#include "hetsep/train/model.hpp"
#include "hetsep/train/trainer.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

using namespace hetsep;
using namespace hetsep::train;

namespace {

TrainConfig small_config(int epochs, int precision = 64) {
    TrainConfig c;
    c.epochs = epochs;
    c.hidden_dim = 8;
    c.seed = 3;
    c.precision = precision;
    c.early_stop_patience = 0;
    return c;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("config parsing and validation") {
    CHECK_NOTHROW(TrainConfig{}.validate());
    const auto c = config_from_json({{"lr", 5e-4}, {"hidden_dim", 128}, {"loss_mode", "mean_fusion"}, {"k_pos", 0}});
    CHECK(c.lr == 5e-4);
    CHECK(c.hidden_dim == 128);
    CHECK(c.loss_mode == model::LossMode::mean_fusion);
    CHECK(config_from_json(to_json(c)).hidden_dim == 128);
    CHECK(to_json(config_from_json(to_json(c))) == to_json(c));
    CHECK(config_hash(c) == config_hash(config_from_json(to_json(c))));
    CHECK(config_hash(c) != config_hash(TrainConfig{}));
    CHECK(config_hash(c).size() == 16);

    CHECK_THROWS_WITH_AS(config_from_json({{"learning_rate", 1e-3}}), "unknown config key 'learning_rate'",
                         std::invalid_argument);
    for (const auto& bad : std::vector<nlohmann::json>{{{"tau", 0.0}},
                                                       {{"eps", 0.0}},
                                                       {{"tau_c", 1.5}},
                                                       {{"k_pos", 6}},
                                                       {{"low_pass_layers", 0}},
                                                       {{"high_pass_layers", 6}},
                                                       {{"precision", 16}},
                                                       {{"no_homo", true}, {"no_hete", true}},
                                                       {{"node_agg", "max"}},
                                                       {{"hidden_dim", "wide"}}}) {
        CAPTURE(bad.dump());
        CHECK_THROWS_AS(config_from_json(bad), std::invalid_argument);
    }
}

TEST_CASE("hyperparameter grid covers the published ranges") {
    const auto grid = hyperparameter_grid(TrainConfig{});
    std::set<double> lrs, taus;
    std::set<int> dims, ks, los;
    for (const auto& c : grid) {
        CHECK_NOTHROW(c.validate());
        lrs.insert(c.lr);
        dims.insert(c.hidden_dim);
        taus.insert(c.tau_c);
        ks.insert(c.k_pos);
        los.insert(c.low_pass_layers);
    }
    CHECK(lrs == std::set<double>{1e-3, 5e-4});
    CHECK(dims == std::set<int>{64, 128, 256, 512});
    CHECK(*taus.begin() == doctest::Approx(0.4));
    CHECK(*taus.rbegin() == doctest::Approx(0.8));
    CHECK(ks == std::set<int>{0, 1, 2, 3, 4, 5});
    CHECK(los == std::set<int>{1, 2, 3, 4, 5});
}

TEST_CASE("full model gradients match finite differences with frozen noise") {
    const auto g = fixtures::ten_node();
    TrainConfig c = small_config(1);
    c.hidden_dim = 4;
    c.k_pos = 2;
    for (bool no_rae : {false, true}) {
        CAPTURE(no_rae);
        c.no_rae = no_rae;
        Model<double> m(g, c);
        model::PositiveCache frozen;
        {
            Tape<double> t(false);
            frozen = m.forward(t, model::GumbelMode::train, 3, true).loss->positives;
        }
        auto loss = [&](Tape<double>& t) {
            return m.forward(t, model::GumbelMode::train, 3, true, &frozen).loss->total;
        };
        // At eps = 1e-5 the central-difference truncation error on the
        // projection biases is ~3e-4 (it falls as eps^2); 1e-6 isolates it.
        diff::GradCheckOptions o;
        o.epsilon = 1e-6;
        const auto rep = diff::finite_diff_check(loss, m.params().all(), o);
        CHECK(rep.max_relative_error < 1e-4);
        // Every family receives a gradient, including the edge scorers.
        m.params().zero_grad();
        Tape<double> t;
        t.backward(loss(t));
        for (const char* prefix : {"encoder.", "aux.", "score.", "filter.", "proj.", no_rae ? "rae." : "hyper."}) {
            double norm = 0;
            for (const auto* p : m.params().all()) {
                if (p->name.rfind(prefix, 0) == 0) norm += p->grad.norm();
            }
            CAPTURE(prefix);
            CHECK(norm > 0);
        }
    }
}

TEST_CASE("no_rae only swaps the edge embedding") {
    const auto g = fixtures::ten_node();
    TrainConfig a = small_config(1), b = small_config(1);
    b.no_rae = true;
    Model<double> ma(g, a), mb(g, b);
    Tape<double> ta(false), tb(false);
    const auto fa = ma.forward(ta, model::GumbelMode::eval, 0, true);
    const auto fb = mb.forward(tb, model::GumbelMode::eval, 0, true);
    REQUIRE(fa.relations.size() == fb.relations.size());
    for (size_t r = 0; r < fa.relations.size(); ++r) {
        CHECK(fa.relations[r].scores.rows() == fb.relations[r].scores.rows());
        CHECK(fa.relations[r].scores.cols() == fb.relations[r].scores.cols());
        CHECK(fa.relations[r].a_ho.rows() == fb.relations[r].a_ho.rows());
        CHECK(fa.relations[r].h_he.cols() == fb.relations[r].h_he.cols());
    }
    CHECK(ma.params().find("hyper.paper-author.theta0") != nullptr);
    CHECK(mb.params().find("hyper.paper-author.theta0") == nullptr);
    CHECK(mb.params().find("rae.paper-author.weight") != nullptr);
}

TEST_CASE("anchor embeddings do not depend on the objective") {
    const auto g = fixtures::ten_node();
    Model<double> m(g, small_config(1));
    Tape<double> t1(false), t2(false);
    CHECK(m.forward(t1, model::GumbelMode::eval, 0, false).anchor.value() ==
          m.forward(t2, model::GumbelMode::eval, 0, true).anchor.value());
}

TEST_CASE("training loop") {
    const auto g = fixtures::ten_node();

    SUBCASE("lr = 0 leaves parameters unchanged") {
        TrainConfig c = small_config(3);
        c.lr = 0.0;
        const auto run = train::train(g, c);
        Model<double> fresh(g, c);
        for (const auto& p : fresh.params()) CHECK(run.checkpoint.find(p.name)->data ==
                                                   std::vector<double>(p.value.data(), p.value.data() + p.value.size()));
    }
    SUBCASE("loss decreases over the first five epochs") {
        // Library defaults (d = 64, lr = 1e-3), seed 0: a pilot showed a
        // monotone prefix here; with d = 8 the per-epoch noise dominates.
        TrainConfig c;
        c.epochs = 50;
        c.seed = 0;
        c.early_stop_patience = 0;
        const auto run = train::train(g, c);
        REQUIRE(run.losses.size() == 50);
        for (int e = 1; e < 5; ++e) CHECK(run.losses[static_cast<size_t>(e)] < run.losses[static_cast<size_t>(e) - 1]);
    }
    SUBCASE("identical seeds give identical trajectories and logs") {
        const auto a = train::train(g, small_config(8));
        const auto b = train::train(g, small_config(8));
        CHECK(a.losses == b.losses);
        CHECK(a.log_tsv == b.log_tsv);
        const auto c32a = train::train(g, small_config(4, 32));
        const auto c32b = train::train(g, small_config(4, 32));
        CHECK(c32a.losses == c32b.losses);
    }
    SUBCASE("log has one row per loss term") {
        const auto run = train::train(g, small_config(2));
        std::istringstream is(run.log_tsv);
        std::string line;
        std::getline(is, line);
        CHECK(line == "epoch\trelation\tkind\tdirection\tvalue\ttotal");
        int rows = 0;
        while (std::getline(is, line)) ++rows;
        CHECK(rows == 2 * 8);  // 2 relations x 2 kinds x 2 directions
    }
    SUBCASE("resuming from a checkpoint reproduces the next epoch bitwise") {
        const auto dir = fixtures::temp_dir("resume");
        const auto full = train::train(g, small_config(6));
        TrainOptions first;
        first.out_dir = dir;
        train::train(g, small_config(3), first);
        TrainOptions again;
        again.resume = diff::read_checkpoint(dir / "checkpoint.bin");
        const auto rest = train::train(g, small_config(6), again);
        CHECK(rest.first_epoch == 3);
        REQUIRE(rest.losses.size() == 3);
        for (size_t k = 0; k < 3; ++k) CHECK(rest.losses[k] == full.losses[k + 3]);

        TrainConfig other = small_config(6);
        other.tau_c = 0.7;
        CHECK_THROWS_AS(train::train(g, other, again), std::invalid_argument);
    }
    SUBCASE("early stopping") {
        TrainConfig c = small_config(200);
        c.early_stop_patience = 3;
        c.lr = 0.0;  // only the noise moves the loss
        const auto run = train::train(g, c);
        CHECK(run.early_stopped);
        REQUIRE(run.epochs_run >= 4);
        CHECK(run.epochs_run < 200);
        const double best = *std::min_element(run.losses.begin(), run.losses.end() - 3);
        for (size_t k = run.losses.size() - 3; k < run.losses.size(); ++k) CHECK(run.losses[k] >= best);
    }
    SUBCASE("divergence restores the last good parameters") {
        TrainConfig c = small_config(5);
        c.lr = 1e200;
        const auto run = train::train(g, c);
        CHECK(run.diverged);
        CHECK_FALSE(run.divergence_message.empty());
        for (const auto& t : run.checkpoint.tensors) {
            for (double v : t.data) REQUIRE(std::isfinite(v));
        }
    }
}

TEST_CASE("export_embeddings") {
    const auto g = fixtures::ten_node();
    const auto untrained = train::train(g, small_config(0));
    Model<double> m(g, small_config(0));
    Tape<double> t(false);
    const Matrix<double> direct = m.forward(t, model::GumbelMode::eval, 0, false).anchor.value();
    const auto e1 = export_embeddings(untrained.checkpoint, g);
    CHECK(e1.values == direct);
    CHECK(export_embeddings(untrained.checkpoint, g).values == e1.values);
    const auto cat = export_embeddings(untrained.checkpoint, g, EmbeddingVariant::concat_views);
    CHECK(cat.values.cols() == 3 * e1.values.cols());
    CHECK(cat.values.leftCols(e1.values.cols()) == e1.values);

    SUBCASE("a checkpoint from another graph is rejected") {
        const auto other = fixtures::bipartite(6, 3, {{0, 0}, {1, 1}, {2, 2}, {3, 0}, {4, 1}, {5, 2}}, 3);
        CHECK_THROWS_WITH_AS(export_embeddings(untrained.checkpoint, other),
                             doctest::Contains("checkpoint/config mismatch"), std::invalid_argument);
    }
    SUBCASE("TSV round-trip") {
        const auto path = fixtures::temp_dir("emb") / "e.tsv";
        write_embeddings_tsv(path, e1);
        CHECK(read_embeddings_tsv(path).values == e1.values);
    }
    SUBCASE("weight dump files") {
        const auto dir = fixtures::temp_dir("dump");
        dump_relation_weights(untrained.checkpoint, g, dir);
        for (const char* f : {"paper-author.weights.tsv", "paper-author_rev.weights.tsv", "paper-author.ho.graph.tsv",
                              "paper-venue.he.graph.tsv"}) {
            CAPTURE(f);
            CHECK(std::filesystem::exists(dir / f));
        }
        CHECK(slurp(dir / "paper-author.weights.tsv").rfind("edge_index\tsrc\tdst\tscore\tweight\n", 0) == 0);
        CHECK_THROWS_AS(dump_relation_weights(untrained.checkpoint, g, dir, "nope"), std::invalid_argument);
    }
}

TEST_CASE("trained synthetic embeddings are closer within classes") {
    const auto g = graph::generate_synthetic(fixtures::small_synthetic(90, 2));
    TrainConfig c;
    c.epochs = 60;
    c.hidden_dim = 16;
    c.seed = 1;
    const auto run = train::train(g, c);
    const auto emb = export_embeddings(run.checkpoint, g).values;
    const Matrix<double> z = emb.rowwise().normalized();
    const Matrix<double> cos = z * z.transpose();
    double intra = 0, inter = 0, ni = 0, no = 0;
    for (Index i = 0; i < cos.rows(); ++i) {
        for (Index j = 0; j < cos.cols(); ++j) {
            if (i == j) continue;
            if (g.labels[static_cast<size_t>(i)] == g.labels[static_cast<size_t>(j)]) {
                intra += cos(i, j);
                ni += 1;
            } else {
                inter += cos(i, j);
                no += 1;
            }
        }
    }
    CHECK(intra / ni > inter / no);
}

TEST_CASE("ablation and sweep plumbing") {
    const auto g = graph::generate_synthetic(fixtures::small_synthetic(60));
    TrainConfig c = small_config(3, 32);
    eval::EvalOptions eo;
    eo.trials = 2;
    eo.train_per_class = 5;

    const auto rows = eval::run_ablation(g, c, {"full"}, eo);
    REQUIRE(rows.size() == 1);
    const auto plain = eval::train_and_evaluate(g, c, eo);
    CHECK(rows[0].report.metrics.at("micro_f1").mean == plain.metrics.at("micro_f1").mean);
    CHECK(rows[0].report.to_tsv() == plain.to_tsv());

    const auto two = eval::run_ablation(g, c, {"full", "no_hete"}, eo);
    const auto tsv = eval::ablation_tsv(two);
    CHECK(std::count(tsv.begin(), tsv.end(), '\n') == 3);
    CHECK(tsv.rfind("variant\t", 0) == 0);
    CHECK_THROWS_AS(eval::apply_variant(c, "no_everything"), std::invalid_argument);
    CHECK(eval::apply_variant(c, "random_single").loss_mode == model::LossMode::random_single);

    const auto sweep = eval::robustness_sweep(g, c, {0.0, 0.5}, eo);
    REQUIRE(sweep.size() == 2);
    const auto base = eval::train_and_evaluate(g, c, [&] {
        auto o = eo;
        o.clustering = o.similarity = false;
        return o;
    }());
    CHECK(sweep[0].report.metrics.at("micro_f1").mean == base.metrics.at("micro_f1").mean);
    const auto curve = eval::sweep_tsv(sweep);
    CHECK(std::count(curve.begin(), curve.end(), '\n') == 3);
    CHECK_THROWS_AS(eval::robustness_sweep(g, c, {1.0}, eo), std::invalid_argument);
}

TEST_CASE("edge removal degrades Micro-F1") {
    graph::SyntheticConfig sc;
    sc.num_target_nodes = 150;
    sc.seed = 7;
    sc.attribute_types = {{"a", 15}, {"b", 22}};
    const auto g = graph::generate_synthetic(sc);
    TrainConfig c;
    c.epochs = 60;
    const auto pts = eval::robustness_sweep(g, c, {0.2, 0.4, 0.6}, eval::EvalOptions{});
    REQUIRE(pts.size() == 3);
    // A pilot over four seeds gave drops of 4 to 14 points per step; 2 points
    // of slack absorb split noise.
    for (size_t k = 1; k < pts.size(); ++k) {
        CAPTURE(k);
        CHECK(pts[k].report.metrics.at("micro_f1").mean <= pts[k - 1].report.metrics.at("micro_f1").mean + 2.0);
    }
}
