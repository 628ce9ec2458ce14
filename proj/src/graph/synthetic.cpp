#include "hetsep/graph/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace hetsep::graph {

std::uint64_t stable_hash(std::string_view text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    auto splitmix = [](std::uint64_t x) {
        x += 0x9E3779B97F4A7C15ULL;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    };
    return splitmix(splitmix(splitmix(seed) ^ a) ^ b);
}

void SyntheticConfig::validate() const {
    auto prob = [](double p, const std::string& what) {
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(what + " must lie in [0, 1]");
    };
    if (num_target_nodes <= 0) throw std::invalid_argument("num_target_nodes must be positive");
    if (num_classes <= 0) throw std::invalid_argument("num_classes must be positive");
    if (num_target_nodes < num_classes) throw std::invalid_argument("fewer target nodes than classes");
    if (attribute_types.empty()) throw std::invalid_argument("at least one attribute type is required");
    if (feature_dim < num_classes) throw std::invalid_argument("feature_dim must be >= num_classes");
    if (!(feature_noise_sigma >= 0.0)) throw std::invalid_argument("feature_noise_sigma must be >= 0");
    prob(p_in, "p_in");
    prob(p_out, "p_out");
    for (const auto& a : attribute_types) {
        if (a.count <= 0) throw std::invalid_argument("attribute type '" + a.name + "' needs count > 0");
        if (a.name.empty() || a.name == target_name) throw std::invalid_argument("invalid attribute type name");
        prob(a.affinity, "affinity");
        if (a.p_in) prob(*a.p_in, "p_in");
        if (a.p_out) prob(*a.p_out, "p_out");
    }
}

SyntheticConfig synthetic_config_from_json(const nlohmann::json& j) {
    SyntheticConfig c;
    c.num_target_nodes = j.value("num_target_nodes", c.num_target_nodes);
    c.num_classes = j.value("num_classes", c.num_classes);
    c.target_name = j.value("target_name", c.target_name);
    c.p_in = j.value("p_in", c.p_in);
    c.p_out = j.value("p_out", c.p_out);
    c.feature_dim = j.value("feature_dim", c.feature_dim);
    c.feature_noise_sigma = j.value("feature_noise_sigma", c.feature_noise_sigma);
    c.seed = j.value("seed", c.seed);
    for (const auto& a : j.at("attribute_types")) {
        AttributeTypeSpec s;
        s.name = a.at("name").get<std::string>();
        s.count = a.at("count").get<Index>();
        s.affinity = a.value("affinity", 1.0);
        if (a.contains("p_in")) s.p_in = a.at("p_in").get<double>();
        if (a.contains("p_out")) s.p_out = a.at("p_out").get<double>();
        c.attribute_types.push_back(std::move(s));
    }
    c.validate();
    return c;
}

nlohmann::json to_json(const SyntheticConfig& c) {
    nlohmann::json j;
    j["num_target_nodes"] = c.num_target_nodes;
    j["num_classes"] = c.num_classes;
    j["target_name"] = c.target_name;
    j["p_in"] = c.p_in;
    j["p_out"] = c.p_out;
    j["feature_dim"] = c.feature_dim;
    j["feature_noise_sigma"] = c.feature_noise_sigma;
    j["seed"] = c.seed;
    j["attribute_types"] = nlohmann::json::array();
    for (const auto& a : c.attribute_types) {
        nlohmann::json aj = {{"name", a.name}, {"count", a.count}, {"affinity", a.affinity}};
        if (a.p_in) aj["p_in"] = *a.p_in;
        if (a.p_out) aj["p_out"] = *a.p_out;
        j["attribute_types"].push_back(std::move(aj));
    }
    return j;
}

HeteroGraph generate_synthetic(const SyntheticConfig& config) {
    config.validate();
    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    const int C = config.num_classes;

    HeteroGraph g;
    g.node_types.push_back({config.target_name, config.num_target_nodes, config.feature_dim});
    g.target_type = 0;
    g.num_classes = C;
    g.labels.resize(static_cast<size_t>(config.num_target_nodes));
    for (Index i = 0; i < config.num_target_nodes; ++i) g.labels[static_cast<size_t>(i)] = static_cast<int>(i % C);

    auto make_features = [&](Index count, double signal) {
        Matrix<double> x(count, config.feature_dim);
        for (Index i = 0; i < count; ++i) {
            for (Index c = 0; c < config.feature_dim; ++c) {
                const double base = (c == i % C) ? signal : 0.0;
                x(i, c) = base + config.feature_noise_sigma * noise(rng);
            }
        }
        return x;
    };
    g.features.push_back(make_features(config.num_target_nodes, 1.0));

    for (const auto& a : config.attribute_types) {
        g.node_types.push_back({a.name, a.count, config.feature_dim});
        g.features.push_back(make_features(a.count, a.affinity));
    }

    for (size_t t = 0; t < config.attribute_types.size(); ++t) {
        const auto& a = config.attribute_types[t];
        const double p_in = a.p_in.value_or(config.p_in);
        const double p_out = a.p_out.value_or(config.p_out);
        const double p_match = p_out + a.affinity * (p_in - p_out);
        Relation r;
        r.name = config.target_name + "-" + a.name;
        r.src_type = 0;
        r.dst_type = static_cast<Index>(t + 1);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (Index i = 0; i < config.num_target_nodes; ++i) {
            for (Index k = 0; k < a.count; ++k) {
                const double p = (i % C == k % C) ? p_match : p_out;
                if (unit(rng) < p) r.edges.push_back({i, k});
            }
        }
        g.relations.push_back(std::move(r));
        g.edge_features.emplace_back();
    }
    materialize_inverses(g);
    validate(g, true);
    return g;
}

HeteroGraph perturb_edges(const HeteroGraph& graph, double rate, std::uint64_t seed) {
    if (!(rate >= 0.0 && rate <= 1.0)) throw std::invalid_argument("perturbation rate must lie in [0, 1]");
    HeteroGraph g = graph;
    for (Index ri : graph.primary_relations()) {
        Relation& r = g.relations[static_cast<size_t>(ri)];
        const auto total = static_cast<Index>(r.edges.size());
        // ceil((1 - rate) * E) == E - floor(rate * E); the nudge absorbs
        // representation error in products such as 0.2 * 100.
        const auto removed = static_cast<Index>(std::floor(rate * static_cast<double>(total) + 1e-9));
        const Index keep = total - std::min(removed, total);
        std::vector<Index> order(static_cast<size_t>(total));
        std::iota(order.begin(), order.end(), Index{0});
        std::mt19937_64 rng(mix_seed(seed, stable_hash(r.name)));
        std::shuffle(order.begin(), order.end(), rng);
        order.resize(static_cast<size_t>(keep));
        std::sort(order.begin(), order.end());
        std::vector<Edge> kept;
        kept.reserve(order.size());
        for (Index k : order) kept.push_back(r.edges[static_cast<size_t>(k)]);
        r.edges = std::move(kept);

        Relation& inv = g.relations[static_cast<size_t>(r.inverse)];
        inv.edges.clear();
        for (const auto& e : r.edges) inv.edges.push_back({e.dst, e.src});
    }
    validate(g, true);
    return g;
}

Matrix<double> xavier_uniform_matrix(Index rows, Index dim, std::uint64_t seed) {
    if (dim <= 0) throw std::invalid_argument("feature dimension must be > 0");
    const double bound = std::sqrt(6.0 / static_cast<double>(dim + dim));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-bound, bound);
    Matrix<double> x(rows, dim);
    for (Index k = 0; k < x.size(); ++k) x.data()[k] = dist(rng);
    return x;
}

HeteroGraph xavier_random_features(const HeteroGraph& graph, Index dim, std::uint64_t seed) {
    if (dim <= 0) throw std::invalid_argument("feature dimension must be > 0");
    HeteroGraph g = graph;
    for (size_t t = 0; t < g.node_types.size(); ++t) {
        g.features[t] = xavier_uniform_matrix(g.node_types[t].count, dim, mix_seed(seed, stable_hash(g.node_types[t].name)));
        g.node_types[t].feature_dim = dim;
    }
    return g;
}

}  // namespace hetsep::graph
