#pragma once

#include "hetsep/graph/hetero_graph.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hetsep::graph {

struct AttributeTypeSpec {
    std::string name;
    Index count = 0;
    // Scales the class signal of this type: the matching-class edge
    // probability is p_out + affinity * (p_in - p_out).
    double affinity = 1.0;
    // Per-relation overrides of the global probabilities.
    std::optional<double> p_in;
    std::optional<double> p_out;
};

// Planted-partition heterogeneous graph: one target type with balanced
// classes, one relation target -> attribute per attribute type.
struct SyntheticConfig {
    Index num_target_nodes = 600;
    int num_classes = 3;
    std::string target_name = "target";
    std::vector<AttributeTypeSpec> attribute_types;
    double p_in = 0.2;
    double p_out = 0.02;
    Index feature_dim = 16;
    double feature_noise_sigma = 1.0;
    std::uint64_t seed = 0;

    void validate() const;
};

SyntheticConfig synthetic_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SyntheticConfig& config);

// Target i has class i mod C; attribute node k has affinity class k mod C.
// Edge (t, a) is drawn with the matching-class probability when the classes
// agree and with p_out otherwise. Features are the one-hot class indicator
// (scaled by affinity for attribute nodes) plus N(0, sigma^2) noise.
HeteroGraph generate_synthetic(const SyntheticConfig& config);

// Each primary relation keeps a uniformly random subset of exactly
// ceil((1 - rate) * |E|) edges in original order; inverses are re-derived.
HeteroGraph perturb_edges(const HeteroGraph& graph, double rate, std::uint64_t seed);

// rows x dim samples of Uniform(-b, b), b = sqrt(6 / (dim + dim)).
Matrix<double> xavier_uniform_matrix(Index rows, Index dim, std::uint64_t seed);

// Replaces every type's features with xavier_uniform_matrix(count, dim, ...).
HeteroGraph xavier_random_features(const HeteroGraph& graph, Index dim, std::uint64_t seed);

// FNV-1a; stable across platforms, used to derive per-name seeds.
std::uint64_t stable_hash(std::string_view text);

// SplitMix64 mixing of a seed with stream identifiers.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

}  // namespace hetsep::graph
