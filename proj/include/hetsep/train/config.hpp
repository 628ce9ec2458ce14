#pragma once

#include "hetsep/model/encoder.hpp"
#include "hetsep/model/objective.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace hetsep::train {

struct TrainConfig {
    double lr = 1e-3;
    int epochs = 400;
    int hidden_dim = 64;
    double tau = 1.0;
    double eps = 1e-4;
    double tau_c = 0.5;
    int k_pos = 3;
    int low_pass_layers = 2;
    int high_pass_layers = 2;
    int encoder_layers = 2;
    int hypergraph_layers = 1;
    model::NodeAgg node_agg = model::NodeAgg::mean;
    model::TypeAgg type_agg = model::TypeAgg::sum;
    model::LossMode loss_mode = model::LossMode::multi;
    model::Denominator denominator = model::Denominator::exclude_positives;
    bool no_homo = false;
    bool no_hete = false;
    bool no_rae = false;
    int top_m = 0;
    int early_stop_patience = 50;  // 0 disables early stopping
    int checkpoint_interval = 0;   // 0: final checkpoint only
    std::uint64_t seed = 0;
    int precision = 32;
    bool deterministic = true;

    // Throws std::invalid_argument naming the offending key.
    void validate() const;
};

// Unknown keys are rejected; missing keys keep their defaults.
TrainConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TrainConfig& c);

// FNV-1a of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const TrainConfig& c);

// Cartesian product of the published tuning ranges (lr, hidden_dim, tau_c,
// k_pos, filter depths) applied on top of `base`.
std::vector<TrainConfig> hyperparameter_grid(const TrainConfig& base);

}  // namespace hetsep::train
