#include "hetsep/train/config.hpp"

#include "hetsep/graph/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>

namespace hetsep::train {
using nlohmann::json;

namespace {

void require(bool ok, const std::string& key, const std::string& what) {
    if (!ok) throw std::invalid_argument("config key '" + key + "': " + what);
}

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "lr", "epochs", "hidden_dim", "tau", "eps", "tau_c", "k_pos", "low_pass_layers", "high_pass_layers",
        "encoder_layers", "hypergraph_layers", "node_agg", "type_agg", "loss_mode", "denominator", "no_homo",
        "no_hete", "no_rae", "top_m", "early_stop_patience", "checkpoint_interval", "seed", "precision",
        "deterministic"};
    return keys;
}

template <typename V>
void read(const json& j, const char* key, V& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<V>();
    } catch (const json::exception&) {
        throw std::invalid_argument(std::string("config key '") + key + "': wrong type");
    }
}

}  // namespace

void TrainConfig::validate() const {
    require(std::isfinite(lr) && lr >= 0, "lr", "must be >= 0");
    require(epochs >= 0, "epochs", "must be >= 0");
    require(hidden_dim >= 1, "hidden_dim", "must be >= 1");
    require(std::isfinite(tau) && tau > 0, "tau", "must be > 0");
    require(eps > 0 && eps < 0.5, "eps", "must lie in (0, 0.5)");
    require(tau_c > 0 && tau_c <= 1, "tau_c", "must lie in (0, 1]");
    require(k_pos >= 0 && k_pos <= 5, "k_pos", "must lie in [0, 5]");
    require(low_pass_layers >= 1 && low_pass_layers <= 5, "low_pass_layers", "must lie in [1, 5]");
    require(high_pass_layers >= 1 && high_pass_layers <= 5, "high_pass_layers", "must lie in [1, 5]");
    require(encoder_layers >= 0, "encoder_layers", "must be >= 0");
    require(hypergraph_layers >= 1, "hypergraph_layers", "must be >= 1");
    require(!(no_homo && no_hete), "no_hete", "cannot be combined with no_homo");
    require(top_m >= 0, "top_m", "must be >= 0");
    require(early_stop_patience >= 0, "early_stop_patience", "must be >= 0");
    require(checkpoint_interval >= 0, "checkpoint_interval", "must be >= 0");
    require(precision == 32 || precision == 64, "precision", "must be 32 or 64");
}

TrainConfig config_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (known_keys().count(key) == 0) throw std::invalid_argument("unknown config key '" + key + "'");
    }
    TrainConfig c;
    read(j, "lr", c.lr);
    read(j, "epochs", c.epochs);
    read(j, "hidden_dim", c.hidden_dim);
    read(j, "tau", c.tau);
    read(j, "eps", c.eps);
    read(j, "tau_c", c.tau_c);
    read(j, "k_pos", c.k_pos);
    read(j, "low_pass_layers", c.low_pass_layers);
    read(j, "high_pass_layers", c.high_pass_layers);
    read(j, "encoder_layers", c.encoder_layers);
    read(j, "hypergraph_layers", c.hypergraph_layers);
    read(j, "no_homo", c.no_homo);
    read(j, "no_hete", c.no_hete);
    read(j, "no_rae", c.no_rae);
    read(j, "top_m", c.top_m);
    read(j, "early_stop_patience", c.early_stop_patience);
    read(j, "checkpoint_interval", c.checkpoint_interval);
    read(j, "seed", c.seed);
    read(j, "precision", c.precision);
    read(j, "deterministic", c.deterministic);
    std::string s;
    if (j.contains("node_agg")) {
        read(j, "node_agg", s);
        c.node_agg = model::node_agg_from_string(s);
    }
    if (j.contains("type_agg")) {
        read(j, "type_agg", s);
        c.type_agg = model::type_agg_from_string(s);
    }
    if (j.contains("loss_mode")) {
        read(j, "loss_mode", s);
        c.loss_mode = model::loss_mode_from_string(s);
    }
    if (j.contains("denominator")) {
        read(j, "denominator", s);
        c.denominator = model::denominator_from_string(s);
    }
    c.validate();
    return c;
}

json to_json(const TrainConfig& c) {
    return json{{"lr", c.lr},
                {"epochs", c.epochs},
                {"hidden_dim", c.hidden_dim},
                {"tau", c.tau},
                {"eps", c.eps},
                {"tau_c", c.tau_c},
                {"k_pos", c.k_pos},
                {"low_pass_layers", c.low_pass_layers},
                {"high_pass_layers", c.high_pass_layers},
                {"encoder_layers", c.encoder_layers},
                {"hypergraph_layers", c.hypergraph_layers},
                {"node_agg", model::to_string(c.node_agg)},
                {"type_agg", model::to_string(c.type_agg)},
                {"loss_mode", model::to_string(c.loss_mode)},
                {"denominator", model::to_string(c.denominator)},
                {"no_homo", c.no_homo},
                {"no_hete", c.no_hete},
                {"no_rae", c.no_rae},
                {"top_m", c.top_m},
                {"early_stop_patience", c.early_stop_patience},
                {"checkpoint_interval", c.checkpoint_interval},
                {"seed", c.seed},
                {"precision", c.precision},
                {"deterministic", c.deterministic}};
}

std::string config_hash(const TrainConfig& c) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(graph::stable_hash(to_json(c).dump())));
    return buf;
}

std::vector<TrainConfig> hyperparameter_grid(const TrainConfig& base) {
    std::vector<TrainConfig> out;
    for (double lr : {1e-3, 5e-4}) {
        for (int d : {64, 128, 256, 512}) {
            for (double tc : {0.4, 0.5, 0.6, 0.7, 0.8}) {
                for (int k = 0; k <= 5; ++k) {
                    for (int lo = 1; lo <= 5; ++lo) {
                        for (int hi = 1; hi <= 5; ++hi) {
                            TrainConfig c = base;
                            c.lr = lr;
                            c.hidden_dim = d;
                            c.tau_c = tc;
                            c.k_pos = k;
                            c.low_pass_layers = lo;
                            c.high_pass_layers = hi;
                            out.push_back(c);
                        }
                    }
                }
            }
        }
    }
    return out;
}

}  // namespace hetsep::train
