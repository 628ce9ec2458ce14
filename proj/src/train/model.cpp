#include "hetsep/train/model.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace hetsep::train {

template <typename T>
Model<T>::Model(const graph::HeteroGraph& g, const TrainConfig& config) : graph_(g), config_(config) {
    config_.validate();
    encoder_options_.hidden_dim = config_.hidden_dim;
    encoder_options_.layers = config_.encoder_layers;
    encoder_options_.node_agg = config_.node_agg;
    encoder_options_.type_agg = config_.type_agg;

    for (const auto& f : g.features) features_.push_back(f.template cast<T>());
    encoder_graph_ = model::build_encoder_graph<T>(g, config_.node_agg);
    target_relations_ = g.target_relations();
    if (target_relations_.empty()) throw std::invalid_argument("no relations incident to the target type");
    for (Index r : target_relations_) {
        for (Index x : {r, g.relations[static_cast<size_t>(r)].inverse}) {
            if (x < 0) throw std::invalid_argument("relation without inverse: " + g.relations[static_cast<size_t>(r)].name);
            if (std::find(scored_relations_.begin(), scored_relations_.end(), x) == scored_relations_.end()) {
                scored_relations_.push_back(x);
            }
        }
    }
    duals_.resize(g.relations.size());
    for (Index r : scored_relations_) {
        duals_[static_cast<size_t>(r)] = std::make_unique<model::DualOperator<T>>(model::build_dual_operator<T>(g, r));
    }
    for (Index r : target_relations_) patterns_.push_back(model::build_two_hop_pattern(g, r, config_.top_m));

    std::mt19937_64 rng(config_.seed);
    const Index d = config_.hidden_dim;
    main_ = model::EncoderParams<T>::create(params_, "encoder", g, encoder_options_, rng);
    aux_ = model::EncoderParams<T>::create(params_, "aux", g, encoder_options_, rng);
    relation_params_.resize(g.relations.size());
    for (Index r : scored_relations_) {
        auto& rp = relation_params_[static_cast<size_t>(r)];
        const std::string& name = g.relations[static_cast<size_t>(r)].name;
        if (config_.no_rae) {
            rp.edge_linear = model::Linear<T>::create(params_, "rae." + name, 2 * d, d, true, rng);
        } else {
            for (int l = 0; l < config_.hypergraph_layers; ++l) {
                const Index in = l == 0 ? 2 * d : d;
                rp.theta.push_back(&params_.add("hyper." + name + ".theta" + std::to_string(l), model::glorot<T>(in, d, rng)));
                rp.slope.push_back(&params_.add("hyper." + name + ".prelu" + std::to_string(l), Matrix<T>::Constant(1, 1, T(0.25))));
            }
        }
        rp.score = model::Linear<T>::create(params_, "score." + name, d, 1, true, rng);
    }
    const Index fdim = g.features[static_cast<size_t>(g.target_type)].cols();
    filter_input_ = model::Linear<T>::create(params_, "filter.input", fdim, d, true, rng);
    for (Index r : target_relations_) {
        const std::string& name = g.relations[static_cast<size_t>(r)].name;
        filter_ho_.push_back(model::Linear<T>::create(params_, "filter." + name + ".ho", d, d, true, rng));
        filter_he_.push_back(model::Linear<T>::create(params_, "filter." + name + ".he", d, d, true, rng));
    }
    proj_anchor_ = model::Mlp<T>::create(params_, "proj.anchor", d, d, d, rng);
    for (Index r : target_relations_) {
        const std::string& name = g.relations[static_cast<size_t>(r)].name;
        proj_ho_.push_back(model::Mlp<T>::create(params_, "proj." + name + ".ho", d, d, d, rng));
        proj_he_.push_back(model::Mlp<T>::create(params_, "proj." + name + ".he", d, d, d, rng));
    }
}

template <typename T>
const model::DualOperator<T>& Model<T>::dual(Index relation) const {
    const auto& p = duals_.at(static_cast<size_t>(relation));
    if (!p) throw std::invalid_argument("relation is not scored by this model");
    return *p;
}

template <typename T>
Var<T> Model<T>::edge_scores(Tape<T>& tape, const std::vector<Var<T>>& aux, Index relation) const {
    const auto& op = dual(relation);
    const auto& rp = relation_params_[static_cast<size_t>(relation)];
    const Var<T> x = model::init_edge_features(aux[static_cast<size_t>(op.src_type)], aux[static_cast<size_t>(op.dst_type)], op);
    Var<T> h;
    if (config_.no_rae) {
        h = rp.edge_linear(tape, x);
    } else {
        h = x;
        for (size_t l = 0; l < rp.theta.size(); ++l) {
            h = model::hypergraph_conv(h, op, tape.param(*rp.theta[l]), tape.param(*rp.slope[l]));
        }
    }
    return model::score_edges(tape, h, rp.score);
}

template <typename T>
ForwardResult<T> Model<T>::forward(Tape<T>& tape, model::GumbelMode mode, std::uint64_t step, bool with_loss,
                                   const model::PositiveCache* frozen) const {
    std::vector<Var<T>> feats;
    for (const auto& f : features_) feats.push_back(tape.constant(f));
    ForwardResult<T> out;
    out.main = model::encode(tape, encoder_graph_, feats, main_, encoder_options_);
    out.anchor = out.main[static_cast<size_t>(graph_.target_type)];

    const auto aux = model::encode(tape, encoder_graph_, feats, aux_, encoder_options_);
    std::vector<Var<T>> scores(graph_.relations.size());
    std::vector<Var<T>> weights(graph_.relations.size());
    for (Index r : scored_relations_) {
        const auto ri = static_cast<size_t>(r);
        scores[ri] = edge_scores(tape, aux, r);
        Vector<double> noise;
        if (mode == model::GumbelMode::train) {
            noise = model::logistic_noise(scores[ri].rows(), config_.eps, config_.seed, step, static_cast<std::uint64_t>(r));
        }
        weights[ri] = model::gumbel_weights(scores[ri], config_.tau, noise, mode);
    }

    const Var<T> x0 = filter_input_(tape, feats[static_cast<size_t>(graph_.target_type)]);
    std::vector<model::RelationViews<T>> views;
    for (size_t s = 0; s < target_relations_.size(); ++s) {
        RelationForward<T> rf;
        rf.relation = target_relations_[s];
        rf.inverse = graph_.relations[static_cast<size_t>(rf.relation)].inverse;
        rf.scores = scores[static_cast<size_t>(rf.relation)];
        rf.scores_inv = scores[static_cast<size_t>(rf.inverse)];
        rf.w = weights[static_cast<size_t>(rf.relation)];
        rf.w_inv = weights[static_cast<size_t>(rf.inverse)];
        rf.a_ho = model::build_homo_graph(rf.w, rf.w_inv, patterns_[s]);
        rf.a_he = model::build_hete_graph(rf.w, rf.w_inv, patterns_[s]);
        rf.h_ho = model::low_pass_encode(tape, x0, patterns_[s], rf.a_ho, config_.low_pass_layers, filter_ho_[s]);
        rf.h_he = model::high_pass_encode(tape, x0, patterns_[s], rf.a_he, config_.high_pass_layers, filter_he_[s]);
        views.push_back({graph_.relations[static_cast<size_t>(rf.relation)].name, &patterns_[s], rf.a_ho, rf.a_he,
                         rf.h_ho, rf.h_he, &proj_ho_[s], &proj_he_[s]});
        out.relations.push_back(rf);
    }

    if (with_loss) {
        model::ObjectiveOptions opts;
        opts.mode = config_.loss_mode;
        opts.no_homo = config_.no_homo;
        opts.no_hete = config_.no_hete;
        opts.tau_c = config_.tau_c;
        opts.k_pos = config_.k_pos;
        opts.denominator = config_.denominator;
        opts.seed = config_.seed;
        out.loss = model::total_loss(tape, out.anchor, proj_anchor_, views, opts, step, frozen);
    }
    return out;
}

template class Model<float>;
template class Model<double>;

}  // namespace hetsep::train
