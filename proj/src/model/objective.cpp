#include "hetsep/model/objective.hpp"

#include "hetsep/graph/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hetsep::model {

Mask PositiveSet::mask() const {
    const Index n = size();
    Mask m = Mask::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j : index[static_cast<size_t>(i)]) m(i, j) = 1;
    }
    return m;
}

PositiveSet positive_sample(const Matrix<double>& h, const std::vector<WeightedPattern>& graphs, int k_pos) {
    if (k_pos < 0) throw std::invalid_argument("k_pos must be >= 0");
    const Index n = h.rows();
    for (const auto& wp : graphs) {
        if (wp.pattern == nullptr || wp.pattern->rows != n || wp.pattern->cols != n ||
            wp.values.size() != wp.pattern->pairs()) {
            throw std::invalid_argument("positive_sample: synthesized graph does not match the view");
        }
    }
    Vector<double> norm = h.rowwise().norm();
    PositiveSet out;
    out.index.resize(static_cast<size_t>(n));
    out.score.resize(static_cast<size_t>(n));
    std::vector<std::pair<Index, double>> cand;
    std::vector<std::pair<double, Index>> ranked;
    for (Index i = 0; i < n; ++i) {
        cand.clear();
        if (k_pos > 0) {
            for (const auto& wp : graphs) {
                const auto& p = *wp.pattern;
                for (Index q = p.row_ptr[static_cast<size_t>(i)]; q < p.row_ptr[static_cast<size_t>(i) + 1]; ++q) {
                    cand.emplace_back(p.col[static_cast<size_t>(q)], wp.coef * wp.values(q));
                }
            }
        }
        std::sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        ranked.clear();
        for (size_t q = 0; q < cand.size();) {
            const Index j = cand[q].first;
            double a = 0;
            for (; q < cand.size() && cand[q].first == j; ++q) a += cand[q].second;
            if (!(a > 0)) continue;
            const double denom = norm(i) * norm(j);
            const double cos = denom > 0 ? h.row(i).dot(h.row(j)) / denom : 0.0;
            ranked.emplace_back(a * cos, j);
        }
        std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
            return a.first != b.first ? a.first > b.first : a.second < b.second;
        });
        if (ranked.empty()) {
            out.index[static_cast<size_t>(i)] = {i};
            out.score[static_cast<size_t>(i)] = {0.0};
            continue;
        }
        const size_t keep = std::min(ranked.size(), static_cast<size_t>(k_pos));
        for (size_t q = 0; q < keep; ++q) {
            out.index[static_cast<size_t>(i)].push_back(ranked[q].second);
            out.score[static_cast<size_t>(i)].push_back(ranked[q].first);
        }
    }
    return out;
}

PositiveSet positive_sample(const Matrix<double>& h, const PathPattern& pattern, const Vector<double>& a, int k_pos) {
    return positive_sample(h, std::vector<WeightedPattern>{{&pattern, a, 1.0}}, k_pos);
}

Denominator denominator_from_string(const std::string& s) {
    if (s == "exclude_positives") return Denominator::exclude_positives;
    if (s == "full") return Denominator::full;
    throw std::invalid_argument("unknown denominator '" + s + "' (expected exclude_positives or full)");
}

std::string to_string(Denominator d) { return d == Denominator::full ? "full" : "exclude_positives"; }

template <typename T>
Var<T> infonce(const Var<T>& z_anchor, const Var<T>& z_view, const PositiveSet& positives, double tau_c,
               Denominator denominator) {
    if (!(tau_c > 0.0)) throw std::invalid_argument("tau_c must be > 0");
    if (z_anchor.cols() == 0 || z_view.cols() == 0) throw std::invalid_argument("infonce: zero-dimensional views");
    if (z_anchor.rows() != z_view.rows() || z_anchor.cols() != z_view.cols()) {
        throw std::invalid_argument("infonce: anchor and view shapes differ");
    }
    const Index n = z_anchor.rows();
    if (positives.size() != n) throw std::invalid_argument("infonce: positive sets do not cover every anchor");
    const Mask pos = positives.mask();
    Mask neg = denominator == Denominator::full ? Mask::Ones(n, n) : Mask((1 - pos.array()).matrix());
    Vector<T> inv_count(n);
    for (Index i = 0; i < n; ++i) {
        if (denominator == Denominator::exclude_positives &&
            static_cast<Index>(positives.index[static_cast<size_t>(i)].size()) >= n) {
            throw std::invalid_argument("infonce: anchor " + std::to_string(i) + " has no negatives");
        }
        inv_count(i) = T(-1) / static_cast<T>(positives.index[static_cast<size_t>(i)].size());
    }
    const Var<T> sim = diff::divide(
        diff::matmul(diff::row_l2_normalize(z_anchor), diff::transpose(diff::row_l2_normalize(z_view))),
        static_cast<T>(tau_c));
    const Var<T> diffs = diff::sub(diff::masked_row_logsumexp(sim, pos), diff::masked_row_logsumexp(sim, std::move(neg)));
    return diff::mean_all(diff::row_scale(diffs, std::move(inv_count)));
}

template <typename T>
std::pair<Var<T>, Var<T>> relation_view_loss(const Var<T>& z_anchor, const Var<T>& z_view,
                                             const PositiveSet& positives, double tau_c, Denominator denominator) {
    return {infonce(z_anchor, z_view, positives, tau_c, denominator),
            infonce(z_view, z_anchor, positives, tau_c, denominator)};
}

LossMode loss_mode_from_string(const std::string& s) {
    if (s == "multi") return LossMode::multi;
    if (s == "mean_fusion") return LossMode::mean_fusion;
    if (s == "random_single") return LossMode::random_single;
    throw std::invalid_argument("unknown loss mode '" + s + "' (expected multi, mean_fusion or random_single)");
}

std::string to_string(LossMode m) {
    switch (m) {
        case LossMode::multi: return "multi";
        case LossMode::mean_fusion: return "mean_fusion";
        case LossMode::random_single: return "random_single";
    }
    return "multi";
}

size_t random_single_slot(std::uint64_t seed, std::uint64_t step, size_t relations) {
    if (relations == 0) throw std::invalid_argument("random_single needs at least one relation");
    return static_cast<size_t>(graph::mix_seed(seed, step, 0x72616e64ULL) % relations);
}

namespace {

template <typename T>
Vector<double> as_column(const Var<T>& v) {
    return v.value().col(0).template cast<double>();
}

template <typename T>
Matrix<double> as_double(const Var<T>& v) {
    return v.value().template cast<double>();
}

}  // namespace

template <typename T>
ObjectiveResult<T> total_loss(Tape<T>& tape, const Var<T>& anchor, const Mlp<T>& anchor_proj,
                              const std::vector<RelationViews<T>>& views, const ObjectiveOptions& options,
                              std::uint64_t step, const PositiveCache* frozen) {
    if (views.empty()) throw std::invalid_argument("no relations incident to the target type");
    if (options.no_homo && options.no_hete) throw std::invalid_argument("both homophilic and heterophilic terms disabled");

    struct Slot {
        int key;
        std::string name;
        Var<T> h[2];
        std::vector<WeightedPattern> graphs[2];
        const Mlp<T>* proj[2];
    };
    std::vector<Slot> slots;
    if (options.mode == LossMode::mean_fusion) {
        Slot s;
        s.key = -1;
        s.name = "fused";
        const T inv = T(1) / static_cast<T>(views.size());
        for (int kind = 0; kind < 2; ++kind) {
            Var<T> acc;
            for (size_t r = 0; r < views.size(); ++r) {
                const Var<T>& h = kind == 0 ? views[r].h_ho : views[r].h_he;
                acc = r == 0 ? h : diff::add(acc, h);
                s.graphs[kind].push_back({views[r].pattern, as_column(kind == 0 ? views[r].a_ho : views[r].a_he),
                                          1.0 / static_cast<double>(views.size())});
            }
            s.h[kind] = views.size() == 1 ? acc : diff::scale(acc, inv);
        }
        s.proj[0] = views[0].proj_ho;
        s.proj[1] = views[0].proj_he;
        slots.push_back(std::move(s));
    } else {
        std::vector<size_t> chosen;
        if (options.mode == LossMode::random_single) {
            chosen.push_back(random_single_slot(options.seed, step, views.size()));
        } else {
            for (size_t r = 0; r < views.size(); ++r) chosen.push_back(r);
        }
        for (size_t r : chosen) {
            const auto& v = views[r];
            Slot s;
            s.key = static_cast<int>(r);
            s.name = v.name;
            s.h[0] = v.h_ho;
            s.h[1] = v.h_he;
            s.graphs[0].push_back({v.pattern, as_column(v.a_ho), 1.0});
            s.graphs[1].push_back({v.pattern, as_column(v.a_he), 1.0});
            s.proj[0] = v.proj_ho;
            s.proj[1] = v.proj_he;
            slots.push_back(std::move(s));
        }
    }

    ObjectiveResult<T> result;
    const Var<T> z = anchor_proj(tape, anchor);
    std::vector<Var<T>> parts;
    for (auto& s : slots) {
        for (int kind = 0; kind < 2; ++kind) {
            if ((kind == 0 && options.no_homo) || (kind == 1 && options.no_hete)) continue;
            const auto key = std::make_pair(s.key, kind);
            PositiveSet pos;
            if (frozen != nullptr) {
                const auto it = frozen->find(key);
                if (it == frozen->end()) throw std::invalid_argument("frozen positives missing for view " + s.name);
                pos = it->second;
            } else {
                pos = positive_sample(as_double(s.h[kind]), s.graphs[kind], options.k_pos);
            }
            const Var<T> zv = (*s.proj[kind])(tape, s.h[kind]);
            auto [forward, backward] = relation_view_loss(z, zv, pos, options.tau_c, options.denominator);
            const GraphKind gk = kind == 0 ? GraphKind::homophilic : GraphKind::heterophilic;
            result.breakdown.terms.push_back({s.name, gk, "anchor_view", static_cast<double>(forward.scalar())});
            result.breakdown.terms.push_back({s.name, gk, "view_anchor", static_cast<double>(backward.scalar())});
            parts.push_back(forward);
            parts.push_back(backward);
            result.positives.emplace(key, std::move(pos));
        }
    }
    Var<T> total = parts.front();
    for (size_t p = 1; p < parts.size(); ++p) total = diff::add(total, parts[p]);
    result.total = total;
    result.breakdown.total = static_cast<double>(total.scalar());
    return result;
}

#define HETSEP_INSTANTIATE_OBJECTIVE(T)                                                                        \
    template Var<T> infonce(const Var<T>&, const Var<T>&, const PositiveSet&, double, Denominator);            \
    template std::pair<Var<T>, Var<T>> relation_view_loss(const Var<T>&, const Var<T>&, const PositiveSet&,    \
                                                          double, Denominator);                                \
    template ObjectiveResult<T> total_loss(Tape<T>&, const Var<T>&, const Mlp<T>&,                             \
                                           const std::vector<RelationViews<T>>&, const ObjectiveOptions&,      \
                                           std::uint64_t, const PositiveCache*);

HETSEP_INSTANTIATE_OBJECTIVE(float)
HETSEP_INSTANTIATE_OBJECTIVE(double)

}  // namespace hetsep::model
