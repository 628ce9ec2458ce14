#pragma once

#include "hetsep/model/layers.hpp"
#include "hetsep/model/separation.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace hetsep::model {

// Positive index sets per anchor. Scores are nonincreasing within a row.
struct PositiveSet {
    std::vector<std::vector<Index>> index;
    std::vector<std::vector<double>> score;

    Index size() const { return static_cast<Index>(index.size()); }
    Mask mask() const;
};

// Candidate weights a_ij from one synthesized graph, scaled by `coef`.
struct WeightedPattern {
    const PathPattern* pattern = nullptr;
    Vector<double> values;
    double coef = 1.0;
};

// p_ij = (sum over graphs of coef * a_ij) * cos(h_i, h_j) over candidates
// with positive weight; keeps the k_pos best (ties: smaller j). Rows with no
// candidate, or k_pos = 0, fall back to {i}.
PositiveSet positive_sample(const Matrix<double>& h, const std::vector<WeightedPattern>& graphs, int k_pos);
PositiveSet positive_sample(const Matrix<double>& h, const PathPattern& pattern, const Vector<double>& a, int k_pos);

enum class Denominator { exclude_positives, full };
Denominator denominator_from_string(const std::string& s);
std::string to_string(Denominator d);

// Mean over anchors i of
//   -(1/|P_i|) * (logsumexp_{j in P_i} c_ij - logsumexp_{k in D_i} c_ik),
// c = cos(z_i, z_view_j) / tau_c, D_i = V \ P_i (or V with `full`).
template <typename T>
Var<T> infonce(const Var<T>& z_anchor, const Var<T>& z_view, const PositiveSet& positives, double tau_c,
               Denominator denominator = Denominator::exclude_positives);

// (L(z, z_view), L(z_view, z)) with the same positive index sets.
template <typename T>
std::pair<Var<T>, Var<T>> relation_view_loss(const Var<T>& z_anchor, const Var<T>& z_view,
                                             const PositiveSet& positives, double tau_c,
                                             Denominator denominator = Denominator::exclude_positives);

enum class LossMode { multi, mean_fusion, random_single };
LossMode loss_mode_from_string(const std::string& s);
std::string to_string(LossMode m);

struct ObjectiveOptions {
    LossMode mode = LossMode::multi;
    bool no_homo = false;
    bool no_hete = false;
    double tau_c = 0.5;
    int k_pos = 3;
    Denominator denominator = Denominator::exclude_positives;
    std::uint64_t seed = 0;
};

// Views of one target relation.
template <typename T>
struct RelationViews {
    std::string name;
    const PathPattern* pattern = nullptr;
    Var<T> a_ho;
    Var<T> a_he;
    Var<T> h_ho;
    Var<T> h_he;
    const Mlp<T>* proj_ho = nullptr;
    const Mlp<T>* proj_he = nullptr;
};

struct LossTerm {
    std::string relation;
    GraphKind kind = GraphKind::homophilic;
    std::string direction;  // "anchor_view" or "view_anchor"
    double value = 0;
};

struct LossBreakdown {
    std::vector<LossTerm> terms;
    double total = 0;
};

// Positive sets keyed by (relation slot, kind); slot -1 is the fused view.
using PositiveCache = std::map<std::pair<int, int>, PositiveSet>;

template <typename T>
struct ObjectiveResult {
    Var<T> total;
    LossBreakdown breakdown;
    PositiveCache positives;
};

// Sum of relation_view_loss terms over the enabled views. `frozen`, when
// given, replaces positive sampling (needed for finite differences).
template <typename T>
ObjectiveResult<T> total_loss(Tape<T>& tape, const Var<T>& anchor, const Mlp<T>& anchor_proj,
                              const std::vector<RelationViews<T>>& views, const ObjectiveOptions& options,
                              std::uint64_t step, const PositiveCache* frozen = nullptr);

// Relation slot drawn by random_single at `step`.
size_t random_single_slot(std::uint64_t seed, std::uint64_t step, size_t relations);

}  // namespace hetsep::model
