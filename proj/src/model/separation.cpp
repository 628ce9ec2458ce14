#include "hetsep/model/separation.hpp"

#include "hetsep/graph/io.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>
#include <tuple>

namespace hetsep::model {

std::string to_string(GraphKind k) { return k == GraphKind::homophilic ? "ho" : "he"; }

PathPattern build_two_hop_pattern(const graph::HeteroGraph& g, Index relation, Index top_m) {
    if (top_m < 0) throw std::invalid_argument("top_m must be >= 0");
    const auto& r = g.relations.at(static_cast<size_t>(relation));
    if (r.inverse < 0) throw std::invalid_argument("relation '" + r.name + "' has no inverse");
    const auto& inv = g.relations[static_cast<size_t>(r.inverse)];
    const Index n = g.node_types[static_cast<size_t>(r.src_type)].count;
    const Index mid = g.node_types[static_cast<size_t>(r.dst_type)].count;

    std::vector<std::vector<Index>> out_edges(static_cast<size_t>(n));
    for (size_t e = 0; e < r.edges.size(); ++e) out_edges[static_cast<size_t>(r.edges[e].src)].push_back(static_cast<Index>(e));
    std::vector<std::vector<Index>> back_edges(static_cast<size_t>(mid));
    for (size_t e = 0; e < inv.edges.size(); ++e) back_edges[static_cast<size_t>(inv.edges[e].src)].push_back(static_cast<Index>(e));

    PathPattern p;
    p.rows = n;
    p.cols = n;
    p.left_size = static_cast<Index>(r.edges.size());
    p.right_size = static_cast<Index>(inv.edges.size());
    p.row_ptr.push_back(0);
    p.path_ptr.push_back(0);

    std::vector<std::tuple<Index, Index, Index>> row_paths;  // (j, left, right)
    for (Index i = 0; i < n; ++i) {
        row_paths.clear();
        for (Index e : out_edges[static_cast<size_t>(i)]) {
            const Index k = r.edges[static_cast<size_t>(e)].dst;
            for (Index e2 : back_edges[static_cast<size_t>(k)]) {
                row_paths.emplace_back(inv.edges[static_cast<size_t>(e2)].dst, e, e2);
            }
        }
        std::sort(row_paths.begin(), row_paths.end());
        // Group into pairs.
        std::vector<std::pair<size_t, size_t>> groups;  // [begin, end) into row_paths
        for (size_t q = 0; q < row_paths.size();) {
            size_t end = q;
            while (end < row_paths.size() && std::get<0>(row_paths[end]) == std::get<0>(row_paths[q])) ++end;
            groups.emplace_back(q, end);
            q = end;
        }
        if (top_m > 0 && static_cast<Index>(groups.size()) > top_m) {
            std::stable_sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) {
                return a.second - a.first > b.second - b.first;
            });
            groups.resize(static_cast<size_t>(top_m));
            std::sort(groups.begin(), groups.end());
        }
        for (const auto& [b, e] : groups) {
            p.col.push_back(std::get<0>(row_paths[b]));
            for (size_t q = b; q < e; ++q) {
                p.path_left.push_back(std::get<1>(row_paths[q]));
                p.path_right.push_back(std::get<2>(row_paths[q]));
            }
            p.path_ptr.push_back(static_cast<Index>(p.path_left.size()));
        }
        p.row_ptr.push_back(static_cast<Index>(p.col.size()));
    }
    return p;
}

namespace {

template <typename T>
void check_weights(const Var<T>& w_r, const Var<T>& w_inv, const PathPattern& pattern) {
    if (w_r.cols() != 1 || w_r.rows() != pattern.left_size || w_inv.cols() != 1 ||
        w_inv.rows() != pattern.right_size) {
        throw std::invalid_argument("edge weight tables are misaligned with the relation edge lists");
    }
}

}  // namespace

template <typename T>
Var<T> build_homo_graph(const Var<T>& w_r, const Var<T>& w_inv, const PathPattern& pattern) {
    check_weights(w_r, w_inv, pattern);
    return diff::path_sum(w_r, w_inv, pattern);
}

template <typename T>
Var<T> build_hete_graph(const Var<T>& w_r, const Var<T>& w_inv, const PathPattern& pattern) {
    check_weights(w_r, w_inv, pattern);
    return diff::path_sum(diff::affine(w_r, T(-1), T(1)), diff::affine(w_inv, T(-1), T(1)), pattern);
}

template <typename T>
Vector<T> isolated_rows(const PathPattern& pattern) {
    Vector<T> v(pattern.rows);
    for (Index i = 0; i < pattern.rows; ++i) v(i) = pattern.row_degree(i) == 0 ? T(1) : T(0);
    return v;
}

template <typename T>
Var<T> low_pass_filter(const Var<T>& x, const PathPattern& pattern, const Var<T>& a, int layers) {
    if (layers < 1) throw std::invalid_argument("filter layer count must be >= 1");
    const Vector<T> keep = isolated_rows<T>(pattern);
    const bool any_isolated = keep.sum() > T(0);
    Var<T> h = x;
    for (int l = 0; l < layers; ++l) {
        Var<T> next = diff::pair_mean(pattern, a, h);
        if (any_isolated) next = diff::add(next, diff::row_scale(h, keep));
        h = next;
    }
    return h;
}

template <typename T>
Var<T> high_pass_filter(const Var<T>& x, const PathPattern& pattern, const Var<T>& a, int layers) {
    if (layers < 1) throw std::invalid_argument("filter layer count must be >= 1");
    // mean_j (x_i - a_ij x_j) = x_i - mean_j a_ij x_j; isolated rows see a zero mean.
    Var<T> h = x;
    for (int l = 0; l < layers; ++l) h = diff::sub(h, diff::pair_mean(pattern, a, h));
    return h;
}

template <typename T>
Var<T> low_pass_encode(Tape<T>& tape, const Var<T>& x0, const PathPattern& pattern, const Var<T>& a, int layers,
                       const Linear<T>& out) {
    return out(tape, low_pass_filter(x0, pattern, a, layers));
}

template <typename T>
Var<T> high_pass_encode(Tape<T>& tape, const Var<T>& x0, const PathPattern& pattern, const Var<T>& a, int layers,
                        const Linear<T>& out) {
    return out(tape, high_pass_filter(x0, pattern, a, layers));
}

void write_synthesized_graph(const std::filesystem::path& path, const PathPattern& pattern, const Vector<double>& a) {
    if (a.size() != pattern.pairs()) throw std::invalid_argument("weight vector does not match the pattern");
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << "i\tj\tweight\n";
    for (Index i = 0; i < pattern.rows; ++i) {
        for (Index p = pattern.row_ptr[static_cast<size_t>(i)]; p < pattern.row_ptr[static_cast<size_t>(i) + 1]; ++p) {
            os << i << '\t' << pattern.col[static_cast<size_t>(p)] << '\t' << graph::format_number(a(p)) << '\n';
        }
    }
}

#define HETSEP_INSTANTIATE_SEPARATION(T)                                                                     \
    template Var<T> build_homo_graph(const Var<T>&, const Var<T>&, const PathPattern&);                      \
    template Var<T> build_hete_graph(const Var<T>&, const Var<T>&, const PathPattern&);                      \
    template Vector<T> isolated_rows<T>(const PathPattern&);                                                 \
    template Var<T> low_pass_filter(const Var<T>&, const PathPattern&, const Var<T>&, int);                  \
    template Var<T> high_pass_filter(const Var<T>&, const PathPattern&, const Var<T>&, int);                 \
    template Var<T> low_pass_encode(Tape<T>&, const Var<T>&, const PathPattern&, const Var<T>&, int,         \
                                    const Linear<T>&);                                                       \
    template Var<T> high_pass_encode(Tape<T>&, const Var<T>&, const PathPattern&, const Var<T>&, int,        \
                                     const Linear<T>&);

HETSEP_INSTANTIATE_SEPARATION(float)
HETSEP_INSTANTIATE_SEPARATION(double)

}  // namespace hetsep::model
