#include "hetsep/graph/hetero_graph.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

namespace hetsep::graph {
namespace {

std::vector<Edge> sorted_reversed(const std::vector<Edge>& edges) {
    std::vector<Edge> out;
    out.reserve(edges.size());
    for (const auto& e : edges) out.push_back({e.dst, e.src});
    std::sort(out.begin(), out.end(), [](const Edge& a, const Edge& b) {
        return a.src != b.src ? a.src < b.src : a.dst < b.dst;
    });
    return out;
}

std::vector<Edge> sorted_copy(std::vector<Edge> edges) {
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
        return a.src != b.src ? a.src < b.src : a.dst < b.dst;
    });
    return edges;
}

}  // namespace

Index HeteroGraph::type_index(const std::string& name) const {
    for (size_t i = 0; i < node_types.size(); ++i) {
        if (node_types[i].name == name) return static_cast<Index>(i);
    }
    throw std::invalid_argument("unknown node type: " + name);
}

Index HeteroGraph::relation_index(const std::string& name) const {
    for (size_t i = 0; i < relations.size(); ++i) {
        if (relations[i].name == name) return static_cast<Index>(i);
    }
    throw std::invalid_argument("unknown relation: " + name);
}

std::vector<Index> HeteroGraph::target_relations() const {
    std::vector<Index> out;
    for (size_t i = 0; i < relations.size(); ++i) {
        if (relations[i].src_type == target_type) out.push_back(static_cast<Index>(i));
    }
    return out;
}

std::vector<Index> HeteroGraph::primary_relations() const {
    std::vector<Index> out;
    for (size_t i = 0; i < relations.size(); ++i) {
        const Relation& r = relations[i];
        if (r.derived) continue;
        const auto idx = static_cast<Index>(i);
        if (r.inverse >= 0 && r.inverse < idx && !relations[static_cast<size_t>(r.inverse)].derived) continue;
        out.push_back(idx);
    }
    return out;
}

Index HeteroGraph::edge_count() const {
    Index n = 0;
    for (const auto& r : relations) n += static_cast<Index>(r.edges.size());
    return n;
}

void materialize_inverses(HeteroGraph& graph) {
    const size_t original = graph.relations.size();
    for (size_t i = 0; i < original; ++i) {
        if (graph.relations[i].inverse >= 0) continue;
        const Relation& r = graph.relations[i];
        const auto reversed = sorted_reversed(r.edges);
        for (size_t j = 0; j < original; ++j) {
            if (j == i || graph.relations[j].inverse >= 0) continue;
            const Relation& c = graph.relations[j];
            if (c.src_type != r.dst_type || c.dst_type != r.src_type) continue;
            if (c.edges.size() != r.edges.size()) continue;
            if (sorted_copy(c.edges) == reversed) {
                graph.relations[i].inverse = static_cast<Index>(j);
                graph.relations[j].inverse = static_cast<Index>(i);
                break;
            }
        }
    }
    for (size_t i = 0; i < original; ++i) {
        if (graph.relations[i].inverse >= 0) continue;
        Relation rev;
        rev.name = graph.relations[i].name + "_rev";
        rev.src_type = graph.relations[i].dst_type;
        rev.dst_type = graph.relations[i].src_type;
        rev.edges.reserve(graph.relations[i].edges.size());
        for (const auto& e : graph.relations[i].edges) rev.edges.push_back({e.dst, e.src});
        rev.inverse = static_cast<Index>(i);
        rev.derived = true;
        graph.relations[i].inverse = static_cast<Index>(graph.relations.size());
        graph.relations.push_back(std::move(rev));
        graph.edge_features.emplace_back();
    }
}

void validate(const HeteroGraph& g, bool allow_empty_relations) {
    if (g.node_types.empty()) throw std::invalid_argument("graph has no node types");
    std::set<std::string> names;
    for (const auto& t : g.node_types) {
        if (t.count <= 0) throw std::invalid_argument("node type '" + t.name + "' has no nodes");
        if (t.feature_dim < 0) throw std::invalid_argument("node type '" + t.name + "' has negative feature_dim");
        if (!names.insert(t.name).second) throw std::invalid_argument("duplicate node type name: " + t.name);
    }
    if (g.node_types.size() + g.relations.size() <= 2) {
        throw std::invalid_argument("a heterogeneous graph needs |types| + |relations| > 2");
    }
    if (g.features.size() != g.node_types.size()) {
        throw std::invalid_argument("feature matrix count does not match node type count");
    }
    for (size_t t = 0; t < g.node_types.size(); ++t) {
        if (g.features[t].rows() != g.node_types[t].count) {
            throw std::invalid_argument("feature rows for '" + g.node_types[t].name + "' do not match node count");
        }
        if (!g.features[t].allFinite()) {
            throw std::invalid_argument("non-finite features for '" + g.node_types[t].name + "'");
        }
    }
    std::set<std::string> rel_names;
    for (size_t i = 0; i < g.relations.size(); ++i) {
        const Relation& r = g.relations[i];
        if (!rel_names.insert(r.name).second) throw std::invalid_argument("duplicate relation name: " + r.name);
        const auto ntypes = static_cast<Index>(g.node_types.size());
        if (r.src_type < 0 || r.src_type >= ntypes || r.dst_type < 0 || r.dst_type >= ntypes) {
            throw std::invalid_argument("relation '" + r.name + "' references an unknown node type");
        }
        if (r.edges.empty() && !allow_empty_relations) {
            throw std::invalid_argument("relation '" + r.name + "' has zero edges");
        }
        const Index ns = g.node_types[static_cast<size_t>(r.src_type)].count;
        const Index nd = g.node_types[static_cast<size_t>(r.dst_type)].count;
        std::unordered_set<long long> seen;
        seen.reserve(r.edges.size() * 2);
        for (const auto& e : r.edges) {
            if (e.src < 0 || e.src >= ns || e.dst < 0 || e.dst >= nd) {
                throw std::invalid_argument("relation '" + r.name + "' has an edge index out of range");
            }
            if (!seen.insert(static_cast<long long>(e.src) * nd + e.dst).second) {
                throw std::invalid_argument("relation '" + r.name + "' has a duplicate edge (" +
                                            std::to_string(e.src) + ", " + std::to_string(e.dst) + ")");
            }
        }
        if (r.inverse < 0 || r.inverse >= static_cast<Index>(g.relations.size())) {
            throw std::invalid_argument("relation '" + r.name + "' has no registered inverse");
        }
        const Relation& inv = g.relations[static_cast<size_t>(r.inverse)];
        if (inv.inverse != static_cast<Index>(i) || inv.src_type != r.dst_type || inv.dst_type != r.src_type ||
            inv.edges.size() != r.edges.size()) {
            throw std::invalid_argument("relation '" + r.name + "' and its inverse '" + inv.name + "' disagree");
        }
    }
    if (g.target_type < 0 || g.target_type >= static_cast<Index>(g.node_types.size())) {
        throw std::invalid_argument("target type out of range");
    }
    if (g.num_classes <= 0) throw std::invalid_argument("num_classes must be positive");
    if (static_cast<Index>(g.labels.size()) != g.target().count) {
        throw std::invalid_argument("label count does not match target node count");
    }
    for (int y : g.labels) {
        if (y < 0 || y >= g.num_classes) throw std::invalid_argument("label " + std::to_string(y) + " out of range");
    }
}

std::vector<Index> src_degrees(const HeteroGraph& g, Index relation) {
    const Relation& r = g.relations.at(static_cast<size_t>(relation));
    std::vector<Index> deg(static_cast<size_t>(g.node_types[static_cast<size_t>(r.src_type)].count), 0);
    for (const auto& e : r.edges) ++deg[static_cast<size_t>(e.src)];
    return deg;
}

std::vector<Index> dst_degrees(const HeteroGraph& g, Index relation) {
    const Relation& r = g.relations.at(static_cast<size_t>(relation));
    std::vector<Index> deg(static_cast<size_t>(g.node_types[static_cast<size_t>(r.dst_type)].count), 0);
    for (const auto& e : r.edges) ++deg[static_cast<size_t>(e.dst)];
    return deg;
}

}  // namespace hetsep::graph
