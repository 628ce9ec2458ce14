#include "hetsep/graph/io.hpp"

#include "hetsep/graph/synthetic.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace hetsep::graph {
namespace fs = std::filesystem;
using nlohmann::json;

GraphFormatError::GraphFormatError(std::string file, long line, const std::string& message)
    : std::runtime_error(file + ":" + std::to_string(line) + ": " + message), file_(std::move(file)), line_(line) {}

namespace {

std::ifstream open_input(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw GraphFormatError(path.string(), 0, "missing file");
    return is;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> out;
    size_t start = 0;
    while (true) {
        const size_t pos = line.find('\t', start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

template <typename U>
bool parse_value(std::string_view text, U& out) {
    while (!text.empty() && text.back() == '\r') text.remove_suffix(1);
    if (text.empty()) return false;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
    return res.ec == std::errc() && res.ptr == text.data() + text.size();
}

Matrix<double> read_features(const fs::path& path, Index rows, Index cols) {
    auto is = open_input(path);
    Matrix<double> x(rows, cols);
    std::string line;
    long lineno = 0;
    Index r = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (r >= rows) throw GraphFormatError(path.string(), lineno, "more feature rows than declared node count");
        const auto fields = split_tabs(line);
        if (static_cast<Index>(fields.size()) != cols) {
            throw GraphFormatError(path.string(), lineno,
                                   "dimension mismatch: expected " + std::to_string(cols) + " columns, got " +
                                       std::to_string(fields.size()));
        }
        for (Index c = 0; c < cols; ++c) {
            double v = 0;
            if (!parse_value(fields[static_cast<size_t>(c)], v)) {
                throw GraphFormatError(path.string(), lineno, "invalid decimal in column " + std::to_string(c + 1));
            }
            x(r, c) = v;
        }
        ++r;
    }
    if (r != rows) {
        throw GraphFormatError(path.string(), lineno,
                               "dimension mismatch: expected " + std::to_string(rows) + " rows, got " +
                                   std::to_string(r));
    }
    return x;
}

std::vector<Edge> read_edges(const fs::path& path, Index src_count, Index dst_count) {
    auto is = open_input(path);
    std::vector<Edge> edges;
    std::unordered_map<long long, long> seen;
    std::string line;
    long lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto fields = split_tabs(line);
        Edge e;
        if (fields.size() != 2 || !parse_value(fields[0], e.src) || !parse_value(fields[1], e.dst)) {
            throw GraphFormatError(path.string(), lineno, "expected 'src<TAB>dst' integers");
        }
        if (e.src < 0 || e.src >= src_count) {
            throw GraphFormatError(path.string(), lineno, "index out of range: src " + std::to_string(e.src));
        }
        if (e.dst < 0 || e.dst >= dst_count) {
            throw GraphFormatError(path.string(), lineno, "index out of range: dst " + std::to_string(e.dst));
        }
        const auto key = static_cast<long long>(e.src) * dst_count + e.dst;
        if (auto [it, fresh] = seen.emplace(key, lineno); !fresh) {
            throw GraphFormatError(path.string(), lineno,
                                   "duplicate edge (first seen on line " + std::to_string(it->second) + ")");
        }
        edges.push_back(e);
    }
    return edges;
}

std::vector<int> read_labels(const fs::path& path, Index count, int num_classes) {
    auto is = open_input(path);
    std::vector<int> labels;
    std::string line;
    long lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        int y = 0;
        if (!parse_value(std::string_view(line), y)) throw GraphFormatError(path.string(), lineno, "expected an integer label");
        if (y < 0 || y >= num_classes) {
            throw GraphFormatError(path.string(), lineno, "label " + std::to_string(y) + " out of range");
        }
        labels.push_back(y);
    }
    if (static_cast<Index>(labels.size()) != count) {
        throw GraphFormatError(path.string(), lineno,
                               "dimension mismatch: expected " + std::to_string(count) + " labels, got " +
                                   std::to_string(labels.size()));
    }
    return labels;
}

template <typename F>
auto with_context(const fs::path& file, F&& f) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw GraphFormatError(file.string(), 0, e.what());
    }
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << text;
}

}  // namespace

std::string format_number(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

HeteroGraph load_graph(const fs::path& dir, const LoadOptions& options) {
    const fs::path meta_path = dir / "meta.json";
    auto meta_stream = open_input(meta_path);
    const json meta = with_context(meta_path, [&] { return json::parse(meta_stream); });

    HeteroGraph g;
    with_context(meta_path, [&] {
        for (const auto& t : meta.at("node_types")) {
            g.node_types.push_back(
                {t.at("name").get<std::string>(), t.at("count").get<Index>(), t.value("feature_dim", Index{0})});
        }
        g.num_classes = meta.at("num_classes").get<int>();
        return 0;
    });
    try {
        for (const auto& t : g.node_types) {
            if (t.count <= 0) throw std::invalid_argument("node type '" + t.name + "' has count <= 0");
        }
        g.target_type = g.type_index(with_context(meta_path, [&] { return meta.at("target_type").get<std::string>(); }));
    } catch (const std::invalid_argument& e) {
        throw GraphFormatError(meta_path.string(), 0, e.what());
    }

    for (const auto& t : g.node_types) {
        if (t.feature_dim > 0) {
            g.features.push_back(read_features(dir / (t.name + ".features.tsv"), t.count, t.feature_dim));
        } else {
            const std::uint64_t type_seed = options.seed ^ stable_hash(t.name);
            g.features.push_back(xavier_uniform_matrix(t.count, options.featureless_dim, type_seed));
        }
    }

    const json relations = with_context(meta_path, [&] { return meta.at("relations"); });
    for (const auto& rj : relations) {
        Relation r;
        try {
            r.name = rj.at("name").get<std::string>();
            r.src_type = g.type_index(rj.at("src_type").get<std::string>());
            r.dst_type = g.type_index(rj.at("dst_type").get<std::string>());
        } catch (const std::exception& e) {
            throw GraphFormatError(meta_path.string(), 0, e.what());
        }
        const fs::path edge_path = dir / (r.name + ".edges.tsv");
        r.edges = read_edges(edge_path, g.node_types[static_cast<size_t>(r.src_type)].count,
                             g.node_types[static_cast<size_t>(r.dst_type)].count);
        if (r.edges.empty() && !options.allow_empty_relations) {
            throw GraphFormatError(edge_path.string(), 0, "relation has zero edges");
        }
        g.relations.push_back(std::move(r));
        g.edge_features.emplace_back();
    }

    g.labels = read_labels(dir / (g.target().name + ".labels.tsv"), g.target().count, g.num_classes);

    const fs::path splits_path = dir / "splits.json";
    if (fs::exists(splits_path)) {
        std::ifstream ss(splits_path);
        g.splits = with_context(splits_path, [&] {
            const json s = json::parse(ss);
            return PresetSplits{s.at("train").get<std::vector<Index>>(), s.at("val").get<std::vector<Index>>(),
                                s.at("test").get<std::vector<Index>>()};
        });
        for (const auto* part : {&g.splits->train, &g.splits->val, &g.splits->test}) {
            for (Index i : *part) {
                if (i < 0 || i >= g.target().count) {
                    throw GraphFormatError(splits_path.string(), 0, "index out of range: " + std::to_string(i));
                }
            }
        }
    }

    materialize_inverses(g);
    try {
        validate(g, options.allow_empty_relations);
    } catch (const std::invalid_argument& e) {
        throw GraphFormatError(dir.string(), 0, e.what());
    }
    return g;
}

void save_graph(const HeteroGraph& g, const fs::path& dir) {
    fs::create_directories(dir);
    json meta;
    meta["node_types"] = json::array();
    for (const auto& t : g.node_types) {
        meta["node_types"].push_back({{"name", t.name}, {"count", t.count}, {"feature_dim", t.feature_dim}});
    }
    meta["relations"] = json::array();
    const auto primaries = g.primary_relations();
    for (Index ri : primaries) {
        const Relation& r = g.relations[static_cast<size_t>(ri)];
        meta["relations"].push_back({{"name", r.name},
                                     {"src_type", g.node_types[static_cast<size_t>(r.src_type)].name},
                                     {"dst_type", g.node_types[static_cast<size_t>(r.dst_type)].name}});
    }
    meta["target_type"] = g.target().name;
    meta["num_classes"] = g.num_classes;
    write_text(dir / "meta.json", meta.dump(2) + "\n");

    for (size_t t = 0; t < g.node_types.size(); ++t) {
        if (g.node_types[t].feature_dim <= 0) continue;
        std::string text;
        const auto& x = g.features[t];
        for (Index i = 0; i < x.rows(); ++i) {
            for (Index c = 0; c < x.cols(); ++c) {
                if (c > 0) text += '\t';
                text += format_number(x(i, c));
            }
            text += '\n';
        }
        write_text(dir / (g.node_types[t].name + ".features.tsv"), text);
    }
    for (Index ri : primaries) {
        const Relation& r = g.relations[static_cast<size_t>(ri)];
        std::string text;
        for (const auto& e : r.edges) text += std::to_string(e.src) + '\t' + std::to_string(e.dst) + '\n';
        write_text(dir / (r.name + ".edges.tsv"), text);
    }
    std::string labels;
    for (int y : g.labels) labels += std::to_string(y) + '\n';
    write_text(dir / (g.target().name + ".labels.tsv"), labels);
    if (g.splits) {
        const json s = {{"train", g.splits->train}, {"val", g.splits->val}, {"test", g.splits->test}};
        write_text(dir / "splits.json", s.dump() + "\n");
    }
}

}  // namespace hetsep::graph
