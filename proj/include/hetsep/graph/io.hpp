#pragma once

#include "hetsep/graph/hetero_graph.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

namespace hetsep::graph {

// Malformed input; what() reads "<file>:<line>: <message>" (line 0 when the
// problem is not tied to one line).
class GraphFormatError : public std::runtime_error {
public:
    GraphFormatError(std::string file, long line, const std::string& message);
    const std::string& file() const { return file_; }
    long line() const { return line_; }

private:
    std::string file_;
    long line_;
};

struct LoadOptions {
    // Width of the Xavier-uniform features synthesised for featureless types.
    Index featureless_dim = 64;
    std::uint64_t seed = 0;
    bool allow_empty_relations = false;
};

// Directory layout:
//   meta.json               {node_types:[{name,count,feature_dim}],
//                            relations:[{name,src_type,dst_type}],
//                            target_type, num_classes}
//   <type>.features.tsv     one row per node, tab-separated decimals
//   <relation>.edges.tsv    src<TAB>dst, 0-based per-type indices
//   <target>.labels.tsv     one integer per line
//   splits.json             optional {train:[...], val:[...], test:[...]}
HeteroGraph load_graph(const std::filesystem::path& dir, const LoadOptions& options = {});

// Writes the input relations (materialised inverses are not written).
// Output is a pure function of the graph.
void save_graph(const HeteroGraph& graph, const std::filesystem::path& dir);

// Shortest decimal text that reads back to the same double.
std::string format_number(double value);

}  // namespace hetsep::graph
