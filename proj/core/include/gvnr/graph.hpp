#pragma once

#include "gvnr/errors.hpp"
#include "gvnr/types.hpp"

#include <algorithm>
#include <cstddef>
#include <iosfwd>
#include <unordered_map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gvnr {

/// Undirected weighted graph in compressed adjacency form.
///
/// Every edge is stored in both endpoints' rows with the same weight, rows are
/// sorted by neighbor index, weights are strictly positive and there are no
/// self-loops. Immutable once built; concurrent reads are safe.
class Graph {
public:
    Graph() = default;

    std::size_t node_count() const noexcept { return ids_.size(); }
    /// Number of (node, neighbor) entries; twice the undirected edge count.
    std::size_t adjacency_entries() const noexcept { return targets_.size(); }
    std::size_t edge_count() const noexcept { return targets_.size() / 2; }

    std::size_t degree(NodeIndex i) const { return offsets_[i + 1] - offsets_[i]; }
    std::span<const NodeIndex> neighbors(NodeIndex i) const {
        return {targets_.data() + offsets_[i], degree(i)};
    }
    std::span<const double> weights(NodeIndex i) const {
        return {weights_.data() + offsets_[i], degree(i)};
    }
    /// Running sum of weights within row i; last element is the weighted degree.
    std::span<const double> cumulative_weights(NodeIndex i) const {
        return {cumulative_.data() + offsets_[i], degree(i)};
    }

    /// Weight of edge (i, j), 0 if absent.
    double weight(NodeIndex i, NodeIndex j) const;

    /// True when at least one edge weight differs from 1.
    bool weighted() const noexcept { return weighted_; }

    const IdMap& ids() const noexcept { return ids_; }

    /// Nodes with no incident edge.
    std::vector<NodeIndex> isolated_nodes() const;

private:
    friend class GraphBuilder;

    IdMap ids_;
    std::vector<std::size_t> offsets_{0};
    std::vector<NodeIndex> targets_;
    std::vector<double> weights_;
    std::vector<double> cumulative_;
    bool weighted_ = false;
};

/// Accumulates edges by external id and freezes them into a Graph.
///
/// In undirected mode every input line adds its weight to the unordered pair.
/// In directed mode arcs are summed per direction first and the pair gets the
/// larger of the two sums, so a reciprocal citation "a b" / "b a" becomes one
/// edge of weight 1 instead of 2.
class GraphBuilder {
public:
    explicit GraphBuilder(bool directed_input = false) : directed_(directed_input) {}

    NodeIndex add_node(std::string_view id) { return ids_.intern(id); }

    /// Adds an edge; self-loops are counted and discarded. Throws DomainError
    /// for a non-positive or non-finite weight.
    void add_edge(std::string_view a, std::string_view b, double weight = 1.0);

    std::size_t self_loops_dropped() const noexcept { return self_loops_; }

    Graph build() const;

private:
    bool directed_;
    IdMap ids_;
    // key min << 32 | max; value (weight min->max, weight max->min)
    std::unordered_map<std::uint64_t, std::pair<double, double>> arcs_;
    std::size_t self_loops_ = 0;
};

struct GraphLoadResult {
    Graph graph;
    std::size_t self_loops_dropped = 0;
    std::size_t lines_read = 0;
};

/// Reads an edge list: "src dst" or "src dst weight" per line, '#' comments,
/// blank lines ignored. `extra_nodes` are registered after the edges so that
/// labelled but unconnected nodes keep an index.
GraphLoadResult load_graph(std::istream& in, bool directed_input, const std::string& source_name = "<edges>",
                           std::span<const std::string> extra_nodes = {});
GraphLoadResult load_graph_file(const std::string& path, bool directed_input,
                                std::span<const std::string> extra_nodes = {});

/// Writes each undirected edge once as "a b w".
void write_edge_list(std::ostream& out, const Graph& graph);

/// Thrown by sample_neighbor for a node without neighbors.
class IsolatedNodeError : public Error {
public:
    explicit IsolatedNodeError(NodeIndex node)
        : Error("node " + std::to_string(node) + " has no neighbors"), node_(node) {}
    NodeIndex node() const noexcept { return node_; }

private:
    NodeIndex node_;
};

/// Draws neighbor j of `node` with probability w(node, j) / sum_k w(node, k).
template <class Urbg>
NodeIndex sample_neighbor(const Graph& graph, NodeIndex node, Urbg& rng) {
    const auto cumulative = graph.cumulative_weights(node);
    if (cumulative.empty()) throw IsolatedNodeError(node);
    if (cumulative.size() == 1) return graph.neighbors(node)[0];
    std::uniform_real_distribution<double> uniform(0.0, cumulative.back());
    const double r = uniform(rng);
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
    if (it == cumulative.end()) --it;
    return graph.neighbors(node)[static_cast<std::size_t>(it - cumulative.begin())];
}

}  // namespace gvnr
