#include "gvnr/graph.hpp"

#include "gvnr/format.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

namespace gvnr {

double Graph::weight(NodeIndex i, NodeIndex j) const {
    const auto row = neighbors(i);
    auto it = std::lower_bound(row.begin(), row.end(), j);
    if (it == row.end() || *it != j) return 0.0;
    return weights(i)[static_cast<std::size_t>(it - row.begin())];
}

std::vector<NodeIndex> Graph::isolated_nodes() const {
    std::vector<NodeIndex> out;
    for (NodeIndex i = 0; i < node_count(); ++i)
        if (degree(i) == 0) out.push_back(i);
    return out;
}

void GraphBuilder::add_edge(std::string_view a, std::string_view b, double weight) {
    if (!(weight > 0.0) || !std::isfinite(weight))
        throw DomainError("edge weight must be positive and finite, got " + format_double(weight));
    const NodeIndex ia = ids_.intern(a);
    const NodeIndex ib = ids_.intern(b);
    if (ia == ib) {
        ++self_loops_;
        return;
    }
    const bool forward = ia < ib;
    const std::uint64_t key = (std::uint64_t{std::min(ia, ib)} << 32) | std::max(ia, ib);
    auto& slot = arcs_[key];
    (forward ? slot.first : slot.second) += weight;
}

Graph GraphBuilder::build() const {
    const std::size_t n = ids_.size();
    std::vector<std::vector<std::pair<NodeIndex, double>>> rows(n);
    for (const auto& [key, w] : arcs_) {
        const double weight = directed_ ? std::max(w.first, w.second) : w.first + w.second;
        const auto lo = static_cast<NodeIndex>(key >> 32);
        const auto hi = static_cast<NodeIndex>(key & 0xffffffffU);
        rows[lo].emplace_back(hi, weight);
        rows[hi].emplace_back(lo, weight);
    }

    Graph g;
    g.ids_ = ids_;
    g.offsets_.assign(1, 0);
    g.offsets_.reserve(n + 1);
    for (auto& row : rows) {
        std::sort(row.begin(), row.end());
        double running = 0.0;
        for (const auto& [j, w] : row) {
            g.targets_.push_back(j);
            g.weights_.push_back(w);
            running += w;
            g.cumulative_.push_back(running);
            if (w != 1.0) g.weighted_ = true;
        }
        g.offsets_.push_back(g.targets_.size());
    }
    return g;
}

GraphLoadResult load_graph(std::istream& in, bool directed_input, const std::string& source_name,
                           std::span<const std::string> extra_nodes) {
    GraphBuilder builder(directed_input);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view view = chomp(line);
        const auto fields = split_fields(view);
        if (fields.empty() || fields[0].front() == '#') continue;
        if (fields.size() != 2 && fields.size() != 3)
            throw ParseError(source_name, line_no, "expected 'src dst [weight]', got " +
                                                       std::to_string(fields.size()) + " fields");
        double w = 1.0;
        if (fields.size() == 3 && !parse_double(fields[2], w))
            throw ParseError(source_name, line_no, "invalid weight '" + std::string(fields[2]) + "'");
        if (!(w > 0.0) || !std::isfinite(w))
            throw ParseError(source_name, line_no, "weight must be positive and finite, got " + std::string(fields[2]));
        builder.add_edge(fields[0], fields[1], w);
    }
    if (in.bad()) throw IoError("read failure on " + source_name);
    for (const auto& id : extra_nodes) builder.add_node(id);

    GraphLoadResult result{builder.build(), builder.self_loops_dropped(), line_no};
    if (result.graph.edge_count() == 0) throw DomainError(source_name + ": graph has no edges");
    return result;
}

GraphLoadResult load_graph_file(const std::string& path, bool directed_input,
                                std::span<const std::string> extra_nodes) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open edge file '" + path + "'");
    return load_graph(in, directed_input, path, extra_nodes);
}

void write_edge_list(std::ostream& out, const Graph& graph) {
    const auto& ids = graph.ids();
    std::string line;
    for (NodeIndex i = 0; i < graph.node_count(); ++i) {
        const auto nbrs = graph.neighbors(i);
        const auto ws = graph.weights(i);
        for (std::size_t k = 0; k < nbrs.size(); ++k) {
            if (nbrs[k] < i) continue;
            line.assign(ids.name(i));
            line.push_back(' ');
            line.append(ids.name(nbrs[k]));
            line.push_back(' ');
            line.append(format_double(ws[k]));
            line.push_back('\n');
            out << line;
        }
    }
}

}  // namespace gvnr
