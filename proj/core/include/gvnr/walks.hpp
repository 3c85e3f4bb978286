#pragma once

#include "gvnr/graph.hpp"
#include "gvnr/types.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace gvnr {

struct WalkOptions {
    std::size_t walks_per_node = 80;  // gamma
    std::size_t walk_length = 40;     // t, counted in nodes
    std::uint64_t seed = 1;
    unsigned threads = 1;

    void validate() const;
};

/// Multiset of truncated random walks, stored back to back.
class WalkCorpus {
public:
    WalkCorpus() = default;

    /// Builds a corpus from explicit sequences (persisted corpora, tests).
    static WalkCorpus from_sequences(const std::vector<std::vector<NodeIndex>>& walks, std::size_t walk_length,
                                     std::size_t walks_per_node, std::uint64_t seed);

    std::size_t size() const noexcept { return offsets_.size() - 1; }
    std::span<const NodeIndex> walk(std::size_t w) const {
        return {nodes_.data() + offsets_[w], offsets_[w + 1] - offsets_[w]};
    }
    /// Sum of walk lengths.
    std::size_t total_visits() const noexcept { return nodes_.size(); }

    std::size_t walk_length() const noexcept { return walk_length_; }
    std::size_t walks_per_node() const noexcept { return walks_per_node_; }
    std::uint64_t seed() const noexcept { return seed_; }
    /// Start nodes skipped because they have no neighbor.
    const std::vector<NodeIndex>& isolated_nodes() const noexcept { return isolated_; }

    /// Visit count per node, for n nodes.
    std::vector<std::size_t> visit_counts(std::size_t n) const;

    friend bool operator==(const WalkCorpus&, const WalkCorpus&) = default;

private:
    friend WalkCorpus generate_walks(const Graph&, const WalkOptions&);

    std::vector<std::size_t> offsets_{0};
    std::vector<NodeIndex> nodes_;
    std::size_t walk_length_ = 0;
    std::size_t walks_per_node_ = 0;
    std::uint64_t seed_ = 0;
    std::vector<NodeIndex> isolated_;
};

/// gamma walks of up to t nodes from every non-isolated node. Walk w of start
/// node v draws from its own engine seeded with derive_seed(seed, v, w), so
/// the corpus does not depend on the thread count.
WalkCorpus generate_walks(const Graph& graph, const WalkOptions& options);

/// One walk per line, space separated external ids.
void write_walks(std::ostream& out, const WalkCorpus& corpus, const IdMap& ids);
WalkCorpus read_walks(std::istream& in, const IdMap& ids, const std::string& source_name = "<walks>");

}  // namespace gvnr
