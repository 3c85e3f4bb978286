#include "gvnr/walks.hpp"

#include "gvnr/format.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <string>
#include <thread>

namespace gvnr {

void WalkOptions::validate() const {
    if (walks_per_node < 1) throw DomainError("walks per node must be >= 1");
    if (walk_length < 2) throw DomainError("walk length must be >= 2");
    if (threads < 1) throw DomainError("thread count must be >= 1");
}

WalkCorpus WalkCorpus::from_sequences(const std::vector<std::vector<NodeIndex>>& walks, std::size_t walk_length,
                                      std::size_t walks_per_node, std::uint64_t seed) {
    WalkCorpus c;
    c.walk_length_ = walk_length;
    c.walks_per_node_ = walks_per_node;
    c.seed_ = seed;
    for (const auto& w : walks) {
        c.nodes_.insert(c.nodes_.end(), w.begin(), w.end());
        c.offsets_.push_back(c.nodes_.size());
    }
    return c;
}

std::vector<std::size_t> WalkCorpus::visit_counts(std::size_t n) const {
    std::vector<std::size_t> counts(n, 0);
    for (NodeIndex v : nodes_) ++counts.at(v);
    return counts;
}

WalkCorpus generate_walks(const Graph& graph, const WalkOptions& options) {
    options.validate();
    const std::size_t gamma = options.walks_per_node;
    const std::size_t t = options.walk_length;

    WalkCorpus corpus;
    corpus.walk_length_ = t;
    corpus.walks_per_node_ = gamma;
    corpus.seed_ = options.seed;

    std::vector<NodeIndex> starts;
    for (NodeIndex v = 0; v < graph.node_count(); ++v) {
        if (graph.degree(v) == 0)
            corpus.isolated_.push_back(v);
        else
            starts.push_back(v);
    }

    const std::size_t walk_count = starts.size() * gamma;
    std::vector<NodeIndex> slots(walk_count * t);
    std::vector<std::size_t> lengths(walk_count, 0);

    auto run_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t w = begin; w < end; ++w) {
            const NodeIndex start = starts[w / gamma];
            Rng rng(derive_seed(options.seed, start, w % gamma));
            NodeIndex* out = slots.data() + w * t;
            out[0] = start;
            std::size_t len = 1;
            for (; len < t; ++len) {
                const NodeIndex cur = out[len - 1];
                if (graph.degree(cur) == 0) break;  // dead end: truncate
                out[len] = sample_neighbor(graph, cur, rng);
            }
            lengths[w] = len;
        }
    };

    const unsigned threads = std::min<std::size_t>(options.threads, std::max<std::size_t>(walk_count, 1));
    if (threads <= 1) {
        run_range(0, walk_count);
    } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (walk_count + threads - 1) / threads;
        for (unsigned k = 0; k < threads; ++k) {
            const std::size_t b = std::min(walk_count, k * chunk);
            const std::size_t e = std::min(walk_count, b + chunk);
            pool.emplace_back(run_range, b, e);
        }
    }

    corpus.nodes_.reserve(walk_count * t);
    corpus.offsets_.reserve(walk_count + 1);
    for (std::size_t w = 0; w < walk_count; ++w) {
        const NodeIndex* src = slots.data() + w * t;
        corpus.nodes_.insert(corpus.nodes_.end(), src, src + lengths[w]);
        corpus.offsets_.push_back(corpus.nodes_.size());
    }
    return corpus;
}

void write_walks(std::ostream& out, const WalkCorpus& corpus, const IdMap& ids) {
    std::string line;
    for (std::size_t w = 0; w < corpus.size(); ++w) {
        line.clear();
        for (NodeIndex v : corpus.walk(w)) {
            if (!line.empty()) line.push_back(' ');
            line.append(ids.name(v));
        }
        line.push_back('\n');
        out << line;
    }
}

WalkCorpus read_walks(std::istream& in, const IdMap& ids, const std::string& source_name) {
    std::vector<std::vector<NodeIndex>> walks;
    std::string line;
    std::size_t line_no = 0;
    std::size_t longest = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto fields = split_fields(line);
        if (fields.empty()) continue;
        std::vector<NodeIndex> walk;
        walk.reserve(fields.size());
        for (auto f : fields) {
            auto idx = ids.find(f);
            if (!idx) throw ParseError(source_name, line_no, "unknown node id '" + std::string(f) + "'");
            walk.push_back(*idx);
        }
        longest = std::max(longest, walk.size());
        walks.push_back(std::move(walk));
    }
    return WalkCorpus::from_sequences(walks, longest, 0, 0);
}

}  // namespace gvnr
