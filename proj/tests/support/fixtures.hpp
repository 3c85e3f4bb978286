#pragma once

// Synthetic graphs, corpora and brute-force references shared by the unit
// and acceptance suites.

#include <gvnr/classify.hpp>
#include <gvnr/cooc.hpp>
#include <gvnr/graph.hpp>
#include <gvnr/text.hpp>
#include <gvnr/walks.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace gvnr::testing {

inline Graph graph_from_lines(const std::vector<std::string>& lines, bool directed = false) {
    std::ostringstream os;
    for (const auto& l : lines) os << l << '\n';
    std::istringstream in(os.str());
    return load_graph(in, directed).graph;
}

/// Dense reference: for every walk, every ordered position pair (p, r) with
/// 1 <= |p - r| <= window contributes 1/|p - r| to X[w_p][w_r].
inline std::vector<std::vector<double>> brute_force_cooc(const std::vector<std::vector<NodeIndex>>& walks, std::size_t n,
                                                         std::size_t window) {
    std::vector<std::vector<double>> x(n, std::vector<double>(n, 0.0));
    for (const auto& w : walks)
        for (std::size_t p = 0; p < w.size(); ++p)
            for (std::size_t r = 0; r < w.size(); ++r) {
                const std::size_t dist = p > r ? p - r : r - p;
                if (dist >= 1 && dist <= window) x[w[p]][w[r]] += 1.0 / static_cast<double>(dist);
            }
    return x;
}

inline std::vector<std::vector<NodeIndex>> random_walk_sequences(std::mt19937_64& rng, std::size_t n, std::size_t max_walks,
                                                                 std::size_t max_length) {
    std::uniform_int_distribution<std::size_t> walk_count(1, max_walks), length(1, max_length);
    std::uniform_int_distribution<NodeIndex> node(0, static_cast<NodeIndex>(n - 1));
    std::vector<std::vector<NodeIndex>> walks(walk_count(rng));
    for (auto& w : walks) {
        w.resize(length(rng));
        for (auto& v : w) v = node(rng);
    }
    return walks;
}

inline IdMap numbered_ids(std::size_t n, const std::string& prefix = "n") {
    IdMap ids;
    for (std::size_t i = 0; i < n; ++i) ids.intern(prefix + std::to_string(i));
    return ids;
}

/// Symmetric sparse matrix from (i, j, value) triples, both directions added.
inline CoocMatrix symmetric_matrix(std::size_t n, const std::vector<std::tuple<NodeIndex, NodeIndex, double>>& entries,
                                   std::size_t window = 1, double x_min = 0.0) {
    std::vector<CoocMatrix::Row> rows(n);
    for (auto [i, j, v] : entries) {
        rows[i].emplace_back(j, v);
        if (i != j) rows[j].emplace_back(i, v);
    }
    return CoocMatrix::from_rows(std::move(rows), window, x_min);
}

/// Planted-partition graph: `classes` communities of `per_class` nodes, each
/// node linking to `out_degree` partners drawn inside its community with
/// probability `p_in`.
struct CommunityGraph {
    Graph graph;
    LabeledNodes labels;
    std::vector<std::string> edge_lines;
    std::vector<std::string> label_lines;
    std::vector<int> community;
};

inline CommunityGraph community_graph(std::size_t classes, std::size_t per_class, std::size_t out_degree, double p_in,
                                      std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const std::size_t n = classes * per_class;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> any(0, n - 1), member(0, per_class - 1);
    CommunityGraph g;
    g.community.resize(n);
    GraphBuilder builder;
    for (std::size_t v = 0; v < n; ++v) {
        g.community[v] = static_cast<int>(v % classes);
        builder.add_node("v" + std::to_string(v));
    }
    for (std::size_t v = 0; v < n; ++v)
        for (std::size_t e = 0; e < out_degree; ++e) {
            std::size_t w = u(rng) < p_in ? member(rng) * classes + v % classes : any(rng);
            if (w == v) continue;
            const std::string a = "v" + std::to_string(v), b = "v" + std::to_string(w);
            builder.add_edge(a, b);
            g.edge_lines.push_back(a + " " + b);
        }
    g.graph = builder.build();
    std::ostringstream labels;
    for (std::size_t v = 0; v < n; ++v) {
        g.label_lines.push_back("v" + std::to_string(v) + " c" + std::to_string(g.community[v]));
        labels << g.label_lines.back() << '\n';
    }
    std::istringstream in(labels.str());
    g.labels = read_labels(in, g.graph.ids());
    return g;
}

/// Documents for a community graph: each node draws `length` tokens, mostly
/// from its community's topic words, sometimes from shared filler words.
inline std::vector<std::string> community_documents(const CommunityGraph& g, std::size_t topic_words, std::size_t length,
                                                    double p_topic, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick(0, topic_words - 1);
    std::vector<std::string> docs(g.community.size());
    for (std::size_t v = 0; v < docs.size(); ++v) {
        std::string text;
        for (std::size_t t = 0; t < length; ++t) {
            if (!text.empty()) text += ' ';
            if (u(rng) < p_topic)
                text += "topic" + std::to_string(g.community[v]) + "w" + std::to_string(pick(rng));
            else
                text += "filler" + std::to_string(pick(rng));
        }
        docs[v] = text;
    }
    return docs;
}

/// Preferential-attachment graph with Cora's size: 2708 nodes, each new node
/// attaching to two existing nodes chosen proportionally to degree, giving a
/// heavy-tailed degree distribution and about 5400 edges.
inline Graph cora_scale_graph(std::uint64_t seed) {
    const std::size_t n = 2708;
    std::mt19937_64 rng(seed);
    std::vector<NodeIndex> endpoints{0, 1};
    GraphBuilder builder;
    for (std::size_t v = 0; v < n; ++v) builder.add_node(std::to_string(v));
    builder.add_edge("0", "1");
    for (std::size_t v = 2; v < n; ++v) {
        for (int e = 0; e < 2; ++e) {
            std::uniform_int_distribution<std::size_t> pick(0, endpoints.size() - 1);
            const NodeIndex w = endpoints[pick(rng)];
            builder.add_edge(std::to_string(v), std::to_string(w));
            endpoints.push_back(w);
            endpoints.push_back(static_cast<NodeIndex>(v));
        }
    }
    return builder.build();
}

/// Least-squares slope of log(frequency) against log(rank) for the positive
/// counts, sorted descending. Returns the negated slope (power-law exponent).
inline double rank_frequency_exponent(std::vector<std::size_t> counts) {
    std::sort(counts.begin(), counts.end(), std::greater<>());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, m = 0;
    for (std::size_t r = 0; r < counts.size() && counts[r] > 0; ++r) {
        const double lx = std::log(static_cast<double>(r + 1)), ly = std::log(static_cast<double>(counts[r]));
        sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly, m += 1;
    }
    return -(m * sxy - sx * sy) / (m * sxx - sx * sx);
}

/// Scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("gvnr-" + tag + "-" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string file(const std::string& name) const { return (path_ / name).string(); }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace gvnr::testing
