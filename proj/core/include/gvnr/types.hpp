#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace gvnr {

using NodeIndex = std::uint32_t;
using WordIndex = std::uint32_t;
using LabelId = std::uint32_t;

/// Engine used everywhere a random source is needed.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derives an independent stream seed from a base seed and a tuple of
/// coordinates, e.g. (seed, start_node, walk_index). Order matters.
template <class... Ts>
constexpr std::uint64_t derive_seed(std::uint64_t seed, Ts... coords) noexcept {
    std::uint64_t h = mix64(seed);
    ((h = mix64(h ^ static_cast<std::uint64_t>(coords))), ...);
    return h;
}

/// Dense bijection between external string identifiers and 0..size()-1.
class IdMap {
public:
    /// Returns the index of `id`, assigning the next free one if unseen.
    NodeIndex intern(std::string_view id) {
        auto [it, inserted] = index_.try_emplace(std::string(id), static_cast<NodeIndex>(names_.size()));
        if (inserted) names_.emplace_back(id);
        return it->second;
    }

    std::optional<NodeIndex> find(std::string_view id) const {
        auto it = index_.find(std::string(id));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    const std::string& name(NodeIndex i) const { return names_.at(i); }
    std::size_t size() const noexcept { return names_.size(); }
    const std::vector<std::string>& names() const noexcept { return names_; }

    friend bool operator==(const IdMap& a, const IdMap& b) { return a.names_ == b.names_; }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, NodeIndex> index_;
};

}  // namespace gvnr
