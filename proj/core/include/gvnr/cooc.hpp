#pragma once

#include "gvnr/types.hpp"
#include "gvnr/walks.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace gvnr {

/// Sparse node co-occurrence matrix in CSR form.
///
/// Only strictly positive values are stored and columns are sorted within a
/// row. After thresholding every stored value is >= x_min.
class CoocMatrix {
public:
    using Row = std::vector<std::pair<NodeIndex, double>>;

    CoocMatrix() = default;

    /// Freezes unsorted rows; non-positive values are dropped.
    static CoocMatrix from_rows(std::vector<Row> rows, std::size_t window, double x_min);

    std::size_t n() const noexcept { return offsets_.size() - 1; }
    std::size_t nnz() const noexcept { return columns_.size(); }
    std::size_t window() const noexcept { return window_; }
    double x_min() const noexcept { return x_min_; }

    std::span<const NodeIndex> row_columns(NodeIndex i) const {
        return {columns_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
    }
    std::span<const double> row_values(NodeIndex i) const {
        return {values_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
    }
    /// n_i: number of stored entries in row i.
    std::size_t row_positive_count(NodeIndex i) const { return offsets_[i + 1] - offsets_[i]; }

    /// x_ij, 0 when not stored.
    double value(NodeIndex i, NodeIndex j) const;
    bool contains(NodeIndex i, NodeIndex j) const { return value(i, j) > 0.0; }

    friend bool operator==(const CoocMatrix&, const CoocMatrix&) = default;

private:
    friend CoocMatrix apply_threshold(const CoocMatrix&, double);

    std::vector<std::size_t> offsets_{0};
    std::vector<NodeIndex> columns_;
    std::vector<double> values_;
    std::size_t window_ = 0;
    double x_min_ = 0.0;
};

/// For every walk position p and offset q in 1..window, adds 1/q to
/// X[w_p][w_{p+q}] and X[w_{p+q}][w_p]; equivalently every center looks q
/// steps both ways. `threads` > 1 accumulates per-worker partial matrices
/// merged row by row.
CoocMatrix build_cooc(const WalkCorpus& corpus, std::size_t n, std::size_t window, unsigned threads = 1);

/// Removes entries with value < x_min (entries equal to x_min stay).
CoocMatrix apply_threshold(const CoocMatrix& x, double x_min);

/// p_i = n_i / n.
double row_positive_proportion(const CoocMatrix& x, NodeIndex i);

/// Header "n nnz window x_min", then one "i j x_ij" triplet per stored entry
/// using external ids.
void write_cooc(std::ostream& out, const CoocMatrix& x, const IdMap& ids);

struct LoadedCooc {
    CoocMatrix matrix;
    IdMap ids;
};

/// Reads the triplet format. Row ids are interned in order of first
/// appearance as a row, so a matrix written by write_cooc keeps its indexing
/// as long as no row is empty. With `known_ids` the existing mapping is used
/// and the header n must match it.
LoadedCooc read_cooc(std::istream& in, const std::string& source_name = "<cooc>", const IdMap* known_ids = nullptr);

}  // namespace gvnr
