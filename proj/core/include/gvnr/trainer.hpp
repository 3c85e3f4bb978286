#pragma once

#include "gvnr/cooc.hpp"
#include "gvnr/dense.hpp"
#include "gvnr/types.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace gvnr {

enum class Objective {
    gvnr,   // unweighted least squares on log(c + x) over positives and sampled zeros
    glove,  // f(x)-weighted least squares on log(x) over positives only
};

struct TrainConfig {
    std::size_t dim = 80;
    double shift = 1.0;       // c, in (0, 1]
    double zero_ratio = 1.0;  // k, expected sampled zeros per positive entry
    std::size_t epochs = 10;
    double learning_rate = 0.05;
    std::uint64_t seed = 1;
    Objective objective = Objective::gvnr;
    double x_max = 10.0;
    double glove_exponent = 0.75;
    /// Workers for lock-free parallel updates; 1 is bit-reproducible.
    unsigned threads = 1;

    void validate() const;
};

/// Target vectors U, context vectors V and their biases.
struct EmbeddingModel {
    DenseMatrix target;
    DenseMatrix context;
    std::vector<double> target_bias;
    std::vector<double> context_bias;
    IdMap ids;

    std::size_t dim() const noexcept { return target.cols(); }
    std::size_t node_count() const noexcept { return target.rows(); }
};

/// One selected matrix entry. Sampled zeros carry value 0.
struct Cell {
    NodeIndex row;
    NodeIndex col;
    double value;

    friend bool operator==(const Cell&, const Cell&) = default;
    friend auto operator<=>(const Cell&, const Cell&) = default;
};

struct EpochStats {
    std::size_t epoch = 0;  // 1-based
    std::size_t positive_updates = 0;
    std::size_t zero_updates = 0;
    /// Mean of (weighted) squared residuals over all visited cells, measured
    /// just before each cell's update.
    double mean_squared_residual = 0.0;
    /// Same, restricted to positive cells and unweighted.
    double positive_mean_squared_residual = 0.0;

    std::size_t updates() const noexcept { return positive_updates + zero_updates; }
};

/// Optional instrumentation hooks.
struct TrainObserver {
    /// Called with the shuffled cells of each epoch before they are visited.
    std::function<void(std::size_t epoch, std::span<const Cell> cells)> on_cells;
    std::function<void(const EpochStats&)> on_epoch;
};

struct TrainResult {
    EmbeddingModel model;
    std::vector<EpochStats> history;
};

/// alpha_i: k * p / (1 - p) when p <= 1 / (k + 1), 1 otherwise.
double zero_sample_rate(double p, double k);

/// Zero columns of `row`, each included independently with probability
/// alpha_i. Draws the count from Binomial(n - n_i, alpha_i) and then that many
/// distinct zero columns uniformly.
std::vector<NodeIndex> sample_zero_entries(const CoocMatrix& x, NodeIndex row, double k, Rng& rng);

/// GloVe weighting (x / x_max)^exponent below x_max, 1 above.
double glove_weight(double x, double x_max, double exponent);

/// u_i . v_j + b^U_i + b^V_j - log(c + x_ij).
double pair_residual(const EmbeddingModel& model, NodeIndex i, NodeIndex j, double x, double c);

/// Gradient of r^2 for one cell.
struct CellGradient {
    double residual = 0.0;
    std::vector<double> target;   // d/du_i = 2r v_j
    std::vector<double> context;  // d/dv_j = 2r u_i
    double target_bias = 0.0;
    double context_bias = 0.0;
};
CellGradient cell_gradient(const EmbeddingModel& model, NodeIndex i, NodeIndex j, double x, double c);

/// Cells visited in one epoch: every stored entry of x, plus (gvnr) freshly
/// sampled zero entries per row, shuffled.
std::vector<Cell> plan_epoch(const CoocMatrix& x, const TrainConfig& cfg, Rng& rng);

/// Fits U, V and biases with per-parameter AdaGrad. Throws TrainingDiverged.
TrainResult train(const CoocMatrix& x, const IdMap& ids, const TrainConfig& cfg, const TrainObserver& observer = {});

enum class RepresentationMode {
    target,               // u_i
    target_plus_context,  // u_i + v_i
};

std::vector<double> node_representation(const EmbeddingModel& model, NodeIndex i,
                                        RepresentationMode mode = RepresentationMode::target);
/// All node representations stacked row by row.
DenseMatrix node_features(const EmbeddingModel& model, RepresentationMode mode = RepresentationMode::target);

/// Header "rows cols", then "name v1 ... vd" per row.
void write_embeddings(std::ostream& out, const DenseMatrix& vectors, const std::vector<std::string>& names);

struct LoadedEmbeddings {
    DenseMatrix vectors;
    IdMap ids;
};
LoadedEmbeddings read_embeddings(std::istream& in, const std::string& source_name = "<embeddings>");

/// "name b_u b_v" per node.
void write_biases(std::ostream& out, const std::vector<double>& target_bias, const std::vector<double>& context_bias,
                  const std::vector<std::string>& names);

}  // namespace gvnr
