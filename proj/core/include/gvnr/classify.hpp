#pragma once

#include "gvnr/dense.hpp"
#include "gvnr/types.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace gvnr {

/// Per-node label sets. Unlabelled nodes have an empty list.
struct LabeledNodes {
    std::vector<std::vector<LabelId>> labels;
    std::vector<std::string> label_names;
    bool multi_label = false;

    std::size_t label_count() const noexcept { return label_names.size(); }
    std::vector<NodeIndex> labeled_nodes() const;
};

/// "id label[,label...]" per line. Label ids are assigned in sorted name
/// order. Nodes absent from `ids` are skipped and counted in `unknown`.
LabeledNodes read_labels(std::istream& in, const IdMap& ids, const std::string& source_name = "<labels>",
                         std::size_t* unknown = nullptr);

/// Ids listed in a label file, in file order (used to register unconnected nodes).
std::vector<std::string> read_label_ids(std::istream& in);

struct FitOptions {
    std::size_t max_iterations = 500;
    double gradient_tolerance = 1e-6;
    std::size_t history = 10;  // L-BFGS memory
};

/// Result of one unregularized binary logistic regression.
struct BinaryFit {
    std::vector<double> weights;  // d feature weights followed by the bias
    double loss = 0.0;            // mean negative log-likelihood
    double gradient_norm = 0.0;
    std::size_t iterations = 0;
};

/// Minimizes the mean logistic loss with L-BFGS and backtracking line search.
BinaryFit fit_binary_logreg(const DenseMatrix& features, std::span<const NodeIndex> rows, std::span<const std::uint8_t> targets,
                            const FitOptions& options = {});

/// Mean logistic loss of `weights` (d + 1 values) on the given rows.
double logistic_loss(const DenseMatrix& features, std::span<const NodeIndex> rows, std::span<const std::uint8_t> targets,
                     std::span<const double> weights);

struct OvrClassifier {
    DenseMatrix weights;  // label_count x (d + 1); last column is the bias
    /// Labels without positive (or without negative) training examples; their
    /// scores are the constant -inf (+inf).
    std::vector<LabelId> constant_labels;
    std::vector<BinaryFit> fits;

    std::size_t dim() const noexcept { return weights.cols() - 1; }
    double score(std::span<const double> x, LabelId label) const;
};

OvrClassifier fit_logreg_ovr(const DenseMatrix& features, const LabeledNodes& labels, std::span<const NodeIndex> train_nodes,
                             const FitOptions& options = {});

/// Multi-class: argmax label. Multi-label: the k_v best labels where k_v is
/// the node's true label count. Ties go to the lowest label id.
std::vector<std::vector<LabelId>> predict(const OvrClassifier& classifier, const DenseMatrix& features,
                                          std::span<const NodeIndex> nodes, const LabeledNodes& labels);

struct Scores {
    double accuracy = 0.0;  // exact set match
    double micro_f1 = 0.0;
    double macro_f1 = 0.0;
};
Scores score_predictions(const std::vector<std::vector<LabelId>>& predicted, std::span<const NodeIndex> nodes,
                         const LabeledNodes& labels);

struct RatioResult {
    double ratio = 0.0;
    double mean = 0.0;
    double stddev = 0.0;
    double macro_f1_mean = 0.0;
    std::vector<double> runs;
};

struct EvalReport {
    std::string metric;  // "accuracy" or "micro_f1"
    std::size_t repetitions = 0;
    std::uint64_t seed = 0;
    std::vector<RatioResult> results;
    std::vector<std::string> warnings;
};

struct EvalOptions {
    std::size_t repetitions = 10;
    std::uint64_t seed = 1;
    FitOptions fit;
};

/// Repeated random train/test splits per ratio (stratified per class for
/// single-label data), one-vs-rest fit, accuracy or micro-F1 on the test part.
EvalReport evaluate(const DenseMatrix& features, const LabeledNodes& labels, std::span<const double> ratios,
                    const EvalOptions& options = {});

/// Aligned text table, one row per ratio.
std::string format_report(const EvalReport& report);
/// "ratio,value,mean,std" rows; `value` names the swept setting, or "-".
void write_report_csv(std::ostream& out, const EvalReport& report, const std::string& value = "-", bool header = true);

struct ScoredWord {
    WordIndex word;
    double similarity;
};

/// Rows of `words` ranked by descending cosine similarity to `query`, ties by
/// lowest index. Rows with zero norm score 0. Throws DomainError for a zero
/// query.
std::vector<ScoredWord> nearest_words(std::span<const double> query, const DenseMatrix& words, std::size_t top_n,
                                      std::span<const WordIndex> exclude = {});

}  // namespace gvnr
