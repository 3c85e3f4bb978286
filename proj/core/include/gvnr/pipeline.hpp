#pragma once

#include "gvnr/classify.hpp"
#include "gvnr/cooc.hpp"
#include "gvnr/graph.hpp"
#include "gvnr/text.hpp"
#include "gvnr/trainer.hpp"
#include "gvnr/walks.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gvnr {

/// Every knob of walks -> co-occurrence -> training -> evaluation. Defaults
/// are the reference settings (gamma 80, t 40, l 5, d 80, c 1, x_min 1, k 1).
struct PipelineConfig {
    WalkOptions walks;
    std::size_t window = 5;
    double x_min = 1.0;
    TrainConfig train;
    RepresentationMode representation = RepresentationMode::target;
    std::vector<double> ratios{0.1, 0.2, 0.3, 0.4, 0.5};
    EvalOptions eval;

    /// Uses one seed for walks, training and splits.
    void set_seed(std::uint64_t seed);
    void set_threads(unsigned threads);
};

struct PipelineRun {
    EvalReport report;
    std::vector<EpochStats> history;
    std::size_t walk_visits = 0;
    std::size_t nnz_before_threshold = 0;
    std::size_t nnz = 0;
};

/// Features for classification: U, or U plus the context side.
DenseMatrix text_node_features(const TextEmbeddingModel& model, RepresentationMode mode);

/// Runs the full chain. With `text` the node context side is the document
/// average (text model); otherwise the plain model.
PipelineRun run_pipeline(const PipelineConfig& cfg, const Graph& graph, const LabeledNodes& labels,
                         const TextData* text = nullptr);

enum class SweepParameter { x_min, k, l, c };

std::string to_string(SweepParameter p);
std::optional<SweepParameter> parse_sweep_parameter(std::string_view name);

struct SweepRow {
    double value;
    double ratio;
    double mean;
    double stddev;
};

struct SweepTable {
    SweepParameter parameter;
    std::vector<SweepRow> rows;
    std::vector<EvalReport> reports;  // one per value
};

/// Re-runs the pipeline for each value of one parameter. The walk corpus is
/// generated once; co-occurrence matrices are rebuilt only when the window
/// changes.
SweepTable sweep(const PipelineConfig& base, SweepParameter parameter, std::span<const double> values, const Graph& graph,
                 const LabeledNodes& labels, const TextData* text = nullptr);

/// "parameter,value,ratio,mean,std" rows.
void write_sweep_csv(std::ostream& out, const SweepTable& table);

}  // namespace gvnr
