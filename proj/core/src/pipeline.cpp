#include "gvnr/pipeline.hpp"

#include "gvnr/errors.hpp"
#include "gvnr/format.hpp"

#include <map>
#include <ostream>

namespace gvnr {

void PipelineConfig::set_seed(std::uint64_t seed) {
    walks.seed = seed;
    train.seed = seed;
    eval.seed = seed;
}

void PipelineConfig::set_threads(unsigned threads) {
    walks.threads = threads;
    train.threads = threads;
}

DenseMatrix text_node_features(const TextEmbeddingModel& model, RepresentationMode mode) {
    DenseMatrix f(model.node_count(), model.dim());
    std::vector<double> ctx(model.dim());
    for (NodeIndex i = 0; i < model.node_count(); ++i) {
        auto row = f.row(i);
        const auto u = model.target.row(i);
        std::copy(u.begin(), u.end(), row.begin());
        if (mode == RepresentationMode::target_plus_context) {
            model.context_vector(i, ctx);
            for (std::size_t a = 0; a < row.size(); ++a) row[a] += ctx[a];
        }
    }
    return f;
}

namespace {

PipelineRun train_and_evaluate(const PipelineConfig& cfg, const CoocMatrix& thresholded, const Graph& graph,
                               const LabeledNodes& labels, const TextData* text) {
    PipelineRun run;
    run.nnz = thresholded.nnz();
    DenseMatrix features;
    if (text) {
        TextTrainResult trained = train_text(thresholded, graph.ids(), *text, cfg.train);
        features = text_node_features(trained.model, cfg.representation);
        run.history = std::move(trained.history);
    } else {
        TrainResult trained = train(thresholded, graph.ids(), cfg.train);
        features = node_features(trained.model, cfg.representation);
        run.history = std::move(trained.history);
    }
    run.report = evaluate(features, labels, cfg.ratios, cfg.eval);
    return run;
}

}  // namespace

PipelineRun run_pipeline(const PipelineConfig& cfg, const Graph& graph, const LabeledNodes& labels, const TextData* text) {
    cfg.train.validate();
    if (!(cfg.x_min >= 0.0)) throw DomainError("x_min must be >= 0");
    if (labels.labels.size() != graph.node_count()) throw DomainError("labels are not aligned with the graph");
    const WalkCorpus corpus = generate_walks(graph, cfg.walks);
    const CoocMatrix raw = build_cooc(corpus, graph.node_count(), cfg.window, cfg.walks.threads);
    const CoocMatrix x = apply_threshold(raw, cfg.x_min);
    PipelineRun run = train_and_evaluate(cfg, x, graph, labels, text);
    run.walk_visits = corpus.total_visits();
    run.nnz_before_threshold = raw.nnz();
    return run;
}

std::string to_string(SweepParameter p) {
    switch (p) {
        case SweepParameter::x_min: return "x_min";
        case SweepParameter::k: return "k";
        case SweepParameter::l: return "l";
        case SweepParameter::c: return "c";
    }
    return "?";
}

std::optional<SweepParameter> parse_sweep_parameter(std::string_view name) {
    if (name == "x_min" || name == "x-min" || name == "xmin") return SweepParameter::x_min;
    if (name == "k") return SweepParameter::k;
    if (name == "l" || name == "window") return SweepParameter::l;
    if (name == "c") return SweepParameter::c;
    return std::nullopt;
}

SweepTable sweep(const PipelineConfig& base, SweepParameter parameter, std::span<const double> values, const Graph& graph,
                 const LabeledNodes& labels, const TextData* text) {
    if (values.empty()) throw DomainError("sweep needs at least one value");
    SweepTable table{parameter, {}, {}};

    // Validate the whole grid before spending time on walks.
    std::vector<PipelineConfig> configs;
    for (double v : values) {
        PipelineConfig cfg = base;
        switch (parameter) {
            case SweepParameter::x_min:
                if (!(v >= 0.0)) throw DomainError("x_min must be >= 0, got " + format_double(v));
                cfg.x_min = v;
                break;
            case SweepParameter::k: cfg.train.zero_ratio = v; break;
            case SweepParameter::c: cfg.train.shift = v; break;
            case SweepParameter::l:
                if (!(v >= 1.0) || v != static_cast<double>(static_cast<std::size_t>(v)))
                    throw DomainError("window l must be a positive integer, got " + format_double(v));
                cfg.window = static_cast<std::size_t>(v);
                break;
        }
        cfg.train.validate();
        configs.push_back(std::move(cfg));
    }

    const WalkCorpus corpus = generate_walks(graph, base.walks);
    std::map<std::size_t, CoocMatrix> raw_by_window;
    for (std::size_t idx = 0; idx < values.size(); ++idx) {
        const PipelineConfig& cfg = configs[idx];
        auto it = raw_by_window.find(cfg.window);
        if (it == raw_by_window.end())
            it = raw_by_window.emplace(cfg.window, build_cooc(corpus, graph.node_count(), cfg.window, cfg.walks.threads)).first;
        const CoocMatrix x = apply_threshold(it->second, cfg.x_min);
        PipelineRun run = train_and_evaluate(cfg, x, graph, labels, text);
        for (const auto& r : run.report.results) table.rows.push_back({values[idx], r.ratio, r.mean, r.stddev});
        table.reports.push_back(std::move(run.report));
    }
    return table;
}

void write_sweep_csv(std::ostream& out, const SweepTable& table) {
    out << "parameter,value,ratio,mean,std\n";
    for (const auto& r : table.rows)
        out << to_string(table.parameter) << ',' << format_double(r.value) << ',' << format_double(r.ratio) << ','
            << format_double(r.mean) << ',' << format_double(r.stddev) << '\n';
}

}  // namespace gvnr
