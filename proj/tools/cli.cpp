#include "cli.hpp"

#include "CLI11.hpp"

#include <gvnr/classify.hpp>
#include <gvnr/cooc.hpp>
#include <gvnr/errors.hpp>
#include <gvnr/format.hpp>
#include <gvnr/graph.hpp>
#include <gvnr/pipeline.hpp>
#include <gvnr/text.hpp>
#include <gvnr/trainer.hpp>
#include <gvnr/walks.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

namespace gvnr::cli {

namespace {

class MissingFile : public Error {
public:
    explicit MissingFile(const std::string& path) : Error("no such file '" + path + "'") {}
};

/// Every flag of every subcommand lands here.
struct Options {
    std::uint64_t seed = 1;
    unsigned threads = 1;
    bool verbose = false;

    std::string edges, labels, docs, walks_in, cooc_in, embeddings, words, out, save_embeddings;
    bool directed_input = true;

    std::size_t walks_per_node = 80;
    std::size_t walk_length = 40;
    std::size_t window = 5;
    double x_min = 1.0;

    std::size_t dim = 80;
    double c = 1.0;
    double k = 1.0;
    std::size_t epochs = 0;  // 0: 10 for the node model, 4 for the text model
    double lr = 0.05;
    std::string objective = "gvnr";
    double x_max = 10.0;
    double glove_exponent = 0.75;
    std::string representation = "u";
    std::size_t min_count = 5;

    std::string ratios = "0.1..0.5";
    std::size_t repetitions = 10;

    std::vector<std::string> nodes;
    std::size_t top = 5;
    bool exclude_doc_words = false;

    std::string param;
    std::string values;
};

class Log {
public:
    Log(std::ostream& err, bool verbose) : err_(err), verbose_(verbose), start_(std::chrono::steady_clock::now()) {}

    template <class... Ts>
    void info(const Ts&... parts) {
        if (!verbose_) return;
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        err_ << '[' << std::fixed << std::setprecision(1) << secs << "s] ";
        (err_ << ... << parts) << '\n';
    }
    template <class... Ts>
    void warn(const Ts&... parts) {
        err_ << "warning: ";
        (err_ << ... << parts) << '\n';
    }

private:
    std::ostream& err_;
    bool verbose_;
    std::chrono::steady_clock::time_point start_;
};

std::ifstream open_in(const std::string& path) {
    if (!std::filesystem::exists(path)) throw MissingFile(path);
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    return out;
}

Objective parse_objective(const std::string& s) {
    if (s == "gvnr") return Objective::gvnr;
    if (s == "glove") return Objective::glove;
    throw DomainError("objective must be gvnr or glove, got '" + s + "'");
}

RepresentationMode parse_representation(const std::string& s) {
    if (s == "u") return RepresentationMode::target;
    if (s == "u+v") return RepresentationMode::target_plus_context;
    throw DomainError("representation must be 'u' or 'u+v', got '" + s + "'");
}

std::vector<double> parse_value_list(const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        double v = 0.0;
        if (!parse_double(item, v)) throw DomainError("invalid number '" + item + "' in list '" + text + "'");
        values.push_back(v);
    }
    if (values.empty()) throw DomainError("empty value list");
    return values;
}

TrainConfig train_config(const Options& o, std::size_t default_epochs) {
    TrainConfig cfg;
    cfg.dim = o.dim;
    cfg.shift = o.c;
    cfg.zero_ratio = o.k;
    cfg.epochs = o.epochs == 0 ? default_epochs : o.epochs;
    cfg.learning_rate = o.lr;
    cfg.seed = o.seed;
    cfg.objective = parse_objective(o.objective);
    cfg.x_max = o.x_max;
    cfg.glove_exponent = o.glove_exponent;
    cfg.threads = o.threads;
    cfg.validate();
    return cfg;
}

std::vector<std::string> label_ids(const Options& o) {
    if (o.labels.empty()) return {};
    auto in = open_in(o.labels);
    return read_label_ids(in);
}

Graph load_input_graph(const Options& o, Log& log) {
    const auto extra = label_ids(o);
    auto in = open_in(o.edges);
    GraphLoadResult loaded = load_graph(in, o.directed_input, o.edges, extra);
    log.info("graph: ", loaded.graph.node_count(), " nodes, ", loaded.graph.edge_count(), " edges",
             loaded.graph.weighted() ? " (weighted)" : "");
    if (loaded.self_loops_dropped > 0) log.warn(loaded.self_loops_dropped, " self-loops dropped");
    const auto isolated = loaded.graph.isolated_nodes();
    if (!isolated.empty()) log.warn(isolated.size(), " nodes have no edge and get no walks");
    return std::move(loaded.graph);
}

LabeledNodes load_labels(const Options& o, const IdMap& ids, Log& log) {
    auto in = open_in(o.labels);
    std::size_t unknown = 0;
    LabeledNodes labels = read_labels(in, ids, o.labels, &unknown);
    if (unknown > 0) log.warn(unknown, " labelled ids are not in the node set and were skipped");
    log.info("labels: ", labels.label_count(), " classes", labels.multi_label ? " (multi-label)" : "");
    return labels;
}

TextData load_text(const Options& o, const IdMap& ids, Log& log) {
    auto in = open_in(o.docs);
    std::size_t unknown = 0;
    const auto documents = read_documents(in, ids, o.docs, &unknown);
    if (unknown > 0) log.warn(unknown, " document lines refer to unknown ids");
    TextData text = build_vocab(documents, o.min_count);
    log.info("vocabulary: ", text.vocabulary.size(), " words (min count ", o.min_count, ")");
    if (!text.docs.empty_nodes.empty())
        log.warn(text.docs.empty_nodes.size(), " nodes have an empty document; they keep a free context vector");
    return text;
}

WalkOptions walk_options(const Options& o) {
    WalkOptions w;
    w.walks_per_node = o.walks_per_node;
    w.walk_length = o.walk_length;
    w.seed = o.seed;
    w.threads = o.threads;
    w.validate();
    return w;
}

PipelineConfig pipeline_config(const Options& o, bool text) {
    PipelineConfig cfg;
    cfg.walks = walk_options(o);
    cfg.window = o.window;
    if (cfg.window < 1) throw DomainError("window must be >= 1");
    cfg.x_min = o.x_min;
    if (!(cfg.x_min >= 0.0)) throw DomainError("x_min must be >= 0");
    cfg.train = train_config(o, text ? 4 : 10);
    cfg.representation = parse_representation(o.representation);
    cfg.ratios = parse_ratio_list(o.ratios);
    cfg.eval.repetitions = o.repetitions;
    if (cfg.eval.repetitions < 1) throw DomainError("repetitions must be >= 1");
    cfg.eval.seed = o.seed;
    return cfg;
}

void write_matrix_file(const std::string& path, const DenseMatrix& m, const std::vector<std::string>& names) {
    auto out = open_out(path);
    write_embeddings(out, m, names);
}

void check_ratios(const std::vector<double>& ratios) {
    for (double r : ratios)
        if (!(r > 0.0 && r < 1.0)) throw DomainError("ratios must lie in (0, 1), got " + format_double(r));
}

// ---- subcommands ----------------------------------------------------------

void cmd_walks(const Options& o, Log& log) {
    const Graph graph = load_input_graph(o, log);
    const WalkCorpus corpus = generate_walks(graph, walk_options(o));
    log.info("walks: ", corpus.size(), " sequences, ", corpus.total_visits(), " visits");
    auto out = open_out(o.out);
    write_walks(out, corpus, graph.ids());
}

void cmd_cooc(const Options& o, Log& log) {
    const Graph graph = load_input_graph(o, log);
    if (o.window < 1) throw DomainError("window must be >= 1");
    if (!(o.x_min >= 0.0)) throw DomainError("x_min must be >= 0");
    WalkCorpus corpus;
    if (!o.walks_in.empty()) {
        auto in = open_in(o.walks_in);
        corpus = read_walks(in, graph.ids(), o.walks_in);
    } else {
        corpus = generate_walks(graph, walk_options(o));
    }
    const CoocMatrix raw = build_cooc(corpus, graph.node_count(), o.window, o.threads);
    const CoocMatrix x = apply_threshold(raw, o.x_min);
    log.info("co-occurrence: ", raw.nnz(), " entries, ", x.nnz(), " after x_min=", o.x_min);
    auto out = open_out(o.out);
    write_cooc(out, x, graph.ids());
}

LoadedCooc load_cooc_input(const Options& o, Log& log) {
    std::optional<Graph> graph;
    if (!o.edges.empty()) graph = load_input_graph(o, log);
    auto in = open_in(o.cooc_in);
    LoadedCooc loaded = read_cooc(in, o.cooc_in, graph ? &graph->ids() : nullptr);
    if (!graph && !o.labels.empty()) {
        // labelled nodes without any co-occurrence get empty rows
        const std::size_t before = loaded.ids.size();
        for (const auto& id : label_ids(o)) loaded.ids.intern(id);
        if (loaded.ids.size() > before) {
            std::vector<CoocMatrix::Row> rows(loaded.ids.size());
            for (NodeIndex i = 0; i < before; ++i) {
                const auto cols = loaded.matrix.row_columns(i);
                const auto vals = loaded.matrix.row_values(i);
                for (std::size_t k = 0; k < cols.size(); ++k) rows[i].emplace_back(cols[k], vals[k]);
            }
            loaded.matrix = CoocMatrix::from_rows(std::move(rows), loaded.matrix.window(), loaded.matrix.x_min());
            log.warn(loaded.ids.size() - before, " labelled nodes have no co-occurrence entry");
        }
    }
    if (!(o.x_min >= 0.0)) throw DomainError("x_min must be >= 0");
    if (o.x_min > loaded.matrix.x_min()) loaded.matrix = apply_threshold(loaded.matrix, o.x_min);
    log.info("co-occurrence: n=", loaded.matrix.n(), " nnz=", loaded.matrix.nnz(), " x_min=", loaded.matrix.x_min());
    return loaded;
}

void report_history(const std::vector<EpochStats>& history, Log& log) {
    for (const auto& e : history)
        log.info("epoch ", e.epoch, ": ", e.positive_updates, " positive + ", e.zero_updates,
                 " zero updates, mean squared residual ", e.mean_squared_residual);
}

void cmd_train(const Options& o, Log& log) {
    const LoadedCooc loaded = load_cooc_input(o, log);
    const TrainConfig cfg = train_config(o, 10);
    const RepresentationMode mode = parse_representation(o.representation);
    const TrainResult result = train(loaded.matrix, loaded.ids, cfg);
    report_history(result.history, log);
    const auto& names = loaded.ids.names();
    write_matrix_file(o.out, node_features(result.model, mode), names);
    write_matrix_file(o.out + ".context", result.model.context, names);
    auto bias = open_out(o.out + ".bias");
    write_biases(bias, result.model.target_bias, result.model.context_bias, names);
}

void cmd_train_text(const Options& o, Log& log) {
    const LoadedCooc loaded = load_cooc_input(o, log);
    const TextData text = load_text(o, loaded.ids, log);
    const TrainConfig cfg = train_config(o, 4);
    const RepresentationMode mode = parse_representation(o.representation);
    const TextTrainResult result = train_text(loaded.matrix, loaded.ids, text, cfg);
    report_history(result.history, log);
    const auto& names = loaded.ids.names();
    write_matrix_file(o.out, text_node_features(result.model, mode), names);
    write_matrix_file(o.out + ".words", result.model.words, text.vocabulary.words());
    auto bias = open_out(o.out + ".bias");
    write_biases(bias, result.model.target_bias, result.model.context_bias, names);
    if (!text.docs.empty_nodes.empty()) {
        auto flagged = open_out(o.out + ".empty-docs");
        for (NodeIndex j : text.docs.empty_nodes) flagged << names[j] << '\n';
    }
}

void cmd_eval(const Options& o, Log& log, std::ostream& out) {
    auto in = open_in(o.embeddings);
    const LoadedEmbeddings emb = read_embeddings(in, o.embeddings);
    const LabeledNodes labels = load_labels(o, emb.ids, log);
    const auto ratios = parse_ratio_list(o.ratios);
    check_ratios(ratios);
    EvalOptions opts;
    opts.repetitions = o.repetitions;
    opts.seed = o.seed;
    const EvalReport report = evaluate(emb.vectors, labels, ratios, opts);
    out << format_report(report);
    if (!o.out.empty()) {
        auto csv = open_out(o.out);
        write_report_csv(csv, report);
    }
}

void cmd_keywords(const Options& o, Log& log, std::ostream& out) {
    auto node_in = open_in(o.embeddings);
    const LoadedEmbeddings nodes = read_embeddings(node_in, o.embeddings);
    auto word_in = open_in(o.words);
    const LoadedEmbeddings words = read_embeddings(word_in, o.words);
    if (nodes.vectors.cols() != words.vectors.cols())
        throw DomainError("node and word embeddings have different dimensions");
    const Vocabulary vocab = vocabulary_from_words(words.ids.names());
    auto doc_in = open_in(o.docs);
    const auto documents = read_documents(doc_in, nodes.ids, o.docs);
    if (o.top < 1) throw DomainError("--top must be >= 1");

    std::ostringstream report;
    for (const auto& id : o.nodes) {
        const auto node = nodes.ids.find(id);
        if (!node) throw DomainError("unknown node id '" + id + "'");
        const BagOfWords bag = bag_from_text(documents[*node], vocab);
        std::vector<WordIndex> exclude;
        if (o.exclude_doc_words) exclude = bag.words;

        auto join = [&](const std::vector<ScoredWord>& ranked) {
            std::string s;
            for (const auto& w : ranked) {
                if (!s.empty()) s += ", ";
                s += vocab.word(w.word);
            }
            return s;
        };
        std::string snippet = documents[*node].substr(0, 160);
        if (documents[*node].size() > 160) snippet += "...";
        report << "Document " << id << ": " << snippet << '\n';
        report << "Closest words to u (node):    " << join(nearest_words(nodes.vectors.row(*node), words.vectors, o.top, exclude))
               << '\n';
        if (bag.empty()) {
            log.warn("node ", id, " has no known word; no content representation");
            report << "Closest words to v (content): (empty document)\n";
        } else {
            const auto content = doc_context_vector(bag, words.vectors);
            report << "Closest words to v (content): " << join(nearest_words(content, words.vectors, o.top, exclude)) << '\n';
        }
        report << '\n';
    }
    out << report.str();
    if (!o.out.empty()) {
        auto file = open_out(o.out);
        file << report.str();
    }
}

void cmd_pipeline(const Options& o, Log& log, std::ostream& out) {
    const bool text_mode = !o.docs.empty();
    const PipelineConfig cfg = pipeline_config(o, text_mode);
    const Graph graph = load_input_graph(o, log);
    const LabeledNodes labels = load_labels(o, graph.ids(), log);
    std::optional<TextData> text;
    if (text_mode) text = load_text(o, graph.ids(), log);

    const WalkCorpus corpus = generate_walks(graph, cfg.walks);
    log.info("walks: ", corpus.size(), " sequences, ", corpus.total_visits(), " visits");
    const CoocMatrix raw = build_cooc(corpus, graph.node_count(), cfg.window, cfg.walks.threads);
    const CoocMatrix x = apply_threshold(raw, cfg.x_min);
    log.info("co-occurrence: ", raw.nnz(), " entries, ", x.nnz(), " after x_min=", cfg.x_min);

    DenseMatrix features;
    if (text) {
        const TextTrainResult r = train_text(x, graph.ids(), *text, cfg.train);
        report_history(r.history, log);
        features = text_node_features(r.model, cfg.representation);
        if (!o.save_embeddings.empty()) write_matrix_file(o.save_embeddings + ".words", r.model.words, text->vocabulary.words());
    } else {
        const TrainResult r = train(x, graph.ids(), cfg.train);
        report_history(r.history, log);
        features = node_features(r.model, cfg.representation);
    }
    if (!o.save_embeddings.empty()) write_matrix_file(o.save_embeddings, features, graph.ids().names());

    const EvalReport report = evaluate(features, labels, cfg.ratios, cfg.eval);
    out << format_report(report);
    if (!o.out.empty()) {
        auto csv = open_out(o.out);
        write_report_csv(csv, report);
    }
}

void cmd_sweep(const Options& o, Log& log, std::ostream& out) {
    const bool text_mode = !o.docs.empty();
    const PipelineConfig cfg = pipeline_config(o, text_mode);
    const auto parameter = parse_sweep_parameter(o.param);
    if (!parameter) throw DomainError("--param must be one of x_min, k, l, c; got '" + o.param + "'");
    const auto values = parse_value_list(o.values);
    const Graph graph = load_input_graph(o, log);
    const LabeledNodes labels = load_labels(o, graph.ids(), log);
    std::optional<TextData> text;
    if (text_mode) text = load_text(o, graph.ids(), log);

    const SweepTable table = sweep(cfg, *parameter, values, graph, labels, text ? &*text : nullptr);

    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << std::setw(10) << to_string(*parameter);
    for (double r : cfg.ratios) os << std::setw(9) << 100 * r << '%';
    os << '\n';
    for (std::size_t v = 0; v < values.size(); ++v) {
        os << std::setw(10) << format_double(values[v]);
        for (const auto& r : table.reports[v].results) os << std::setw(10) << 100 * r.mean;
        os << '\n';
    }
    out << os.str();
    if (!o.out.empty()) {
        auto csv = open_out(o.out);
        write_sweep_csv(csv, table);
    }
}

// ---- option wiring --------------------------------------------------------

void add_graph_options(CLI::App* app, Options& o, bool labels_required) {
    app->add_option("--edges", o.edges, "Edge list: 'src dst [weight]' per line")->required();
    auto* labels = app->add_option("--labels", o.labels, "Label file: 'id label[,label...]' per line");
    if (labels_required) labels->required();
    app->add_option("--directed-input", o.directed_input,
                    "Treat lines as arcs; reciprocal arcs merge into one edge instead of summing")
        ->capture_default_str();
}

void add_walk_options(CLI::App* app, Options& o) {
    app->add_option("--walks-per-node", o.walks_per_node, "Random walks started per node (gamma)")->capture_default_str();
    app->add_option("--walk-length", o.walk_length, "Nodes per walk (t)")->capture_default_str();
}

void add_cooc_options(CLI::App* app, Options& o) {
    app->add_option("--window", o.window, "Co-occurrence window l")->capture_default_str();
    app->add_option("--x-min", o.x_min, "Drop co-occurrence values below this threshold")->capture_default_str();
}

CLI::Option* add_train_options(CLI::App* app, Options& o, bool objective_flags) {
    app->add_option("--dim,--d", o.dim, "Embedding dimension")->capture_default_str();
    app->add_option("--c", o.c, "Shift constant inside log(c + x), in (0, 1]")->capture_default_str();
    app->add_option("--k", o.k, "Zero entries sampled per positive entry")->capture_default_str();
    auto* epochs = app->add_option("--epochs", o.epochs, "Training epochs (default 10, text model 4)");
    app->add_option("--lr", o.lr, "Initial AdaGrad learning rate")->capture_default_str();
    if (objective_flags) {
        app->add_option("--objective", o.objective, "gvnr or glove")->capture_default_str();
        app->add_option("--x-max", o.x_max, "GloVe weighting cutoff")->capture_default_str();
        app->add_option("--glove-exponent", o.glove_exponent, "GloVe weighting exponent")->capture_default_str();
    }
    app->add_option("--representation", o.representation, "Node features: 'u' or 'u+v'")->capture_default_str();
    return epochs;
}

void add_eval_options(CLI::App* app, Options& o) {
    app->add_option("--ratios", o.ratios, "Training fractions: '0.1,0.3' or '0.1..0.5[:step]'")->capture_default_str();
    app->add_option("--repetitions", o.repetitions, "Random splits per ratio")->capture_default_str();
}

void add_text_options(CLI::App* app, Options& o, bool docs_required) {
    auto* docs = app->add_option("--docs", o.docs, "Documents: 'id<TAB>text' per line");
    if (docs_required) docs->required();
    app->add_option("--min-count", o.min_count, "Drop words seen fewer times")->capture_default_str();
}

std::string echo_config(const CLI::App& app, const CLI::App& sub, const Options& o) {
    std::ostringstream os;
    os << "seed=" << o.seed << '\n' << "threads=" << o.threads << '\n';
    os << '[' << sub.get_name() << "]\n" << sub.config_to_str(true, false);
    (void)app;
    return os.str();
}

}  // namespace

std::vector<double> parse_ratio_list(const std::string& text) {
    const auto range = text.find("..");
    if (range == std::string::npos) return parse_value_list(text);
    double lo = 0.0, hi = 0.0, step = 0.1;
    std::string rest = text.substr(range + 2);
    const auto colon = rest.find(':');
    if (colon != std::string::npos) {
        if (!parse_double(rest.substr(colon + 1), step) || !(step > 0.0))
            throw DomainError("invalid step in range '" + text + "'");
        rest = rest.substr(0, colon);
    }
    if (!parse_double(text.substr(0, range), lo) || !parse_double(rest, hi) || hi < lo)
        throw DomainError("invalid range '" + text + "'");
    std::vector<double> out;
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
    for (std::size_t i = 0; i <= count; ++i) out.push_back(std::round((lo + static_cast<double>(i) * step) * 1e9) / 1e9);
    return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Node embeddings by factorizing a thresholded random-walk co-occurrence matrix", "gvnr"};
    app.set_config("--config", "", "Replay a configuration echoed by a previous run");
    app.add_option("--seed", o.seed, "Seed for walks, training and splits")->capture_default_str();
    app.add_option("--threads", o.threads, "Worker threads; 1 gives bit-reproducible runs")->capture_default_str();
    app.add_flag("-v,--verbose", o.verbose, "Progress on stderr");
    app.require_subcommand(1);

    auto* walks = app.add_subcommand("walks", "Generate the random-walk corpus")->configurable();
    add_graph_options(walks, o, false);
    add_walk_options(walks, o);
    walks->add_option("--out", o.out, "Walk corpus output")->required();

    auto* cooc = app.add_subcommand("cooc", "Build and threshold the co-occurrence matrix")->configurable();
    add_graph_options(cooc, o, false);
    cooc->add_option("--walks", o.walks_in, "Reuse a saved walk corpus instead of generating one");
    add_walk_options(cooc, o);
    add_cooc_options(cooc, o);
    cooc->add_option("--out", o.out, "Triplet output")->required();

    auto* train_cmd = app.add_subcommand("train", "Fit node embeddings on a saved co-occurrence matrix")->configurable();
    train_cmd->add_option("--cooc", o.cooc_in, "Co-occurrence triplet file")->required();
    train_cmd->add_option("--edges", o.edges, "Edge list fixing the node indexing (keeps nodes with empty rows)");
    train_cmd->add_option("--labels", o.labels, "Label file whose ids extend the node set");
    train_cmd->add_option("--directed-input", o.directed_input, "See 'walks --help'")->capture_default_str();
    train_cmd->add_option("--x-min", o.x_min, "Threshold applied to the loaded matrix")->capture_default_str();
    auto* train_epochs = add_train_options(train_cmd, o, true);
    train_cmd->add_option("--out", o.out, "Embedding output; .context and .bias sidecars")->required();

    auto* text_cmd = app.add_subcommand("train-text", "Fit node and word embeddings with documents")->configurable();
    text_cmd->add_option("--cooc", o.cooc_in, "Co-occurrence triplet file")->required();
    text_cmd->add_option("--edges", o.edges, "Edge list fixing the node indexing");
    text_cmd->add_option("--labels", o.labels, "Label file whose ids extend the node set");
    text_cmd->add_option("--directed-input", o.directed_input, "See 'walks --help'")->capture_default_str();
    text_cmd->add_option("--x-min", o.x_min, "Threshold applied to the loaded matrix")->capture_default_str();
    add_text_options(text_cmd, o, true);
    auto* text_epochs = add_train_options(text_cmd, o, false);
    text_cmd->add_option("--out", o.out, "Node embedding output; .words and .bias sidecars")->required();

    auto* eval = app.add_subcommand("eval", "One-vs-rest logistic regression over training ratios")->configurable();
    eval->add_option("--embeddings", o.embeddings, "Node embedding file")->required();
    eval->add_option("--labels", o.labels, "Label file")->required();
    add_eval_options(eval, o);
    eval->add_option("--out", o.out, "CSV report (ratio,value,mean,std)");

    auto* keywords = app.add_subcommand("keywords", "Closest words to a node's u and content vectors")->configurable();
    keywords->add_option("--embeddings", o.embeddings, "Node embedding file (u)")->required();
    keywords->add_option("--words", o.words, "Word embedding file")->required();
    keywords->add_option("--docs", o.docs, "Documents: 'id<TAB>text' per line")->required();
    keywords->add_option("--node", o.nodes, "Node id (repeatable)")->required();
    keywords->add_option("--top", o.top, "Words per list")->capture_default_str();
    keywords->add_flag("--exclude-doc-words", o.exclude_doc_words, "Skip words that occur in the document");
    keywords->add_option("--out", o.out, "Also write the lists here");

    auto* sweep_cmd = app.add_subcommand("sweep", "Score a grid of values for one hyper-parameter")->configurable();
    add_graph_options(sweep_cmd, o, true);
    add_text_options(sweep_cmd, o, false);
    add_walk_options(sweep_cmd, o);
    add_cooc_options(sweep_cmd, o);
    auto* sweep_epochs = add_train_options(sweep_cmd, o, true);
    add_eval_options(sweep_cmd, o);
    sweep_cmd->add_option("--param", o.param, "x_min, k, l or c")->required();
    sweep_cmd->add_option("--values", o.values, "Comma separated values")->required();
    sweep_cmd->add_option("--out", o.out, "CSV table (parameter,value,ratio,mean,std)");

    auto* pipe = app.add_subcommand("pipeline", "walks -> cooc -> train -> eval in one process")->configurable();
    add_graph_options(pipe, o, true);
    add_text_options(pipe, o, false);
    add_walk_options(pipe, o);
    add_cooc_options(pipe, o);
    auto* pipe_epochs = add_train_options(pipe, o, true);
    add_eval_options(pipe, o);
    pipe->add_option("--save-embeddings", o.save_embeddings, "Write the node features used for evaluation");
    pipe->add_option("--out", o.out, "CSV report (ratio,value,mean,std)");

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::ExtrasError& e) {
        err << "error[unknown-flag]: " << e.what() << '\n';
        return usage_error;
    } catch (const CLI::ConversionError& e) {
        err << "error[type]: " << e.what() << '\n';
        return type_error;
    } catch (const CLI::ValidationError& e) {
        err << "error[type]: " << e.what() << '\n';
        return type_error;
    } catch (const CLI::FileError& e) {
        err << "error[missing-file]: " << e.what() << '\n';
        return missing_file;
    } catch (const CLI::ParseError& e) {
        err << "error[usage]: " << e.what() << '\n';
        return usage_error;
    }

    CLI::App* sub = app.get_subcommands().front();
    // Resolve the model-dependent epoch default so the echo shows it.
    const bool text_mode = sub == text_cmd || ((sub == pipe || sub == sweep_cmd) && !o.docs.empty());
    for (auto* opt : {train_epochs, text_epochs, sweep_epochs, pipe_epochs})
        if (opt->count() == 0) opt->default_str(text_mode ? "4" : "10");
    if (o.epochs == 0) o.epochs = text_mode ? 4 : 10;

    Log log(err, o.verbose);
    try {
        if (sub == walks) cmd_walks(o, log);
        else if (sub == cooc) cmd_cooc(o, log);
        else if (sub == train_cmd) cmd_train(o, log);
        else if (sub == text_cmd) cmd_train_text(o, log);
        else if (sub == eval) cmd_eval(o, log, out);
        else if (sub == keywords) cmd_keywords(o, log, out);
        else if (sub == sweep_cmd) cmd_sweep(o, log, out);
        else if (sub == pipe) cmd_pipeline(o, log, out);

        if (!o.out.empty()) {
            auto echo = open_out(o.out + ".config.toml");
            echo << echo_config(app, *sub, o);
        }
    } catch (const MissingFile& e) {
        err << "error[missing-file]: " << e.what() << '\n';
        return missing_file;
    } catch (const DomainError& e) {
        err << "error[domain]: " << e.what() << '\n';
        return domain_error;
    } catch (const TrainingDiverged& e) {
        err << "error[training]: " << e.what() << '\n';
        return training_error;
    } catch (const Error& e) {
        err << "error[input]: " << e.what() << '\n';
        return input_error;
    }
    return ok;
}

}  // namespace gvnr::cli
