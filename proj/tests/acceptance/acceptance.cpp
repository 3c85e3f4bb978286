// Acceptance checks, one per criterion. Prints "criterion N: PASS|FAIL ..."
// and exits non-zero on FAIL.

#include "cli.hpp"
#include "fixtures.hpp"

#include <gvnr/classify.hpp>
#include <gvnr/cooc.hpp>
#include <gvnr/errors.hpp>
#include <gvnr/format.hpp>
#include <gvnr/graph.hpp>
#include <gvnr/pipeline.hpp>
#include <gvnr/text.hpp>
#include <gvnr/trainer.hpp>
#include <gvnr/walks.hpp>

#include <CLI11.hpp>

#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

namespace gvnr {
namespace {

namespace fs = std::filesystem;

struct Verdict {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        pass = pass && ok;
        note(ok ? what : "NOT MET " + what);
    }
    template <class... T>
    void note(const T&... parts) {
        if (detail.tellp() != 0) detail << "; ";
        (detail << ... << parts);
    }
};

using Row = std::array<double, 5>;
constexpr std::array<double, 5> kRatios{0.1, 0.2, 0.3, 0.4, 0.5};

// ---------------------------------------------------------------- datasets

struct Dataset {
    std::string name;
    Graph graph;
    LabeledNodes labels;
    std::optional<TextData> text;
};

std::optional<Dataset> load_dataset(const fs::path& data_dir, const std::string& name, bool with_text, Verdict& v) {
    const fs::path base = data_dir / name / name;
    const std::string edges = base.string() + ".edges", labels = base.string() + ".labels", docs = base.string() + ".docs";
    for (const auto& path : with_text ? std::vector<std::string>{edges, labels, docs} : std::vector<std::string>{edges, labels}) {
        if (!fs::exists(path)) {
            v.pass = false;
            v.note(name, " dataset not found (", path, "); run scripts/prepare_linqs.py to create it");
            return std::nullopt;
        }
    }
    Dataset d;
    d.name = name;
    std::ifstream label_in(labels);
    const auto extra = read_label_ids(label_in);
    d.graph = load_graph_file(edges, true, extra).graph;
    std::ifstream label_again(labels);
    d.labels = read_labels(label_again, d.graph.ids(), labels);
    if (with_text) {
        std::ifstream doc_in(docs);
        d.text = build_vocab(read_documents(doc_in, d.graph.ids(), docs), 5);
    }
    return d;
}

PipelineConfig reference_config() {
    PipelineConfig cfg;  // gamma 80, t 40, l 5, d 80, c 1, x_min 1, k 1
    cfg.eval.repetitions = 10;
    cfg.ratios.assign(kRatios.begin(), kRatios.end());
    cfg.set_seed(1);
    cfg.set_threads(1);
    return cfg;
}

Row percent(const EvalReport& report) {
    Row r{};
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = 100.0 * report.results.at(i).mean;
    return r;
}

std::string show(const Row& r) {
    std::ostringstream s;
    for (std::size_t i = 0; i < r.size(); ++i) s << (i ? "/" : "") << std::fixed << std::setprecision(1) << r[i];
    return s.str();
}

void compare_row(Verdict& v, const std::string& what, const Row& got, const Row& expected, double tolerance) {
    double worst = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) worst = std::max(worst, std::abs(got[i] - expected[i]));
    v.require(worst <= tolerance, what + " " + show(got) + " vs " + show(expected) + " (max gap " +
                                      format_double(std::round(worst * 100) / 100) + ", tolerance " +
                                      format_double(tolerance) + ")");
}

// -------------------------------------------------------------- criteria

void reproduce_table(Verdict& v, const fs::path& data_dir, const std::string& name, const Row& expected) {
    const auto d = load_dataset(data_dir, name, false, v);
    if (!d) return;
    const auto start = std::chrono::steady_clock::now();
    const PipelineRun run = run_pipeline(reference_config(), d->graph, d->labels);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    compare_row(v, name, percent(run.report), expected, 3.0);
    v.note("runtime ", std::lround(seconds), " s");
}

void thresholding_improves(Verdict& v, const fs::path& data_dir) {
    for (const std::string name : {"cora", "citeseer"}) {
        const auto d = load_dataset(data_dir, name, false, v);
        if (!d) continue;
        const std::array<double, 2> values{0.0, 1.0};
        const SweepTable t = sweep(reference_config(), SweepParameter::x_min, values, d->graph, d->labels);
        const Row off = percent(t.reports[0]), on = percent(t.reports[1]);
        bool better = true;
        for (std::size_t i = 0; i < off.size(); ++i) better = better && on[i] > off[i];
        v.require(better, name + " x_min=1 " + show(on) + " vs x_min=0 " + show(off));
    }
}

void zero_sampling_helps(Verdict& v, const fs::path& data_dir) {
    const auto d = load_dataset(data_dir, "cora", false, v);
    if (!d) return;
    const std::array<double, 2> values{0.0, 1.0};
    const SweepTable t = sweep(reference_config(), SweepParameter::k, values, d->graph, d->labels);
    const Row without = percent(t.reports[0]), with = percent(t.reports[1]);
    bool ok = true;
    for (std::size_t i = 0; i < with.size(); ++i) ok = ok && with[i] >= without[i];
    v.require(ok, "cora k=1 " + show(with) + " vs k=0 " + show(without));
}

void reproduce_text_tables(Verdict& v, const fs::path& data_dir) {
    const std::array<std::tuple<std::string, Row, double>, 2> targets{{
        {"cora", {79.3, 80.7, 80.8, 81.4, 81.1}, 3.0},
        {"citeseer", {63.3, 62.5, 64.9, 68.6, 70.4}, 3.5},
    }};
    for (const auto& [name, expected, tolerance] : targets) {
        const auto d = load_dataset(data_dir, name, true, v);
        if (!d) continue;
        PipelineConfig cfg = reference_config();
        cfg.train.epochs = 4;
        const PipelineRun run = run_pipeline(cfg, d->graph, d->labels, &*d->text);
        compare_row(v, name + " with text", percent(run.report), expected, tolerance);
    }
}

void cooc_oracle(Verdict& v) {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::size_t> node_count(1, 10), window(1, 6);
    double worst = 0.0;
    bool same_support = true;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = node_count(rng), l = window(rng);
        const auto walks = testing::random_walk_sequences(rng, n, 20, 12);
        const CoocMatrix x = build_cooc(WalkCorpus::from_sequences(walks, 40, 1, 0), n, l);
        const auto oracle = testing::brute_force_cooc(walks, n, l);
        std::size_t stored = 0;
        for (NodeIndex i = 0; i < n; ++i)
            for (NodeIndex j = 0; j < n; ++j) {
                worst = std::max(worst, std::abs(x.value(i, j) - oracle[i][j]));
                stored += oracle[i][j] > 0.0;
            }
        same_support = same_support && stored == x.nnz();
    }
    v.require(worst <= 1e-9, "100 corpora, max |difference| " + format_double(worst));
    v.require(same_support, "stored entries equal oracle support");
}

double relative_error(double analytic, double numeric) {
    const double scale = std::max(std::abs(analytic), std::abs(numeric));
    return scale < 1e-12 ? 0.0 : std::abs(analytic - numeric) / scale;
}

template <class Loss>
double central_difference(double& parameter, Loss loss) {
    const double h = 1e-6, saved = parameter;
    parameter = saved + h;
    const double up = loss();
    parameter = saved - h;
    const double down = loss();
    parameter = saved;
    return (up - down) / (2.0 * h);
}

void gradient_checks(Verdict& v) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-1.0, 1.0), value(0.0, 5.0), shift(0.1, 1.0);
    const std::size_t n = 4, d = 6;

    double plain_worst = 0.0;
    for (int instance = 0; instance < 50; ++instance) {
        EmbeddingModel m;
        m.target = DenseMatrix(n, d);
        m.context = DenseMatrix(n, d);
        for (double& a : m.target.data()) a = u(rng);
        for (double& a : m.context.data()) a = u(rng);
        m.target_bias.resize(n);
        m.context_bias.resize(n);
        for (double& a : m.target_bias) a = u(rng);
        for (double& a : m.context_bias) a = u(rng);
        const NodeIndex i = rng() % n, j = rng() % n;
        const double x = instance % 5 == 0 ? 0.0 : value(rng), c = shift(rng);
        const CellGradient g = cell_gradient(m, i, j, x, c);
        auto loss = [&] { return std::pow(pair_residual(m, i, j, x, c), 2); };
        for (std::size_t a = 0; a < d; ++a) {
            plain_worst = std::max(plain_worst, relative_error(g.target[a], central_difference(m.target(i, a), loss)));
            plain_worst = std::max(plain_worst, relative_error(g.context[a], central_difference(m.context(j, a), loss)));
        }
        plain_worst = std::max(plain_worst, relative_error(g.target_bias, central_difference(m.target_bias[i], loss)));
        plain_worst = std::max(plain_worst, relative_error(g.context_bias, central_difference(m.context_bias[j], loss)));
    }
    v.require(plain_worst < 1e-5, "node residual: 50 instances, max relative error " + format_double(plain_worst));

    const std::vector<std::string> docs{"graph walk walk node", "", "embedding node matrix", "word word word graph",
                                        "matrix"};
    const TextData text = build_vocab(docs, 1);
    double text_worst = 0.0;
    for (int instance = 0; instance < 50; ++instance) {
        TextEmbeddingModel m;
        m.text = text;
        m.target = DenseMatrix(docs.size(), d);
        m.words = DenseMatrix(text.vocabulary.size(), d);
        m.fallback_context = DenseMatrix(docs.size(), d);
        for (auto* mat : {&m.target, &m.words, &m.fallback_context})
            for (double& a : mat->data()) a = u(rng);
        m.target_bias.resize(docs.size());
        m.context_bias.resize(docs.size());
        for (double& a : m.target_bias) a = u(rng);
        for (double& a : m.context_bias) a = u(rng);
        const NodeIndex i = rng() % docs.size(), j = rng() % docs.size();
        const double x = instance % 5 == 0 ? 0.0 : value(rng), c = shift(rng);
        const TextCellGradient g = text_cell_gradient(m, i, j, x, c);
        auto loss = [&] { return std::pow(text_pair_residual(m, i, j, x, c), 2); };
        for (std::size_t a = 0; a < d; ++a)
            text_worst = std::max(text_worst, relative_error(g.target[a], central_difference(m.target(i, a), loss)));
        text_worst = std::max(text_worst, relative_error(g.target_bias, central_difference(m.target_bias[i], loss)));
        text_worst = std::max(text_worst, relative_error(g.context_bias, central_difference(m.context_bias[j], loss)));
        for (std::size_t k = 0; k < g.words.size(); ++k)
            for (std::size_t a = 0; a < d; ++a)
                text_worst = std::max(text_worst,
                                      relative_error(g.word_grads[k][a], central_difference(m.words(g.words[k], a), loss)));
        for (std::size_t a = 0; a < g.fallback_context.size(); ++a)
            text_worst = std::max(text_worst,
                                  relative_error(g.fallback_context[a], central_difference(m.fallback_context(j, a), loss)));
    }
    v.require(text_worst < 1e-5, "document residual: 50 instances, max relative error " + format_double(text_worst));
}

CoocMatrix single_row(std::size_t n, std::size_t positives) {
    std::vector<CoocMatrix::Row> rows(n);
    for (std::size_t j = 0; j < positives; ++j) rows[0].emplace_back(static_cast<NodeIndex>(j * (n / positives)), 1.0);
    return CoocMatrix::from_rows(std::move(rows), 1, 0.0);
}

void zero_rate_suite(Verdict& v) {
    bool exact = true;
    for (double k : {0.0, 0.5, 1.0, 3.0}) exact = exact && zero_sample_rate(0.0, k) == 0.0;
    exact = exact && zero_sample_rate(0.6, 1.0) == 1.0;
    exact = exact && zero_sample_rate(0.09, 1.0) == 0.09 / 0.91;
    v.require(exact, "rate examples 0 / 1 / " + format_double(zero_sample_rate(0.09, 1.0)));

    struct Case {
        std::size_t n, positives;
        double k;
    };
    const std::size_t resamples = 1000;
    Rng rng(derive_seed(8, 0, 0));
    for (const Case& c : {Case{1000, 50, 1.0}, Case{400, 20, 2.5}, Case{200, 40, 0.5}, Case{100, 60, 1.0}}) {
        const CoocMatrix x = single_row(c.n, c.positives);
        const double alpha = zero_sample_rate(static_cast<double>(c.positives) / c.n, c.k);
        const double zeros = static_cast<double>(c.n - c.positives), expected = alpha * zeros;
        const double se = std::sqrt(zeros * alpha * (1.0 - alpha) / resamples);
        double total = 0.0;
        for (std::size_t r = 0; r < resamples; ++r) total += sample_zero_entries(x, 0, c.k, rng).size();
        const double mean = total / resamples;
        std::ostringstream what;
        what << "n=" << c.n << " n_i=" << c.positives << " k=" << c.k << ": mean " << mean << " vs " << expected;
        v.require(std::abs(mean - expected) <= 3.0 * se, what.str());
    }
}

void work_proportionality(Verdict& v) {
    for (std::uint64_t seed : {1u, 2u}) {
        const Graph g = testing::cora_scale_graph(seed);
        const PipelineConfig ref = reference_config();
        const WalkCorpus corpus = generate_walks(g, ref.walks);
        const CoocMatrix x = apply_threshold(build_cooc(corpus, g.node_count(), ref.window), ref.x_min);

        std::vector<std::size_t> visits(g.node_count(), 0);
        for (std::size_t w = 0; w < corpus.size(); ++w)
            for (NodeIndex node : corpus.walk(w)) ++visits[node];
        std::ostringstream exponent;
        exponent << std::setprecision(3) << testing::rank_frequency_exponent(visits);
        v.note("fixture ", seed, ": ", g.node_count(), " nodes, nnz ", x.nnz(), ", visit rank-frequency exponent ",
               exponent.str());

        for (double k : {0.0, 1.0, 2.0}) {
            TrainConfig cfg;
            cfg.dim = 8;
            cfg.epochs = 3;
            cfg.zero_ratio = k;
            double lo = 1e300, hi = 0.0;
            TrainObserver observer;
            observer.on_epoch = [&](const EpochStats& s) {
                const double ratio = s.updates() / ((1.0 + k) * x.nnz());
                lo = std::min(lo, ratio);
                hi = std::max(hi, ratio);
            };
            train(x, g.ids(), cfg, observer);
            std::ostringstream what;
            what << std::setprecision(4) << "k=" << k << " updates/((1+k) nnz) in [" << lo << ", " << hi << "]";
            v.require(lo >= 0.9 && hi <= 1.1, what.str());
        }
    }
}

void keyword_sanity(Verdict& v) {
    const auto cg = testing::community_graph(4, 30, 3, 0.85, 21);
    const auto documents = testing::community_documents(cg, 6, 12, 0.7, 5);

    WalkOptions walks;
    walks.walks_per_node = 10;
    walks.walk_length = 20;
    const std::size_t n = cg.graph.node_count();
    const CoocMatrix x = apply_threshold(build_cooc(generate_walks(cg.graph, walks), n, 5), 1.0);
    const TextData text = build_vocab(documents, 1);
    TrainConfig cfg;
    cfg.dim = 16;
    cfg.epochs = 4;
    const TextTrainResult trained = train_text(x, cg.graph.ids(), text, cfg);
    const DenseMatrix& w = trained.model.words;
    std::size_t self_first = 0;
    for (WordIndex word = 0; word < w.rows(); ++word)
        self_first += nearest_words(w.row(word), w, 1).front().word == word;
    v.require(self_first == w.rows(), "self ranked first for " + std::to_string(self_first) + " of " +
                                          std::to_string(w.rows()) + " words");

    testing::TempDir dir("acceptance-keywords");
    {
        std::ofstream edges(dir.file("g.edges")), docs(dir.file("g.docs")), labels(dir.file("g.labels"));
        for (const auto& l : cg.edge_lines) edges << l << '\n';
        for (const auto& l : cg.label_lines) labels << l << '\n';
        labels << "stray c1\n";
        for (std::size_t node = 0; node < documents.size(); ++node) docs << "v" << node << '\t' << documents[node] << '\n';
    }
    auto run = [&](std::vector<std::string> args, std::string* out = nullptr) {
        args.insert(args.begin(), "gvnr");
        std::ostringstream o, e;
        const int code = cli::run(args, o, e);
        if (out) *out = o.str();
        if (code != 0) v.require(false, args[1] + " exited " + std::to_string(code) + ": " + e.str());
        return code == 0;
    };
    if (!run({"cooc", "--edges", dir.file("g.edges"), "--labels", dir.file("g.labels"), "--walks-per-node", "10",
              "--walk-length", "20", "--out", dir.file("g.cooc")}) ||
        !run({"train-text", "--cooc", dir.file("g.cooc"), "--labels", dir.file("g.labels"), "--docs", dir.file("g.docs"), "--min-count", "1", "--dim", "16",
              "--out", dir.file("g.emb")}))
        return;

    const std::vector<std::string> nodes{"v0", "v57", "v119", "stray"};
    std::vector<std::string> args{"keywords", "--embeddings", dir.file("g.emb"), "--words", dir.file("g.emb.words"),
                                  "--docs", dir.file("g.docs"), "--top", "5"};
    for (const auto& id : nodes) {
        args.push_back("--node");
        args.push_back(id);
    }
    std::string report;
    if (!run(args, &report)) return;
    std::istringstream lines(report);
    std::vector<std::string> all;
    for (std::string l; std::getline(lines, l);) all.push_back(l);
    bool layout = all.size() == 4 * nodes.size();
    for (std::size_t b = 0; layout && b < nodes.size(); ++b) {
        layout = all[4 * b].rfind("Document " + nodes[b] + ":", 0) == 0 &&
                 all[4 * b + 1].rfind("Closest words to u (node):", 0) == 0 &&
                 all[4 * b + 2].rfind("Closest words to v (content):", 0) == 0 && all[4 * b + 3].empty();
    }
    v.require(layout, "two-list layout for nodes v0, v57, v119 and a document-less node");
    v.note("v57 -> ", all.size() > 6 ? all[5].substr(all[5].find_first_not_of(' ', all[5].find(':') + 1)) : std::string("?"));
}

}  // namespace
}  // namespace gvnr

int main(int argc, char** argv) {
    using namespace gvnr;
    CLI::App app{"Acceptance checks"};
    int criterion = 0;
    std::string data_dir = "data";
    app.add_option("--criterion", criterion, "Criterion number")->required()->check(CLI::Range(1, 10));
    app.add_option("--data-dir", data_dir, "Directory holding cora/ and citeseer/");
    CLI11_PARSE(app, argc, argv);

    Verdict v;
    try {
        switch (criterion) {
            case 1: reproduce_table(v, data_dir, "cora", {69.5, 72.6, 75.9, 78.1, 80.2}); break;
            case 2: reproduce_table(v, data_dir, "citeseer", {45.6, 55.6, 57.3, 58.7, 59.0}); break;
            case 3: thresholding_improves(v, data_dir); break;
            case 4: zero_sampling_helps(v, data_dir); break;
            case 5: reproduce_text_tables(v, data_dir); break;
            case 6: cooc_oracle(v); break;
            case 7: gradient_checks(v); break;
            case 8: zero_rate_suite(v); break;
            case 9: work_proportionality(v); break;
            case 10: keyword_sanity(v); break;
        }
    } catch (const std::exception& e) {
        v.pass = false;
        v.note("error: ", e.what());
    }
    std::cout << "criterion " << criterion << ": " << (v.pass ? "PASS" : "FAIL") << "  " << v.detail.str() << std::endl;
    return v.pass ? 0 : 1;
}
