#include "gvnr/classify.hpp"

#include "gvnr/errors.hpp"
#include "gvnr/format.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

namespace gvnr {

std::vector<NodeIndex> LabeledNodes::labeled_nodes() const {
    std::vector<NodeIndex> out;
    for (NodeIndex i = 0; i < labels.size(); ++i)
        if (!labels[i].empty()) out.push_back(i);
    return out;
}

namespace {

struct LabelLine {
    std::string id;
    std::vector<std::string> labels;
    std::size_t line;
};

std::vector<LabelLine> parse_label_lines(std::istream& in, const std::string& source_name) {
    std::vector<LabelLine> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto f = split_fields(line);
        if (f.empty() || f[0].front() == '#') continue;
        if (f.size() != 2) throw ParseError(source_name, line_no, "expected 'id label[,label...]'");
        LabelLine entry{std::string(f[0]), {}, line_no};
        std::string_view rest = f[1];
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            const auto token = rest.substr(0, comma);
            if (token.empty()) throw ParseError(source_name, line_no, "empty label");
            entry.labels.emplace_back(token);
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
            if (rest.empty()) throw ParseError(source_name, line_no, "empty label");
        }
        out.push_back(std::move(entry));
    }
    return out;
}

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double log1pexp(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double linear(std::span<const double> x, std::span<const double> w) {
    const std::size_t d = x.size();
    return dot(x, w.first(d)) + w[d];
}

// Mean loss and gradient.
double loss_and_gradient(const DenseMatrix& features, std::span<const NodeIndex> rows, std::span<const std::uint8_t> y,
                         std::span<const double> w, std::span<double> grad) {
    const std::size_t d = features.cols();
    std::fill(grad.begin(), grad.end(), 0.0);
    double loss = 0.0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto x = features.row(rows[r]);
        const double z = linear(x, w);
        loss += log1pexp(z) - (y[r] ? z : 0.0);
        const double residual = sigmoid(z) - (y[r] ? 1.0 : 0.0);
        for (std::size_t k = 0; k < d; ++k) grad[k] += residual * x[k];
        grad[d] += residual;
    }
    const double inv = 1.0 / static_cast<double>(rows.size());
    for (double& g : grad) g *= inv;
    return loss * inv;
}

double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

double sample_stddev(const std::vector<double>& v, double mean) {
    if (v.size() < 2) return 0.0;
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

LabeledNodes read_labels(std::istream& in, const IdMap& ids, const std::string& source_name, std::size_t* unknown) {
    const auto lines = parse_label_lines(in, source_name);
    std::set<std::string> names;
    for (const auto& l : lines)
        for (const auto& lab : l.labels) names.insert(lab);

    LabeledNodes out;
    out.label_names.assign(names.begin(), names.end());
    std::map<std::string, LabelId> label_index;
    for (LabelId k = 0; k < out.label_names.size(); ++k) label_index[out.label_names[k]] = k;

    out.labels.assign(ids.size(), {});
    std::size_t missing = 0;
    for (const auto& l : lines) {
        const auto node = ids.find(l.id);
        if (!node) {
            ++missing;
            continue;
        }
        auto& set = out.labels[*node];
        for (const auto& lab : l.labels) set.push_back(label_index.at(lab));
        std::sort(set.begin(), set.end());
        set.erase(std::unique(set.begin(), set.end()), set.end());
        if (set.size() > 1) out.multi_label = true;
    }
    if (unknown) *unknown = missing;
    return out;
}

std::vector<std::string> read_label_ids(std::istream& in) {
    std::vector<std::string> ids;
    for (auto& l : parse_label_lines(in, "<labels>")) ids.push_back(std::move(l.id));
    return ids;
}

double logistic_loss(const DenseMatrix& features, std::span<const NodeIndex> rows, std::span<const std::uint8_t> targets,
                     std::span<const double> weights) {
    std::vector<double> grad(weights.size());
    return loss_and_gradient(features, rows, targets, weights, grad);
}

BinaryFit fit_binary_logreg(const DenseMatrix& features, std::span<const NodeIndex> rows, std::span<const std::uint8_t> targets,
                            const FitOptions& options) {
    if (rows.empty()) throw DomainError("logistic regression needs a non-empty training set");
    const std::size_t p = features.cols() + 1;
    BinaryFit fit;
    fit.weights.assign(p, 0.0);
    std::vector<double> grad(p), next_w(p), next_grad(p), direction(p);
    double loss = loss_and_gradient(features, rows, targets, fit.weights, grad);

    struct Pair {
        std::vector<double> s, y;
        double rho;
    };
    std::deque<Pair> memory;
    std::vector<double> alpha(options.history);

    std::size_t it = 0;
    for (; it < options.max_iterations && norm2(grad) > options.gradient_tolerance; ++it) {
        // Two-loop recursion.
        std::copy(grad.begin(), grad.end(), direction.begin());
        for (std::size_t m = memory.size(); m-- > 0;) {
            alpha[m] = memory[m].rho * dot(memory[m].s, direction);
            for (std::size_t k = 0; k < p; ++k) direction[k] -= alpha[m] * memory[m].y[k];
        }
        double gamma = 1.0;
        if (!memory.empty()) gamma = dot(memory.back().s, memory.back().y) / dot(memory.back().y, memory.back().y);
        for (double& v : direction) v *= gamma;
        for (std::size_t m = 0; m < memory.size(); ++m) {
            const double beta = memory[m].rho * dot(memory[m].y, direction);
            for (std::size_t k = 0; k < p; ++k) direction[k] += memory[m].s[k] * (alpha[m] - beta);
        }
        for (double& v : direction) v = -v;

        double slope = dot(grad, direction);
        if (slope >= 0) {  // not a descent direction: reset to steepest descent
            memory.clear();
            for (std::size_t k = 0; k < p; ++k) direction[k] = -grad[k];
            slope = -dot(grad, grad);
        }

        double step = memory.empty() ? std::min(1.0, 1.0 / norm2(grad)) : 1.0;
        double next_loss = 0.0;
        bool accepted = false;
        for (int tries = 0; tries < 60; ++tries) {
            for (std::size_t k = 0; k < p; ++k) next_w[k] = fit.weights[k] + step * direction[k];
            next_loss = loss_and_gradient(features, rows, targets, next_w, next_grad);
            if (next_loss <= loss + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // no further decrease representable

        Pair pair{std::vector<double>(p), std::vector<double>(p), 0.0};
        for (std::size_t k = 0; k < p; ++k) {
            pair.s[k] = next_w[k] - fit.weights[k];
            pair.y[k] = next_grad[k] - grad[k];
        }
        const double sy = dot(pair.s, pair.y);
        fit.weights.swap(next_w);
        grad.swap(next_grad);
        loss = next_loss;
        if (sy > 1e-12) {
            pair.rho = 1.0 / sy;
            memory.push_back(std::move(pair));
            if (memory.size() > options.history) memory.pop_front();
        }
    }
    fit.loss = loss;
    fit.gradient_norm = norm2(grad);
    fit.iterations = it;
    return fit;
}

double OvrClassifier::score(std::span<const double> x, LabelId label) const {
    return linear(x, weights.row(label));
}

OvrClassifier fit_logreg_ovr(const DenseMatrix& features, const LabeledNodes& labels, std::span<const NodeIndex> train_nodes,
                             const FitOptions& options) {
    if (train_nodes.empty()) throw DomainError("empty training split");
    const std::size_t d = features.cols();
    OvrClassifier clf;
    clf.weights = DenseMatrix(labels.label_count(), d + 1);
    std::vector<std::uint8_t> y(train_nodes.size());
    for (LabelId c = 0; c < labels.label_count(); ++c) {
        std::size_t positives = 0;
        for (std::size_t r = 0; r < train_nodes.size(); ++r) {
            const auto& set = labels.labels[train_nodes[r]];
            y[r] = std::binary_search(set.begin(), set.end(), c) ? 1 : 0;
            positives += y[r];
        }
        if (positives == 0 || positives == train_nodes.size()) {
            clf.constant_labels.push_back(c);
            clf.weights(c, d) = positives == 0 ? -std::numeric_limits<double>::infinity()
                                               : std::numeric_limits<double>::infinity();
            clf.fits.push_back({});
            continue;
        }
        BinaryFit fit = fit_binary_logreg(features, train_nodes, y, options);
        std::copy(fit.weights.begin(), fit.weights.end(), clf.weights.row(c).begin());
        clf.fits.push_back(std::move(fit));
    }
    return clf;
}

std::vector<std::vector<LabelId>> predict(const OvrClassifier& classifier, const DenseMatrix& features,
                                          std::span<const NodeIndex> nodes, const LabeledNodes& labels) {
    const std::size_t L = labels.label_count();
    std::vector<std::vector<LabelId>> out;
    out.reserve(nodes.size());
    std::vector<LabelId> order(L);
    std::vector<double> scores(L);
    for (NodeIndex v : nodes) {
        const auto x = features.row(v);
        for (LabelId c = 0; c < L; ++c) scores[c] = classifier.score(x, c);
        const std::size_t k = labels.multi_label ? std::max<std::size_t>(1, labels.labels[v].size()) : 1;
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](LabelId a, LabelId b) { return scores[a] > scores[b]; });
        std::vector<LabelId> chosen(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(std::min(k, L)));
        std::sort(chosen.begin(), chosen.end());
        out.push_back(std::move(chosen));
    }
    return out;
}

Scores score_predictions(const std::vector<std::vector<LabelId>>& predicted, std::span<const NodeIndex> nodes,
                         const LabeledNodes& labels) {
    const std::size_t L = labels.label_count();
    std::vector<std::size_t> tp(L, 0), fp(L, 0), fn(L, 0);
    std::size_t exact = 0;
    for (std::size_t r = 0; r < nodes.size(); ++r) {
        const auto& truth = labels.labels[nodes[r]];
        const auto& pred = predicted[r];
        if (pred == truth) ++exact;
        for (LabelId c : pred) {
            if (std::binary_search(truth.begin(), truth.end(), c))
                ++tp[c];
            else
                ++fp[c];
        }
        for (LabelId c : truth)
            if (!std::binary_search(pred.begin(), pred.end(), c)) ++fn[c];
    }
    Scores s;
    s.accuracy = nodes.empty() ? 0.0 : static_cast<double>(exact) / static_cast<double>(nodes.size());
    const double TP = std::accumulate(tp.begin(), tp.end(), 0.0);
    const double FP = std::accumulate(fp.begin(), fp.end(), 0.0);
    const double FN = std::accumulate(fn.begin(), fn.end(), 0.0);
    s.micro_f1 = (2 * TP + FP + FN) > 0 ? 2 * TP / (2 * TP + FP + FN) : 0.0;
    double macro = 0.0;
    std::size_t present = 0;
    for (std::size_t c = 0; c < L; ++c) {
        const double denom = 2.0 * tp[c] + fp[c] + fn[c];
        if (denom == 0) continue;
        macro += 2.0 * tp[c] / denom;
        ++present;
    }
    s.macro_f1 = present ? macro / static_cast<double>(present) : 0.0;
    return s;
}

EvalReport evaluate(const DenseMatrix& features, const LabeledNodes& labels, std::span<const double> ratios,
                    const EvalOptions& options) {
    if (options.repetitions < 1) throw DomainError("repetitions must be >= 1");
    for (double r : ratios)
        if (!(r > 0.0 && r < 1.0)) throw DomainError("training ratios must lie in (0, 1), got " + format_double(r));
    if (labels.labels.size() != features.rows())
        throw DomainError("label table and feature matrix disagree on the node count");

    const std::vector<NodeIndex> labeled = labels.labeled_nodes();
    if (labeled.size() < 2) throw DomainError("need at least two labelled nodes");

    // Per-class pools for stratification (single-label only).
    std::vector<std::vector<NodeIndex>> by_class(labels.label_count());
    if (!labels.multi_label)
        for (NodeIndex v : labeled) by_class[labels.labels[v].front()].push_back(v);

    EvalReport report;
    report.metric = labels.multi_label ? "micro_f1" : "accuracy";
    report.repetitions = options.repetitions;
    report.seed = options.seed;

    for (std::size_t ri = 0; ri < ratios.size(); ++ri) {
        const double ratio = ratios[ri];
        RatioResult rr;
        rr.ratio = ratio;
        double macro_sum = 0.0;
        std::size_t missing_total = 0;
        for (std::size_t rep = 0; rep < options.repetitions; ++rep) {
            Rng rng(derive_seed(options.seed, ri, rep));
            std::vector<NodeIndex> train, test;
            if (labels.multi_label) {
                std::vector<NodeIndex> pool = labeled;
                std::shuffle(pool.begin(), pool.end(), rng);
                std::size_t cut = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(pool.size())));
                cut = std::clamp<std::size_t>(cut, 1, pool.size() - 1);
                train.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(cut));
                test.assign(pool.begin() + static_cast<std::ptrdiff_t>(cut), pool.end());
            } else {
                for (auto pool : by_class) {
                    if (pool.empty()) continue;
                    std::shuffle(pool.begin(), pool.end(), rng);
                    std::size_t cut = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(pool.size())));
                    if (pool.size() >= 2) cut = std::clamp<std::size_t>(cut, 1, pool.size() - 1);
                    train.insert(train.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(cut));
                    test.insert(test.end(), pool.begin() + static_cast<std::ptrdiff_t>(cut), pool.end());
                }
                std::sort(train.begin(), train.end());
                std::sort(test.begin(), test.end());
            }
            const OvrClassifier clf = fit_logreg_ovr(features, labels, train, options.fit);
            missing_total += clf.constant_labels.size();
            const auto pred = predict(clf, features, test, labels);
            const Scores s = score_predictions(pred, test, labels);
            rr.runs.push_back(labels.multi_label ? s.micro_f1 : s.accuracy);
            macro_sum += s.macro_f1;
        }
        rr.mean = std::accumulate(rr.runs.begin(), rr.runs.end(), 0.0) / static_cast<double>(rr.runs.size());
        rr.stddev = sample_stddev(rr.runs, rr.mean);
        rr.macro_f1_mean = macro_sum / static_cast<double>(options.repetitions);
        if (missing_total > 0)
            report.warnings.push_back("ratio " + format_double(ratio) + ": " + std::to_string(missing_total) +
                                      " label fits had no positive or no negative training node; constant scores used");
        report.results.push_back(std::move(rr));
    }
    return report;
}

std::string format_report(const EvalReport& report) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(2);
    os << "metric: " << report.metric << "  repetitions: " << report.repetitions << "  seed: " << report.seed << '\n';
    os << std::setw(8) << "ratio" << std::setw(10) << "mean%" << std::setw(10) << "std%" << std::setw(12) << "macroF1%" << '\n';
    for (const auto& r : report.results)
        os << std::setw(8) << r.ratio << std::setw(10) << 100 * r.mean << std::setw(10) << 100 * r.stddev << std::setw(12)
           << 100 * r.macro_f1_mean << '\n';
    for (const auto& w : report.warnings) os << "warning: " << w << '\n';
    return os.str();
}

void write_report_csv(std::ostream& out, const EvalReport& report, const std::string& value, bool header) {
    if (header) out << "ratio,value,mean,std\n";
    for (const auto& r : report.results)
        out << format_double(r.ratio) << ',' << value << ',' << format_double(r.mean) << ',' << format_double(r.stddev) << '\n';
}

std::vector<ScoredWord> nearest_words(std::span<const double> query, const DenseMatrix& words, std::size_t top_n,
                                      std::span<const WordIndex> exclude) {
    if (top_n < 1) throw DomainError("top_n must be >= 1");
    if (query.size() != words.cols()) throw DomainError("query dimension does not match the word matrix");
    const double qn = norm2(query);
    if (!(qn > 0.0)) throw DomainError("nearest_words: zero-norm query vector");

    std::vector<WordIndex> skip(exclude.begin(), exclude.end());
    std::sort(skip.begin(), skip.end());

    std::vector<ScoredWord> all;
    all.reserve(words.rows());
    for (WordIndex w = 0; w < words.rows(); ++w) {
        if (std::binary_search(skip.begin(), skip.end(), w)) continue;
        const auto row = words.row(w);
        const double wn = norm2(row);
        const double sim = wn > 0.0 ? dot(query, row) / (qn * wn) : 0.0;
        all.push_back({w, sim});
    }
    const std::size_t k = std::min(top_n, all.size());
    auto better = [](const ScoredWord& a, const ScoredWord& b) {
        if (a.similarity != b.similarity) return a.similarity > b.similarity;
        return a.word < b.word;
    };
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(), better);
    all.resize(k);
    return all;
}

}  // namespace gvnr
