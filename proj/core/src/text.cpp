#include "gvnr/text.hpp"

#include "gvnr/detail/sgd.hpp"
#include "gvnr/errors.hpp"
#include "gvnr/format.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <unordered_map>

namespace gvnr {

namespace {

bool is_word_byte(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

BagOfWords make_bag(std::map<WordIndex, std::uint32_t> counts) {
    BagOfWords bag;
    for (const auto& [w, c] : counts) {
        bag.words.push_back(w);
        bag.counts.push_back(c);
        bag.total += c;
    }
    return bag;
}

}  // namespace

struct VocabBuilder {
    static Vocabulary make(std::vector<std::pair<std::string, std::pair<std::size_t, std::size_t>>> entries,
                           std::size_t min_count, bool by_frequency) {
        if (by_frequency)
            std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
                if (a.second.first != b.second.first) return a.second.first > b.second.first;
                return a.first < b.first;
            });
        Vocabulary v;
        v.min_count_ = min_count;
        for (auto& [word, freq] : entries) {
            v.ids_.intern(word);
            v.words_.push_back(std::move(word));
            v.term_frequency_.push_back(freq.first);
            v.doc_frequency_.push_back(freq.second);
        }
        return v;
    }
};

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && !is_word_byte(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t start = i;
        while (i < text.size() && is_word_byte(static_cast<unsigned char>(text[i]))) ++i;
        if (i > start) {
            std::string tok(text.substr(start, i - start));
            for (char& c : tok)
                if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
            tokens.push_back(std::move(tok));
        }
    }
    return tokens;
}

TextData build_vocab(std::span<const std::string> documents, std::size_t min_count) {
    std::vector<std::vector<std::string>> tokens;
    tokens.reserve(documents.size());
    std::unordered_map<std::string, std::pair<std::size_t, std::size_t>> freq;  // term, doc
    for (const auto& doc : documents) {
        tokens.push_back(tokenize(doc));
        std::vector<std::string> seen = tokens.back();
        std::sort(seen.begin(), seen.end());
        seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
        for (const auto& t : tokens.back()) ++freq[t].first;
        for (const auto& t : seen) ++freq[t].second;
    }

    std::vector<std::pair<std::string, std::pair<std::size_t, std::size_t>>> kept;
    for (auto& [word, f] : freq)
        if (f.first >= min_count) kept.emplace_back(word, f);
    if (kept.empty()) throw DomainError("no word reaches min_count=" + std::to_string(min_count) + " in the document corpus");

    TextData out{VocabBuilder::make(std::move(kept), min_count, true), {}};
    out.docs.bags.reserve(documents.size());
    for (std::size_t j = 0; j < tokens.size(); ++j) {
        std::map<WordIndex, std::uint32_t> counts;
        for (const auto& t : tokens[j])
            if (auto w = out.vocabulary.find(t)) ++counts[*w];
        out.docs.bags.push_back(make_bag(std::move(counts)));
        if (out.docs.bags.back().empty()) out.docs.empty_nodes.push_back(static_cast<NodeIndex>(j));
    }
    return out;
}

BagOfWords bag_from_text(std::string_view text, const Vocabulary& vocabulary) {
    std::map<WordIndex, std::uint32_t> counts;
    for (const auto& t : tokenize(text))
        if (auto w = vocabulary.find(t)) ++counts[*w];
    return make_bag(std::move(counts));
}

Vocabulary vocabulary_from_words(const std::vector<std::string>& words) {
    std::vector<std::pair<std::string, std::pair<std::size_t, std::size_t>>> entries;
    entries.reserve(words.size());
    for (const auto& w : words) entries.push_back({w, {0, 0}});
    return VocabBuilder::make(std::move(entries), 0, false);
}

std::vector<std::string> read_documents(std::istream& in, const IdMap& ids, const std::string& source_name,
                                        std::size_t* unknown) {
    std::vector<std::string> docs(ids.size());
    std::string line;
    std::size_t line_no = 0;
    std::size_t missing = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view view = chomp(line);
        if (view.empty()) continue;
        const auto tab = view.find('\t');
        if (tab == std::string_view::npos)
            throw ParseError(source_name, line_no, "expected 'id<TAB>text'");
        const auto id = ids.find(view.substr(0, tab));
        if (!id) {
            ++missing;
            continue;
        }
        std::string& doc = docs[*id];
        if (!doc.empty()) doc.push_back(' ');
        doc.append(view.substr(tab + 1));
    }
    if (unknown) *unknown = missing;
    return docs;
}

void doc_context_vector(const BagOfWords& bag, const DenseMatrix& words, std::span<double> out) {
    if (bag.empty()) throw DomainError("document context vector of an empty document");
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t k = 0; k < bag.words.size(); ++k) {
        const double c = bag.counts[k];
        const auto w = words.row(bag.words[k]);
        for (std::size_t a = 0; a < out.size(); ++a) out[a] += c * w[a];
    }
    const double total = static_cast<double>(bag.total);
    for (double& v : out) v /= total;
}

std::vector<double> doc_context_vector(const BagOfWords& bag, const DenseMatrix& words) {
    std::vector<double> out(words.cols());
    doc_context_vector(bag, words, out);
    return out;
}

void TextEmbeddingModel::context_vector(NodeIndex j, std::span<double> out) const {
    const BagOfWords& bag = text.docs.bags[j];
    if (bag.empty()) {
        const auto v = fallback_context.row(j);
        std::copy(v.begin(), v.end(), out.begin());
    } else {
        doc_context_vector(bag, words, out);
    }
}

double text_pair_residual(const TextEmbeddingModel& model, NodeIndex i, NodeIndex j, double x, double c) {
    std::vector<double> ctx(model.dim());
    model.context_vector(j, ctx);
    return dot(model.target.row(i), ctx) + model.target_bias[i] + model.context_bias[j] - std::log(c + x);
}

TextCellGradient text_cell_gradient(const TextEmbeddingModel& model, NodeIndex i, NodeIndex j, double x, double c) {
    const std::size_t d = model.dim();
    TextCellGradient g;
    std::vector<double> ctx(d);
    model.context_vector(j, ctx);
    const auto u = model.target.row(i);
    g.residual = dot(u, ctx) + model.target_bias[i] + model.context_bias[j] - std::log(c + x);
    const double scale = 2.0 * g.residual;
    g.target.resize(d);
    for (std::size_t a = 0; a < d; ++a) g.target[a] = scale * ctx[a];
    g.target_bias = scale;
    g.context_bias = scale;

    const BagOfWords& bag = model.text.docs.bags[j];
    if (bag.empty()) {
        g.fallback_context.resize(d);
        for (std::size_t a = 0; a < d; ++a) g.fallback_context[a] = scale * u[a];
        return g;
    }
    const double total = static_cast<double>(bag.total);
    for (std::size_t k = 0; k < bag.words.size(); ++k) {
        const double share = scale * (bag.counts[k] / total);
        std::vector<double> grad(d);
        for (std::size_t a = 0; a < d; ++a) grad[a] = share * u[a];
        g.words.push_back(bag.words[k]);
        g.word_grads.push_back(std::move(grad));
    }
    return g;
}

TextTrainResult train_text(const CoocMatrix& x, const IdMap& ids, const TextData& text, const TrainConfig& cfg,
                           const TrainObserver& observer) {
    cfg.validate();
    if (cfg.objective != Objective::gvnr) throw DomainError("the text model only supports the gvnr objective");
    const std::size_t n = x.n();
    if (ids.size() != n || text.docs.bags.size() != n)
        throw DomainError("documents, ids and co-occurrence matrix disagree on the node count");

    const std::size_t d = cfg.dim;
    const std::size_t m = text.vocabulary.size();
    TextTrainResult result;
    TextEmbeddingModel& model = result.model;
    model.ids = ids;
    model.text = text;
    model.target = DenseMatrix(n, d);
    model.words = DenseMatrix(m, d);
    model.fallback_context = DenseMatrix(n, d);
    model.target_bias.assign(n, 0.0);
    model.context_bias.assign(n, 0.0);
    {
        Rng init(derive_seed(cfg.seed, detail::init_stream));
        detail::init_uniform(model.target, init);
        detail::init_uniform(model.words, init);
        Rng fallback(derive_seed(cfg.seed, detail::fallback_stream));
        detail::init_uniform(model.fallback_context, fallback);
        for (NodeIndex j = 0; j < n; ++j)
            if (!text.docs.bags[j].empty()) std::fill(model.fallback_context.row(j).begin(), model.fallback_context.row(j).end(), 0.0);
    }

    DenseMatrix target_hist(n, d, 1.0), word_hist(m, d, 1.0), fallback_hist(n, d, 1.0);
    std::vector<double> target_bias_hist(n, 1.0), context_bias_hist(n, 1.0);
    const double lr = cfg.learning_rate;

    struct Scratch {
        std::vector<double> ctx, old_u;
    };
    std::vector<Scratch> scratch(std::max(1u, cfg.threads), Scratch{std::vector<double>(d), std::vector<double>(d)});

    auto kernel = [&](const Cell& cell, unsigned worker) -> detail::CellOutcome {
        Scratch& s = scratch[worker];
        const BagOfWords& bag = model.text.docs.bags[cell.col];
        auto u = model.target.row(cell.row);
        double& bu = model.target_bias[cell.row];
        double& bv = model.context_bias[cell.col];
        model.context_vector(cell.col, s.ctx);
        const double r = dot(u, s.ctx) + bu + bv - std::log(cfg.shift + cell.value);
        const double g = 2.0 * r;

        std::copy(u.begin(), u.end(), s.old_u.begin());
        auto hu = target_hist.row(cell.row);
        for (std::size_t a = 0; a < d; ++a) detail::adagrad_step(u[a], hu[a], g * s.ctx[a], lr);

        if (bag.empty()) {
            auto v = model.fallback_context.row(cell.col);
            auto hv = fallback_hist.row(cell.col);
            for (std::size_t a = 0; a < d; ++a) detail::adagrad_step(v[a], hv[a], g * s.old_u[a], lr);
        } else {
            const double total = static_cast<double>(bag.total);
            for (std::size_t k = 0; k < bag.words.size(); ++k) {
                const double share = g * (bag.counts[k] / total);
                auto w = model.words.row(bag.words[k]);
                auto hw = word_hist.row(bag.words[k]);
                for (std::size_t a = 0; a < d; ++a) detail::adagrad_step(w[a], hw[a], share * s.old_u[a], lr);
            }
        }
        detail::adagrad_step(bu, target_bias_hist[cell.row], g, lr);
        detail::adagrad_step(bv, context_bias_hist[cell.col], g, lr);
        return {r, 1.0};
    };
    auto finite = [&] {
        return detail::all_finite(model.target.data()) && detail::all_finite(model.words.data()) &&
               detail::all_finite(model.fallback_context.data()) && detail::all_finite(model.target_bias) &&
               detail::all_finite(model.context_bias);
    };

    result.history = detail::run_epochs(x, cfg, observer, kernel, finite);
    return result;
}

std::vector<double> document_representation(const TextEmbeddingModel& model, NodeIndex j) {
    return doc_context_vector(model.text.docs.bags.at(j), model.words);
}

}  // namespace gvnr
