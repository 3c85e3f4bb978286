#include "gvnr/trainer.hpp"

#include "gvnr/detail/sgd.hpp"
#include "gvnr/errors.hpp"
#include "gvnr/format.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

namespace gvnr {

void TrainConfig::validate() const {
    if (dim < 1) throw DomainError("dimension must be >= 1");
    if (!(shift > 0.0 && shift <= 1.0)) throw DomainError("shift constant c must lie in (0, 1], got " + format_double(shift));
    if (!(zero_ratio >= 0.0) || !std::isfinite(zero_ratio))
        throw DomainError("zero sampling ratio k must be >= 0, got " + format_double(zero_ratio));
    if (epochs < 1) throw DomainError("epochs must be >= 1");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
        throw DomainError("learning rate must be positive, got " + format_double(learning_rate));
    if (!(x_max > 0.0)) throw DomainError("x_max must be positive, got " + format_double(x_max));
    if (!std::isfinite(glove_exponent)) throw DomainError("glove exponent must be finite");
    if (threads < 1) throw DomainError("thread count must be >= 1");
}

double zero_sample_rate(double p, double k) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("row proportion must lie in [0, 1], got " + format_double(p));
    if (!(k >= 0.0)) throw DomainError("k must be >= 0");
    if (p <= 1.0 / (k + 1.0) && p < 1.0) return k * p / (1.0 - p);
    return 1.0;
}

std::vector<NodeIndex> sample_zero_entries(const CoocMatrix& x, NodeIndex row, double k, Rng& rng) {
    const std::size_t n = x.n();
    const auto positives = x.row_columns(row);
    const std::size_t zeros = n - positives.size();
    const double alpha = zero_sample_rate(row_positive_proportion(x, row), k);
    std::vector<NodeIndex> out;
    if (alpha <= 0.0 || zeros == 0) return out;

    auto is_positive = [&](NodeIndex j) { return std::binary_search(positives.begin(), positives.end(), j); };
    auto complement = [&] {
        std::vector<NodeIndex> all;
        all.reserve(zeros);
        for (NodeIndex j = 0; j < n; ++j)
            if (!is_positive(j)) all.push_back(j);
        return all;
    };

    if (alpha >= 1.0) return complement();

    std::binomial_distribution<std::size_t> binomial(zeros, alpha);
    const std::size_t count = binomial(rng);
    if (count == 0) return out;

    if (2 * count > zeros) {
        // Dense draw: partial Fisher-Yates over the explicit zero set.
        out = complement();
        for (std::size_t a = 0; a < count; ++a) {
            std::uniform_int_distribution<std::size_t> pick(a, out.size() - 1);
            std::swap(out[a], out[pick(rng)]);
        }
        out.resize(count);
        return out;
    }

    out.reserve(count);
    std::uniform_int_distribution<NodeIndex> column(0, static_cast<NodeIndex>(n - 1));
    std::vector<NodeIndex> seen;  // sorted
    seen.reserve(count);
    while (out.size() < count) {
        const NodeIndex j = column(rng);
        if (is_positive(j)) continue;
        auto it = std::lower_bound(seen.begin(), seen.end(), j);
        if (it != seen.end() && *it == j) continue;
        seen.insert(it, j);
        out.push_back(j);
    }
    return out;
}

double glove_weight(double x, double x_max, double exponent) {
    if (!(x >= 0.0)) throw DomainError("glove weight needs x >= 0");
    if (x < x_max) return x == 0.0 ? 0.0 : std::pow(x / x_max, exponent);
    return 1.0;
}

double pair_residual(const EmbeddingModel& model, NodeIndex i, NodeIndex j, double x, double c) {
    return dot(model.target.row(i), model.context.row(j)) + model.target_bias[i] + model.context_bias[j] -
           std::log(c + x);
}

CellGradient cell_gradient(const EmbeddingModel& model, NodeIndex i, NodeIndex j, double x, double c) {
    CellGradient g;
    g.residual = pair_residual(model, i, j, x, c);
    const double scale = 2.0 * g.residual;
    const auto u = model.target.row(i);
    const auto v = model.context.row(j);
    g.target.resize(u.size());
    g.context.resize(v.size());
    for (std::size_t k = 0; k < u.size(); ++k) {
        g.target[k] = scale * v[k];
        g.context[k] = scale * u[k];
    }
    g.target_bias = scale;
    g.context_bias = scale;
    return g;
}

std::vector<Cell> plan_epoch(const CoocMatrix& x, const TrainConfig& cfg, Rng& rng) {
    std::vector<Cell> cells;
    const bool sample_zeros = cfg.objective == Objective::gvnr && cfg.zero_ratio > 0.0;
    cells.reserve(x.nnz() * (sample_zeros ? 2 : 1));
    for (NodeIndex i = 0; i < x.n(); ++i) {
        const auto cols = x.row_columns(i);
        const auto vals = x.row_values(i);
        for (std::size_t k = 0; k < cols.size(); ++k) cells.push_back({i, cols[k], vals[k]});
        if (sample_zeros)
            for (NodeIndex j : sample_zero_entries(x, i, cfg.zero_ratio, rng)) cells.push_back({i, j, 0.0});
    }
    std::shuffle(cells.begin(), cells.end(), rng);
    return cells;
}

TrainResult train(const CoocMatrix& x, const IdMap& ids, const TrainConfig& cfg, const TrainObserver& observer) {
    cfg.validate();
    if (ids.size() != x.n())
        throw DomainError("id map has " + std::to_string(ids.size()) + " nodes, matrix has " + std::to_string(x.n()));

    const std::size_t n = x.n();
    const std::size_t d = cfg.dim;
    TrainResult result;
    EmbeddingModel& m = result.model;
    m.ids = ids;
    m.target = DenseMatrix(n, d);
    m.context = DenseMatrix(n, d);
    m.target_bias.assign(n, 0.0);
    m.context_bias.assign(n, 0.0);
    {
        Rng init(derive_seed(cfg.seed, detail::init_stream));
        detail::init_uniform(m.target, init);
        detail::init_uniform(m.context, init);
    }

    DenseMatrix target_hist(n, d, 1.0), context_hist(n, d, 1.0);
    std::vector<double> target_bias_hist(n, 1.0), context_bias_hist(n, 1.0);

    const bool glove = cfg.objective == Objective::glove;
    const double lr = cfg.learning_rate;

    auto kernel = [&](const Cell& cell, unsigned) -> detail::CellOutcome {
        const double weight = glove ? glove_weight(cell.value, cfg.x_max, cfg.glove_exponent) : 1.0;
        const double goal = glove ? std::log(cell.value) : std::log(cfg.shift + cell.value);
        auto u = m.target.row(cell.row);
        auto v = m.context.row(cell.col);
        double& bu = m.target_bias[cell.row];
        double& bv = m.context_bias[cell.col];
        const double r = dot(u, v) + bu + bv - goal;
        const double g = 2.0 * weight * r;

        auto hu = target_hist.row(cell.row);
        auto hv = context_hist.row(cell.col);
        for (std::size_t k = 0; k < d; ++k) {
            const double gu = g * v[k];
            const double gv = g * u[k];
            detail::adagrad_step(u[k], hu[k], gu, lr);
            detail::adagrad_step(v[k], hv[k], gv, lr);
        }
        detail::adagrad_step(bu, target_bias_hist[cell.row], g, lr);
        detail::adagrad_step(bv, context_bias_hist[cell.col], g, lr);
        return {r, weight};
    };
    auto finite = [&] {
        return detail::all_finite(m.target.data()) && detail::all_finite(m.context.data()) &&
               detail::all_finite(m.target_bias) && detail::all_finite(m.context_bias);
    };

    result.history = detail::run_epochs(x, cfg, observer, kernel, finite);
    return result;
}

std::vector<double> node_representation(const EmbeddingModel& model, NodeIndex i, RepresentationMode mode) {
    const auto u = model.target.row(i);
    std::vector<double> out(u.begin(), u.end());
    if (mode == RepresentationMode::target_plus_context) {
        const auto v = model.context.row(i);
        for (std::size_t k = 0; k < out.size(); ++k) out[k] += v[k];
    }
    return out;
}

DenseMatrix node_features(const EmbeddingModel& model, RepresentationMode mode) {
    DenseMatrix f(model.node_count(), model.dim());
    for (NodeIndex i = 0; i < model.node_count(); ++i) {
        const auto rep = node_representation(model, i, mode);
        std::copy(rep.begin(), rep.end(), f.row(i).begin());
    }
    return f;
}

void write_embeddings(std::ostream& out, const DenseMatrix& vectors, const std::vector<std::string>& names) {
    out << vectors.rows() << ' ' << vectors.cols() << '\n';
    std::string line;
    for (std::size_t i = 0; i < vectors.rows(); ++i) {
        line.assign(names.at(i));
        append_values(line, vectors.row(i));
        line.push_back('\n');
        out << line;
    }
}

LoadedEmbeddings read_embeddings(std::istream& in, const std::string& source_name) {
    std::string line;
    std::size_t line_no = 0;
    std::size_t rows = 0, cols = 0;
    if (!std::getline(in, line)) throw ParseError(source_name, 0, "empty embedding file");
    ++line_no;
    const auto header = split_fields(line);
    if (header.size() != 2 || !parse_size(header[0], rows) || !parse_size(header[1], cols))
        throw ParseError(source_name, line_no, "expected header 'n d'");

    LoadedEmbeddings result{DenseMatrix(rows, cols), {}};
    std::size_t r = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto f = split_fields(line);
        if (f.empty()) continue;
        if (r >= rows) throw ParseError(source_name, line_no, "more rows than announced in header");
        if (f.size() != cols + 1)
            throw ParseError(source_name, line_no,
                             "expected " + std::to_string(cols + 1) + " fields, got " + std::to_string(f.size()));
        if (result.ids.intern(f[0]) != r) throw ParseError(source_name, line_no, "duplicate id '" + std::string(f[0]) + "'");
        auto row = result.vectors.row(r);
        for (std::size_t k = 0; k < cols; ++k)
            if (!parse_double(f[k + 1], row[k]))
                throw ParseError(source_name, line_no, "invalid number '" + std::string(f[k + 1]) + "'");
        ++r;
    }
    if (r != rows) throw ParseError(source_name, line_no, "header announces " + std::to_string(rows) + " rows, found " + std::to_string(r));
    return result;
}

void write_biases(std::ostream& out, const std::vector<double>& target_bias, const std::vector<double>& context_bias,
                  const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i)
        out << names[i] << ' ' << format_double(target_bias[i]) << ' ' << format_double(context_bias[i]) << '\n';
}

}  // namespace gvnr
