#include "gvnr/cooc.hpp"

#include "gvnr/errors.hpp"
#include "gvnr/format.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <thread>
#include <unordered_map>

namespace gvnr {

CoocMatrix CoocMatrix::from_rows(std::vector<Row> rows, std::size_t window, double x_min) {
    CoocMatrix m;
    m.window_ = window;
    m.x_min_ = x_min;
    m.offsets_.reserve(rows.size() + 1);
    for (auto& row : rows) {
        std::sort(row.begin(), row.end());
        const std::size_t row_start = m.columns_.size();
        for (const auto& [j, v] : row) {
            if (!(v > 0.0)) continue;
            if (m.columns_.size() > row_start && m.columns_.back() == j) {
                m.values_.back() += v;  // repeated column: sum
                continue;
            }
            m.columns_.push_back(j);
            m.values_.push_back(v);
        }
        m.offsets_.push_back(m.columns_.size());
    }
    return m;
}

double CoocMatrix::value(NodeIndex i, NodeIndex j) const {
    const auto cols = row_columns(i);
    auto it = std::lower_bound(cols.begin(), cols.end(), j);
    if (it == cols.end() || *it != j) return 0.0;
    return row_values(i)[static_cast<std::size_t>(it - cols.begin())];
}

namespace {

using Accumulator = std::vector<std::unordered_map<NodeIndex, double>>;

void accumulate(const WalkCorpus& corpus, std::size_t begin, std::size_t end, std::size_t window,
                const std::vector<double>& inv, Accumulator& acc) {
    for (std::size_t w = begin; w < end; ++w) {
        const auto walk = corpus.walk(w);
        for (std::size_t p = 0; p < walk.size(); ++p) {
            const NodeIndex a = walk[p];
            const std::size_t reach = std::min(window, walk.size() - 1 - p);
            for (std::size_t q = 1; q <= reach; ++q) {
                const NodeIndex b = walk[p + q];
                acc[a][b] += inv[q];
                acc[b][a] += inv[q];
            }
        }
    }
}

}  // namespace

CoocMatrix build_cooc(const WalkCorpus& corpus, std::size_t n, std::size_t window, unsigned threads) {
    if (window < 1) throw DomainError("window must be >= 1");
    std::vector<double> inv(window + 1, 0.0);
    for (std::size_t q = 1; q <= window; ++q) inv[q] = 1.0 / static_cast<double>(q);

    const std::size_t walks = corpus.size();
    threads = static_cast<unsigned>(std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(walks, 1)));

    std::vector<Accumulator> partial(threads, Accumulator(n));
    if (threads == 1) {
        accumulate(corpus, 0, walks, window, inv, partial[0]);
    } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (walks + threads - 1) / threads;
        for (unsigned k = 0; k < threads; ++k) {
            const std::size_t b = std::min(walks, k * chunk);
            const std::size_t e = std::min(walks, b + chunk);
            pool.emplace_back([&, k, b, e] { accumulate(corpus, b, e, window, inv, partial[k]); });
        }
    }

    std::vector<CoocMatrix::Row> rows(n);
    for (std::size_t i = 0; i < n; ++i) {
        // Merge in worker order; x_ij and x_ji see the same additions in the
        // same order, so symmetry stays exact.
        auto& merged = partial[0][i];
        for (unsigned k = 1; k < threads; ++k)
            for (const auto& [j, v] : partial[k][i]) merged[j] += v;
        rows[i].assign(merged.begin(), merged.end());
        std::unordered_map<NodeIndex, double>().swap(merged);
    }
    return CoocMatrix::from_rows(std::move(rows), window, 0.0);
}

CoocMatrix apply_threshold(const CoocMatrix& x, double x_min) {
    if (!(x_min >= 0.0)) throw DomainError("x_min must be >= 0");
    CoocMatrix out;
    out.window_ = x.window_;
    out.x_min_ = x_min;
    out.offsets_.reserve(x.offsets_.size());
    for (NodeIndex i = 0; i < x.n(); ++i) {
        const auto cols = x.row_columns(i);
        const auto vals = x.row_values(i);
        for (std::size_t k = 0; k < cols.size(); ++k) {
            if (vals[k] < x_min) continue;
            out.columns_.push_back(cols[k]);
            out.values_.push_back(vals[k]);
        }
        out.offsets_.push_back(out.columns_.size());
    }
    return out;
}

double row_positive_proportion(const CoocMatrix& x, NodeIndex i) {
    if (x.n() == 0) return 0.0;
    return static_cast<double>(x.row_positive_count(i)) / static_cast<double>(x.n());
}

void write_cooc(std::ostream& out, const CoocMatrix& x, const IdMap& ids) {
    out << x.n() << ' ' << x.nnz() << ' ' << x.window() << ' ' << format_double(x.x_min()) << '\n';
    std::string line;
    for (NodeIndex i = 0; i < x.n(); ++i) {
        const auto cols = x.row_columns(i);
        const auto vals = x.row_values(i);
        for (std::size_t k = 0; k < cols.size(); ++k) {
            line.assign(ids.name(i));
            line.push_back(' ');
            line.append(ids.name(cols[k]));
            line.push_back(' ');
            line.append(format_double(vals[k]));
            line.push_back('\n');
            out << line;
        }
    }
}

LoadedCooc read_cooc(std::istream& in, const std::string& source_name, const IdMap* known_ids) {
    std::string line;
    std::size_t line_no = 0;
    std::size_t n = 0, nnz = 0, window = 0;
    double x_min = 0.0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto f = split_fields(line);
        if (f.empty()) continue;
        if (f.size() != 4 || !parse_size(f[0], n) || !parse_size(f[1], nnz) || !parse_size(f[2], window) ||
            !parse_double(f[3], x_min))
            throw ParseError(source_name, line_no, "expected header 'n nnz window x_min'");
        break;
    }
    if (line_no == 0) throw ParseError(source_name, 0, "empty co-occurrence file");

    struct Triplet {
        std::string row, col;
        double value;
        std::size_t line;
    };
    std::vector<Triplet> triplets;
    triplets.reserve(nnz);
    while (std::getline(in, line)) {
        ++line_no;
        const auto f = split_fields(line);
        if (f.empty()) continue;
        double v = 0.0;
        if (f.size() != 3 || !parse_double(f[2], v))
            throw ParseError(source_name, line_no, "expected triplet 'i j x_ij'");
        if (!(v > 0.0)) throw ParseError(source_name, line_no, "co-occurrence values must be positive");
        triplets.push_back({std::string(f[0]), std::string(f[1]), v, line_no});
    }
    if (triplets.size() != nnz)
        throw ParseError(source_name, line_no,
                         "header announces " + std::to_string(nnz) + " entries, found " + std::to_string(triplets.size()));

    LoadedCooc result;
    if (known_ids) {
        if (known_ids->size() != n)
            throw ParseError(source_name, 1, "header n=" + std::to_string(n) + " does not match " +
                                                 std::to_string(known_ids->size()) + " known nodes");
        result.ids = *known_ids;
    } else {
        for (const auto& t : triplets) result.ids.intern(t.row);
        for (const auto& t : triplets) result.ids.intern(t.col);
    }
    std::vector<CoocMatrix::Row> rows(result.ids.size());
    for (const auto& t : triplets) {
        auto i = result.ids.find(t.row);
        auto j = result.ids.find(t.col);
        if (!i || !j) throw ParseError(source_name, t.line, "unknown node id");
        rows[*i].emplace_back(*j, t.value);
    }
    result.matrix = CoocMatrix::from_rows(std::move(rows), window, x_min);
    return result;
}

}  // namespace gvnr
