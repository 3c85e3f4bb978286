#pragma once

// Epoch loop shared by the node-only and text trainers.

#include "gvnr/errors.hpp"
#include "gvnr/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <thread>
#include <vector>

namespace gvnr::detail {

enum StreamTag : std::uint64_t { init_stream = 1, plan_stream = 2, fallback_stream = 3 };

/// AdaGrad with the accumulator started at 1: the step uses the history
/// before this gradient is added.
inline void adagrad_step(double& param, double& history, double grad, double lr) {
    param -= lr * grad / std::sqrt(history);
    history += grad * grad;
}

inline void init_uniform(DenseMatrix& m, Rng& rng) {
    const double half = 0.5 / static_cast<double>(m.cols());
    std::uniform_real_distribution<double> u(-half, half);
    for (double& v : m.data()) v = u(rng);
}

inline bool all_finite(std::span<const double> values) {
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

struct CellOutcome {
    double residual;
    double weight;
};

/// Runs cfg.epochs epochs. `kernel(cell, worker)` applies one update and
/// returns the pre-update residual and weight; `finite()` checks all
/// parameters after each epoch.
template <class Kernel, class Finite>
std::vector<EpochStats> run_epochs(const CoocMatrix& x, const TrainConfig& cfg, const TrainObserver& observer,
                                   Kernel&& kernel, Finite&& finite) {
    Rng plan_rng(derive_seed(cfg.seed, plan_stream));
    std::vector<EpochStats> history;
    history.reserve(cfg.epochs);

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const std::vector<Cell> cells = plan_epoch(x, cfg, plan_rng);
        if (observer.on_cells) observer.on_cells(epoch, cells);

        const unsigned workers =
            static_cast<unsigned>(std::clamp<std::size_t>(cfg.threads, 1, std::max<std::size_t>(cells.size(), 1)));
        struct Partial {
            double weighted = 0.0, positive = 0.0;
            std::size_t positives = 0, zeros = 0;
        };
        std::vector<Partial> partial(workers);

        auto run_range = [&](unsigned worker, std::size_t begin, std::size_t end) {
            Partial& acc = partial[worker];
            for (std::size_t c = begin; c < end; ++c) {
                const Cell& cell = cells[c];
                const CellOutcome out = kernel(cell, worker);
                const double sq = out.residual * out.residual;
                acc.weighted += out.weight * sq;
                if (cell.value > 0.0) {
                    acc.positive += sq;
                    ++acc.positives;
                } else {
                    ++acc.zeros;
                }
            }
        };

        if (workers == 1) {
            run_range(0, 0, cells.size());
        } else {
            std::vector<std::jthread> pool;
            const std::size_t chunk = (cells.size() + workers - 1) / workers;
            for (unsigned w = 0; w < workers; ++w) {
                const std::size_t b = std::min(cells.size(), w * chunk);
                const std::size_t e = std::min(cells.size(), b + chunk);
                pool.emplace_back(run_range, w, b, e);
            }
        }

        EpochStats stats;
        stats.epoch = epoch;
        double weighted = 0.0, positive = 0.0;
        for (const auto& p : partial) {
            weighted += p.weighted;
            positive += p.positive;
            stats.positive_updates += p.positives;
            stats.zero_updates += p.zeros;
        }
        if (stats.updates() > 0) stats.mean_squared_residual = weighted / static_cast<double>(stats.updates());
        if (stats.positive_updates > 0)
            stats.positive_mean_squared_residual = positive / static_cast<double>(stats.positive_updates);

        if (!finite() || !std::isfinite(stats.mean_squared_residual)) throw TrainingDiverged(epoch, cfg.learning_rate);
        history.push_back(stats);
        if (observer.on_epoch) observer.on_epoch(stats);
    }
    return history;
}

}  // namespace gvnr::detail
