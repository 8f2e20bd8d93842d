#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "memswitch/engine.hpp"

namespace memswitch {

double quantile(std::vector<double> sample, double level) {
    if (sample.empty()) {
        throw DomainError("quantile: empty sample");
    }
    if (!(level >= 0.0 && level <= 1.0)) {
        throw DomainError("quantile: level must lie in [0, 1]");
    }
    std::sort(sample.begin(), sample.end());
    const double h = level * static_cast<double>(sample.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sample.size() - 1);
    return sample[lo] + (h - static_cast<double>(lo)) * (sample[hi] - sample[lo]);
}

namespace {

struct RunResult {
    std::vector<double> n;
    std::vector<double> r;
    double final_n = 0.0;
    double final_r = 0.0;
};

struct Moments {
    double mean = 0.0;
    double std = 0.0;
};

Moments moments(const std::vector<double>& xs) {
    double sum = 0.0;
    for (double x : xs) {
        sum += x;
    }
    const double mean = sum / static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) {
        ss += (x - mean) * (x - mean);
    }
    return {mean, std::sqrt(ss / static_cast<double>(xs.size()))};
}

}  // namespace

EnsembleStats run_ensemble(const SimConfig& config, const DeviceParams& params,
                           const PiecewiseSignal& signal, const EnsembleOptions& options) {
    if (options.n_runs == 0) {
        throw ConfigError("n_runs: must be >= 1");
    }
    params.validate();
    config.validate();
    const double grid_period =
        options.grid_period > 0.0 ? options.grid_period : config.duration / 100.0;

    std::vector<RunResult> results(options.n_runs);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (std::size_t i = next++; i < options.n_runs; i = next++) {
            try {
                const auto traj =
                    simulate(config, params, signal, derive_seed(options.master_seed, i));
                std::vector<double> n(traj.n_values.begin(), traj.n_values.end());
                results[i].n = resample_hold(traj.times, n, grid_period, config.duration);
                results[i].r =
                    resample_hold(traj.times, traj.resistances, grid_period, config.duration);
                results[i].final_n = n.back();
                results[i].final_r = traj.resistances.back();
                if (options.on_run) {
                    options.on_run(i, traj);
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next = options.n_runs;
            }
        }
    };

    unsigned threads = options.threads != 0 ? options.threads : std::thread::hardware_concurrency();
    threads = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(options.n_runs));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    EnsembleStats stats;
    stats.n_runs = options.n_runs;
    stats.quantile_levels = options.quantile_levels;
    const std::size_t points = results.front().n.size();
    for (std::size_t k = 0; k < points; ++k) {
        stats.grid.push_back(static_cast<double>(k) * grid_period);
    }
    stats.quantiles_r.assign(options.quantile_levels.size(), std::vector<double>(points));

    std::vector<double> column_n(options.n_runs);
    std::vector<double> column_r(options.n_runs);
    for (std::size_t k = 0; k < points; ++k) {
        for (std::size_t i = 0; i < options.n_runs; ++i) {
            column_n[i] = results[i].n[k];
            column_r[i] = results[i].r[k];
        }
        const auto mn = moments(column_n);
        const auto mr = moments(column_r);
        stats.mean_n.push_back(mn.mean);
        stats.std_n.push_back(mn.std);
        stats.mean_r.push_back(mr.mean);
        stats.std_r.push_back(mr.std);
        for (std::size_t q = 0; q < options.quantile_levels.size(); ++q) {
            stats.quantiles_r[q][k] = quantile(column_r, options.quantile_levels[q]);
        }
    }
    for (const auto& run : results) {
        stats.final_n.push_back(run.final_n);
        stats.final_r.push_back(run.final_r);
    }
    const auto fn = moments(stats.final_n);
    const auto fr = moments(stats.final_r);
    stats.mean_final_n = fn.mean;
    stats.std_final_n = fn.std;
    stats.mean_final_r = fr.mean;
    stats.std_final_r = fr.std;
    return stats;
}

}  // namespace memswitch
