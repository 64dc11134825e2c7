#include "floqsh/ensemble.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

namespace floqsh {

namespace {
constexpr int kChunk = 32; // trajectories per reduction chunk (fixed for determinism)
}

void EnsembleConfig::validate() const {
    if (n_traj < 1) throw std::invalid_argument("ensemble.n_traj: must be >= 1");
    if (!(dt > 0)) throw std::invalid_argument("ensemble.dt: must be > 0");
    if (!(t_end > 0)) throw std::invalid_argument("ensemble.t_end: must be > 0");
    if (output_stride < 1) throw std::invalid_argument("io.stride: must be >= 1");
    if (worker_count < 0) throw std::invalid_argument("ensemble.worker_count: must be >= 0");
}

EnsembleResult run_ensemble(const FrshEngine& engine, const EnsembleConfig& cfg) {
    cfg.validate();
    const auto t_start = std::chrono::steady_clock::now();

    const long n_steps = std::lround(cfg.t_end / cfg.dt);
    const int n_bins = static_cast<int>(n_steps / cfg.output_stride) + 1;
    const int n_chunks = (cfg.n_traj + kChunk - 1) / kChunk;

    struct ChunkAccum {
        Eigen::VectorXd pop_sum, pop_sumsq, ke_sum, ke_sumsq;
        TrajectoryCounters counters;
        bool done = false;
    };
    std::vector<ChunkAccum> chunks(n_chunks);

    std::atomic<int> next_chunk{0};
    std::mutex err_mutex;
    std::vector<std::string> errors;

    auto worker_fn = [&]() {
        FrshWorkspace ws;
        for (;;) {
            const int c = next_chunk.fetch_add(1);
            if (c >= n_chunks) return;
            ChunkAccum& acc = chunks[c];
            acc.pop_sum = Eigen::VectorXd::Zero(n_bins);
            acc.pop_sumsq = Eigen::VectorXd::Zero(n_bins);
            acc.ke_sum = Eigen::VectorXd::Zero(n_bins);
            acc.ke_sumsq = Eigen::VectorXd::Zero(n_bins);
            const int lo = c * kChunk;
            const int hi = std::min(cfg.n_traj, lo + kChunk);
            try {
                for (int i = lo; i < hi; ++i) {
                    TrajectoryState s = engine.sample_initial(cfg.master_seed,
                                                              static_cast<std::uint64_t>(i));
                    int bin = 0;
                    auto record = [&]() {
                        const double pop = engine.donor_population(s);
                        const double ke = engine.kinetic_energy(s);
                        acc.pop_sum[bin] += pop;
                        acc.pop_sumsq[bin] += pop * pop;
                        acc.ke_sum[bin] += ke;
                        acc.ke_sumsq[bin] += ke * ke;
                        ++bin;
                    };
                    record();
                    for (long k = 1; k <= n_steps; ++k) {
                        engine.step(s, cfg.dt, ws);
                        if (k % cfg.output_stride == 0) record();
                    }
                    acc.counters.merge(s.counters);
                }
                acc.done = true;
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(err_mutex);
                errors.push_back("chunk " + std::to_string(c) + " (trajectories " +
                                 std::to_string(lo) + ".." + std::to_string(hi - 1) +
                                 "): " + e.what());
                return;
            }
        }
    };

    int workers = cfg.worker_count > 0 ? cfg.worker_count
                                       : static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
    workers = std::min(workers, n_chunks);

    {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker_fn);
        for (auto& th : pool) th.join();
    }

    if (!errors.empty()) {
        int completed = 0;
        for (const auto& c : chunks) completed += c.done ? 1 : 0;
        std::string msg = "run_ensemble: worker failure after " + std::to_string(completed) +
                          "/" + std::to_string(n_chunks) + " chunks:";
        for (const auto& e : errors) msg += "\n  " + e;
        throw std::runtime_error(msg);
    }

    EnsembleResult res;
    res.workers_used = workers;
    TimeSeries& ts = res.series;
    ts.has_stderr = true;
    ts.n_samples = cfg.n_traj;
    ts.t.resize(n_bins);
    for (int b = 0; b < n_bins; ++b) ts.t[b] = static_cast<double>(b) * cfg.output_stride * cfg.dt;

    ts.pop_sum = Eigen::VectorXd::Zero(n_bins);
    ts.pop_sumsq = Eigen::VectorXd::Zero(n_bins);
    ts.ke_sum = Eigen::VectorXd::Zero(n_bins);
    ts.ke_sumsq = Eigen::VectorXd::Zero(n_bins);
    for (int c = 0; c < n_chunks; ++c) { // fixed reduction order
        ts.pop_sum += chunks[c].pop_sum;
        ts.pop_sumsq += chunks[c].pop_sumsq;
        ts.ke_sum += chunks[c].ke_sum;
        ts.ke_sumsq += chunks[c].ke_sumsq;
        res.counters.merge(chunks[c].counters);
    }

    const double n = static_cast<double>(cfg.n_traj);
    ts.pop = ts.pop_sum / n;
    ts.kinetic = ts.ke_sum / n;
    ts.pop_stderr.resize(n_bins);
    ts.kinetic_stderr.resize(n_bins);
    for (int b = 0; b < n_bins; ++b) {
        auto stderr_of = [&](double sum, double sumsq) {
            if (cfg.n_traj < 2) return 0.0;
            const double mean = sum / n;
            const double var = std::max(0.0, (sumsq - n * mean * mean) / (n - 1.0));
            return std::sqrt(var / n);
        };
        ts.pop_stderr[b] = stderr_of(ts.pop_sum[b], ts.pop_sumsq[b]);
        ts.kinetic_stderr[b] = stderr_of(ts.ke_sum[b], ts.ke_sumsq[b]);
    }

    // Final-window slope as a steady-state guard.
    if (n_bins >= 4) {
        const int start = static_cast<int>(std::ceil(0.8 * (n_bins - 1)));
        const auto tseg = ts.t.segment(start, n_bins - start);
        const auto pseg = ts.pop.segment(start, n_bins - start);
        const double tm = tseg.mean(), pm = pseg.mean();
        const double var = (tseg.array() - tm).square().sum();
        res.steady_slope = var > 0 ? ((tseg.array() - tm) * (pseg.array() - pm)).sum() / var : 0.0;
        // Warn when the window drifts by more than ~2 stderr across its span.
        const double drift = std::abs(res.steady_slope) * (ts.t[n_bins - 1] - ts.t[start]);
        const double noise = ts.pop_stderr[n_bins - 1];
        res.steady_state_warning = drift > std::max(2.0 * noise, 1e-4);
    }

    res.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return res;
}

} // namespace floqsh
