#pragma once

#include <cstdint>

#include "floqsh/frsh.hpp"
#include "floqsh/timeseries.hpp"

namespace floqsh {

struct EnsembleConfig {
    int n_traj = 10000;
    std::uint64_t master_seed = 1;
    double dt = 0.5;
    double t_end = 5.0e4;
    int output_stride = 100;
    int worker_count = 0; ///< 0 = hardware concurrency

    void validate() const;
};

struct EnsembleResult {
    TimeSeries series;
    TrajectoryCounters counters;
    int workers_used = 0;
    double wall_seconds = 0.0;
    double steady_slope = 0.0;      ///< final-20%-window population slope
    bool steady_state_warning = false;
};

/// Runs the trajectory ensemble. Trajectories are processed in fixed-size
/// chunks whose partial sums are reduced in chunk order, so the result is
/// bit-identical for any worker count. Worker exceptions abort the run with
/// partial-result diagnostics.
EnsembleResult run_ensemble(const FrshEngine& engine, const EnsembleConfig& cfg);

} // namespace floqsh
