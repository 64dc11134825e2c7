#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace floqsh {

/// Observables on a uniform output grid. FR-SH ensembles carry standard
/// errors and raw accumulators; the deterministic FR-QME solver does not.
struct TimeSeries {
    Eigen::VectorXd t;
    Eigen::VectorXd pop, pop_stderr;
    Eigen::VectorXd kinetic, kinetic_stderr;
    bool has_stderr = false;
    long n_samples = 0;
    // raw accumulators (sums over trajectories), kept for reproducible merges
    Eigen::VectorXd pop_sum, pop_sumsq, ke_sum, ke_sumsq;

    int size() const { return static_cast<int>(t.size()); }
};

/// CSV with header `t,pop_D,pop_D_stderr,kinetic,kinetic_stderr` (with
/// stderr) or `t,pop_D,kinetic` (without). Values are written with
/// locale-independent 17-significant-digit formatting.
void write_csv(const TimeSeries& s, const std::string& path);

std::string format_full(double v);

/// Linear interpolation of (ts.t, values) onto query time tq (clamped ends).
double interp_at(const Eigen::VectorXd& t, const Eigen::VectorXd& v, double tq);

struct CompareReport {
    double max_abs_dpop = 0.0;        ///< over the common grid
    double short_time_max_dpop = 0.0; ///< first 5% of the common range
    double steady_pop_a = 0.0, steady_pop_b = 0.0, steady_pop_diff = 0.0;
    double steady_ke_a = 0.0, steady_ke_b = 0.0, steady_ke_diff = 0.0;
    double steady_slope_pop_a = 0.0, steady_slope_pop_b = 0.0; ///< final-window fit
    double window_start = 0.0, window_end = 0.0;

    std::string to_json() const;
};

/// Pairwise comparison on the final-20% steady window and the first-5%
/// transient. Series on different grids are compared on the coarser grid of
/// the overlapping range. Throws on disjoint time ranges.
CompareReport compare_series(const TimeSeries& a, const TimeSeries& b);

/// Mean over the final `fraction` of the grid.
double steady_window_mean(const TimeSeries& s, const Eigen::VectorXd& values,
                          double fraction = 0.2);

/// Strict-increase verdict across a sweep; `errors` may be empty (exact
/// series) or per-value 1-sigma errors, in which case consecutive values must
/// differ by more than the combined error.
struct OrderingVerdict {
    bool strictly_increasing = false;
    bool outside_errors = false;
};
OrderingVerdict check_increasing(const std::vector<double>& values,
                                 const std::vector<double>& errors);

} // namespace floqsh
