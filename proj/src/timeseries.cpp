#include "floqsh/timeseries.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace floqsh {

std::string format_full(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

void write_csv(const TimeSeries& s, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_csv: cannot open " + path);
    if (s.has_stderr) {
        out << "t,pop_D,pop_D_stderr,kinetic,kinetic_stderr\n";
        for (int i = 0; i < s.size(); ++i)
            out << format_full(s.t[i]) << ',' << format_full(s.pop[i]) << ','
                << format_full(s.pop_stderr[i]) << ',' << format_full(s.kinetic[i]) << ','
                << format_full(s.kinetic_stderr[i]) << '\n';
    } else {
        out << "t,pop_D,kinetic\n";
        for (int i = 0; i < s.size(); ++i)
            out << format_full(s.t[i]) << ',' << format_full(s.pop[i]) << ','
                << format_full(s.kinetic[i]) << '\n';
    }
    if (!out) throw std::runtime_error("write_csv: write failed for " + path);
}

double interp_at(const Eigen::VectorXd& t, const Eigen::VectorXd& v, double tq) {
    const int n = static_cast<int>(t.size());
    if (tq <= t[0]) return v[0];
    if (tq >= t[n - 1]) return v[n - 1];
    int lo = 0, hi = n - 1;
    while (hi - lo > 1) {
        const int mid = (lo + hi) / 2;
        (t[mid] <= tq ? lo : hi) = mid;
    }
    const double w = (tq - t[lo]) / (t[hi] - t[lo]);
    return (1.0 - w) * v[lo] + w * v[hi];
}

double steady_window_mean(const TimeSeries& s, const Eigen::VectorXd& values, double fraction) {
    const int n = s.size();
    const int start = std::min(n - 1, static_cast<int>(std::ceil((1.0 - fraction) * (n - 1))));
    return values.segment(start, n - start).mean();
}

namespace {

double window_slope(const Eigen::VectorXd& t, const Eigen::VectorXd& v, int start) {
    const int n = static_cast<int>(t.size()) - start;
    if (n < 2) return 0.0;
    const auto ts = t.segment(start, n);
    const auto vs = v.segment(start, n);
    const double tm = ts.mean(), vm = vs.mean();
    const double cov = ((ts.array() - tm) * (vs.array() - vm)).sum();
    const double var = ((ts.array() - tm).square()).sum();
    return var > 0 ? cov / var : 0.0;
}

} // namespace

CompareReport compare_series(const TimeSeries& a, const TimeSeries& b) {
    const double lo = std::max(a.t[0], b.t[0]);
    const double hi = std::min(a.t[a.size() - 1], b.t[b.size() - 1]);
    if (lo >= hi) throw std::invalid_argument("compare_series: disjoint time ranges");

    // Evaluate on the coarser grid restricted to the overlap.
    const TimeSeries& grid = (a.size() <= b.size()) ? a : b;
    std::vector<double> ts;
    for (int i = 0; i < grid.size(); ++i)
        if (grid.t[i] >= lo && grid.t[i] <= hi) ts.push_back(grid.t[i]);

    CompareReport r;
    const double short_end = lo + 0.05 * (hi - lo);
    for (double tq : ts) {
        const double da = interp_at(a.t, a.pop, tq);
        const double db = interp_at(b.t, b.pop, tq);
        const double d = std::abs(da - db);
        r.max_abs_dpop = std::max(r.max_abs_dpop, d);
        if (tq <= short_end) r.short_time_max_dpop = std::max(r.short_time_max_dpop, d);
    }

    r.window_start = hi - 0.2 * (hi - lo);
    r.window_end = hi;
    auto wmean = [&](const TimeSeries& s, const Eigen::VectorXd& v) {
        double sum = 0;
        int cnt = 0;
        for (int i = 0; i < s.size(); ++i)
            if (s.t[i] >= r.window_start && s.t[i] <= r.window_end) {
                sum += v[i];
                ++cnt;
            }
        return cnt ? sum / cnt : 0.0;
    };
    r.steady_pop_a = wmean(a, a.pop);
    r.steady_pop_b = wmean(b, b.pop);
    r.steady_pop_diff = std::abs(r.steady_pop_a - r.steady_pop_b);
    r.steady_ke_a = wmean(a, a.kinetic);
    r.steady_ke_b = wmean(b, b.kinetic);
    r.steady_ke_diff = std::abs(r.steady_ke_a - r.steady_ke_b);

    auto slope = [&](const TimeSeries& s, const Eigen::VectorXd& v) {
        int start = 0;
        while (start < s.size() && s.t[start] < r.window_start) ++start;
        return window_slope(s.t, v, std::min(start, s.size() - 1));
    };
    r.steady_slope_pop_a = slope(a, a.pop);
    r.steady_slope_pop_b = slope(b, b.pop);
    return r;
}

std::string CompareReport::to_json() const {
    std::ostringstream os;
    os << "{\n";
    os << "  \"max_abs_dpop\": " << format_full(max_abs_dpop) << ",\n";
    os << "  \"short_time_max_dpop\": " << format_full(short_time_max_dpop) << ",\n";
    os << "  \"steady_pop_frsh\": " << format_full(steady_pop_a) << ",\n";
    os << "  \"steady_pop_frqme\": " << format_full(steady_pop_b) << ",\n";
    os << "  \"steady_pop_diff\": " << format_full(steady_pop_diff) << ",\n";
    os << "  \"steady_kinetic_frsh\": " << format_full(steady_ke_a) << ",\n";
    os << "  \"steady_kinetic_frqme\": " << format_full(steady_ke_b) << ",\n";
    os << "  \"steady_kinetic_diff\": " << format_full(steady_ke_diff) << ",\n";
    os << "  \"steady_slope_pop_frsh\": " << format_full(steady_slope_pop_a) << ",\n";
    os << "  \"steady_slope_pop_frqme\": " << format_full(steady_slope_pop_b) << ",\n";
    os << "  \"window_start\": " << format_full(window_start) << ",\n";
    os << "  \"window_end\": " << format_full(window_end) << "\n";
    os << "}\n";
    return os.str();
}

OrderingVerdict check_increasing(const std::vector<double>& values,
                                 const std::vector<double>& errors) {
    OrderingVerdict v;
    v.strictly_increasing = true;
    v.outside_errors = true;
    for (size_t i = 0; i + 1 < values.size(); ++i) {
        if (!(values[i + 1] > values[i])) v.strictly_increasing = false;
        double err = 0.0;
        if (!errors.empty()) err = errors[i] + errors[i + 1];
        if (!(values[i + 1] - values[i] > err)) v.outside_errors = false;
    }
    return v;
}

} // namespace floqsh
