#pragma once

#include <cmath>
#include <cstdint>

namespace floqsh {

/// Counter-based random stream (splitmix64 over a per-stream key).
///
/// A trajectory's stream is fully determined by (master_seed, stream_id),
/// independent of how trajectories are distributed over workers. Gaussians
/// come from an explicit Box-Muller so draws are bit-reproducible across
/// standard libraries.
class CounterRng {
  public:
    CounterRng(std::uint64_t master_seed, std::uint64_t stream_id) {
        state_ = mix(master_seed + 0x9E3779B97F4A7C15ULL);
        state_ = mix(state_ ^ mix(stream_id + 0xBF58476D1CE4E5B9ULL));
    }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Standard normal deviate; Box-Muller pairs are consumed in order.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        // 1 - u in (0, 1] keeps the log argument away from zero.
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double phi = 2.0 * M_PI * u2;
        spare_ = r * std::sin(phi);
        have_spare_ = true;
        return r * std::cos(phi);
    }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace floqsh
