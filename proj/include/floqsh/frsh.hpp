#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>

#include "floqsh/dissipator.hpp"
#include "floqsh/floquet.hpp"
#include "floqsh/fock.hpp"
#include "floqsh/model.hpp"
#include "floqsh/rng.hpp"

namespace floqsh {

struct FrshOptions {
    int n_max = 2;
    double dt = 0.5;
    double degeneracy_rel_eps = 1e-10;
    double hop_budget = 0.1;    ///< max allowed total hop probability per step
    double trace_tol = 1e-4;    ///< |Tr sigma - 1| beyond this aborts the step
    double sigma_floor = 1e-12; ///< active population below this zeroes kD
    bool frustrated_momentum_reversal = false;
};

struct TrajectoryCounters {
    std::uint64_t hops_coupling = 0;   ///< accepted derivative-coupling hops
    std::uint64_t hops_bath = 0;       ///< secular bath-rate hops (no rescaling)
    std::uint64_t hops_frustrated = 0; ///< rejected uphill coupling hops
    std::uint64_t sigma_starved = 0;   ///< steps with active population below floor
    std::uint64_t degeneracy_warnings = 0;
    double max_trace_drift = 0.0;
    double max_hop_energy_error = 0.0;
    double max_hop_budget = 0.0;

    // energy-flow diagnostics, binned by quasi-energy jump (|dE| vs Omega/2)
    std::uint64_t kd_hops_rung = 0; ///< coupling hops across the Fourier ladder
    std::uint64_t kl_hops_rung = 0;
    double kinetic_in_kd_small = 0.0; ///< sum of kinetic-energy changes
    double kinetic_in_kd_rung = 0.0;
    double potential_in_kl_small = 0.0; ///< sum of active-surface energy jumps
    double potential_in_kl_rung = 0.0;

    void merge(const TrajectoryCounters& o);
};

/// Per-trajectory dynamical state. sigma is the coherence matrix in the
/// adiabatic Floquet basis, stored sector-diagonal (electron number is
/// conserved by the coherent dynamics and changed in diagonal sector pairs by
/// the bath).
struct TrajectoryState {
    double x = 0.0;
    double p = 0.0;
    double t = 0.0;
    int lambda = 0; ///< active surface, global (sector-major) eigenstate index
    BlockDiagState sigma;
    SectorFrame frame;
    CounterRng rng;
    TrajectoryCounters counters;

    TrajectoryState() : rng(0, 0) {}
};

/// Scratch buffers reused across steps of one worker.
struct FrshWorkspace {
    BlockDiagState k1, k2, k3, k4, stage, diss;
    SplitMat tmp;
    std::vector<Eigen::MatrixXd> sector_mats;
    std::vector<Eigen::MatrixXd> dE; ///< per-sector E_N - E_M tables
};

/// FR-SH propagator for the built-in driven donor-acceptor-metal model.
/// Immutable after construction; shared across trajectory workers.
class FrshEngine {
  public:
    FrshEngine(const ModelParams& params, const HybridizationMatrix& gamma,
               const FrshOptions& opt);

    /// Boltzmann nuclei (variance kT/hbar_omega in both x and p), electronic
    /// start on the diabatic donor state in the n = 0 Fourier block; the
    /// active surface is drawn with probability |U_{a,N}|^2.
    TrajectoryState sample_initial(std::uint64_t master_seed, std::uint64_t traj_index) const;

    /// One velocity-Verlet + RK4 step of Eq. (19)-type dynamics followed by a
    /// hop attempt. Throws on trace drift or hop-budget violations.
    void step(TrajectoryState& s, double dt, FrshWorkspace& ws) const;
    void step(TrajectoryState& s, double dt) const {
        FrshWorkspace ws;
        step(s, dt, ws);
    }

    /// Hopping rates out of the active surface: derivative-coupling channel
    /// kD[M] = max(0, -2 Re[xdot D_{M,l} sigma_{l,M} / sigma_ll]) and bath
    /// channel kL[M] from the secular rates. Starved active populations
    /// (below sigma_floor) zero kD and are counted.
    std::pair<Eigen::VectorXd, Eigen::VectorXd> hop_rates(TrajectoryState& s,
                                                          const BlockedDissipator& diss) const;
    std::pair<Eigen::VectorXd, Eigen::VectorXd> hop_rates(TrajectoryState& s) const;

    /// Appendix-B cumulative ladder, scaled by dt. Bath-segment hops switch
    /// surfaces without touching the momentum; coupling-segment hops require
    /// momentum rescaling and may be frustrated.
    void attempt_hop(TrajectoryState& s, const Eigen::VectorXd& kD, const Eigen::VectorXd& kL,
                     double dt) const;

    struct RescaleResult {
        bool accepted = false;
        double p_new = 0.0;
    };
    /// Energy-conserving 1-D momentum rescaling onto `target`, keeping the
    /// root closer to the current momentum; negative discriminant means a
    /// frustrated hop.
    RescaleResult rescale_momentum(const TrajectoryState& s, int target) const;

    /// Diabatic donor population estimator (delta + coherence terms for the
    /// donor-only state, delta term for the doubly occupied state). Diabatic
    /// weights are summed over Fourier replicas, |U_{a,i}|^2 -> sum_n
    /// |U_{(a,n),i}|^2: the replica index is a gauge label (drive quanta
    /// absorbed and dissipated shift the active surface down the ladder), and
    /// only the replica-summed weights are invariant under that drift. At
    /// A = 0 the off-block weights vanish identically, so this reduces to the
    /// n = 0 reference-block reading.
    double donor_population(const TrajectoryState& s) const;

    double kinetic_energy(const TrajectoryState& s) const {
        return 0.5 * params_.hbar_omega * s.p * s.p;
    }

    /// Frame at position x with continuity against prev (nullptr = initial).
    SectorFrame make_frame(double x, const SectorFrame* prev) const;
    SectorFrame make_frame(double x, const SectorFrame* prev, FrshWorkspace& ws) const;

    BlockedDissipator build_dissipator(const SectorFrame& frame) const {
        return build_blocked_dissipator(frame, layout_, fock_, gamma_, params_.kT);
    }

    const SectorLayout& layout() const { return layout_; }
    const FockSpace& fock() const { return fock_; }
    const ModelParams& params() const { return params_; }
    const FrshOptions& options() const { return opt_; }
    bool drive_free() const { return drive_free_; }

  private:
    void sigma_rhs(const TrajectoryState& s, const BlockDiagState& sigma, double xdot,
                   const BlockedDissipator& diss, FrshWorkspace& ws, BlockDiagState& out) const;

    ModelParams params_;
    HybridizationMatrix gamma_;
    FrshOptions opt_;
    FockSpace fock_;
    SectorLayout layout_;
    bool drive_free_ = false;

    // H^F(x) = ext_const + x * ext_lin + U0(x) * I per sector (gauged real);
    // inner_* hold the single-replica version for the drive-free fast path.
    std::vector<Eigen::MatrixXd> ext_const_, ext_lin_;
    std::vector<Eigen::MatrixXd> inner_const_, inner_lin_;
    Eigen::VectorXd occ_donor_ext_; ///< donor occupation per extended row

    int pos_a0_ = -1;              ///< n = 0 donor row inside sector 1 (initial state)
    std::vector<int> pos_a_rows_;  ///< donor rows (all replicas) inside sector 1
    std::vector<int> pos_b_rows_;  ///< doubly-occupied rows inside sector 2
};

} // namespace floqsh
