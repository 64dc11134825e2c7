#pragma once

#include <Eigen/Dense>

#include "floqsh/dissipator.hpp"
#include "floqsh/floquet.hpp"
#include "floqsh/fock.hpp"
#include "floqsh/model.hpp"
#include "floqsh/timeseries.hpp"

namespace floqsh {

struct FrqmeOptions {
    int n_phonon = 100;
    int n_max = 2;
    double dt = 2.0;
    double trace_tol = 1e-6;
};

struct FrqmeRunStats {
    double max_trace_drift = 0.0;
    double max_top_phonon_population = 0.0; ///< weight in the top 10% phonon levels
    double wall_seconds = 0.0;
    long steps = 0;
    std::vector<double> energy_trace; ///< <H^F> at each output (conservation checks)
};

/// Quantum master equation on the fully quantized vibronic Floquet space
/// (4 electronic states x n_phonon x Fourier harmonics) with the wide-band
/// Redfield dissipator.
///
/// The generator is time independent, so the state is propagated in the
/// eigenbasis of the vibronic Floquet Hamiltonian in the interaction picture:
/// the coherent phases are applied exactly per stage as elementwise phase
/// dressings, and RK4 integrates only the (slow, Γ-scale) dissipative flow.
/// Electron-number sectors evolve as decoupled diagonal blocks.
class FrqmeSolver {
  public:
    FrqmeSolver(const ModelParams& params, const HybridizationMatrix& gamma,
                const FrqmeOptions& opt);

    /// Propagates from the initial state (thermal phonons x donor-occupied,
    /// n = 0 Fourier block) and records observables every
    /// output_stride * dt. Physical observables are reconstructed from the
    /// full set of Fourier block diagonals:
    ///   rho_phys(t) = sum_{n,m} e^{i(n-m)Omega t} R_{nm}(t).
    TimeSeries propagate(double t_end, int output_stride);

    const FrqmeRunStats& stats() const { return stats_; }
    const SectorLayout& layout() const { return layout_; }
    const SectorFrame& frame() const { return frame_; }
    const FockSpace& fock() const { return fock_; }
    bool drive_free() const { return drive_free_; }

    /// Sorted quasi-energies across all sectors (for spectrum tests).
    Eigen::VectorXd all_quasi_energies() const;

    static Eigen::MatrixXd phonon_annihilation(int n_phonon);
    /// Minimum phonon count supported for the given parameters (polaron
    /// displacement + thermal occupation heuristic).
    static int min_phonon_levels(const ModelParams& p);

  private:
    void build_observables();
    void dress_to_schrodinger(const BlockDiagState& in, BlockDiagState& out, double t) const;

    ModelParams params_;
    HybridizationMatrix gamma_;
    FrqmeOptions opt_;
    FockSpace fock_;
    SectorLayout layout_;
    SectorFrame frame_;
    BlockedDissipator diss_;
    bool drive_free_ = false;
    int inner_dim_ = 0; ///< 4 * n_phonon

    BlockDiagState initial_; ///< eigenbasis, interaction picture (t = 0)

    // Observable matrices in the eigenbasis per sector and Fourier offset k:
    // obs_pop_[k][p], obs_ke_[k][p] for k = 0..2*n_max; negative offsets follow
    // from Hermiticity. obs_top_[p] monitors the top 10% phonon levels (k = 0).
    std::vector<std::vector<Eigen::MatrixXd>> obs_pop_, obs_ke_;
    std::vector<Eigen::MatrixXd> obs_top_;

    FrqmeRunStats stats_;
};

} // namespace floqsh
