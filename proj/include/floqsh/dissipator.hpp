#pragma once

#include <Eigen/Dense>
#include <vector>

#include "floqsh/floquet.hpp"
#include "floqsh/fock.hpp"
#include "floqsh/model.hpp"
#include "floqsh/splitmat.hpp"

namespace floqsh {

/// Fermi occupation 1/(exp(E/kT) + 1); overflow-safe for any E/kT.
double fermi(double E, double kT);

/// Fermi-weighted images of the extended-space fermion operators in the
/// adiabatic Floquet basis (d_m^F = d_m (x) I_Fourier):
///   A[m]            = U^+ d_m^F U
///   Dn[m]_NM        = A_NM f(E_N - E_M)
///   Dn_tilde[m]_NM  = A_NM (1 - f(E_N - E_M))
///   Dn_plus[m]_NM   = (A^+)_NM f(E_N - E_M)
///   Dn_tilde_plus[m]_NM = (A^+)_NM (1 - f(E_N - E_M))
struct JumpMatrices {
    std::vector<Eigen::MatrixXcd> A;
    std::vector<Eigen::MatrixXcd> Dn;
    std::vector<Eigen::MatrixXcd> Dn_tilde;
    std::vector<Eigen::MatrixXcd> Dn_plus;
    std::vector<Eigen::MatrixXcd> Dn_tilde_plus;
};

JumpMatrices build_jump_matrices(const AdiabaticFrame& frame, const FockSpace& space, int n_max,
                                 double kT);

/// Redfield action in the adiabatic Floquet basis (wide-band metal bath).
/// Returns the dρ/dt contribution, i.e. the negated Redfield superoperator
///   -L rho = -(X + X^+),
///   X = sum_mn (Γ_mn/2) [ A_m^+ D_n rho + A_m D_n^+ rho
///                          - A_m^+ rho D~_n - A_m rho D~_n^+ ].
/// The Fermi/complement weight placement is fixed by trace conservation and
/// the single-level golden-rule limit (filling Γf, emptying Γ(1-f)); the
/// weighted annihilation images multiply the state from the left and the
/// complement-weighted ones from the right.
Eigen::MatrixXcd apply_dissipator(const Eigen::MatrixXcd& rho, const JumpMatrices& jumps,
                                  const HybridizationMatrix& gamma);

/// Secular population-transfer rates k(N->M) (row = source), equal to the MM
/// element of apply_dissipator(|N><N|). Entries in (-1e-12, 0) are clamped to
/// zero; entries below -1e-8 raise a numerical-consistency error.
Eigen::MatrixXd secular_rates(const JumpMatrices& jumps, const HybridizationMatrix& gamma,
                              const AdiabaticFrame& frame);

// ---------------------------------------------------------------------------
// Sector-blocked real kernel used by the trajectory and QME engines. Both the
// coherent Hamiltonian and the drive conserve electron number, and the
// fermionic jumps change it by exactly one, so a density matrix that starts
// sector-diagonal stays sector-diagonal. Equivalence with the dense path is
// covered by tests.
// ---------------------------------------------------------------------------

struct BlockDiagState {
    std::vector<SplitMat> blocks;

    double trace_re() const {
        double t = 0;
        for (const auto& b : blocks) t += b.trace_re();
        return t;
    }
};

struct BlockedDissipator {
    struct OrbitalBlocks {
        int orbital = 0;
        std::vector<Eigen::MatrixXd> up;         ///< A block (q, q+1)
        std::vector<Eigen::MatrixXd> tilde_up;   ///< D~ block (q, q+1)
        std::vector<Eigen::MatrixXd> tilde_down; ///< D~^+ block (q+1, q)
    };
    std::vector<Eigen::MatrixXd> G; ///< Γ-weighted number-conserving left factor per sector
    std::vector<OrbitalBlocks> orb;
    Eigen::MatrixXd gamma;
    int sectors = 0;
};

BlockedDissipator build_blocked_dissipator(const SectorFrame& frame, const SectorLayout& lay,
                                           const FockSpace& space,
                                           const HybridizationMatrix& gamma, double kT);

/// out = -L rho (blocked form). tmp provides scratch blocks.
void apply_blocked_dissipator(const BlockedDissipator& d, const BlockDiagState& rho,
                              BlockDiagState& out, SplitMat& tmp);

/// Row N -> all targets of the secular rate matrix, computed from the same
/// weighted blocks (equal to applying the blocked dissipator to |N><N|).
Eigen::VectorXd secular_rates_row_blocked(const BlockedDissipator& d, const SectorLayout& lay,
                                          int source_global);

} // namespace floqsh
