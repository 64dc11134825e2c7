#pragma once

#include <Eigen/Dense>
#include <map>
#include <vector>

namespace floqsh {

/// Composite (Fourier x inner) index bookkeeping. Flattened row-major with the
/// Fourier harmonic outer and the inner (Fock or vibronic) index inner:
///   index(n, k) = (n + n_max) * inner_dim + k,  n in [-n_max, n_max].
struct FloquetLayout {
    int inner_dim = 0;
    int n_max = 0;

    int blocks() const { return 2 * n_max + 1; }
    int dim() const { return inner_dim * blocks(); }
    int index(int n, int k) const { return (n + n_max) * inner_dim + k; }
    int harmonic_of(int idx) const { return idx / inner_dim - n_max; }
    int inner_of(int idx) const { return idx % inner_dim; }
};

/// Many-body Fourier components of a periodic Hamiltonian:
/// H(t) = h0 + sum_{n!=0} harmonics[n] e^{i n Omega t}, with
/// harmonics[-n] = harmonics[n]^+.
struct HarmonicComponents {
    Eigen::MatrixXcd h0;
    std::map<int, Eigen::MatrixXcd> harmonics;
};

/// Extended-space Floquet Hamiltonian H^F = sum_n H^(n) L_n + N hbar*Omega.
/// Block (m + n, m) holds H^(n); diagonal blocks additionally carry
/// m * Omega * I. Blocks outside the truncation are dropped.
struct FloquetOperator {
    FloquetLayout layout;
    double omega = 0.0;
    Eigen::MatrixXcd matrix;
    bool drive_free = false; ///< no nonzero harmonics: exact replica structure
    Eigen::MatrixXcd h0;     ///< per-replica block, kept for the replica fast path
};

FloquetOperator assemble(const HarmonicComponents& c, int n_max, double omega);

/// Adiabatic Floquet frame at a fixed nuclear position (dense reference form).
struct AdiabaticFrame {
    double x = 0.0;
    Eigen::VectorXd energies; ///< quasi-energies in presentation order
    Eigen::MatrixXcd U;       ///< eigenvector columns, same order
    Eigen::MatrixXcd F;       ///< force matrix U^+ (-dH/dx) U
    Eigen::MatrixXcd D;       ///< derivative coupling F_NM / (E_N - E_M)
    int degeneracy_warnings = 0;
};

/// Eigendecomposition with continuity against a previous frame: columns are
/// matched by maximum overlap and each phase is fixed so that
/// <U_prev,N | U_N> is real positive. Without a previous frame, columns are
/// ordered by ascending quasi-energy and gauged so the largest-magnitude
/// component is real positive. Near-ties in the overlap assignment (within
/// 1e-6) are counted as degeneracy warnings and broken toward lower index.
AdiabaticFrame diagonalize_continuous(const FloquetOperator& op, const AdiabaticFrame* previous);

/// Fills frame.F and frame.D from the assembled derivative operator
/// -dH^F/dx. Pairs with |E_N - E_M| <= degeneracy_rel_eps * spectral range
/// get zero coupling and are counted in frame.degeneracy_warnings.
void force_and_coupling(const Eigen::MatrixXcd& minus_dH, AdiabaticFrame& frame,
                        double degeneracy_rel_eps = 1e-10);

// ---------------------------------------------------------------------------
// Real-gauged fast path.
//
// Under the Fourier gauge |n> -> i^n |n>, block (m+n, m) becomes i^n H^(n).
// For the built-in sin drive (H^(+-1) = -+ i A/2 * X with X real) every gauged
// block is real, so the whole Floquet matrix is real symmetric and frames can
// be built in real arithmetic. Quasi-energies are gauge-invariant; rows of the
// n = 0 Fourier block (used by the diabatic estimator) carry gauge factor
// i^0 = 1 and are unchanged.
// ---------------------------------------------------------------------------

struct RealHarmonicComponents {
    Eigen::MatrixXd h0;
    std::map<int, Eigen::MatrixXd> gauged; ///< i^n H^(n), n != 0
};

/// Applies the i^n gauge; throws std::invalid_argument if a gauged block has
/// imaginary parts above 1e-14 of its scale.
RealHarmonicComponents gauge_real(const HarmonicComponents& c);

struct RealFloquetOperator {
    FloquetLayout layout;
    double omega = 0.0;
    Eigen::MatrixXd matrix;
    bool drive_free = false;
    Eigen::MatrixXd h0;
};

RealFloquetOperator assemble_real(const RealHarmonicComponents& c, int n_max, double omega);

/// Extended-space rows grouped by conserved particle-number sector. Column
/// (eigenstate) indices are presented sector-major: global column
/// col_offset[p] + j is the j-th state of sector p.
struct SectorLayout {
    std::vector<std::vector<int>> rows; ///< extended row indices per sector
    std::vector<int> col_offset;
    int dim = 0;

    int sectors() const { return static_cast<int>(rows.size()); }
    int size(int p) const { return static_cast<int>(rows[p].size()); }
    int sector_of(int global_col) const;
    int within(int global_col) const;
    int global(int p, int j) const { return col_offset[p] + j; }
};

/// Builds the sector layout for inner_sectors replicated over Fourier blocks.
SectorLayout make_sector_layout(const std::vector<std::vector<int>>& inner_sectors, int n_max,
                                int inner_dim);

/// Real sector-blocked adiabatic frame. U[p] has rows indexed by
/// layout.rows[p] (in that order) and one column per sector-p eigenstate.
struct SectorFrame {
    double x = 0.0;
    std::vector<Eigen::VectorXd> energies;
    std::vector<Eigen::MatrixXd> U;
    std::vector<Eigen::MatrixXd> F;
    std::vector<Eigen::MatrixXd> D;
    int degeneracy_warnings = 0;

    int dim(const SectorLayout& lay) const { return lay.dim; }
    double energy(const SectorLayout& lay, int global_col) const {
        return energies[lay.sector_of(global_col)][lay.within(global_col)];
    }
    double min_energy() const;
    double max_energy() const;
};

/// Sector-restricted blocks of a real extended operator; off-sector entries
/// must vanish (particle-number conservation), which is asserted in tests.
std::vector<Eigen::MatrixXd> extract_sector_blocks(const Eigen::MatrixXd& ext,
                                                   const SectorLayout& lay);

/// Per-sector eigendecomposition with the same continuity protocol as the
/// dense path. When drive_free_inner is given (per-sector single-replica
/// matrices, no ladder shift), each sector is diagonalized once and the
/// spectrum replicated with n * Omega shifts; decoupled replicas are then
/// bit-identical across truncation orders. sector_mats may be empty in that
/// case.
SectorFrame diagonalize_sectors(const std::vector<Eigen::MatrixXd>& sector_mats,
                                const SectorLayout& lay, int n_max, double omega,
                                const std::vector<Eigen::MatrixXd>* drive_free_inner,
                                const SectorFrame* previous, double x_tag);

/// F and D blocks from a diagonal derivative operator -dH^F/dx (built-in
/// model: only the donor level and the harmonic potential depend on x).
void force_and_coupling_diagonal(const Eigen::VectorXd& minus_dH_diag, const SectorLayout& lay,
                                 SectorFrame& frame, double degeneracy_rel_eps = 1e-10);

/// Dense complex view of a sector frame (columns in sector-major order),
/// mainly for tests and cross-path checks.
AdiabaticFrame to_dense_frame(const SectorFrame& f, const SectorLayout& lay);

} // namespace floqsh
