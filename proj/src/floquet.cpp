#include "floqsh/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace floqsh {

namespace {

constexpr double kOverlapTieTol = 1e-6;

/// Greedy maximum-|overlap| assignment of new columns to previous slots.
/// overlap(N, M) = <prev_N | new_M>. Returns perm with perm[slot N] = column M.
/// Ties within kOverlapTieTol (on |overlap|) are counted and broken toward the
/// lower (N, M) pair, which keeps the assignment deterministic.
template <typename Mat>
std::vector<int> assign_by_overlap(const Mat& overlap, int* warnings) {
    const int n = static_cast<int>(overlap.rows());
    struct Entry {
        double mag;
        int slot, col;
    };
    std::vector<Entry> entries;
    entries.reserve(static_cast<size_t>(n) * n);
    for (int s = 0; s < n; ++s)
        for (int c = 0; c < n; ++c) entries.push_back({std::abs(overlap(s, c)), s, c});
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.mag != b.mag) return a.mag > b.mag;
        if (a.slot != b.slot) return a.slot < b.slot;
        return a.col < b.col;
    });
    for (size_t i = 0; i + 1 < entries.size(); ++i) {
        if (entries[i].mag - entries[i + 1].mag < kOverlapTieTol &&
            entries[i].slot == entries[i + 1].slot && entries[i].mag > 0.5) {
            if (warnings) ++*warnings;
            break; // one warning per frame is enough
        }
    }
    std::vector<int> perm(n, -1);
    std::vector<char> slot_used(n, 0), col_used(n, 0);
    int assigned = 0;
    for (const auto& e : entries) {
        if (slot_used[e.slot] || col_used[e.col]) continue;
        perm[e.slot] = e.col;
        slot_used[e.slot] = col_used[e.col] = 1;
        if (++assigned == n) break;
    }
    return perm;
}

/// Initial-frame gauge: rotate each column so its largest-|.| component is
/// real positive (for real vectors: sign flip).
void fix_phase_initial(Eigen::MatrixXcd& U) {
    for (int c = 0; c < U.cols(); ++c) {
        int imax = 0;
        U.col(c).cwiseAbs().maxCoeff(&imax);
        const std::complex<double> v = U(imax, c);
        if (std::abs(v) > 0) U.col(c) *= std::conj(v) / std::abs(v);
    }
}

void fix_phase_initial(Eigen::MatrixXd& U) {
    for (int c = 0; c < U.cols(); ++c) {
        int imax = 0;
        U.col(c).cwiseAbs().maxCoeff(&imax);
        if (U(imax, c) < 0) U.col(c) = -U.col(c);
    }
}

/// Continuity step shared by the dense and sector paths: reorder (E, U)
/// against prev_U and fix phases so <prev | new> is real positive.
template <typename MatU>
void apply_continuity(const MatU& prev_U, Eigen::VectorXd& E, MatU& U, int* warnings) {
    const MatU overlap = prev_U.adjoint() * U;
    const std::vector<int> perm = assign_by_overlap(overlap, warnings);
    MatU U_new(U.rows(), U.cols());
    Eigen::VectorXd E_new(E.size());
    for (int slot = 0; slot < static_cast<int>(perm.size()); ++slot) {
        const int col = perm[slot];
        U_new.col(slot) = U.col(col);
        E_new[slot] = E[col];
        const auto ov = overlap(slot, col);
        if constexpr (std::is_same_v<typename MatU::Scalar, double>) {
            if (ov < 0) U_new.col(slot) = -U_new.col(slot);
        } else {
            const double mag = std::abs(ov);
            if (mag > 0) U_new.col(slot) *= std::conj(ov) / mag;
        }
    }
    U = std::move(U_new);
    E = std::move(E_new);
}

/// Ascending-energy initial order with a stable deterministic tiebreak.
template <typename MatU>
void sort_ascending(Eigen::VectorXd& E, MatU& U) {
    std::vector<int> idx(E.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return E[a] < E[b]; });
    MatU U_new(U.rows(), U.cols());
    Eigen::VectorXd E_new(E.size());
    for (int i = 0; i < static_cast<int>(idx.size()); ++i) {
        U_new.col(i) = U.col(idx[i]);
        E_new[i] = E[idx[i]];
    }
    U = std::move(U_new);
    E = std::move(E_new);
}

template <typename Mat>
void place_blocks(Mat& out, const Mat& block, int n_harmonic, int n_max, int inner) {
    for (int m = -n_max; m <= n_max; ++m) {
        const int mp = m + n_harmonic;
        if (mp < -n_max || mp > n_max) continue;
        out.block((mp + n_max) * inner, (m + n_max) * inner, inner, inner) = block;
    }
}

} // namespace

FloquetOperator assemble(const HarmonicComponents& c, int n_max, double omega) {
    if (n_max < 0) throw std::invalid_argument("assemble: n_max must be >= 0");
    const int inner = static_cast<int>(c.h0.rows());
    FloquetOperator op;
    op.layout = FloquetLayout{inner, n_max};
    op.omega = omega;
    op.h0 = c.h0;
    op.drive_free = true;
    op.matrix = Eigen::MatrixXcd::Zero(op.layout.dim(), op.layout.dim());
    place_blocks(op.matrix, c.h0, 0, n_max, inner);
    for (const auto& [n, hn] : c.harmonics) {
        if (n == 0 || hn.cwiseAbs().maxCoeff() == 0.0) continue;
        op.drive_free = false;
        place_blocks(op.matrix, hn, n, n_max, inner);
    }
    for (int m = -n_max; m <= n_max; ++m)
        op.matrix.block((m + n_max) * inner, (m + n_max) * inner, inner, inner) +=
            (m * omega) * Eigen::MatrixXcd::Identity(inner, inner);
    return op;
}

RealHarmonicComponents gauge_real(const HarmonicComponents& c) {
    RealHarmonicComponents out;
    const double scale = std::max(1.0, c.h0.cwiseAbs().maxCoeff());
    if (c.h0.imag().cwiseAbs().maxCoeff() > 1e-14 * scale)
        throw std::invalid_argument("gauge_real: static component is not real");
    out.h0 = c.h0.real();
    const std::complex<double> i_unit(0.0, 1.0);
    for (const auto& [n, hn] : c.harmonics) {
        if (n == 0) continue;
        const Eigen::MatrixXcd gauged = std::pow(i_unit, n) * hn;
        const double s = std::max(1.0, gauged.cwiseAbs().maxCoeff());
        if (gauged.imag().cwiseAbs().maxCoeff() > 1e-14 * s)
            throw std::invalid_argument("gauge_real: harmonic not real under i^n gauge");
        out.gauged[n] = gauged.real();
    }
    return out;
}

RealFloquetOperator assemble_real(const RealHarmonicComponents& c, int n_max, double omega) {
    if (n_max < 0) throw std::invalid_argument("assemble_real: n_max must be >= 0");
    const int inner = static_cast<int>(c.h0.rows());
    RealFloquetOperator op;
    op.layout = FloquetLayout{inner, n_max};
    op.omega = omega;
    op.h0 = c.h0;
    op.drive_free = true;
    op.matrix = Eigen::MatrixXd::Zero(op.layout.dim(), op.layout.dim());
    place_blocks(op.matrix, c.h0, 0, n_max, inner);
    for (const auto& [n, hn] : c.gauged) {
        if (n == 0 || hn.cwiseAbs().maxCoeff() == 0.0) continue;
        op.drive_free = false;
        place_blocks(op.matrix, hn, n, n_max, inner);
    }
    for (int m = -n_max; m <= n_max; ++m)
        op.matrix.block((m + n_max) * inner, (m + n_max) * inner, inner, inner) +=
            (m * omega) * Eigen::MatrixXd::Identity(inner, inner);
    return op;
}

AdiabaticFrame diagonalize_continuous(const FloquetOperator& op, const AdiabaticFrame* previous) {
    AdiabaticFrame frame;
    const int dim = op.layout.dim();
    Eigen::VectorXd E(dim);
    Eigen::MatrixXcd U(dim, dim);

    if (op.drive_free) {
        // Decoupled replicas: one inner solve, replicated with n*Omega shifts.
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(op.h0);
        if (es.info() != Eigen::Success)
            throw std::runtime_error("diagonalize_continuous: eigensolver failed");
        const int inner = op.layout.inner_dim;
        U.setZero();
        for (int n = -op.layout.n_max; n <= op.layout.n_max; ++n) {
            const int off = (n + op.layout.n_max) * inner;
            U.block(off, off, inner, inner) = es.eigenvectors();
            E.segment(off, inner) =
                es.eigenvalues().array() + static_cast<double>(n) * op.omega;
        }
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(op.matrix);
        if (es.info() != Eigen::Success)
            throw std::runtime_error("diagonalize_continuous: eigensolver failed");
        E = es.eigenvalues();
        U = es.eigenvectors();
    }

    if (previous) {
        apply_continuity(previous->U, E, U, &frame.degeneracy_warnings);
    } else {
        sort_ascending(E, U);
        fix_phase_initial(U);
    }
    frame.energies = std::move(E);
    frame.U = std::move(U);
    return frame;
}

void force_and_coupling(const Eigen::MatrixXcd& minus_dH, AdiabaticFrame& frame,
                        double degeneracy_rel_eps) {
    frame.F = frame.U.adjoint() * minus_dH * frame.U;
    const int dim = static_cast<int>(frame.energies.size());
    const double range = frame.energies.maxCoeff() - frame.energies.minCoeff();
    const double eps = degeneracy_rel_eps * std::max(range, 1e-300);
    frame.D = Eigen::MatrixXcd::Zero(dim, dim);
    for (int n = 0; n < dim; ++n) {
        for (int m = 0; m < dim; ++m) {
            if (n == m) continue;
            const double de = frame.energies[n] - frame.energies[m];
            if (std::abs(de) <= eps) {
                if (std::abs(frame.F(n, m)) > 0) ++frame.degeneracy_warnings;
                continue;
            }
            frame.D(n, m) = frame.F(n, m) / de;
        }
    }
}

int SectorLayout::sector_of(int global_col) const {
    for (int p = sectors() - 1; p >= 0; --p)
        if (global_col >= col_offset[p]) return p;
    return 0;
}

int SectorLayout::within(int global_col) const { return global_col - col_offset[sector_of(global_col)]; }

SectorLayout make_sector_layout(const std::vector<std::vector<int>>& inner_sectors, int n_max,
                                int inner_dim) {
    SectorLayout lay;
    lay.rows.resize(inner_sectors.size());
    lay.col_offset.resize(inner_sectors.size());
    int offset = 0;
    for (size_t p = 0; p < inner_sectors.size(); ++p) {
        for (int n = 0; n < 2 * n_max + 1; ++n)
            for (int k : inner_sectors[p]) lay.rows[p].push_back(n * inner_dim + k);
        lay.col_offset[p] = offset;
        offset += static_cast<int>(lay.rows[p].size());
    }
    lay.dim = offset;
    return lay;
}

double SectorFrame::min_energy() const {
    double m = energies.front().minCoeff();
    for (const auto& e : energies) m = std::min(m, e.minCoeff());
    return m;
}

double SectorFrame::max_energy() const {
    double m = energies.front().maxCoeff();
    for (const auto& e : energies) m = std::max(m, e.maxCoeff());
    return m;
}

std::vector<Eigen::MatrixXd> extract_sector_blocks(const Eigen::MatrixXd& ext,
                                                   const SectorLayout& lay) {
    std::vector<Eigen::MatrixXd> blocks(lay.sectors());
    for (int p = 0; p < lay.sectors(); ++p) {
        const auto& rows = lay.rows[p];
        const int s = static_cast<int>(rows.size());
        blocks[p].resize(s, s);
        for (int i = 0; i < s; ++i)
            for (int j = 0; j < s; ++j) blocks[p](i, j) = ext(rows[i], rows[j]);
    }
    return blocks;
}

SectorFrame diagonalize_sectors(const std::vector<Eigen::MatrixXd>& sector_mats,
                                const SectorLayout& lay, int n_max, double omega,
                                const std::vector<Eigen::MatrixXd>* drive_free_inner,
                                const SectorFrame* previous, double x_tag) {
    SectorFrame frame;
    frame.x = x_tag;
    const int P = lay.sectors();
    frame.energies.resize(P);
    frame.U.resize(P);

    for (int p = 0; p < P; ++p) {
        const int s = lay.size(p);
        Eigen::VectorXd E(s);
        Eigen::MatrixXd U(s, s);
        if (drive_free_inner) {
            // Rows of a sector are ordered Fourier-block-major, so the sector
            // matrix is block diagonal with identical shifted replicas; the
            // shift-free replica base comes straight from the components.
            const int inner = s / (2 * n_max + 1);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es((*drive_free_inner)[p]);
            if (es.info() != Eigen::Success)
                throw std::runtime_error("diagonalize_sectors: eigensolver failed");
            U.setZero();
            for (int n = -n_max; n <= n_max; ++n) {
                const int off = (n + n_max) * inner;
                U.block(off, off, inner, inner) = es.eigenvectors();
                E.segment(off, inner) =
                    es.eigenvalues().array() + static_cast<double>(n) * omega;
            }
        } else {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sector_mats[p]);
            if (es.info() != Eigen::Success)
                throw std::runtime_error("diagonalize_sectors: eigensolver failed");
            E = es.eigenvalues();
            U = es.eigenvectors();
        }
        if (previous) {
            apply_continuity(previous->U[p], E, U, &frame.degeneracy_warnings);
        } else {
            sort_ascending(E, U);
            fix_phase_initial(U);
        }
        frame.energies[p] = std::move(E);
        frame.U[p] = std::move(U);
    }
    return frame;
}

void force_and_coupling_diagonal(const Eigen::VectorXd& minus_dH_diag, const SectorLayout& lay,
                                 SectorFrame& frame, double degeneracy_rel_eps) {
    const int P = lay.sectors();
    frame.F.resize(P);
    frame.D.resize(P);
    const double range = frame.max_energy() - frame.min_energy();
    const double eps = degeneracy_rel_eps * std::max(range, 1e-300);
    for (int p = 0; p < P; ++p) {
        const auto& rows = lay.rows[p];
        const int s = static_cast<int>(rows.size());
        Eigen::VectorXd diag(s);
        for (int i = 0; i < s; ++i) diag[i] = minus_dH_diag[rows[i]];
        frame.F[p].noalias() = frame.U[p].transpose() * diag.asDiagonal() * frame.U[p];
        frame.D[p] = Eigen::MatrixXd::Zero(s, s);
        for (int n = 0; n < s; ++n) {
            for (int m = 0; m < s; ++m) {
                if (n == m) continue;
                const double de = frame.energies[p][n] - frame.energies[p][m];
                if (std::abs(de) <= eps) {
                    if (std::abs(frame.F[p](n, m)) > 0) ++frame.degeneracy_warnings;
                    continue;
                }
                frame.D[p](n, m) = frame.F[p](n, m) / de;
            }
        }
    }
}

AdiabaticFrame to_dense_frame(const SectorFrame& f, const SectorLayout& lay) {
    AdiabaticFrame dense;
    dense.x = f.x;
    dense.degeneracy_warnings = f.degeneracy_warnings;
    dense.energies.resize(lay.dim);
    dense.U = Eigen::MatrixXcd::Zero(lay.dim, lay.dim);
    const bool have_fd = !f.F.empty();
    if (have_fd) {
        dense.F = Eigen::MatrixXcd::Zero(lay.dim, lay.dim);
        dense.D = Eigen::MatrixXcd::Zero(lay.dim, lay.dim);
    }
    for (int p = 0; p < lay.sectors(); ++p) {
        const auto& rows = lay.rows[p];
        const int s = lay.size(p);
        const int off = lay.col_offset[p];
        dense.energies.segment(off, s) = f.energies[p];
        for (int j = 0; j < s; ++j)
            for (int i = 0; i < s; ++i) dense.U(rows[i], off + j) = f.U[p](i, j);
        if (have_fd) {
            dense.F.block(off, off, s, s) = f.F[p].cast<std::complex<double>>();
            dense.D.block(off, off, s, s) = f.D[p].cast<std::complex<double>>();
        }
    }
    return dense;
}

} // namespace floqsh
