#include "floqsh/dissipator.hpp"

#include <cmath>
#include <stdexcept>

namespace floqsh {

double fermi(double E, double kT) {
    const double x = E / kT;
    if (x > 0) {
        const double e = std::exp(-x);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(x));
}

JumpMatrices build_jump_matrices(const AdiabaticFrame& frame, const FockSpace& space, int n_max,
                                 double kT) {
    const int dim = static_cast<int>(frame.energies.size());
    const int blocks = 2 * n_max + 1;
    if (dim != space.dim * blocks)
        throw std::invalid_argument("build_jump_matrices: frame/layout dimension mismatch");

    JumpMatrices j;
    const int no = space.num_orbitals;
    j.A.resize(no);
    j.Dn.resize(no);
    j.Dn_tilde.resize(no);
    j.Dn_plus.resize(no);
    j.Dn_tilde_plus.resize(no);

    Eigen::MatrixXd fw(dim, dim);
    for (int n = 0; n < dim; ++n)
        for (int m = 0; m < dim; ++m) fw(n, m) = fermi(frame.energies[n] - frame.energies[m], kT);

    for (int orb = 0; orb < no; ++orb) {
        Eigen::MatrixXcd dF = Eigen::MatrixXcd::Zero(dim, dim);
        for (int b = 0; b < blocks; ++b)
            dF.block(b * space.dim, b * space.dim, space.dim, space.dim) =
                space.annihilation[orb].cast<std::complex<double>>();
        j.A[orb] = frame.U.adjoint() * dF * frame.U;
        const Eigen::MatrixXcd Aplus = j.A[orb].adjoint();
        j.Dn[orb] = j.A[orb].cwiseProduct(fw);
        j.Dn_tilde[orb] = j.A[orb] - j.Dn[orb];
        j.Dn_plus[orb] = Aplus.cwiseProduct(fw);
        j.Dn_tilde_plus[orb] = Aplus - j.Dn_plus[orb];
    }
    return j;
}

Eigen::MatrixXcd apply_dissipator(const Eigen::MatrixXcd& rho, const JumpMatrices& jumps,
                                  const HybridizationMatrix& gamma) {
    const int dim = static_cast<int>(rho.rows());
    if (rho.cols() != dim || jumps.A.empty() || jumps.A[0].rows() != dim)
        throw std::invalid_argument("apply_dissipator: dimension mismatch");

    const int no = static_cast<int>(jumps.A.size());
    Eigen::MatrixXcd X = Eigen::MatrixXcd::Zero(dim, dim);
    for (int m = 0; m < no; ++m) {
        for (int n = 0; n < no; ++n) {
            const double c = 0.5 * gamma.gamma(m, n);
            if (c == 0.0) continue;
            X.noalias() += c * (jumps.A[m].adjoint() * (jumps.Dn[n] * rho));
            X.noalias() += c * (jumps.A[m] * (jumps.Dn_plus[n] * rho));
            X.noalias() -= c * (jumps.A[m].adjoint() * (rho * jumps.Dn_tilde[n]));
            X.noalias() -= c * (jumps.A[m] * (rho * jumps.Dn_tilde_plus[n]));
        }
    }
    return -(X + X.adjoint()).eval();
}

namespace {

void check_and_clamp_rate(double& r) {
    if (r < -1e-8)
        throw std::runtime_error("secular_rates: negative rate beyond tolerance "
                                 "(numerical-consistency error): " +
                                 std::to_string(r));
    if (r < 0.0) r = 0.0;
}

} // namespace

Eigen::MatrixXd secular_rates(const JumpMatrices& jumps, const HybridizationMatrix& gamma,
                              const AdiabaticFrame& frame) {
    const int dim = static_cast<int>(frame.energies.size());
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::MatrixXcd proj = Eigen::MatrixXcd::Zero(dim, dim);
    for (int src = 0; src < dim; ++src) {
        proj.setZero();
        proj(src, src) = 1.0;
        const Eigen::MatrixXcd out = apply_dissipator(proj, jumps, gamma);
        for (int tgt = 0; tgt < dim; ++tgt) {
            if (tgt == src) continue;
            double r = out(tgt, tgt).real();
            check_and_clamp_rate(r);
            k(src, tgt) = r;
        }
    }
    return k;
}

BlockedDissipator build_blocked_dissipator(const SectorFrame& frame, const SectorLayout& lay,
                                           const FockSpace& space,
                                           const HybridizationMatrix& gamma, double kT) {
    BlockedDissipator d;
    d.gamma = gamma.gamma;
    d.sectors = lay.sectors();
    const int P = d.sectors;

    // Orbitals appearing in any nonzero Γ entry.
    std::vector<int> active;
    for (int m = 0; m < space.num_orbitals; ++m) {
        bool used = false;
        for (int n = 0; n < space.num_orbitals; ++n)
            used = used || gamma.gamma(m, n) != 0.0 || gamma.gamma(n, m) != 0.0;
        if (used) active.push_back(m);
    }

    // Weighted f/(1-f) block builders. fw_up[q](i,j) = f(E_q[i] - E_{q+1}[j]).
    std::vector<Eigen::MatrixXd> fw_up(P - 1);
    for (int q = 0; q + 1 < P; ++q) {
        fw_up[q].resize(lay.size(q), lay.size(q + 1));
        for (int i = 0; i < lay.size(q); ++i)
            for (int jj = 0; jj < lay.size(q + 1); ++jj)
                fw_up[q](i, jj) = fermi(frame.energies[q][i] - frame.energies[q + 1][jj], kT);
    }

    struct Weighted {
        std::vector<Eigen::MatrixXd> f_up, f_down; // D and D^+ blocks
    };
    std::vector<Weighted> weighted(active.size());

    for (size_t a = 0; a < active.size(); ++a) {
        const int orb = active[a];
        BlockedDissipator::OrbitalBlocks ob;
        ob.orbital = orb;
        ob.up.resize(P - 1);
        ob.tilde_up.resize(P - 1);
        ob.tilde_down.resize(P - 1);
        weighted[a].f_up.resize(P - 1);
        weighted[a].f_down.resize(P - 1);
        for (int q = 0; q + 1 < P; ++q) {
            // Extended-space annihilation block (sector q rows, sector q+1 cols):
            // d_m^F = d_m (x) I_Fourier, so entries exist only within one
            // Fourier block, at the Fock-space sector transition.
            const int sq = lay.size(q), sq1 = lay.size(q + 1);
            Eigen::MatrixXd dblock = Eigen::MatrixXd::Zero(sq, sq1);
            for (int i = 0; i < sq; ++i) {
                const int ri = lay.rows[q][i];
                for (int jj = 0; jj < sq1; ++jj) {
                    const int rj = lay.rows[q + 1][jj];
                    if (ri / space.dim != rj / space.dim) continue; // different Fourier block
                    dblock(i, jj) = space.annihilation[orb](ri % space.dim, rj % space.dim);
                }
            }
            ob.up[q].noalias() = frame.U[q].transpose() * dblock * frame.U[q + 1];
            weighted[a].f_up[q] = ob.up[q].cwiseProduct(fw_up[q]);
            ob.tilde_up[q] = ob.up[q] - weighted[a].f_up[q];
            // Creation block (q+1, q): element (i,j) = up(j,i) f(E_{q+1}[i]-E_q[j]);
            // 1 - f(E_{q+1}[i] - E_q[j]) = f(E_q[j] - E_{q+1}[i]) = fw_up[q](j,i).
            weighted[a].f_down[q] = ob.up[q].transpose() - ob.up[q].transpose().cwiseProduct(
                                                               fw_up[q].transpose());
            ob.tilde_down[q] = ob.up[q].transpose() - weighted[a].f_down[q];
        }
        d.orb.push_back(std::move(ob));
    }

    // G_p = sum_mn (Γ_mn/2) [ up_m[p-1]^T f_up_n[p-1] + up_m[p] f_down_n[p] ].
    d.G.assign(P, Eigen::MatrixXd());
    for (int p = 0; p < P; ++p) d.G[p] = Eigen::MatrixXd::Zero(lay.size(p), lay.size(p));
    for (size_t am = 0; am < d.orb.size(); ++am) {
        for (size_t an = 0; an < d.orb.size(); ++an) {
            const double c = 0.5 * d.gamma(d.orb[am].orbital, d.orb[an].orbital);
            if (c == 0.0) continue;
            for (int p = 0; p < P; ++p) {
                if (p >= 1)
                    d.G[p].noalias() += c * (d.orb[am].up[p - 1].transpose() * weighted[an].f_up[p - 1]);
                if (p + 1 < P)
                    d.G[p].noalias() += c * (d.orb[am].up[p] * weighted[an].f_down[p]);
            }
        }
    }
    return d;
}

void apply_blocked_dissipator(const BlockedDissipator& d, const BlockDiagState& rho,
                              BlockDiagState& out, SplitMat& tmp) {
    const int P = d.sectors;
    if (static_cast<int>(out.blocks.size()) != P) out.blocks.resize(P);
    for (int p = 0; p < P; ++p) {
        // X_p = G_p rho_p - sandwich terms scattering into sector p
        SplitMat& X = out.blocks[p];
        if (X.rows() != rho.blocks[p].rows()) X.resize_zero(static_cast<int>(rho.blocks[p].rows()),
                                                            static_cast<int>(rho.blocks[p].cols()));
        mul_left(d.G[p], rho.blocks[p], X);
        for (size_t am = 0; am < d.orb.size(); ++am) {
            for (size_t an = 0; an < d.orb.size(); ++an) {
                const double c = 0.5 * d.gamma(d.orb[am].orbital, d.orb[an].orbital);
                if (c == 0.0) continue;
                if (p >= 1)
                    add_mul_chain(-c, d.orb[am].up[p - 1].transpose(), rho.blocks[p - 1],
                                  d.orb[an].tilde_up[p - 1], X, tmp);
                if (p + 1 < P)
                    add_mul_chain(-c, d.orb[am].up[p], rho.blocks[p + 1],
                                  d.orb[an].tilde_down[p], X, tmp);
            }
        }
        // out_p = -(X + X^+)
        X.add_own_adjoint();
        X.re = -X.re;
        X.im = -X.im;
    }
}

Eigen::VectorXd secular_rates_row_blocked(const BlockedDissipator& d, const SectorLayout& lay,
                                          int source_global) {
    Eigen::VectorXd k = Eigen::VectorXd::Zero(lay.dim);
    const int p = lay.sector_of(source_global);
    const int j = lay.within(source_global);
    for (size_t am = 0; am < d.orb.size(); ++am) {
        for (size_t an = 0; an < d.orb.size(); ++an) {
            const double g = d.gamma(d.orb[am].orbital, d.orb[an].orbital);
            if (g == 0.0) continue;
            if (p + 1 < d.sectors) {
                // up-scatter: k(N->M) += Γ_mn up_m(j, M) tilde_up_n(j, M)
                const auto um = d.orb[am].up[p].row(j);
                const auto vn = d.orb[an].tilde_up[p].row(j);
                for (int M = 0; M < lay.size(p + 1); ++M)
                    k[lay.global(p + 1, M)] += g * um(M) * vn(M);
            }
            if (p >= 1) {
                const auto um = d.orb[am].up[p - 1].col(j);
                const auto vn = d.orb[an].tilde_down[p - 1].row(j);
                for (int M = 0; M < lay.size(p - 1); ++M)
                    k[lay.global(p - 1, M)] += g * um(M) * vn(M);
            }
        }
    }
    for (int i = 0; i < lay.dim; ++i)
        if (i != source_global) check_and_clamp_rate(k[i]);
    return k;
}

} // namespace floqsh
