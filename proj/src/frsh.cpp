#include "floqsh/frsh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace floqsh {

void TrajectoryCounters::merge(const TrajectoryCounters& o) {
    hops_coupling += o.hops_coupling;
    hops_bath += o.hops_bath;
    hops_frustrated += o.hops_frustrated;
    sigma_starved += o.sigma_starved;
    degeneracy_warnings += o.degeneracy_warnings;
    max_trace_drift = std::max(max_trace_drift, o.max_trace_drift);
    max_hop_energy_error = std::max(max_hop_energy_error, o.max_hop_energy_error);
    max_hop_budget = std::max(max_hop_budget, o.max_hop_budget);
    kd_hops_rung += o.kd_hops_rung;
    kl_hops_rung += o.kl_hops_rung;
    kinetic_in_kd_small += o.kinetic_in_kd_small;
    kinetic_in_kd_rung += o.kinetic_in_kd_rung;
    potential_in_kl_small += o.potential_in_kl_small;
    potential_in_kl_rung += o.potential_in_kl_rung;
}

FrshEngine::FrshEngine(const ModelParams& params, const HybridizationMatrix& gamma,
                       const FrshOptions& opt)
    : params_(params), gamma_(gamma), opt_(opt), fock_(build_fock_space(2)) {
    params_.validate();
    if (opt.n_max < 0) throw std::invalid_argument("frsh: n_max must be >= 0");

    const FourierComponents fc = fourier_components(params_);
    HarmonicComponents mb;
    mb.h0 = lift_one_body(fock_, Eigen::MatrixXcd(fc.h0_const.cast<std::complex<double>>()));
    for (const auto& [n, hn] : fc.harmonics)
        mb.harmonics[n] = lift_one_body(fock_, Eigen::MatrixXcd(hn));
    const RealHarmonicComponents rc = gauge_real(mb);
    drive_free_ = rc.gauged.empty();
    // Decoupled Fourier blocks at A = 0: the trajectory never leaves the
    // reference replica (zero inter-replica forces, couplings and rates), so
    // run in the single-block layout.
    if (drive_free_) opt_.n_max = 0;

    layout_ = make_sector_layout(fock_.number_sectors(), opt_.n_max, fock_.dim);

    const RealFloquetOperator op_const = assemble_real(rc, opt_.n_max, params_.Omega);
    ext_const_ = extract_sector_blocks(op_const.matrix, layout_);

    RealHarmonicComponents rc_lin;
    rc_lin.h0 = lift_one_body(fock_, Eigen::MatrixXd(fc.h0_lin));
    const RealFloquetOperator op_lin = assemble_real(rc_lin, opt_.n_max, 0.0);
    ext_lin_ = extract_sector_blocks(op_lin.matrix, layout_);

    const auto inner_sectors = fock_.number_sectors();
    inner_const_.resize(inner_sectors.size());
    inner_lin_.resize(inner_sectors.size());
    for (size_t p = 0; p < inner_sectors.size(); ++p) {
        const auto& idx = inner_sectors[p];
        const int m = static_cast<int>(idx.size());
        inner_const_[p].resize(m, m);
        inner_lin_[p].resize(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                inner_const_[p](i, j) = rc.h0(idx[i], idx[j]);
                inner_lin_[p](i, j) = rc_lin.h0(idx[i], idx[j]);
            }
    }

    const Eigen::MatrixXd nD = fock_.number(0);
    occ_donor_ext_.resize(layout_.dim == 0 ? 0 : fock_.dim * (2 * opt_.n_max + 1));
    for (int r = 0; r < occ_donor_ext_.size(); ++r) occ_donor_ext_[r] = nD(r % fock_.dim, r % fock_.dim);

    const FloquetLayout flay{fock_.dim, opt_.n_max};
    for (int n = -opt_.n_max; n <= opt_.n_max; ++n) {
        const int row_a = flay.index(n, 1);
        const int row_b = flay.index(n, 3);
        for (size_t i = 0; i < layout_.rows[1].size(); ++i)
            if (layout_.rows[1][i] == row_a) {
                pos_a_rows_.push_back(static_cast<int>(i));
                if (n == 0) pos_a0_ = static_cast<int>(i);
            }
        for (size_t i = 0; i < layout_.rows[2].size(); ++i)
            if (layout_.rows[2][i] == row_b) pos_b_rows_.push_back(static_cast<int>(i));
    }
    if (pos_a0_ < 0 || pos_a_rows_.empty() || pos_b_rows_.empty())
        throw std::logic_error("frsh: estimator rows not found");
}

SectorFrame FrshEngine::make_frame(double x, const SectorFrame* prev, FrshWorkspace& ws) const {
    const int P = layout_.sectors();
    const double u0 = nuclear_potential(params_, x);
    SectorFrame frame;
    if (drive_free_) {
        auto& inner = ws.sector_mats;
        inner.resize(P);
        for (int p = 0; p < P; ++p) {
            inner[p] = inner_const_[p] + x * inner_lin_[p];
            inner[p].diagonal().array() += u0;
        }
        frame = diagonalize_sectors({}, layout_, opt_.n_max, params_.Omega, &inner, prev, x);
    } else {
        auto& mats = ws.sector_mats;
        mats.resize(P);
        for (int p = 0; p < P; ++p) {
            mats[p] = ext_const_[p] + x * ext_lin_[p];
            mats[p].diagonal().array() += u0;
        }
        frame = diagonalize_sectors(mats, layout_, opt_.n_max, params_.Omega, nullptr, prev, x);
    }
    // -dH/dx per extended row: the donor level slope and the harmonic force.
    Eigen::VectorXd minus_dH = -(std::sqrt(2.0) * params_.g) * occ_donor_ext_;
    minus_dH.array() -= params_.hbar_omega * x;
    force_and_coupling_diagonal(minus_dH, layout_, frame, opt_.degeneracy_rel_eps);
    return frame;
}

SectorFrame FrshEngine::make_frame(double x, const SectorFrame* prev) const {
    FrshWorkspace ws;
    return make_frame(x, prev, ws);
}

TrajectoryState FrshEngine::sample_initial(std::uint64_t master_seed,
                                           std::uint64_t traj_index) const {
    TrajectoryState s;
    s.rng = CounterRng(master_seed, traj_index);
    const double width = std::sqrt(params_.kT / params_.hbar_omega);
    s.x = width * s.rng.normal();
    s.p = width * s.rng.normal();
    s.t = 0.0;
    s.frame = make_frame(s.x, nullptr);
    s.counters.degeneracy_warnings += s.frame.degeneracy_warnings;

    // sigma = U^+ |a><a| U restricted to the donor sector; with real U this is
    // the outer product of the donor row of U (n = 0 Fourier block).
    const int P = layout_.sectors();
    s.sigma.blocks.resize(P);
    for (int p = 0; p < P; ++p) s.sigma.blocks[p].resize_zero(layout_.size(p), layout_.size(p));
    const Eigen::VectorXd u = s.frame.U[1].row(pos_a0_).transpose();
    s.sigma.blocks[1].re = u * u.transpose();

    // Active surface with probability |U_{a,N}|^2 (nonzero only in sector 1).
    const double xi = s.rng.uniform();
    double acc = 0.0;
    int chosen = layout_.global(1, 0);
    for (int j = 0; j < layout_.size(1); ++j) {
        acc += u[j] * u[j];
        chosen = layout_.global(1, j);
        if (xi < acc) break;
    }
    s.lambda = chosen;
    return s;
}

void FrshEngine::sigma_rhs(const TrajectoryState& s, const BlockDiagState& sigma, double xdot,
                           const BlockedDissipator& diss, FrshWorkspace& ws,
                           BlockDiagState& out) const {
    // out = -L sigma (bath), then coherent and drift terms are added per sector.
    apply_blocked_dissipator(diss, sigma, out, ws.tmp);
    const int P = layout_.sectors();
    for (int p = 0; p < P; ++p) {
        const auto& dE = ws.dE[p];
        auto& o = out.blocks[p];
        const auto& x = sigma.blocks[p];
        // -i dE o sigma (Hadamard): re += dE*im, im -= dE*re
        o.re += dE.cwiseProduct(x.im);
        o.im -= dE.cwiseProduct(x.re);
        // -xdot [D, sigma]
        const auto& D = s.frame.D[p];
        if (xdot != 0.0) {
            ws.tmp.re.noalias() = D * x.re;
            ws.tmp.re.noalias() -= x.re * D;
            o.re -= xdot * ws.tmp.re;
            ws.tmp.re.noalias() = D * x.im;
            ws.tmp.re.noalias() -= x.im * D;
            o.im -= xdot * ws.tmp.re;
        }
    }
}

void FrshEngine::step(TrajectoryState& s, double dt, FrshWorkspace& ws) const {
    const int P = layout_.sectors();
    const int lp = layout_.sector_of(s.lambda);
    const int lj = layout_.within(s.lambda);

    // Velocity Verlet on the active surface; dx/dt = hbar_omega * p.
    const double f0 = s.frame.F[lp](lj, lj);
    const double p_half = s.p + 0.5 * dt * f0;
    const double x_new = s.x + dt * params_.hbar_omega * p_half;
    SectorFrame frame_new = make_frame(x_new, &s.frame, ws);
    s.counters.degeneracy_warnings += frame_new.degeneracy_warnings;
    const double f1 = frame_new.F[lp](lj, lj);
    const double p_new = p_half + 0.5 * dt * f1;
    const double xdot = params_.hbar_omega * p_half;

    s.x = x_new;
    s.p = p_new;
    s.frame = std::move(frame_new);

    // Quasi-energy difference tables for the coherent Hadamard term.
    ws.dE.resize(P);
    for (int p = 0; p < P; ++p) {
        const auto& e = s.frame.energies[p];
        ws.dE[p] = e.replicate(1, e.size());
        ws.dE[p] -= ws.dE[p].transpose().eval();
    }

    const BlockedDissipator diss = build_dissipator(s.frame);

    // RK4 for sigma over dt.
    auto ensure = [&](BlockDiagState& b) {
        if (b.blocks.size() != static_cast<size_t>(P)) b.blocks.resize(P);
        for (int p = 0; p < P; ++p)
            if (b.blocks[p].rows() != layout_.size(p))
                b.blocks[p].resize_zero(layout_.size(p), layout_.size(p));
    };
    ensure(ws.k1);
    ensure(ws.k2);
    ensure(ws.k3);
    ensure(ws.k4);
    ensure(ws.stage);
    if (ws.tmp.rows() < layout_.size(1)) ws.tmp.resize_zero(layout_.size(1), layout_.size(1));

    sigma_rhs(s, s.sigma, xdot, diss, ws, ws.k1);
    for (int p = 0; p < P; ++p) {
        ws.stage.blocks[p].re = s.sigma.blocks[p].re + (0.5 * dt) * ws.k1.blocks[p].re;
        ws.stage.blocks[p].im = s.sigma.blocks[p].im + (0.5 * dt) * ws.k1.blocks[p].im;
    }
    sigma_rhs(s, ws.stage, xdot, diss, ws, ws.k2);
    for (int p = 0; p < P; ++p) {
        ws.stage.blocks[p].re = s.sigma.blocks[p].re + (0.5 * dt) * ws.k2.blocks[p].re;
        ws.stage.blocks[p].im = s.sigma.blocks[p].im + (0.5 * dt) * ws.k2.blocks[p].im;
    }
    sigma_rhs(s, ws.stage, xdot, diss, ws, ws.k3);
    for (int p = 0; p < P; ++p) {
        ws.stage.blocks[p].re = s.sigma.blocks[p].re + dt * ws.k3.blocks[p].re;
        ws.stage.blocks[p].im = s.sigma.blocks[p].im + dt * ws.k3.blocks[p].im;
    }
    sigma_rhs(s, ws.stage, xdot, diss, ws, ws.k4);
    const double c = dt / 6.0;
    for (int p = 0; p < P; ++p) {
        s.sigma.blocks[p].re +=
            c * (ws.k1.blocks[p].re + 2.0 * ws.k2.blocks[p].re + 2.0 * ws.k3.blocks[p].re +
                 ws.k4.blocks[p].re);
        s.sigma.blocks[p].im +=
            c * (ws.k1.blocks[p].im + 2.0 * ws.k2.blocks[p].im + 2.0 * ws.k3.blocks[p].im +
                 ws.k4.blocks[p].im);
    }

    const double drift = std::abs(s.sigma.trace_re() - 1.0);
    s.counters.max_trace_drift = std::max(s.counters.max_trace_drift, drift);
    if (drift > opt_.trace_tol)
        throw std::runtime_error("frsh: sigma trace drift " + std::to_string(drift) +
                                 " exceeds tolerance; reduce dt");

    auto [kD, kL] = hop_rates(s, diss);
    attempt_hop(s, kD, kL, dt);
    s.t += dt;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd>
FrshEngine::hop_rates(TrajectoryState& s, const BlockedDissipator& diss) const {
    const int dim = layout_.dim;
    Eigen::VectorXd kD = Eigen::VectorXd::Zero(dim);
    Eigen::VectorXd kL = secular_rates_row_blocked(diss, layout_, s.lambda);
    kL[s.lambda] = 0.0;

    const int lp = layout_.sector_of(s.lambda);
    const int lj = layout_.within(s.lambda);
    const double pop = s.sigma.blocks[lp].re(lj, lj);
    if (pop <= opt_.sigma_floor) {
        s.counters.sigma_starved++;
        return {kD, kL};
    }
    const double xdot = params_.hbar_omega * s.p;
    // D and sigma couple surfaces only within the active sector.
    const auto& D = s.frame.D[lp];
    const auto& sig = s.sigma.blocks[lp];
    for (int m = 0; m < layout_.size(lp); ++m) {
        if (m == lj) continue;
        // Re[D_{M,l} sigma_{l,M}] with real D: D(m,lj) * Re sigma(lj,m)
        const double v = -2.0 * xdot * D(m, lj) * sig.re(lj, m) / pop;
        if (v > 0.0) kD[layout_.global(lp, m)] = v;
    }
    return {kD, kL};
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> FrshEngine::hop_rates(TrajectoryState& s) const {
    const BlockedDissipator diss = build_dissipator(s.frame);
    return hop_rates(s, diss);
}

FrshEngine::RescaleResult FrshEngine::rescale_momentum(const TrajectoryState& s, int target) const {
    RescaleResult r;
    const double e_from = s.frame.energy(layout_, s.lambda);
    const double e_to = s.frame.energy(layout_, target);
    const double disc = s.p * s.p + 2.0 * (e_from - e_to) / params_.hbar_omega;
    if (disc < 0.0) return r; // frustrated
    r.accepted = true;
    const double root = std::sqrt(disc);
    r.p_new = (s.p >= 0.0) ? root : -root; // root closer to p (smaller |kappa|)
    return r;
}

void FrshEngine::attempt_hop(TrajectoryState& s, const Eigen::VectorXd& kD,
                             const Eigen::VectorXd& kL, double dt) const {
    const double total = (kD.sum() + kL.sum()) * dt;
    s.counters.max_hop_budget = std::max(s.counters.max_hop_budget, total);
    if (total >= opt_.hop_budget)
        throw std::runtime_error("frsh: hop probability " + std::to_string(total) +
                                 " exceeds budget; dt too large");

    const double xi = s.rng.uniform();
    if (xi >= total) return; // stay on the active surface

    const double rung = 0.5 * params_.Omega;
    double acc = 0.0;
    for (int m = 0; m < layout_.dim; ++m) {
        if (m == s.lambda) continue;
        const double dE = s.frame.energy(layout_, m) - s.frame.energy(layout_, s.lambda);
        // bath segment first: hop without momentum rescaling
        acc += kL[m] * dt;
        if (xi < acc) {
            s.lambda = m;
            s.counters.hops_bath++;
            if (std::abs(dE) >= rung && params_.A != 0.0) {
                s.counters.kl_hops_rung++;
                s.counters.potential_in_kl_rung += dE;
            } else {
                s.counters.potential_in_kl_small += dE;
            }
            return;
        }
        acc += kD[m] * dt;
        if (xi < acc) {
            const RescaleResult r = rescale_momentum(s, m);
            if (r.accepted) {
                const double e0 = 0.5 * params_.hbar_omega * s.p * s.p +
                                  s.frame.energy(layout_, s.lambda);
                const double e1 = 0.5 * params_.hbar_omega * r.p_new * r.p_new +
                                  s.frame.energy(layout_, m);
                s.counters.max_hop_energy_error =
                    std::max(s.counters.max_hop_energy_error, std::abs(e1 - e0));
                const double dke = 0.5 * params_.hbar_omega * (r.p_new * r.p_new - s.p * s.p);
                if (std::abs(dE) >= rung && params_.A != 0.0) {
                    s.counters.kd_hops_rung++;
                    s.counters.kinetic_in_kd_rung += dke;
                } else {
                    s.counters.kinetic_in_kd_small += dke;
                }
                s.p = r.p_new;
                s.lambda = m;
                s.counters.hops_coupling++;
            } else {
                s.counters.hops_frustrated++;
                if (opt_.frustrated_momentum_reversal) s.p = -s.p;
            }
            return;
        }
    }
}

double FrshEngine::donor_population(const TrajectoryState& s) const {
    const int lp = layout_.sector_of(s.lambda);
    const int lj = layout_.within(s.lambda);
    double pop = 0.0;
    if (lp == 1) {
        for (int pos : pos_a_rows_) {
            const double u_l = s.frame.U[1](pos, lj);
            pop += u_l * u_l;
        }
    } else if (lp == 2) {
        for (int pos : pos_b_rows_) {
            const double u_l = s.frame.U[2](pos, lj);
            pop += u_l * u_l;
        }
    }
    // sum_{i<j} 2 Re(U_{a,i} sigma_{ij} U*_{a,j}) with replica-summed donor
    // rows; only the donor sector contributes.
    const auto& sig = s.sigma.blocks[1];
    for (int pos : pos_a_rows_) {
        const Eigen::VectorXd u = s.frame.U[1].row(pos).transpose();
        const double full = u.dot(sig.re * u);
        const double diag = (u.array().square() * sig.re.diagonal().array()).sum();
        pop += full - diag;
    }
    return pop;
}

} // namespace floqsh
