#include "floqsh/frqme.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace floqsh {

Eigen::MatrixXd FrqmeSolver::phonon_annihilation(int n_phonon) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_phonon, n_phonon);
    for (int n = 1; n < n_phonon; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

int FrqmeSolver::min_phonon_levels(const ModelParams& p) {
    const double disp2 = (p.g / p.hbar_omega) * (p.g / p.hbar_omega);
    const double nbar = 1.0 / std::expm1(p.hbar_omega / p.kT);
    return static_cast<int>(std::ceil(2.0 * disp2 + 3.0 * nbar + 4.0));
}

namespace {

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

} // namespace

FrqmeSolver::FrqmeSolver(const ModelParams& params, const HybridizationMatrix& gamma,
                         const FrqmeOptions& opt)
    : params_(params), gamma_(gamma), opt_(opt), fock_(build_fock_space(2)) {
    params_.validate();
    if (opt_.n_max < 0) throw std::invalid_argument("frqme: n_max must be >= 0");
    const int np = opt_.n_phonon;
    if (np < min_phonon_levels(params_))
        throw std::invalid_argument(
            "frqme: n_phonon=" + std::to_string(np) + " too small for polaron displacement " +
            "(g/hbar_omega)^2 plus thermal occupation; need >= " +
            std::to_string(min_phonon_levels(params_)));

    inner_dim_ = fock_.dim * np;
    const Eigen::MatrixXd a = phonon_annihilation(np);
    const Eigen::MatrixXd id_el = Eigen::MatrixXd::Identity(fock_.dim, fock_.dim);
    const Eigen::MatrixXd id_ph = Eigen::MatrixXd::Identity(np, np);
    const Eigen::MatrixXd n_ph = a.transpose() * a;
    const Eigen::MatrixXd nD = fock_.number(0);

    Eigen::Matrix2d xpat = Eigen::Matrix2d::Zero();
    xpat(0, 1) = xpat(1, 0) = 1.0;
    const Eigen::MatrixXd X = lift_one_body(fock_, Eigen::MatrixXd(xpat));

    // Inner index = iph * fock_.dim + iel (electronic innermost).
    HarmonicComponents mb;
    Eigen::MatrixXd h0 = params_.hbar_omega * kron(n_ph, id_el);
    h0.diagonal().array() += 0.5 * params_.hbar_omega;
    h0 += kron(params_.g * (a + a.transpose()), nD);
    h0 += params_.eps_D * kron(id_ph, nD);
    h0 += params_.W * kron(id_ph, X);
    mb.h0 = h0.cast<std::complex<double>>();
    if (params_.A != 0.0) {
        const Eigen::MatrixXcd drive =
            std::complex<double>(0.0, -0.5 * params_.A) * kron(id_ph, X).cast<std::complex<double>>();
        mb.harmonics[1] = drive;
        mb.harmonics[-1] = drive.adjoint();
    }
    const RealHarmonicComponents rc = gauge_real(mb);
    drive_free_ = rc.gauged.empty();
    // Without a drive the Fourier blocks decouple exactly and the state never
    // leaves the reference block, so the extended index is inert: propagate in
    // the single-block layout.
    if (drive_free_) opt_.n_max = 0;

    // Vibronic number sectors: electronic sector structure replicated over
    // phonon levels, phonon-major within a sector.
    const auto el_sectors = fock_.number_sectors();
    std::vector<std::vector<int>> inner_sectors(el_sectors.size());
    for (size_t p = 0; p < el_sectors.size(); ++p)
        for (int iph = 0; iph < np; ++iph)
            for (int el : el_sectors[p]) inner_sectors[p].push_back(iph * fock_.dim + el);
    layout_ = make_sector_layout(inner_sectors, opt_.n_max, inner_dim_);

    if (drive_free_) {
        std::vector<Eigen::MatrixXd> inner(el_sectors.size());
        for (size_t p = 0; p < el_sectors.size(); ++p) {
            const auto& idx = inner_sectors[p];
            const int m = static_cast<int>(idx.size());
            inner[p].resize(m, m);
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) inner[p](i, j) = rc.h0(idx[i], idx[j]);
        }
        frame_ = diagonalize_sectors({}, layout_, opt_.n_max, params_.Omega, &inner, nullptr, 0.0);
    } else {
        const RealFloquetOperator op = assemble_real(rc, opt_.n_max, params_.Omega);
        const auto blocks = extract_sector_blocks(op.matrix, layout_);
        frame_ = diagonalize_sectors(blocks, layout_, opt_.n_max, params_.Omega, nullptr, nullptr,
                                     0.0);
    }

    diss_ = build_blocked_dissipator(frame_, layout_, fock_, gamma_, params_.kT);
    build_observables();

    // Initial state: thermal phonons (x) donor-occupied, n = 0 Fourier block,
    // rotated into the eigenbasis. Both factors are real.
    const int P = layout_.sectors();
    initial_.blocks.resize(P);
    for (int p = 0; p < P; ++p) initial_.blocks[p].resize_zero(layout_.size(p), layout_.size(p));
    Eigen::VectorXd pth(np);
    for (int n = 0; n < np; ++n) pth[n] = std::exp(-n * params_.hbar_omega / params_.kT);
    pth /= pth.sum();

    const int m1 = static_cast<int>(el_sectors[1].size());
    int donor_pos = 0;
    for (int e = 0; e < m1; ++e)
        if (el_sectors[1][e] == 1) donor_pos = e;
    const int fourier0 = opt_.n_max; // block index of n = 0
    auto& blk = initial_.blocks[1].re;
    for (int iph = 0; iph < np; ++iph) {
        const int within = fourier0 * (np * m1) + iph * m1 + donor_pos;
        const Eigen::VectorXd u = frame_.U[1].row(within).transpose();
        blk.noalias() += pth[iph] * (u * u.transpose());
    }
}

void FrqmeSolver::build_observables() {
    const int P = layout_.sectors();
    const int K = 2 * opt_.n_max;
    const int np = opt_.n_phonon;
    const Eigen::MatrixXd a = phonon_annihilation(np);
    const Eigen::MatrixXd id_el = Eigen::MatrixXd::Identity(fock_.dim, fock_.dim);

    // Inner-space observables (original basis).
    const Eigen::MatrixXd pop_inner = kron(Eigen::MatrixXd::Identity(np, np), fock_.number(0));
    Eigen::MatrixXd ke_ph = 2.0 * (a.transpose() * a);
    ke_ph.diagonal().array() += 1.0;
    ke_ph -= a * a + (a * a).transpose();
    ke_ph *= 0.25 * params_.hbar_omega;
    const Eigen::MatrixXd ke_inner = kron(ke_ph, id_el);

    Eigen::MatrixXd top_ph = Eigen::MatrixXd::Zero(np, np);
    for (int n = static_cast<int>(std::floor(0.9 * np)); n < np; ++n) top_ph(n, n) = 1.0;
    const Eigen::MatrixXd top_inner = kron(top_ph, id_el);

    auto build = [&](const Eigen::MatrixXd& inner, int k, int p) {
        const auto& rows = layout_.rows[p];
        const int s = layout_.size(p);
        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(s, s);
        for (int i = 0; i < s; ++i) {
            const int nr = rows[i] / inner_dim_, mr = rows[i] % inner_dim_;
            for (int j = 0; j < s; ++j) {
                const int nc = rows[j] / inner_dim_, mc = rows[j] % inner_dim_;
                if (nr - nc != k) continue;
                B(i, j) = inner(mr, mc);
            }
        }
        return Eigen::MatrixXd((frame_.U[p].transpose() * B * frame_.U[p]));
    };

    obs_pop_.assign(K + 1, std::vector<Eigen::MatrixXd>(P));
    obs_ke_.assign(K + 1, std::vector<Eigen::MatrixXd>(P));
    obs_top_.resize(P);
    for (int p = 0; p < P; ++p) {
        for (int k = 0; k <= K; ++k) {
            obs_pop_[k][p] = build(pop_inner, k, p);
            obs_ke_[k][p] = build(ke_inner, k, p);
        }
        obs_top_[p] = build(top_inner, 0, p);
    }
}

void FrqmeSolver::dress_to_schrodinger(const BlockDiagState& in, BlockDiagState& out,
                                       double t) const {
    const int P = layout_.sectors();
    if (out.blocks.size() != static_cast<size_t>(P)) out.blocks.resize(P);
    for (int p = 0; p < P; ++p) {
        out.blocks[p] = in.blocks[p];
        const Eigen::VectorXd phase = frame_.energies[p] * t;
        const Eigen::VectorXd c = phase.array().cos();
        const Eigen::VectorXd s = phase.array().sin();
        rotate_rows(out.blocks[p], c, Eigen::VectorXd(-s)); // conj(phi) on rows
        rotate_cols(out.blocks[p], c, s);                   // phi on columns
    }
}

TimeSeries FrqmeSolver::propagate(double t_end, int output_stride) {
    const auto t0_wall = std::chrono::steady_clock::now();
    const double dt = opt_.dt;
    const long n_steps = std::lround(t_end / dt);
    const int n_bins = static_cast<int>(n_steps / output_stride) + 1;
    const int P = layout_.sectors();
    const int K = 2 * opt_.n_max;

    BlockDiagState R = initial_;
    BlockDiagState k1, k2, k3, k4, stage, dressed, scratch;
    SplitMat tmp;

    auto rhs = [&](double ts, const BlockDiagState& X, BlockDiagState& out) {
        dress_to_schrodinger(X, dressed, ts);
        apply_blocked_dissipator(diss_, dressed, out, tmp);
        for (int p = 0; p < P; ++p) {
            const Eigen::VectorXd phase = frame_.energies[p] * ts;
            const Eigen::VectorXd c = phase.array().cos();
            const Eigen::VectorXd s = phase.array().sin();
            rotate_rows(out.blocks[p], c, s); // phi on rows
            rotate_cols(out.blocks[p], c, Eigen::VectorXd(-s));
        }
    };

    TimeSeries series;
    series.t.resize(n_bins);
    series.pop.resize(n_bins);
    series.kinetic.resize(n_bins);
    series.has_stderr = false;
    series.n_samples = 1;

    stats_ = FrqmeRunStats{};
    stats_.steps = n_steps;

    int bin = 0;
    auto record = [&](double t) {
        dress_to_schrodinger(R, dressed, t);
        const double trace_drift = std::abs(R.trace_re() - 1.0);
        stats_.max_trace_drift = std::max(stats_.max_trace_drift, trace_drift);
        if (trace_drift > opt_.trace_tol)
            throw std::runtime_error("frqme: trace drift " + std::to_string(trace_drift) +
                                     " exceeds tolerance");

        double pop = 0.0, ke = 0.0, top = 0.0;
        for (int p = 0; p < P; ++p) {
            const auto& re_t = dressed.blocks[p].re;
            const auto& im_t = dressed.blocks[p].im;
            // k = 0 (static) contributions
            pop += (obs_pop_[0][p].cwiseProduct(re_t.transpose())).sum();
            ke += (obs_ke_[0][p].cwiseProduct(re_t.transpose())).sum();
            top += (obs_top_[p].cwiseProduct(re_t.transpose())).sum();
            // k > 0: 2 Re[e^{ik(Omega t + pi/2)} c_k] with the i^k gauge fold
            for (int k = 1; k <= K; ++k) {
                const double cr = (obs_pop_[k][p].cwiseProduct(re_t.transpose())).sum();
                const double ci = (obs_pop_[k][p].cwiseProduct(im_t.transpose())).sum();
                const double kr = (obs_ke_[k][p].cwiseProduct(re_t.transpose())).sum();
                const double ki = (obs_ke_[k][p].cwiseProduct(im_t.transpose())).sum();
                const double ang = k * (params_.Omega * t + 0.5 * M_PI);
                const double ca = std::cos(ang), sa = std::sin(ang);
                pop += 2.0 * (ca * cr - sa * ci);
                ke += 2.0 * (ca * kr - sa * ki);
            }
        }
        stats_.max_top_phonon_population = std::max(stats_.max_top_phonon_population, top);
        double energy = 0.0;
        for (int p = 0; p < P; ++p)
            energy += frame_.energies[p].dot(R.blocks[p].re.diagonal());
        stats_.energy_trace.push_back(energy);
        series.t[bin] = t;
        series.pop[bin] = pop;
        series.kinetic[bin] = ke;
        ++bin;
    };

    record(0.0);
    auto axpy = [&](BlockDiagState& out, const BlockDiagState& base, const BlockDiagState& k,
                    double c) {
        if (out.blocks.size() != base.blocks.size()) out.blocks.resize(base.blocks.size());
        for (size_t p = 0; p < base.blocks.size(); ++p) {
            out.blocks[p].re = base.blocks[p].re + c * k.blocks[p].re;
            out.blocks[p].im = base.blocks[p].im + c * k.blocks[p].im;
        }
    };

    for (long step = 1; step <= n_steps; ++step) {
        const double t = (step - 1) * dt;
        rhs(t, R, k1);
        axpy(stage, R, k1, 0.5 * dt);
        rhs(t + 0.5 * dt, stage, k2);
        axpy(stage, R, k2, 0.5 * dt);
        rhs(t + 0.5 * dt, stage, k3);
        axpy(stage, R, k3, dt);
        rhs(t + dt, stage, k4);
        for (int p = 0; p < P; ++p) {
            R.blocks[p].re += (dt / 6.0) * (k1.blocks[p].re + 2.0 * k2.blocks[p].re +
                                            2.0 * k3.blocks[p].re + k4.blocks[p].re);
            R.blocks[p].im += (dt / 6.0) * (k1.blocks[p].im + 2.0 * k2.blocks[p].im +
                                            2.0 * k3.blocks[p].im + k4.blocks[p].im);
        }
        if (step % output_stride == 0) record(step * dt);
    }

    stats_.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_wall).count();
    return series;
}

Eigen::VectorXd FrqmeSolver::all_quasi_energies() const {
    Eigen::VectorXd e(layout_.dim);
    int off = 0;
    for (const auto& ep : frame_.energies) {
        e.segment(off, ep.size()) = ep;
        off += static_cast<int>(ep.size());
    }
    std::sort(e.data(), e.data() + e.size());
    return e;
}

} // namespace floqsh
