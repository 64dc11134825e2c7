#include "floqsh/model.hpp"

#include <cmath>
#include <stdexcept>

namespace floqsh {

void ModelParams::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw std::invalid_argument(what);
    };
    require(std::isfinite(kT) && kT > 0.0, "params.kT: must be finite and > 0");
    require(std::isfinite(hbar_omega) && hbar_omega > 0.0,
            "params.hbar_omega: must be finite and > 0");
    require(std::isfinite(g), "params.g: must be finite");
    require(std::isfinite(eps_D), "params.eps_D: must be finite");
    require(std::isfinite(W), "params.W: must be finite");
    require(std::isfinite(Gamma) && Gamma >= 0.0, "params.Gamma: must be finite and >= 0");
    require(std::isfinite(A), "params.A: must be finite");
    require(std::isfinite(Omega), "params.Omega: must be finite");
    if (A != 0.0) require(Omega > 0.0, "params.Omega: must be > 0 when A != 0");
}

Eigen::Matrix2d one_body_h(const ModelParams& p, double x, double t) {
    Eigen::Matrix2d h;
    const double coupling = p.W + p.A * std::sin(p.Omega * t);
    h(0, 0) = std::sqrt(2.0) * p.g * x + p.eps_D;
    h(1, 1) = 0.0;
    h(0, 1) = coupling;
    h(1, 0) = coupling;
    return h;
}

FourierComponents fourier_components(const ModelParams& p) {
    FourierComponents c;
    c.h0_const(0, 0) = p.eps_D;
    c.h0_const(0, 1) = c.h0_const(1, 0) = p.W;
    c.h0_lin(0, 0) = std::sqrt(2.0) * p.g;
    if (p.A != 0.0) {
        // A sin(Omega t) = (-iA/2) e^{i Omega t} + (iA/2) e^{-i Omega t}
        Eigen::Matrix2cd plus = Eigen::Matrix2cd::Zero();
        plus(0, 1) = plus(1, 0) = std::complex<double>(0.0, -0.5 * p.A);
        c.harmonics[1] = plus;
        c.harmonics[-1] = plus.adjoint();
    }
    return c;
}

Eigen::Matrix2cd FourierComponents::reassemble(double x, double t, double Omega) const {
    Eigen::Matrix2cd h = static_part(x).cast<std::complex<double>>();
    for (const auto& [n, hn] : harmonics)
        h += hn * std::exp(std::complex<double>(0.0, n * Omega * t));
    return h;
}

double nuclear_potential(const ModelParams& p, double x) { return 0.5 * p.hbar_omega * x * x; }

double nuclear_force_static(const ModelParams& p, double x) { return -p.hbar_omega * x; }

} // namespace floqsh
