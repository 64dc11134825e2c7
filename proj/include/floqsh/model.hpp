#pragma once

#include <Eigen/Dense>
#include <map>

namespace floqsh {

/// Parameters of the driven donor-acceptor-metal model, all in the energy
/// unit of the input file (hbar = 1).
///
/// Nuclear coordinates are dimensionless oscillator variables
///   x = X * sqrt(m*omega/hbar),  p = P / sqrt(m*omega*hbar),
/// which removes the (unspecified) nuclear mass. In these variables
///   U0(x)     = (hbar_omega/2) x^2,
///   kinetic   = (hbar_omega/2) p^2,
///   E_D(x)    = sqrt(2)*g*x + eps_D,
/// and the equations of motion read dx/dt = hbar_omega * p, dp/dt = F(x)
/// with F in energy per unit x.
struct ModelParams {
    double kT = 0.01;
    double hbar_omega = 0.003;
    double g = 0.0075;
    double eps_D = 0.0; ///< donor level offset; default 2*Er with Er = g^2/hbar_omega
    double W = 0.01;
    double Gamma = 0.002;
    double A = 0.0;
    double Omega = 0.1;

    double reorganization_energy() const { return g * g / hbar_omega; }
    static double default_eps_d(double g, double hbar_omega) { return 2.0 * g * g / hbar_omega; }

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

/// Orbital-basis hybridization with the metal. Built-in model: Gamma_AA only.
struct HybridizationMatrix {
    Eigen::Matrix2d gamma = Eigen::Matrix2d::Zero();

    static HybridizationMatrix acceptor_only(double Gamma) {
        HybridizationMatrix h;
        h.gamma(1, 1) = Gamma;
        return h;
    }
};

/// One-body electronic Hamiltonian h(x, t), orbital order (D, A).
Eigen::Matrix2d one_body_h(const ModelParams& p, double x, double t);

/// Fourier decomposition h(x, t) = [h0_const + x*h0_lin] + sum_{n!=0} H^(n) e^{i n Omega t}.
struct FourierComponents {
    Eigen::Matrix2d h0_const = Eigen::Matrix2d::Zero();
    Eigen::Matrix2d h0_lin = Eigen::Matrix2d::Zero();
    std::map<int, Eigen::Matrix2cd> harmonics; // n != 0 only

    Eigen::Matrix2d static_part(double x) const { return h0_const + x * h0_lin; }
    /// Reassembles h(x, t) by direct summation over harmonics.
    Eigen::Matrix2cd reassemble(double x, double t, double Omega) const;
};

FourierComponents fourier_components(const ModelParams& p);

/// U0(x) = 0.5 * hbar_omega * x^2 and its force -dU0/dx.
double nuclear_potential(const ModelParams& p, double x);
double nuclear_force_static(const ModelParams& p, double x);

} // namespace floqsh
