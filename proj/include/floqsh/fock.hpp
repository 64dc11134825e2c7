#pragma once

#include <Eigen/Dense>
#include <vector>

namespace floqsh {

/// Many-body Fock space of spinless fermionic orbitals with Jordan-Wigner
/// operator matrices.
///
/// Basis ordering for the built-in two-orbital (donor, acceptor) molecule:
///   0 = |00>  (empty)
///   1 = |10>  (donor occupied)
///   2 = |01>  (acceptor occupied)
///   3 = |11>  (both occupied), with |11> = d_D^+ d_A^+ |00>.
/// The donor orbital comes first in the Jordan-Wigner string, so
/// d_A^+ |10> = -|11>.
struct FockSpace {
    int num_orbitals = 0;
    int dim = 0;
    std::vector<Eigen::MatrixXd> annihilation; // d_i, real dense

    Eigen::MatrixXd creation(int i) const { return annihilation.at(i).transpose(); }
    Eigen::MatrixXd number(int i) const {
        return annihilation.at(i).transpose() * annihilation.at(i);
    }
    Eigen::MatrixXd total_number() const;

    /// Particle number of each basis state (diagonal of the total number op).
    std::vector<int> occupation_numbers() const;

    /// Basis indices grouped by total particle number, ascending.
    std::vector<std::vector<int>> number_sectors() const;
};

/// Builds the electronic Fock space. Only num_orbitals == 2 is supported;
/// other counts are rejected.
FockSpace build_fock_space(int num_orbitals);

/// H = sum_ij h_ij d_i^+ d_j + u0 * I for a Hermitian one-body matrix h.
/// Throws std::invalid_argument if h is not Hermitian.
Eigen::MatrixXcd many_body_hamiltonian(const FockSpace& space, const Eigen::MatrixXcd& h,
                                       double u0);

/// Same contraction without the Hermiticity check; used to lift individual
/// Fourier components H^(n), which are Hermitian only in +/-n pairs.
Eigen::MatrixXcd lift_one_body(const FockSpace& space, const Eigen::MatrixXcd& h);

/// Real-valued lift for real one-body matrices.
Eigen::MatrixXd lift_one_body(const FockSpace& space, const Eigen::MatrixXd& h);

} // namespace floqsh
