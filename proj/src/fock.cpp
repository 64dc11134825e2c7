#include "floqsh/fock.hpp"

#include <algorithm>
#include <stdexcept>

namespace floqsh {

Eigen::MatrixXd FockSpace::total_number() const {
    Eigen::MatrixXd n = Eigen::MatrixXd::Zero(dim, dim);
    for (int i = 0; i < num_orbitals; ++i) n += number(i);
    return n;
}

std::vector<int> FockSpace::occupation_numbers() const {
    std::vector<int> occ(dim, 0);
    for (int s = 0; s < dim; ++s)
        for (int i = 0; i < num_orbitals; ++i) occ[s] += (s >> i) & 1;
    return occ;
}

std::vector<std::vector<int>> FockSpace::number_sectors() const {
    std::vector<std::vector<int>> sectors(num_orbitals + 1);
    const auto occ = occupation_numbers();
    for (int s = 0; s < dim; ++s) sectors[occ[s]].push_back(s);
    return sectors;
}

FockSpace build_fock_space(int num_orbitals) {
    if (num_orbitals != 2)
        throw std::invalid_argument("build_fock_space: unsupported orbital count " +
                                    std::to_string(num_orbitals) + " (built-in model has 2)");

    FockSpace space;
    space.num_orbitals = num_orbitals;
    space.dim = 1 << num_orbitals;
    space.annihilation.assign(num_orbitals, Eigen::MatrixXd::Zero(space.dim, space.dim));

    // Occupation bitmask: bit i of the state index is orbital i's occupancy,
    // orbital 0 (donor) first in the Jordan-Wigner string. Basis index mapping
    // for two orbitals: 0=|00>, 1=|10>, 2=|01>, 3=|11>.
    for (int i = 0; i < num_orbitals; ++i) {
        for (int s = 0; s < space.dim; ++s) {
            if (!((s >> i) & 1)) continue;
            int sign = 1;
            for (int j = 0; j < i; ++j)
                if ((s >> j) & 1) sign = -sign;
            const int target = s & ~(1 << i);
            space.annihilation[i](target, s) = sign;
        }
    }
    return space;
}

Eigen::MatrixXcd lift_one_body(const FockSpace& space, const Eigen::MatrixXcd& h) {
    if (h.rows() != space.num_orbitals || h.cols() != space.num_orbitals)
        throw std::invalid_argument("lift_one_body: one-body matrix dimension mismatch");
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(space.dim, space.dim);
    for (int i = 0; i < space.num_orbitals; ++i)
        for (int j = 0; j < space.num_orbitals; ++j)
            if (h(i, j) != 0.0)
                out += h(i, j) * (space.creation(i) * space.annihilation[j]);
    return out;
}

Eigen::MatrixXd lift_one_body(const FockSpace& space, const Eigen::MatrixXd& h) {
    if (h.rows() != space.num_orbitals || h.cols() != space.num_orbitals)
        throw std::invalid_argument("lift_one_body: one-body matrix dimension mismatch");
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(space.dim, space.dim);
    for (int i = 0; i < space.num_orbitals; ++i)
        for (int j = 0; j < space.num_orbitals; ++j)
            if (h(i, j) != 0.0)
                out += h(i, j) * (space.creation(i) * space.annihilation[j]);
    return out;
}

Eigen::MatrixXcd many_body_hamiltonian(const FockSpace& space, const Eigen::MatrixXcd& h,
                                       double u0) {
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    if (((h - h.adjoint()).cwiseAbs().maxCoeff()) > 1e-12 * scale)
        throw std::invalid_argument("many_body_hamiltonian: one-body matrix is not Hermitian");
    Eigen::MatrixXcd out = lift_one_body(space, h);
    out += u0 * Eigen::MatrixXcd::Identity(space.dim, space.dim);
    return out;
}

} // namespace floqsh
