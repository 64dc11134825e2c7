#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "floqsh/frqme.hpp"

using namespace floqsh;

namespace {

ModelParams toy_params() {
    // phonon-friendly toy: small thermal occupation, no displacement by default
    ModelParams p;
    p.kT = 0.01;
    p.hbar_omega = 0.01;
    p.g = 0.0;
    p.eps_D = 0.02;
    p.W = 0.0;
    p.Gamma = 0.0;
    p.Omega = 0.1;
    p.A = 0.0;
    return p;
}

ModelParams production_params(double A) {
    ModelParams p;
    p.kT = 0.01;
    p.hbar_omega = 0.003;
    p.g = 0.0075;
    p.eps_D = ModelParams::default_eps_d(p.g, p.hbar_omega);
    p.W = 0.01;
    p.Gamma = 0.002;
    p.Omega = 0.1;
    p.A = A;
    return p;
}

} // namespace

TEST_CASE("frqme: decoupled spectrum enumerates phonon + occupation + ladder sums") {
    ModelParams p = toy_params();
    p.A = 1e-9; // vanishing drive keeps the full extended assembly in play
    FrqmeOptions opt;
    opt.n_phonon = 8;
    opt.n_max = 1;
    FrqmeSolver solver(p, HybridizationMatrix(), opt);
    REQUIRE_FALSE(solver.drive_free());
    const Eigen::VectorXd eigs = solver.all_quasi_energies();

    std::vector<double> expected;
    const double occ_energy[4] = {0.0, p.eps_D, 0.0, p.eps_D}; // E_A = 0
    for (int m = -1; m <= 1; ++m)
        for (int n = 0; n < opt.n_phonon; ++n)
            for (int el = 0; el < 4; ++el)
                expected.push_back((n + 0.5) * p.hbar_omega + occ_energy[el] + m * p.Omega);
    std::sort(expected.begin(), expected.end());
    REQUIRE(static_cast<int>(expected.size()) == eigs.size());
    for (int i = 0; i < eigs.size(); ++i)
        CHECK(std::abs(eigs[i] - expected[i]) < 1e-8);
}

TEST_CASE("frqme: polaron shift of the displaced donor oscillator") {
    ModelParams p = toy_params();
    p.g = 0.01;
    p.eps_D = 0.0;
    FrqmeOptions opt;
    opt.n_phonon = 24;
    opt.n_max = 0;
    FrqmeSolver solver(p, HybridizationMatrix(), opt);
    // lowest donor-occupied level: hbar_omega/2 - g^2/hbar_omega
    const double expect = 0.5 * p.hbar_omega - p.g * p.g / p.hbar_omega;
    double lowest = 1e9;
    for (double e : solver.frame().energies[1]) lowest = std::min(lowest, e);
    CHECK(lowest == doctest::Approx(expect).epsilon(1e-8));
}

TEST_CASE("frqme: phonon truncation guard") {
    ModelParams p = production_params(0.0);
    FrqmeOptions opt;
    opt.n_phonon = 10; // far below the polaron + thermal requirement
    opt.n_max = 0;
    CHECK_THROWS_AS(FrqmeSolver(p, HybridizationMatrix(), opt), std::invalid_argument);
    CHECK(FrqmeSolver::min_phonon_levels(p) <= 40);
}

TEST_CASE("frqme: closed system conserves trace and energy") {
    ModelParams p = toy_params();
    p.W = 0.004; // coherent donor-acceptor exchange, no bath
    p.g = 0.003;
    FrqmeOptions opt;
    opt.n_phonon = 12;
    opt.n_max = 0;
    opt.dt = 1.0;
    FrqmeSolver solver(p, HybridizationMatrix(), opt);
    const TimeSeries ts = solver.propagate(2000.0, 100);
    CHECK(solver.stats().max_trace_drift < 1e-10);
    const auto& en = solver.stats().energy_trace;
    const auto [mn, mx] = std::minmax_element(en.begin(), en.end());
    CHECK(*mx - *mn < 1e-10);
    // populations stay physical
    for (int i = 0; i < ts.size(); ++i) {
        CHECK(ts.pop[i] > -1e-9);
        CHECK(ts.pop[i] < 1.0 + 1e-9);
    }
}

TEST_CASE("frqme: single-level equilibrium reaches the Fermi occupation") {
    // donor coupled to the bath, everything else off: population -> f(eps_D)
    ModelParams p = toy_params();
    p.eps_D = 0.0; // resonant level: f(0) = 1/2
    p.Gamma = 0.002;
    FrqmeOptions opt;
    opt.n_phonon = 8;
    opt.n_max = 0;
    opt.dt = 2.0;
    HybridizationMatrix gam;
    gam.gamma(0, 0) = p.Gamma; // donor-bath coupling for this toy
    FrqmeSolver solver(p, gam, opt);
    const TimeSeries ts = solver.propagate(6000.0, 250);
    CHECK(ts.pop[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ts.pop[ts.size() - 1] == doctest::Approx(0.5).epsilon(2e-4));
}

TEST_CASE("frqme: initial kinetic energy matches the truncated Bose occupation") {
    const ModelParams p = production_params(0.0);
    FrqmeOptions opt;
    opt.n_phonon = 40;
    opt.n_max = 0;
    opt.dt = 1.0;
    FrqmeSolver solver(p, HybridizationMatrix::acceptor_only(p.Gamma), opt);
    const TimeSeries ts = solver.propagate(2.0, 1);

    // independent closed form: truncated thermal phonon distribution
    double z = 0.0, nbar = 0.0;
    for (int n = 0; n < opt.n_phonon; ++n) {
        const double w = std::exp(-n * p.hbar_omega / p.kT);
        z += w;
        nbar += n * w;
    }
    nbar /= z;
    const double expect = 0.5 * p.hbar_omega * (nbar + 0.5);
    CHECK(ts.kinetic[0] == doctest::Approx(expect).epsilon(1e-10));
    // untruncated Bose value 0.0050374... is reproduced to truncation accuracy
    const double nbar_inf = 1.0 / std::expm1(p.hbar_omega / p.kT);
    CHECK(ts.kinetic[0] == doctest::Approx(0.5 * p.hbar_omega * (nbar_inf + 0.5)).epsilon(1e-5));
    // donor population starts at exactly 1
    CHECK(ts.pop[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("frqme: undriven runs are identical across Floquet truncations") {
    ModelParams p = toy_params();
    p.W = 0.004;
    p.Gamma = 0.002;
    FrqmeOptions o0;
    o0.n_phonon = 10;
    o0.n_max = 0;
    o0.dt = 2.0;
    FrqmeOptions o1 = o0;
    o1.n_max = 1;
    FrqmeSolver s0(p, HybridizationMatrix::acceptor_only(p.Gamma), o0);
    FrqmeSolver s1(p, HybridizationMatrix::acceptor_only(p.Gamma), o1);
    const TimeSeries t0 = s0.propagate(1000.0, 100);
    const TimeSeries t1 = s1.propagate(1000.0, 100);
    REQUIRE(t0.size() == t1.size());
    for (int i = 0; i < t0.size(); ++i) {
        CHECK(std::abs(t0.pop[i] - t1.pop[i]) < 1e-8);
        CHECK(std::abs(t0.kinetic[i] - t1.kinetic[i]) < 1e-8);
    }
}

TEST_CASE("frqme: driven toy keeps trace and physical populations") {
    ModelParams p = toy_params();
    p.W = 0.005;
    p.g = 0.005;
    p.Gamma = 0.002;
    p.A = 0.02;
    p.Omega = 0.1;
    FrqmeOptions opt;
    opt.n_phonon = 12;
    opt.n_max = 2;
    opt.dt = 2.0;
    FrqmeSolver solver(p, HybridizationMatrix::acceptor_only(p.Gamma), opt);
    CHECK_FALSE(solver.drive_free());
    const TimeSeries ts = solver.propagate(2000.0, 100);
    CHECK(solver.stats().max_trace_drift < 1e-8);
    for (int i = 0; i < ts.size(); ++i) {
        CHECK(ts.pop[i] > -1e-6);
        CHECK(ts.pop[i] < 1.0 + 1e-6);
        CHECK(ts.kinetic[i] > 0.0);
    }
}
