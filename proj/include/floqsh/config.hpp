#pragma once

#include <string>

#include "floqsh/ensemble.hpp"
#include "floqsh/model.hpp"

namespace floqsh {

struct FloquetConfig {
    int n_max = 2;
    int n_phonon = 100;
    double qme_dt = 2.0;
};

struct IoConfig {
    std::string out = "run";
    int stride = 100; ///< outputs every stride * ensemble.dt for both solvers
};

struct RunConfig {
    std::string method = "frsh"; // frsh | frqme | compare
    ModelParams params;
    EnsembleConfig ensemble;
    FloquetConfig floquet;
    IoConfig io;
};

/// Strict JSON config parser: unknown keys and type mismatches are rejected
/// with path-qualified messages; defaults are the built-in model values
/// (kT = 0.01, hbar_omega = 0.003, g = 0.0075, Gamma = 0.002, Omega = 0.1,
/// W = 0.01, A = 0) and eps_D = 2 g^2 / hbar_omega unless given.
RunConfig parse_config(const std::string& text);

/// Canonical serialization; parse(serialize(c)) == c.
std::string serialize_config(const RunConfig& c);

bool operator==(const RunConfig& a, const RunConfig& b);

} // namespace floqsh
