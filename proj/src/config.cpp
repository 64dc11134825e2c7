#include "floqsh/config.hpp"

#include <json.hpp>
#include <stdexcept>

namespace floqsh {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw std::invalid_argument(path + ": " + what);
}

void expect_object(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
}

double get_number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "type mismatch (expected number)");
    return j.get<double>();
}

long get_integer(const json& j, const std::string& path) {
    if (!j.is_number_integer()) fail(path, "type mismatch (expected integer)");
    return j.get<long>();
}

std::uint64_t get_seed(const json& j, const std::string& path) {
    if (!(j.is_number_unsigned() || (j.is_number_integer() && j.get<long long>() >= 0)))
        fail(path, "type mismatch (expected nonnegative integer)");
    return j.get<std::uint64_t>();
}

std::string get_string(const json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "type mismatch (expected string)");
    return j.get<std::string>();
}

} // namespace

RunConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
    }
    expect_object(j, "config");

    RunConfig c;
    bool eps_given = false;

    for (const auto& [key, val] : j.items()) {
        if (key == "method") {
            c.method = get_string(val, "method");
        } else if (key == "params") {
            expect_object(val, "params");
            for (const auto& [k, v] : val.items()) {
                const std::string path = "params." + k;
                if (k == "kT") c.params.kT = get_number(v, path);
                else if (k == "hbar_omega") c.params.hbar_omega = get_number(v, path);
                else if (k == "g") c.params.g = get_number(v, path);
                else if (k == "eps_D") { c.params.eps_D = get_number(v, path); eps_given = true; }
                else if (k == "W") c.params.W = get_number(v, path);
                else if (k == "Gamma") c.params.Gamma = get_number(v, path);
                else if (k == "A") c.params.A = get_number(v, path);
                else if (k == "Omega") c.params.Omega = get_number(v, path);
                else fail(path, "unknown key");
            }
        } else if (key == "ensemble") {
            expect_object(val, "ensemble");
            for (const auto& [k, v] : val.items()) {
                const std::string path = "ensemble." + k;
                if (k == "n_traj") c.ensemble.n_traj = static_cast<int>(get_integer(v, path));
                else if (k == "master_seed") c.ensemble.master_seed = get_seed(v, path);
                else if (k == "dt") c.ensemble.dt = get_number(v, path);
                else if (k == "t_end") c.ensemble.t_end = get_number(v, path);
                else if (k == "worker_count")
                    c.ensemble.worker_count = static_cast<int>(get_integer(v, path));
                else fail(path, "unknown key");
            }
        } else if (key == "floquet") {
            expect_object(val, "floquet");
            for (const auto& [k, v] : val.items()) {
                const std::string path = "floquet." + k;
                if (k == "n_max") c.floquet.n_max = static_cast<int>(get_integer(v, path));
                else if (k == "n_phonon") c.floquet.n_phonon = static_cast<int>(get_integer(v, path));
                else if (k == "qme_dt") c.floquet.qme_dt = get_number(v, path);
                else fail(path, "unknown key");
            }
        } else if (key == "io") {
            expect_object(val, "io");
            for (const auto& [k, v] : val.items()) {
                const std::string path = "io." + k;
                if (k == "out") c.io.out = get_string(v, path);
                else if (k == "stride") c.io.stride = static_cast<int>(get_integer(v, path));
                else fail(path, "unknown key");
            }
        } else {
            fail(key, "unknown key");
        }
    }

    if (!eps_given)
        c.params.eps_D = ModelParams::default_eps_d(c.params.g, c.params.hbar_omega);

    if (c.method != "frsh" && c.method != "frqme" && c.method != "compare")
        fail("method", "must be one of frsh, frqme, compare");
    c.params.validate();
    c.ensemble.output_stride = c.io.stride;
    c.ensemble.validate();
    if (c.floquet.n_max < 0) fail("floquet.n_max", "must be >= 0");
    if (c.floquet.n_phonon < 1) fail("floquet.n_phonon", "must be >= 1");
    if (!(c.floquet.qme_dt > 0)) fail("floquet.qme_dt", "must be > 0");
    return c;
}

std::string serialize_config(const RunConfig& c) {
    json j;
    j["method"] = c.method;
    j["params"] = {{"kT", c.params.kT},       {"hbar_omega", c.params.hbar_omega},
                   {"g", c.params.g},         {"eps_D", c.params.eps_D},
                   {"W", c.params.W},         {"Gamma", c.params.Gamma},
                   {"A", c.params.A},         {"Omega", c.params.Omega}};
    j["ensemble"] = {{"n_traj", c.ensemble.n_traj},
                     {"master_seed", c.ensemble.master_seed},
                     {"dt", c.ensemble.dt},
                     {"t_end", c.ensemble.t_end},
                     {"worker_count", c.ensemble.worker_count}};
    j["floquet"] = {{"n_max", c.floquet.n_max},
                    {"n_phonon", c.floquet.n_phonon},
                    {"qme_dt", c.floquet.qme_dt}};
    j["io"] = {{"out", c.io.out}, {"stride", c.io.stride}};
    return j.dump(2) + "\n";
}

bool operator==(const RunConfig& a, const RunConfig& b) {
    return a.method == b.method && a.params.kT == b.params.kT &&
           a.params.hbar_omega == b.params.hbar_omega && a.params.g == b.params.g &&
           a.params.eps_D == b.params.eps_D && a.params.W == b.params.W &&
           a.params.Gamma == b.params.Gamma && a.params.A == b.params.A &&
           a.params.Omega == b.params.Omega && a.ensemble.n_traj == b.ensemble.n_traj &&
           a.ensemble.master_seed == b.ensemble.master_seed && a.ensemble.dt == b.ensemble.dt &&
           a.ensemble.t_end == b.ensemble.t_end &&
           a.ensemble.worker_count == b.ensemble.worker_count &&
           a.floquet.n_max == b.floquet.n_max && a.floquet.n_phonon == b.floquet.n_phonon &&
           a.floquet.qme_dt == b.floquet.qme_dt && a.io.out == b.io.out &&
           a.io.stride == b.io.stride;
}

} // namespace floqsh
