#include "floqsh/run.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <json.hpp>

#include "floqsh/frqme.hpp"
#include "floqsh/version.hpp"

namespace floqsh {

namespace {

using json = nlohmann::ordered_json;

TimeSeries run_frqme_once(const RunConfig& cfg, FrqmeRunStats* stats_out) {
    FrqmeOptions opt;
    opt.n_phonon = cfg.floquet.n_phonon;
    opt.n_max = cfg.floquet.n_max;
    opt.dt = cfg.floquet.qme_dt;
    FrqmeSolver solver(cfg.params, HybridizationMatrix::acceptor_only(cfg.params.Gamma), opt);

    const double t_out = cfg.ensemble.dt * cfg.io.stride;
    int stride_q = static_cast<int>(std::lround(t_out / opt.dt));
    if (stride_q < 1) stride_q = 1;
    TimeSeries ts = solver.propagate(cfg.ensemble.t_end, stride_q);
    if (stats_out) *stats_out = solver.stats();
    return ts;
}

EnsembleResult run_frsh_once(const RunConfig& cfg) {
    FrshOptions opt;
    opt.n_max = cfg.floquet.n_max;
    opt.dt = cfg.ensemble.dt;
    FrshEngine engine(cfg.params, HybridizationMatrix::acceptor_only(cfg.params.Gamma), opt);
    return run_ensemble(engine, cfg.ensemble);
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output path " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path);
}

json counters_json(const TrajectoryCounters& c) {
    return {{"hops_coupling", c.hops_coupling},
            {"hops_bath", c.hops_bath},
            {"hops_frustrated", c.hops_frustrated},
            {"sigma_starved_steps", c.sigma_starved},
            {"degeneracy_warnings", c.degeneracy_warnings},
            {"max_trace_drift", c.max_trace_drift},
            {"max_hop_energy_error", c.max_hop_energy_error},
            {"max_hop_budget", c.max_hop_budget},
            {"kd_hops_rung", c.kd_hops_rung},
            {"kl_hops_rung", c.kl_hops_rung},
            {"kinetic_in_kd_small", c.kinetic_in_kd_small},
            {"kinetic_in_kd_rung", c.kinetic_in_kd_rung},
            {"potential_in_kl_small", c.potential_in_kl_small},
            {"potential_in_kl_rung", c.potential_in_kl_rung}};
}

} // namespace

RunArtifacts run(const RunConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    RunArtifacts art;

    json manifest;
    manifest["version"] = kVersion;
    manifest["method"] = cfg.method;
    manifest["seed"] = cfg.ensemble.master_seed;
    manifest["config"] = json::parse(serialize_config(cfg));

    if (cfg.method == "frsh" || cfg.method == "compare") {
        EnsembleResult res = run_frsh_once(cfg);
        art.frsh = std::move(res.series);
        manifest["frsh"] = {{"workers_used", res.workers_used},
                            {"wall_seconds", res.wall_seconds},
                            {"steady_slope", res.steady_slope},
                            {"steady_state_warning", res.steady_state_warning},
                            {"counters", counters_json(res.counters)}};
    }
    if (cfg.method == "frqme" || cfg.method == "compare") {
        FrqmeRunStats stats;
        art.frqme = run_frqme_once(cfg, &stats);
        manifest["frqme"] = {{"wall_seconds", stats.wall_seconds},
                             {"steps", stats.steps},
                             {"max_trace_drift", stats.max_trace_drift},
                             {"max_top_phonon_population", stats.max_top_phonon_population}};
    }

    if (cfg.method == "frsh") {
        write_csv(art.frsh, cfg.io.out + ".csv");
    } else if (cfg.method == "frqme") {
        write_csv(art.frqme, cfg.io.out + ".csv");
    } else {
        write_csv(art.frsh, cfg.io.out + "_frsh.csv");
        write_csv(art.frqme, cfg.io.out + "_frqme.csv");
        art.report = compare_series(art.frsh, art.frqme);
        write_text(cfg.io.out + "_compare.json", art.report.to_json());
    }

    manifest["wall_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_text(cfg.io.out + "_manifest.json", manifest.dump(2) + "\n");
    return art;
}

} // namespace floqsh
