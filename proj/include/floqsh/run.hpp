#pragma once

#include "floqsh/config.hpp"
#include "floqsh/timeseries.hpp"

namespace floqsh {

struct RunArtifacts {
    TimeSeries frsh;
    TimeSeries frqme;
    CompareReport report;
};

/// Dispatches one configured run and writes its outputs. Single-method runs
/// produce `<out>.csv` and `<out>_manifest.json`; compare mode produces
/// `<out>_frsh.csv`, `<out>_frqme.csv`, `<out>_compare.json` and the
/// manifest. Returns the artifacts for programmatic use.
RunArtifacts run(const RunConfig& cfg);

} // namespace floqsh
