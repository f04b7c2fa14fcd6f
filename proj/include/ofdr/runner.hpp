#pragma once

#include <map>
#include <string>
#include <vector>

#include "ofdr/parallel.hpp"
#include "ofdr/scenario.hpp"

namespace ofdr {

struct ResolveResult {
    double separation_m = 0.0;
    bool resolved = false;
    double dip_db = 0.0;
    double bin_spacing_m = 0.0;
};

/// Two equal reflectors in quadrature at mid-fiber +/- separation/2,
/// time-domain synthesis without noise, Hanning compression, 8x zero-padded
/// peak search. Resolved means two local maxima with a >= 3 dB dip between
/// them. Separations below one bin report unresolved rather than erroring.
ResolveResult resolve_test(double separation_m, const Scenario& base);

struct RunSummary {
    std::string out_dir;
    std::uint64_t scenario_hash = 0;
    std::map<std::string, std::string> products;       // name -> path
    std::map<std::string, std::uint64_t> product_hash; // name -> FNV-1a
    std::map<std::string, double> metrics;
    std::string summary_path;
};

/// Execute every requested product of a validated scenario into out_dir.
/// Deterministic for a fixed seed (bit-identical CSV payloads); the
/// machine-readable summary.json is written last as the commit marker.
RunSummary run_scenario(const Scenario& scenario, const std::string& out_dir,
                        Exec exec = Exec::parallel);

}  // namespace ofdr
