#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ofdr/engine.hpp"
#include "ofdr/fiber.hpp"

namespace ofdr {

/// Statistics products configuration (contrast, fading CDF, phase variance).
struct StatsRequest {
    std::vector<int> core_counts = {1, 2, 3, 4, 5, 6};
    std::size_t fading_samples = 200000;       // bin samples per core count
    std::vector<double> fading_thresholds = {0.1};
    double block_length_m = 5.0;
    int contrast_seeds = 8;                    // fiber realizations for contrast
};

struct DemodRequest {
    std::vector<double> locations_m;
    double detection_threshold_sigma = 5.0;
    int gauge_bins = 0;  // 0: use the scenario gauge
};

struct ResolveRequest {
    std::vector<double> separations_m = {0.02, 0.01, 0.10};
};

/// A fully validated, self-contained experiment description.
struct Scenario {
    int version = 1;
    std::string name = "scenario";
    FiberParams fiber;
    int n_cores = 6;
    SweepConfig sweep;
    LaserModel laser;
    ReceiverModel receiver;
    std::vector<VibrationEvent> events;
    int n_sweeps = 1;
    std::uint64_t seed = 1;
    SynthesisPath synthesis = SynthesisPath::range_domain;
    Window window = Window::hanning;
    int gauge_bins = 2;
    bool rotate_to_first_sweep = true;
    std::vector<std::string> outputs = {"trace", "intensity", "dphi"};
    StatsRequest stats;
    DemodRequest demod;
    ResolveRequest resolve;
    std::size_t memory_cap_mb = 4096;

    void validate() const;
    std::size_t estimated_memory_bytes() const;
};

/// Parse and validate a scenario file. In strict mode unknown keys are
/// errors; in lax mode they are collected into `warnings`.
Scenario load_scenario(const std::string& path, bool strict = true,
                       std::vector<std::string>* warnings = nullptr);
Scenario parse_scenario(const std::string& json_text, bool strict = true,
                        std::vector<std::string>* warnings = nullptr);

std::string scenario_to_json(const Scenario& s);

/// Canonical-form content hash (stable across runs).
std::uint64_t scenario_hash(const Scenario& s);

std::vector<std::string> preset_names();
Scenario make_preset(const std::string& name);

}  // namespace ofdr
