#include "ofdr/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ofdr/csvio.hpp"

namespace ofdr {

using nlohmann::json;

void Scenario::validate() const {
    if (version != 1) throw ConfigError("unsupported scenario version");
    fiber.validate();
    if (n_cores < 1) throw ConfigError("n_cores must be >= 1");
    if (n_sweeps < 1) throw ConfigError("n_sweeps must be >= 1");
    if (gauge_bins < 1) throw ConfigError("gauge_bins must be >= 1");

    const double tau_max =
        2.0 * fiber.group_index_n * fiber.length_m / kSpeedOfLight;
    sweep.validate(tau_max);
    if (laser.linewidth_hz < 0.0) throw ConfigError("laser.linewidth_hz must be >= 0");

    const double bin_spacing = sweep.bin_spacing_m(fiber.group_index_n);
    const double min_density = min_density_per_m(bin_spacing);
    if (fiber.scatterer_density_per_m < min_density)
        throw ConfigError("scatterer_density_per_m=" +
                          std::to_string(fiber.scatterer_density_per_m) +
                          " too low for the configured sweep: >= 10 scatterers per bin "
                          "requires >= " + std::to_string(std::ceil(min_density)) + " per m");

    const double fs_slow = 1.0 / sweep.repetition_period_s;
    for (const auto& ev : events) {
        if (ev.position_m < 0.0 || ev.position_m + ev.extent_m > fiber.length_m)
            throw ConfigError("event at " + std::to_string(ev.position_m) +
                              " m extends outside the fiber");
        if (ev.extent_m < 0.0) throw ConfigError("event extent_m must be >= 0");
        if (std::abs(ev.amplitude_m) >= ev.extent_m && ev.amplitude_m != 0.0)
            throw ConfigError("event amplitude must stay far below its extent");
        if (n_sweeps > 1 && ev.amplitude_m != 0.0) {
            // Largest slow-time step of the induced phase must stay below pi
            // or unwrapping aliases.
            const double dphi_amp = vibration_phase_shift(ev.amplitude_m, fiber);
            const double step =
                2.0 * dphi_amp * std::abs(std::sin(kPi * ev.frequency_hz / fs_slow));
            if (step >= kPi) {
                const double max_amp = ev.amplitude_m * (kPi / step);
                throw ConfigError(
                    "event amplitude " + std::to_string(ev.amplitude_m * 1e9) +
                    " nm slews the slow-time phase past pi per sweep; keep below " +
                    std::to_string(max_amp * 1e9) + " nm at this frequency");
            }
        }
    }

    static const std::set<std::string> known_outputs = {
        "trace", "intensity", "dphi", "map", "demod", "stats", "resolve", "archive"};
    for (const auto& o : outputs)
        if (!known_outputs.count(o))
            throw ConfigError("unknown output product '" + o + "'");

    for (double loc : demod.locations_m)
        if (loc < 0.0 || loc > fiber.length_m)
            throw ConfigError("demod location outside the fiber");
    for (int c : stats.core_counts)
        if (c < 1 || c > n_cores)
            throw ConfigError("stats.core_counts entries must be in [1, n_cores]");

    const std::size_t bytes = estimated_memory_bytes();
    if (bytes > memory_cap_mb * std::size_t{1024 * 1024})
        throw ResourceError(
            "estimated working set " + std::to_string(bytes / (1024 * 1024)) +
            " MiB exceeds memory_cap_mb=" + std::to_string(memory_cap_mb) +
            "; reduce n_sweeps, fiber length, density, or sample rate, or raise the cap");
}

std::size_t Scenario::estimated_memory_bytes() const {
    const auto scatterers = static_cast<std::size_t>(
        fiber.length_m * fiber.scatterer_density_per_m);
    const std::size_t n = sweep.sample_count();
    std::size_t total = scatterers * static_cast<std::size_t>(n_cores) * 24;
    total += static_cast<std::size_t>(n_sweeps) * static_cast<std::size_t>(n_cores) *
             (n / 2) * sizeof(std::complex<double>);
    total += 6 * n * sizeof(std::complex<double>);  // FFT + laser scratch
    if (synthesis == SynthesisPath::time_domain) total += n * 8 * 2;
    return total + total / 5;
}

namespace {

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& where, bool strict,
                std::vector<std::string>* warnings) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!allowed.count(key)) {
            const std::string msg = "unknown key '" + where + key + "'";
            if (strict) throw ConfigError(msg + " (strict mode)");
            if (warnings) warnings->push_back(msg);
        }
    }
}

double get_num(const json& obj, const std::string& key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number())
        throw ConfigError("key '" + key + "' must be a number");
    return obj[key].get<double>();
}

}  // namespace

Scenario parse_scenario(const std::string& json_text, bool strict,
                        std::vector<std::string>* warnings) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("scenario parse error: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("scenario root must be an object");

    check_keys(root,
               {"version", "name", "fiber", "n_cores", "sweep", "laser", "receiver",
                "events", "n_sweeps", "seed", "synthesis", "window", "gauge_bins",
                "rotation", "outputs", "stats", "demod", "resolve", "memory_cap_mb"},
               "", strict, warnings);

    Scenario s;
    s.version = static_cast<int>(get_num(root, "version", 1));
    if (root.contains("name")) s.name = root["name"].get<std::string>();

    if (root.contains("fiber")) {
        const auto& f = root["fiber"];
        check_keys(f,
                   {"length_m", "scatterer_density_per_m", "group_index_n",
                    "strain_coeff_ce", "wavelength_m"},
                   "fiber.", strict, warnings);
        s.fiber.length_m = get_num(f, "length_m", s.fiber.length_m);
        s.fiber.scatterer_density_per_m =
            get_num(f, "scatterer_density_per_m", s.fiber.scatterer_density_per_m);
        s.fiber.group_index_n = get_num(f, "group_index_n", s.fiber.group_index_n);
        s.fiber.strain_coeff_ce = get_num(f, "strain_coeff_ce", s.fiber.strain_coeff_ce);
        s.fiber.wavelength_m = get_num(f, "wavelength_m", s.fiber.wavelength_m);
    }
    s.n_cores = static_cast<int>(get_num(root, "n_cores", s.n_cores));
    if (root.contains("sweep")) {
        const auto& w = root["sweep"];
        check_keys(w,
                   {"start_freq_hz", "sweep_range_hz", "sweep_rate_hz_per_s",
                    "sample_rate_hz", "repetition_period_s"},
                   "sweep.", strict, warnings);
        s.sweep.start_freq_hz = get_num(w, "start_freq_hz", s.sweep.start_freq_hz);
        s.sweep.sweep_range_hz = get_num(w, "sweep_range_hz", s.sweep.sweep_range_hz);
        s.sweep.sweep_rate_hz_per_s =
            get_num(w, "sweep_rate_hz_per_s", s.sweep.sweep_rate_hz_per_s);
        s.sweep.sample_rate_hz = get_num(w, "sample_rate_hz", s.sweep.sample_rate_hz);
        s.sweep.repetition_period_s =
            get_num(w, "repetition_period_s", s.sweep.repetition_period_s);
    }
    if (root.contains("laser")) {
        const auto& l = root["laser"];
        check_keys(l, {"linewidth_hz", "enabled"}, "laser.", strict, warnings);
        s.laser.linewidth_hz = get_num(l, "linewidth_hz", s.laser.linewidth_hz);
        if (l.contains("enabled")) s.laser.enabled = l["enabled"].get<bool>();
    }
    if (root.contains("receiver")) {
        const auto& r = root["receiver"];
        check_keys(r, {"noise_floor_dbm", "signal_reference_dbm", "enabled"},
                   "receiver.", strict, warnings);
        s.receiver.noise_floor_dbm = get_num(r, "noise_floor_dbm", s.receiver.noise_floor_dbm);
        s.receiver.signal_reference_dbm =
            get_num(r, "signal_reference_dbm", s.receiver.signal_reference_dbm);
        if (r.contains("enabled")) s.receiver.enabled = r["enabled"].get<bool>();
    }
    if (root.contains("events")) {
        for (const auto& e : root["events"]) {
            check_keys(e, {"position_m", "extent_m", "amplitude_m", "frequency_hz", "phase_rad"},
                       "events[].", strict, warnings);
            VibrationEvent ev;
            ev.position_m = get_num(e, "position_m", 0.0);
            ev.extent_m = get_num(e, "extent_m", ev.extent_m);
            ev.amplitude_m = get_num(e, "amplitude_m", 0.0);
            ev.frequency_hz = get_num(e, "frequency_hz", 0.0);
            ev.phase_rad = get_num(e, "phase_rad", 0.0);
            s.events.push_back(ev);
        }
    }
    s.n_sweeps = static_cast<int>(get_num(root, "n_sweeps", s.n_sweeps));
    if (root.contains("seed")) s.seed = root["seed"].get<std::uint64_t>();
    if (root.contains("synthesis"))
        s.synthesis = synthesis_path_from_string(root["synthesis"].get<std::string>());
    if (root.contains("window"))
        s.window = window_from_string(root["window"].get<std::string>());
    s.gauge_bins = static_cast<int>(get_num(root, "gauge_bins", s.gauge_bins));
    if (root.contains("rotation")) {
        const auto rot = root["rotation"].get<std::string>();
        if (rot == "first_sweep") s.rotate_to_first_sweep = true;
        else if (rot == "none") s.rotate_to_first_sweep = false;
        else throw ConfigError("rotation must be 'first_sweep' or 'none'");
    }
    if (root.contains("outputs")) {
        s.outputs.clear();
        for (const auto& o : root["outputs"]) s.outputs.push_back(o.get<std::string>());
    }
    if (root.contains("stats")) {
        const auto& st = root["stats"];
        check_keys(st,
                   {"core_counts", "fading_samples", "fading_thresholds",
                    "block_length_m", "contrast_seeds"},
                   "stats.", strict, warnings);
        if (st.contains("core_counts")) {
            s.stats.core_counts.clear();
            for (const auto& c : st["core_counts"]) s.stats.core_counts.push_back(c.get<int>());
        }
        s.stats.fading_samples = static_cast<std::size_t>(
            get_num(st, "fading_samples", static_cast<double>(s.stats.fading_samples)));
        if (st.contains("fading_thresholds")) {
            s.stats.fading_thresholds.clear();
            for (const auto& t : st["fading_thresholds"])
                s.stats.fading_thresholds.push_back(t.get<double>());
        }
        s.stats.block_length_m = get_num(st, "block_length_m", s.stats.block_length_m);
        s.stats.contrast_seeds =
            static_cast<int>(get_num(st, "contrast_seeds", s.stats.contrast_seeds));
    }
    if (root.contains("demod")) {
        const auto& d = root["demod"];
        check_keys(d, {"locations_m", "detection_threshold_sigma", "gauge_bins"},
                   "demod.", strict, warnings);
        if (d.contains("locations_m"))
            for (const auto& l : d["locations_m"])
                s.demod.locations_m.push_back(l.get<double>());
        s.demod.detection_threshold_sigma =
            get_num(d, "detection_threshold_sigma", s.demod.detection_threshold_sigma);
        s.demod.gauge_bins = static_cast<int>(get_num(d, "gauge_bins", 0.0));
    }
    if (root.contains("resolve")) {
        const auto& r = root["resolve"];
        check_keys(r, {"separations_m"}, "resolve.", strict, warnings);
        if (r.contains("separations_m")) {
            s.resolve.separations_m.clear();
            for (const auto& v : r["separations_m"])
                s.resolve.separations_m.push_back(v.get<double>());
        }
    }
    s.memory_cap_mb = static_cast<std::size_t>(
        get_num(root, "memory_cap_mb", static_cast<double>(s.memory_cap_mb)));

    s.validate();
    return s;
}

Scenario load_scenario(const std::string& path, bool strict,
                       std::vector<std::string>* warnings) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str(), strict, warnings);
}

std::string scenario_to_json(const Scenario& s) {
    json root;
    root["version"] = s.version;
    root["name"] = s.name;
    root["fiber"] = {{"length_m", s.fiber.length_m},
                     {"scatterer_density_per_m", s.fiber.scatterer_density_per_m},
                     {"group_index_n", s.fiber.group_index_n},
                     {"strain_coeff_ce", s.fiber.strain_coeff_ce},
                     {"wavelength_m", s.fiber.wavelength_m}};
    root["n_cores"] = s.n_cores;
    root["sweep"] = {{"start_freq_hz", s.sweep.start_freq_hz},
                     {"sweep_range_hz", s.sweep.sweep_range_hz},
                     {"sweep_rate_hz_per_s", s.sweep.sweep_rate_hz_per_s},
                     {"sample_rate_hz", s.sweep.sample_rate_hz},
                     {"repetition_period_s", s.sweep.repetition_period_s}};
    root["laser"] = {{"linewidth_hz", s.laser.linewidth_hz}, {"enabled", s.laser.enabled}};
    root["receiver"] = {{"noise_floor_dbm", s.receiver.noise_floor_dbm},
                        {"signal_reference_dbm", s.receiver.signal_reference_dbm},
                        {"enabled", s.receiver.enabled}};
    root["events"] = json::array();
    for (const auto& ev : s.events)
        root["events"].push_back({{"position_m", ev.position_m},
                                  {"extent_m", ev.extent_m},
                                  {"amplitude_m", ev.amplitude_m},
                                  {"frequency_hz", ev.frequency_hz},
                                  {"phase_rad", ev.phase_rad}});
    root["n_sweeps"] = s.n_sweeps;
    root["seed"] = s.seed;
    root["synthesis"] = to_string(s.synthesis);
    root["window"] = to_string(s.window);
    root["gauge_bins"] = s.gauge_bins;
    root["rotation"] = s.rotate_to_first_sweep ? "first_sweep" : "none";
    root["outputs"] = s.outputs;
    root["stats"] = {{"core_counts", s.stats.core_counts},
                     {"fading_samples", s.stats.fading_samples},
                     {"fading_thresholds", s.stats.fading_thresholds},
                     {"block_length_m", s.stats.block_length_m},
                     {"contrast_seeds", s.stats.contrast_seeds}};
    root["demod"] = {{"locations_m", s.demod.locations_m},
                     {"detection_threshold_sigma", s.demod.detection_threshold_sigma},
                     {"gauge_bins", s.demod.gauge_bins}};
    root["resolve"] = {{"separations_m", s.resolve.separations_m}};
    root["memory_cap_mb"] = s.memory_cap_mb;
    return root.dump(2);
}

std::uint64_t scenario_hash(const Scenario& s) {
    return fnv1a64(scenario_to_json(s));
}

std::vector<std::string> preset_names() {
    return {"fig2", "fig2_desk", "fig3", "fig3_desk", "fig4", "fig5", "fig6", "resolution"};
}

Scenario make_preset(const std::string& name) {
    Scenario s;
    s.name = name;
    if (name == "fig2") {
        // Full-scale single-core trace: fading dips and differential-phase leaps.
        s.fiber.length_m = 500.0;
        s.fiber.scatterer_density_per_m = 800.0;
        s.n_cores = 1;
        s.n_sweeps = 1;
        s.sweep.sample_rate_hz = 2e6;
        s.seed = 7;
        s.outputs = {"trace", "intensity", "dphi"};
        s.rotate_to_first_sweep = false;
    } else if (name == "fig2_desk") {
        s.fiber.length_m = 50.0;
        s.fiber.scatterer_density_per_m = 2000.0;
        s.n_cores = 1;
        s.n_sweeps = 1;
        s.sweep.sample_rate_hz = 4e5;
        s.seed = 7;
        s.outputs = {"trace", "intensity", "dphi"};
        s.rotate_to_first_sweep = false;
    } else if (name == "fig3") {
        // Multi-core averaging: contrast vs N, jump counts, variance profile.
        s.fiber.length_m = 500.0;
        s.fiber.scatterer_density_per_m = 800.0;
        s.n_cores = 6;
        s.n_sweeps = 12;
        s.sweep.sample_rate_hz = 2e6;
        s.seed = 11;
        s.stats.block_length_m = 50.0;
        s.stats.fading_samples = 200000;
        s.outputs = {"intensity", "dphi", "stats"};
    } else if (name == "fig3_desk") {
        s.fiber.length_m = 50.0;
        s.fiber.scatterer_density_per_m = 2000.0;
        s.n_cores = 6;
        s.n_sweeps = 12;
        s.sweep.sample_rate_hz = 4e5;
        s.seed = 11;
        s.stats.block_length_m = 5.0;
        s.stats.fading_samples = 200000;
        s.outputs = {"intensity", "dphi", "stats"};
    } else if (name == "fig4") {
        // Fading probability statistics against the analytic gamma CDF.
        s.fiber.length_m = 100.0;
        s.fiber.scatterer_density_per_m = 800.0;
        s.n_cores = 6;
        s.n_sweeps = 1;
        s.sweep.sample_rate_hz = 4e5;
        s.seed = 4;
        s.stats.core_counts = {1, 2, 4, 6};
        s.stats.fading_samples = 1000000;
        s.outputs = {"stats"};
    } else if (name == "fig5") {
        // Two simultaneous vibration events, time-distance map, localization.
        s.fiber.length_m = 50.0;
        s.fiber.scatterer_density_per_m = 2000.0;
        s.n_cores = 6;
        s.n_sweeps = 20;
        s.sweep.sample_rate_hz = 4e5;
        s.seed = 5;
        s.events = {{1.46, 0.009, 60e-9, 2.0, 0.0}, {49.0, 0.009, 60e-9, 2.0, 1.0}};
        s.demod.locations_m = {1.46, 49.0};
        s.outputs = {"map", "demod"};
    } else if (name == "fig6") {
        // Quantitative waveforms and sensitivity at both ends.
        s.fiber.length_m = 50.0;
        s.fiber.scatterer_density_per_m = 2000.0;
        s.n_cores = 6;
        s.n_sweeps = 100;
        s.sweep.sample_rate_hz = 4e5;
        s.seed = 6;
        s.events = {{1.46, 0.009, 60e-9, 2.0, 0.0}, {49.0, 0.009, 60e-9, 2.0, 1.0}};
        s.demod.locations_m = {1.46, 49.0};
        s.demod.gauge_bins = 6;
        s.outputs = {"map", "demod"};
    } else if (name == "resolution") {
        s.fiber.length_m = 5.0;
        s.fiber.scatterer_density_per_m = 2000.0;
        s.n_cores = 1;
        s.n_sweeps = 1;
        s.sweep.sample_rate_hz = 5e4;
        s.synthesis = SynthesisPath::time_domain;
        s.seed = 3;
        s.outputs = {"resolve"};
    } else {
        throw ConfigError("unknown preset '" + name + "'");
    }
    s.validate();
    return s;
}

}  // namespace ofdr
