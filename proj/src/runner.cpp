#include "ofdr/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include <json.hpp>

#include "ofdr/archive.hpp"
#include "ofdr/csvio.hpp"
#include "ofdr/demod.hpp"
#include "ofdr/fft.hpp"
#include "ofdr/rng.hpp"
#include "ofdr/stats.hpp"
#include "ofdr/trace.hpp"

namespace ofdr {

namespace fs = std::filesystem;
using nlohmann::json;

ResolveResult resolve_test(double separation_m, const Scenario& base) {
    if (!(separation_m > 0.0)) throw ConfigError("resolve_test: separation must be > 0");

    ResolveResult res;
    res.separation_m = separation_m;

    FiberParams params = base.fiber;
    params.length_m = std::max(base.fiber.length_m, separation_m * 4.0 + 1.0);
    const double mid = params.length_m / 2.0;

    MultiCoreFiber fiber;
    fiber.params = params;
    fiber.n_cores = 1;
    fiber.position_m = {{mid - separation_m / 2.0, mid + separation_m / 2.0}};
    // Equal reflectors in quadrature: the phase-averaged interference case.
    fiber.reflectivity = {{{1.0, 0.0}, {0.0, 1.0}}};

    LaserModel laser;
    laser.enabled = false;
    ReceiverModel rx;
    rx.enabled = false;

    auto beat = synthesize_beat(fiber, 0, {}, base.sweep, laser, rx, 0, base.seed,
                                Exec::serial);

    // Hanning compression with 8x zero padding for sub-bin peak structure.
    const std::size_t n = beat.samples.size();
    const auto w = window_samples(Window::hanning, n);
    constexpr std::size_t zp = 8;
    std::vector<double> buf(n * zp, 0.0);
    for (std::size_t t = 0; t < n; ++t) buf[t] = w[t] * beat.samples[t];
    auto spec = fft::rfft(buf);

    const double bin_spacing = base.sweep.bin_spacing_m(params.group_index_n);
    res.bin_spacing_m = bin_spacing;
    const double fine_spacing = bin_spacing / static_cast<double>(zp);

    const auto lo = static_cast<std::size_t>(
        std::max(0.0, (mid - separation_m / 2.0 - 4.0 * bin_spacing) / fine_spacing));
    const auto hi = std::min(spec.size() - 1,
                             static_cast<std::size_t>(
                                 (mid + separation_m / 2.0 + 4.0 * bin_spacing) / fine_spacing));

    std::vector<double> power(hi - lo + 1);
    for (std::size_t i = lo; i <= hi; ++i) power[i - lo] = std::norm(spec[i]);

    // Two strongest local maxima in the search window.
    std::vector<std::size_t> peaks;
    for (std::size_t i = 1; i + 1 < power.size(); ++i)
        if (power[i] > power[i - 1] && power[i] >= power[i + 1]) peaks.push_back(i);
    std::sort(peaks.begin(), peaks.end(),
              [&](std::size_t a, std::size_t b) { return power[a] > power[b]; });

    if (peaks.size() < 2) {
        res.resolved = false;
        res.dip_db = 0.0;
        return res;
    }
    std::size_t a = peaks[0], b = peaks[1];
    if (a > b) std::swap(a, b);
    double valley = power[a];
    for (std::size_t i = a; i <= b; ++i) valley = std::min(valley, power[i]);
    res.dip_db = db10(std::min(power[a], power[b]) / std::max(valley, 1e-300));
    res.resolved = res.dip_db >= 3.0;
    return res;
}

namespace {

struct ProductWriter {
    RunSummary& summary;
    fs::path dir;

    std::string file(const std::string& name) { return (dir / name).string(); }

    void record(const std::string& name, const std::string& path) {
        summary.products[name] = path;
        summary.product_hash[name] = fnv1a64_file(path);
    }
};

std::vector<std::string> cols(std::initializer_list<const char*> names) {
    return {names.begin(), names.end()};
}

/// Per-sweep differential phase with the scenario's rotation convention.
std::vector<DifferentialPhaseTrace> scenario_dphi(
    const Scenario& sc, const std::vector<std::vector<ComplexTrace>>& sweeps,
    int gauge_bins, int n_cores) {
    std::vector<DifferentialPhaseTrace> out;
    out.reserve(sweeps.size());
    const bool rotate = sc.rotate_to_first_sweep && sweeps.size() > 1;
    std::span<const ComplexTrace> ref(sweeps.front().data(),
                                      static_cast<std::size_t>(n_cores));
    for (const auto& per_core : sweeps) {
        std::span<const ComplexTrace> cur(per_core.data(),
                                          static_cast<std::size_t>(n_cores));
        out.push_back(rotate ? rvs_differential_phase(cur, ref, gauge_bins)
                             : rvs_differential_phase(cur, gauge_bins));
    }
    return out;
}

void write_trace_products(const Scenario& sc,
                          const std::vector<std::vector<ComplexTrace>>& sweeps,
                          ProductWriter& pw) {
    const auto n_fiber_bins = static_cast<std::size_t>(
        sc.fiber.length_m / sweeps[0][0].bin_spacing_m);
    for (int core = 0; core < sc.n_cores; ++core) {
        const auto& tr = sweeps[0][static_cast<std::size_t>(core)];
        const std::string name = "trace_core" + std::to_string(core);
        const auto c = cols({"distance_m", "re", "im"});
        CsvWriter csv(pw.file(name + ".csv"), c);
        const std::size_t count = std::min(n_fiber_bins, tr.bins.size());
        for (std::size_t b = 0; b < count; ++b) {
            const double row[3] = {static_cast<double>(b) * tr.bin_spacing_m,
                                   tr.bins[b].real(), tr.bins[b].imag()};
            csv.row(row);
        }
        pw.record(name, csv.path());
    }
}

void write_intensity_product(const Scenario& sc,
                             const std::vector<std::vector<ComplexTrace>>& sweeps,
                             ProductWriter& pw, RunSummary& summary) {
    std::span<const ComplexTrace> first(sweeps[0].data(), sweeps[0].size());
    auto avg = intensity_average(first);
    const double mean_ref = mean_trace_intensity(sc.fiber, sc.sweep, sc.window);
    const double spacing = sweeps[0][0].bin_spacing_m;
    const auto n_fiber_bins = std::min(
        avg.size(), static_cast<std::size_t>(sc.fiber.length_m / spacing));

    const auto c = cols({"distance_m", "intensity", "intensity_dbm"});
    CsvWriter csv(pw.file("intensity.csv"), c);
    double min_dbm = 1e9;
    for (std::size_t b = 0; b < n_fiber_bins; ++b) {
        const double dbm = intensity_dbm(avg[b], sc.receiver, mean_ref);
        min_dbm = std::min(min_dbm, dbm);
        const double row[3] = {static_cast<double>(b) * spacing, avg[b], dbm};
        csv.row(row);
    }
    pw.record("intensity", csv.path());
    summary.metrics["min_intensity_dbm"] = min_dbm;
}

void write_dphi_product(const Scenario& sc,
                        const std::vector<DifferentialPhaseTrace>& dphi,
                        ProductWriter& pw, RunSummary& summary) {
    const auto& last = dphi.back();
    const auto c = cols({"distance_m", "value"});
    CsvWriter csv(pw.file("dphi.csv"), c);
    const auto n_fiber_bins = std::min(
        last.dphi.size(),
        static_cast<std::size_t>(sc.fiber.length_m / last.bin_spacing_m));
    for (std::size_t i = 0; i < n_fiber_bins; ++i) {
        const double row[2] = {last.distance_at(i), last.dphi[i]};
        csv.row(row);
    }
    pw.record("dphi", csv.path());
    summary.metrics["jump_count"] = static_cast<double>(count_phase_jumps(
        std::span<const double>(last.dphi.data(), n_fiber_bins)));
}

void write_map_products(const Scenario& sc,
                        const std::vector<DifferentialPhaseTrace>& dphi,
                        ProductWriter& pw, RunSummary& summary) {
    auto map = time_distance_map(dphi);
    const auto n_fiber_bins = std::min(
        map.n_bins, static_cast<std::size_t>(sc.fiber.length_m / map.bin_spacing_m));

    {
        std::string header = "t_s";
        for (std::size_t b = 0; b < n_fiber_bins; ++b)
            header += "," + format_csv_number(map.distance_at(b));
        std::ofstream out(pw.file("map.csv"), std::ios::binary);
        out << header << '\n';
        for (std::size_t s = 0; s < map.n_sweeps; ++s) {
            out << format_csv_number(map.t_slow_s[s]);
            const auto row = map.row(s);
            for (std::size_t b = 0; b < n_fiber_bins; ++b)
                out << ',' << format_csv_number(row[b]);
            out << '\n';
        }
    }
    pw.record("map", pw.file("map.csv"));

    auto events = locate_events(map, sc.demod.detection_threshold_sigma);
    const auto c = cols({"location_m", "strength_sigma", "first_bin", "last_bin"});
    CsvWriter csv(pw.file("events.csv"), c);
    for (const auto& ev : events) {
        const double row[4] = {ev.location_m, ev.strength_sigma,
                               static_cast<double>(ev.first_bin),
                               static_cast<double>(ev.last_bin)};
        csv.row(row);
    }
    pw.record("events", csv.path());
    summary.metrics["detected_events"] = static_cast<double>(events.size());
    for (std::size_t i = 0; i < events.size() && i < 8; ++i)
        summary.metrics["event_" + std::to_string(i) + "_location_m"] =
            events[i].location_m;
}

void write_demod_products(const Scenario& sc,
                          const std::vector<std::vector<ComplexTrace>>& sweeps,
                          ProductWriter& pw, RunSummary& summary) {
    const int gauge = sc.demod.gauge_bins > 0 ? sc.demod.gauge_bins : sc.gauge_bins;
    const auto c_sum = cols(
        {"location_m", "peak_frequency_hz", "amplitude_rad", "snr_db", "sensitivity_m"});
    CsvWriter csv_sum(pw.file("demod_summary.csv"), c_sum);
    int idx = 0;
    for (double loc : sc.demod.locations_m) {
        auto res = demodulate(sweeps, loc, gauge, sc.fiber);
        const std::string tag = "demod" + std::to_string(idx);

        CsvWriter wf(pw.file(tag + "_waveform.csv"), cols({"t_s", "phase_rad"}));
        for (std::size_t s = 0; s < res.time_s.size(); ++s) {
            const double row[2] = {res.time_s[s], res.waveform_rad[s]};
            wf.row(row);
        }
        pw.record(tag + "_waveform", wf.path());

        CsvWriter sp(pw.file(tag + "_spectrum.csv"), cols({"frequency_hz", "power"}));
        for (std::size_t k = 0; k < res.frequency_hz.size(); ++k) {
            const double row[2] = {res.frequency_hz[k], res.power[k]};
            sp.row(row);
        }
        pw.record(tag + "_spectrum", sp.path());

        const double row[5] = {res.location_m, res.peak_frequency_hz, res.amplitude_rad,
                               res.snr_db, res.sensitivity_m};
        csv_sum.row(row);
        summary.metrics[tag + "_peak_frequency_hz"] = res.peak_frequency_hz;
        summary.metrics[tag + "_amplitude_rad"] = res.amplitude_rad;
        summary.metrics[tag + "_snr_db"] = res.snr_db;
        summary.metrics[tag + "_sensitivity_m"] = res.sensitivity_m;
        ++idx;
    }
    pw.record("demod_summary", csv_sum.path());
}

void write_stats_products(const Scenario& sc, ProductWriter& pw, RunSummary& summary,
                          const std::vector<std::vector<ComplexTrace>>& sweeps,
                          Exec exec) {
    const double spacing = sc.sweep.bin_spacing_m(sc.fiber.group_index_n);

    // Contrast vs core count over several fiber realizations of this scenario.
    {
        std::vector<std::vector<double>> per_core(
            static_cast<std::size_t>(sc.n_cores));
        for (int r = 0; r < sc.stats.contrast_seeds; ++r) {
            const auto seed = derive_seed(sc.seed, RngDomain::monte_carlo,
                                          static_cast<std::uint64_t>(r));
            auto fib = generate_multicore_field(sc.fiber, sc.n_cores, seed, spacing);
            auto series = synthesize_sweep_series(fib, {}, sc.sweep, sc.laser,
                                                  sc.receiver, 1, seed,
                                                  SynthesisPath::range_domain,
                                                  Window::hanning, exec);
            const auto n_fiber_bins = static_cast<std::size_t>(
                sc.fiber.length_m / series[0][0].bin_spacing_m);
            for (int core = 0; core < sc.n_cores; ++core) {
                const auto& bins = series[0][static_cast<std::size_t>(core)].bins;
                auto& dst = per_core[static_cast<std::size_t>(core)];
                for (std::size_t b = 32; b < n_fiber_bins && b < bins.size(); ++b)
                    dst.push_back(std::norm(bins[b]));
            }
        }
        auto table = contrast_vs_cores(per_core, sc.stats.core_counts);
        CsvWriter csv(pw.file("contrast_vs_cores.csv"), cols({"n_cores", "contrast"}));
        for (const auto& [n, c] : table) {
            const double row[2] = {static_cast<double>(n), c};
            csv.row(row);
            summary.metrics["contrast_n" + std::to_string(n)] = c;
        }
        pw.record("contrast_vs_cores", csv.path());
    }

    // Fading CDF against the analytic gamma oracle, on bin-aggregated fields.
    {
        CsvWriter csv(pw.file("fading_cdf.csv"),
                      cols({"threshold", "n_cores", "p_empirical", "p_oracle"}));
        const auto bins_per_real = static_cast<std::size_t>(sc.fiber.length_m / spacing);
        const auto n_real = (sc.stats.fading_samples + bins_per_real - 1) / bins_per_real;
        const int max_n = *std::max_element(sc.stats.core_counts.begin(),
                                            sc.stats.core_counts.end());

        std::vector<std::vector<std::size_t>> below(
            sc.stats.core_counts.size(),
            std::vector<std::size_t>(sc.stats.fading_thresholds.size(), 0));
        std::vector<double> mean_acc(sc.stats.core_counts.size(), 0.0);
        std::size_t total = 0;
        for (std::size_t r = 0; r < n_real; ++r) {
            const auto seed = derive_seed(sc.seed, RngDomain::monte_carlo, 1000 + r);
            auto fib = generate_multicore_field(sc.fiber, max_n, seed, spacing);
            std::vector<std::vector<std::complex<double>>> fields;
            fields.reserve(static_cast<std::size_t>(max_n));
            for (int core = 0; core < max_n; ++core)
                fields.push_back(binned_field(fib, core, spacing));
            for (std::size_t ni = 0; ni < sc.stats.core_counts.size(); ++ni) {
                const auto n = static_cast<std::size_t>(sc.stats.core_counts[ni]);
                for (std::size_t b = 0; b < bins_per_real; ++b) {
                    double acc = 0.0;
                    for (std::size_t c = 0; c < n; ++c) acc += std::norm(fields[c][b]);
                    acc /= static_cast<double>(n);
                    mean_acc[ni] += acc;
                    for (std::size_t ti = 0; ti < sc.stats.fading_thresholds.size(); ++ti) {
                        // Thresholds are on mean-normalized intensity; the
                        // field convention makes E[I] = scatterers per bin.
                        const double norm_mean =
                            sc.fiber.scatterer_density_per_m * spacing;
                        if (acc < sc.stats.fading_thresholds[ti] * norm_mean)
                            ++below[ni][ti];
                    }
                }
            }
            total += bins_per_real;
        }
        for (std::size_t ni = 0; ni < sc.stats.core_counts.size(); ++ni) {
            for (std::size_t ti = 0; ti < sc.stats.fading_thresholds.size(); ++ti) {
                const double p_emp = static_cast<double>(below[ni][ti]) /
                                     static_cast<double>(total);
                const double p_or = gamma_fading_oracle(sc.stats.core_counts[ni],
                                                        sc.stats.fading_thresholds[ti]);
                const double row[4] = {sc.stats.fading_thresholds[ti],
                                       static_cast<double>(sc.stats.core_counts[ni]),
                                       p_emp, p_or};
                csv.row(row);
            }
        }
        pw.record("fading_cdf", csv.path());
        summary.metrics["fading_samples"] = static_cast<double>(total);
    }

    // Differential-phase variance profile per core count (needs >= 2 sweeps).
    if (sweeps.size() >= 2) {
        for (int n : sc.stats.core_counts) {
            std::vector<std::vector<ComplexTrace>> subset(sweeps.size());
            for (std::size_t s = 0; s < sweeps.size(); ++s)
                subset[s].assign(sweeps[s].begin(), sweeps[s].begin() + n);
            auto dphi = scenario_dphi(sc, subset, sc.gauge_bins, n);
            // Keep in-fiber bins only.
            const auto n_fiber_bins = static_cast<std::size_t>(
                sc.fiber.length_m / dphi[0].bin_spacing_m) - sc.gauge_bins;
            for (auto& t : dphi) t.dphi.resize(n_fiber_bins);
            auto profile = phase_variance_profile(dphi, sc.stats.block_length_m);

            CsvWriter csv(pw.file("phase_variance_n" + std::to_string(n) + ".csv"),
                          cols({"block_start_m", "variance_rad2"}));
            double farthest = 0.0;
            bool blocked = false;
            for (const auto& blk : profile) {
                const double row[2] = {blk.start_m, blk.variance_rad2};
                csv.row(row);
                if (!blocked && blk.variance_rad2 < 0.02)
                    farthest = blk.start_m + sc.stats.block_length_m;
                else
                    blocked = true;
            }
            pw.record("phase_variance_n" + std::to_string(n), csv.path());
            summary.metrics["variance_ok_distance_n" + std::to_string(n)] = farthest;
        }
    }
}

void write_resolve_products(const Scenario& sc, ProductWriter& pw, RunSummary& summary) {
    CsvWriter csv(pw.file("resolve.csv"),
                  cols({"separation_m", "resolved", "dip_db", "bin_spacing_m"}));
    for (double sep : sc.resolve.separations_m) {
        auto res = resolve_test(sep, sc);
        const double row[4] = {res.separation_m, res.resolved ? 1.0 : 0.0, res.dip_db,
                               res.bin_spacing_m};
        csv.row(row);
        summary.metrics["resolved_at_" + format_csv_number(sep)] =
            res.resolved ? 1.0 : 0.0;
    }
    pw.record("resolve", csv.path());
}

}  // namespace

RunSummary run_scenario(const Scenario& scenario, const std::string& out_dir, Exec exec) {
    scenario.validate();
    fs::create_directories(out_dir);

    RunSummary summary;
    summary.out_dir = out_dir;
    summary.scenario_hash = scenario_hash(scenario);
    ProductWriter pw{summary, fs::path(out_dir)};

    const std::set<std::string> wanted(scenario.outputs.begin(), scenario.outputs.end());
    const bool needs_traces =
        wanted.count("trace") || wanted.count("intensity") || wanted.count("dphi") ||
        wanted.count("map") || wanted.count("demod") || wanted.count("archive") ||
        wanted.count("stats");

    MultiCoreFiber fiber;
    std::vector<std::vector<ComplexTrace>> sweeps;
    if (needs_traces) {
        const double spacing = scenario.sweep.bin_spacing_m(scenario.fiber.group_index_n);
        fiber = generate_multicore_field(scenario.fiber, scenario.n_cores, scenario.seed,
                                         spacing);
        sweeps = synthesize_sweep_series(fiber, scenario.events, scenario.sweep,
                                         scenario.laser, scenario.receiver,
                                         scenario.n_sweeps, scenario.seed,
                                         scenario.synthesis, scenario.window, exec);
    }

    std::vector<DifferentialPhaseTrace> dphi;
    if (wanted.count("dphi") || wanted.count("map"))
        dphi = scenario_dphi(scenario, sweeps, scenario.gauge_bins, scenario.n_cores);

    if (wanted.count("trace")) write_trace_products(scenario, sweeps, pw);
    if (wanted.count("intensity")) write_intensity_product(scenario, sweeps, pw, summary);
    if (wanted.count("dphi")) write_dphi_product(scenario, dphi, pw, summary);
    if (wanted.count("map")) write_map_products(scenario, dphi, pw, summary);
    if (wanted.count("demod")) write_demod_products(scenario, sweeps, pw, summary);
    if (wanted.count("stats")) write_stats_products(scenario, pw, summary, sweeps, exec);
    if (wanted.count("resolve")) write_resolve_products(scenario, pw, summary);
    if (wanted.count("archive")) {
        TraceArchive arc;
        json hdr;
        hdr["scenario_hash"] = summary.scenario_hash;
        hdr["name"] = scenario.name;
        hdr["n_cores"] = scenario.n_cores;
        hdr["n_sweeps"] = scenario.n_sweeps;
        arc.header_json = hdr.dump();
        arc.add_fiber(fiber);
        for (const auto& per_core : sweeps)
            for (const auto& tr : per_core) arc.add_trace(tr);
        const std::string path = pw.file("traces.arc");
        arc.write(path);
        pw.record("archive", path);
    }

    // summary.json is written last as the commit marker.
    json js;
    js["name"] = scenario.name;
    js["scenario_hash"] = summary.scenario_hash;
    js["scenario"] = json::parse(scenario_to_json(scenario));
    js["products"] = json::object();
    for (const auto& [name, path] : summary.products) {
        js["products"][name] = {{"path", path},
                                {"fnv1a64", summary.product_hash[name]}};
    }
    js["metrics"] = json::object();
    for (const auto& [key, value] : summary.metrics) js["metrics"][key] = value;

    summary.summary_path = pw.file("summary.json");
    std::ofstream out(summary.summary_path, std::ios::binary);
    out << js.dump(2) << '\n';
    if (!out) throw InternalError("failed to write summary.json");
    return summary;
}

}  // namespace ofdr
