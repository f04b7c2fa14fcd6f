#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ofdr/parallel.hpp"
#include "ofdr/runner.hpp"

namespace {

struct CommonOpts {
    std::string config;
    std::string preset;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0;
    bool lax = false;
    std::string emit_config;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config, "scenario JSON file");
    cmd->add_option("--preset", o.preset, "built-in scenario name");
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--seed", o.seed, "override the scenario seed")
        ->each([&](const std::string&) { o.seed_set = true; });
    cmd->add_option("--threads", o.threads, "OpenMP thread count (0: default)");
    cmd->add_flag("--lax", o.lax, "warn on unknown config keys instead of failing");
    cmd->add_option("--emit-config", o.emit_config,
                    "write the resolved scenario JSON to this path and exit");
}

std::string default_out_dir() {
    if (const char* env = std::getenv("OFDRSIM_OUT")) return env;
    return "ofdrsim_out";
}

ofdr::Scenario resolve_scenario(const CommonOpts& o) {
    if (!o.config.empty() && !o.preset.empty())
        throw ofdr::ConfigError("pass either --config or --preset, not both");
    ofdr::Scenario sc;
    if (!o.config.empty()) {
        std::vector<std::string> warnings;
        sc = ofdr::load_scenario(o.config, !o.lax, &warnings);
        for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    } else if (!o.preset.empty()) {
        sc = ofdr::make_preset(o.preset);
    } else {
        throw ofdr::ConfigError("one of --config or --preset is required");
    }
    if (o.seed_set) sc.seed = o.seed;
    sc.validate();
    return sc;
}

int run_common(const CommonOpts& o, ofdr::Scenario sc) {
    if (o.threads > 0) ofdr::set_max_threads(o.threads);
    if (!o.emit_config.empty()) {
        std::ofstream out(o.emit_config);
        out << ofdr::scenario_to_json(sc) << "\n";
        std::cout << "wrote " << o.emit_config << "\n";
        return 0;
    }
    const std::string out_dir =
        o.out_dir.empty() ? default_out_dir() + "/" + sc.name : o.out_dir;
    auto summary = ofdr::run_scenario(sc, out_dir);
    std::cout << "scenario '" << sc.name << "' (hash "
              << std::to_string(summary.scenario_hash) << ") -> " << out_dir << "\n";
    for (const auto& [name, path] : summary.products)
        std::cout << "  " << name << ": " << path << "\n";
    for (const auto& [key, value] : summary.metrics)
        std::cout << "  metric " << key << " = " << value << "\n";
    std::cout << "  summary: " << summary.summary_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"phi-OFDR multi-core fiber sensing simulator"};
    app.require_subcommand(1);

    CommonOpts sim_opts, stats_opts, demod_opts, resolve_opts, preset_opts;

    auto* simulate = app.add_subcommand("simulate", "run a scenario end to end");
    add_common(simulate, sim_opts);

    auto* stats = app.add_subcommand("stats", "fading/averaging statistics products");
    add_common(stats, stats_opts);

    auto* demod = app.add_subcommand("demod", "time-distance map and demodulation");
    add_common(demod, demod_opts);

    auto* resolve = app.add_subcommand("resolve", "two-reflector resolution test");
    add_common(resolve, resolve_opts);
    std::vector<double> separations_cm;
    resolve->add_option("--separation-cm", separations_cm,
                        "reflector separations to test, in cm");

    auto* preset = app.add_subcommand("preset", "run a named preset scenario");
    add_common(preset, preset_opts);
    std::string preset_name;
    preset->add_option("name", preset_name, "preset name, or 'list'")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return run_common(sim_opts, resolve_scenario(sim_opts));
        if (stats->parsed()) {
            auto sc = resolve_scenario(stats_opts);
            sc.outputs = {"stats"};
            return run_common(stats_opts, sc);
        }
        if (demod->parsed()) {
            auto sc = resolve_scenario(demod_opts);
            sc.outputs = {"map", "demod"};
            return run_common(demod_opts, sc);
        }
        if (resolve->parsed()) {
            ofdr::Scenario sc;
            if (!resolve_opts.config.empty() || !resolve_opts.preset.empty())
                sc = resolve_scenario(resolve_opts);
            else
                sc = ofdr::make_preset("resolution");
            if (!separations_cm.empty()) {
                sc.resolve.separations_m.clear();
                for (double cm : separations_cm)
                    sc.resolve.separations_m.push_back(cm / 100.0);
            }
            sc.outputs = {"resolve"};
            for (double sep : sc.resolve.separations_m) {
                auto res = ofdr::resolve_test(sep, sc);
                std::cout << "separation " << sep * 100.0 << " cm: "
                          << (res.resolved ? "resolved" : "unresolved")
                          << " (dip " << res.dip_db << " dB, bin spacing "
                          << res.bin_spacing_m * 100.0 << " cm)\n";
            }
            if (!resolve_opts.out_dir.empty()) return run_common(resolve_opts, sc);
            return 0;
        }
        if (preset->parsed()) {
            if (preset_name == "list") {
                for (const auto& n : ofdr::preset_names()) std::cout << n << "\n";
                return 0;
            }
            auto sc = ofdr::make_preset(preset_name);
            if (preset_opts.seed_set) sc.seed = preset_opts.seed;
            return run_common(preset_opts, sc);
        }
    } catch (const ofdr::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ofdr::ResourceError& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
