// Command-line front end: simulate netlists, reproduce the built-in
// experiments, and extract metrics from trace CSVs.
//
// Exit codes: 0 success, 1 input/parse errors, 2 simulation divergence.

#include "dendrite/csv.hpp"
#include "dendrite/experiments.hpp"
#include "dendrite/measure.hpp"
#include "dendrite/netlist.hpp"
#include "dendrite/si.hpp"
#include "dendrite/transient.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace dendrite;

namespace {

int write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot write " << path << "\n";
        return 1;
    }
    out << content;
    return 0;
}

int cmd_simulate(const std::string& netlist_path, double duration, double dt,
                 const std::string& method, int stride, const std::string& out_path) {
    std::ifstream in(netlist_path, std::ios::binary);
    if (!in) {
        std::cerr << "error: cannot open netlist " << netlist_path << "\n";
        return 1;
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    const auto parsed = netlist::parse(buffer.str());
    if (!parsed.ok()) {
        for (const auto& e : parsed.errors)
            std::cerr << netlist_path << ":" << e.line << ":" << e.column << ": " << e.message
                      << "\n";
        return 1;
    }

    SimConfig cfg;
    cfg.dt = dt;
    cfg.duration = duration;
    cfg.method = method == "trap" ? Method::Trapezoidal : Method::BackwardEuler;
    cfg.record_stride = stride;

    try {
        const Trace trace = simulate(parsed.network, parsed.stimuli, cfg);
        const auto table = csv::trace_table(trace, parsed.probes);
        const std::string text = csv::to_string(table);
        if (out_path.empty()) {
            std::cout << text;
            return 0;
        }
        return write_file(out_path, text);
    } catch (const SimulationError& e) {
        std::cerr << "simulation diverged: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

std::string variant_name(experiments::DetectorVariant v) {
    switch (v) {
    case experiments::DetectorVariant::A: return "A";
    case experiments::DetectorVariant::B: return "B";
    default: return "C";
    }
}

csv::Table curve_table(const std::vector<std::pair<double, double>>& curve) {
    csv::Table t;
    t.header = {"separation_s", "peak_v"};
    for (const auto& [sep, v] : curve) t.rows.push_back({csv::Cell{sep}, csv::Cell{v}});
    return t;
}

int cmd_reproduce(const std::string& target, const std::string& out_dir) {
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    std::vector<std::string> files;
    std::ostringstream manifest;
    manifest << "target: " << target << "\n";

    auto emit = [&](const std::string& name, const csv::Table& table) {
        files.push_back(name);
        return write_file(dir / name, csv::to_string(table));
    };

    try {
        if (target == "fig1f") {
            experiments::FreeResponseProtocol p;
            if (int rc = emit("fig1f_overlay.csv", experiments::run_free_response_overlay(p)))
                return rc;
            manifest << "segment: n-type, ra=rl=1k, cr=cm=1u, vdd=5\n"
                     << "v0 set: 0.2 0.4 0.6 0.8 1.0 V (charge pulse "
                     << si::format_value(p.charge_width) << "s, dt "
                     << si::format_value(p.dt) << "s)\n";
        } else if (target == "fig2") {
            if (int rc = emit("fig2_delay_sweep.csv",
                              experiments::run_characterisation(
                                  experiments::Characterisation::DelaySweep)))
                return rc;
            manifest << "pulse: 2ms, t0 1ms; amplitudes 1.5..5 V step 0.25; "
                        "r_a=r_l 1k..10k; c 1u; vdd 5; dt 1u\n";
        } else if (target == "fig3") {
            if (int rc = emit("fig3_gain_sweep.csv",
                              experiments::run_characterisation(
                                  experiments::Characterisation::GainSweep)))
                return rc;
            manifest << "pulse: 2ms, t0 1ms; r_a 2k; r_l 1k..8k; vdd 5; dt 1u\n";
        } else if (target == "fig3d") {
            experiments::ChainProtocol p;
            if (int rc = emit("fig3d_chain_comparison.csv",
                              experiments::run_characterisation(
                                  experiments::Characterisation::ChainComparison)))
                return rc;
            manifest << "5-stage chains, r " << si::format_value(p.r) << ", c "
                     << si::format_value(p.c) << "; vdd " << si::format_value(p.vdd)
                     << " (headroom above the p threshold); pulse "
                     << si::format_value(p.amplitude) << "V/" << si::format_value(p.width)
                     << "s; dt " << si::format_value(p.dt) << "s\n";
        } else if (target == "fig4") {
            if (int rc = emit("fig4_temporal_integration.csv",
                              experiments::run_characterisation(
                                  experiments::Characterisation::TemporalIntegration)))
                return rc;
            if (int rc = emit("fig4_spatial_integration.csv",
                              experiments::run_characterisation(
                                  experiments::Characterisation::SpatialIntegration)))
                return rc;
            manifest << "temporal: p-type 1k/1u, 4-pulse trains 3V/0.95ms, periods 1/2/4 ms\n"
                     << "spatial: two-gate n-type 1k/1u, 1.7V/2ms pulses, offsets 0..3 ms\n";
        } else if (target == "fig6") {
            experiments::LocalisationProtocol p;
            for (auto variant : {experiments::DetectorVariant::A, experiments::DetectorVariant::B,
                                 experiments::DetectorVariant::C}) {
                const auto curve = experiments::run_sound_localisation(variant, p);
                if (int rc = emit("fig6_variant" + variant_name(variant) + ".csv",
                                  curve_table(curve)))
                    return rc;
            }
            const std::vector<double> passive_r{500, 1000, 1500, 2000, 2500};
            const auto baselines = experiments::run_passive_localisation_baseline(passive_r);
            for (std::size_t i = 0; i < passive_r.size(); ++i) {
                if (int rc = emit("fig6_passive_r" + si::format_value(passive_r[i]) + ".csv",
                                  curve_table(baselines[i])))
                    return rc;
            }
            manifest << "active: variants A/B/C, 1.7V/2ms pulses, branch-1 leading, "
                        "separation 0..10ms step 0.25ms\n"
                     << "p1 gates calibrated: ron 3k, transition 2V (integrating stage)\n"
                     << "passive: 5-stage ladders, r_leak 1k, c 1u, short branch 100 ohm, "
                        "slow branch r_a swept\n";
        } else if (target == "fig5") {
            csv::Table t;
            t.header = {"p8_r_leak_ohm", "spikes"};
            experiments::BurstProtocol p;
            auto grid = experiments::bursting_sweep_grid();
            grid.push_back(251.0); // published value, near the 2/3-spike boundary here
            std::sort(grid.begin(), grid.end());
            for (const double rl : grid)
                t.rows.push_back({csv::Cell{rl},
                                  csv::Cell{static_cast<long long>(
                                      experiments::run_bursting_count(rl, p))}});
            if (int rc = emit("fig5_burst_counts.csv", t)) return rc;
            manifest << "ring per published values; p8 r_leak swept; input "
                     << si::format_value(p.amplitude) << "V/" << si::format_value(p.width)
                     << "s; dt " << si::format_value(p.dt) << "s; p threshold 1.4V, "
                     << "transition 0.2V; spike threshold " << p.threshold_fraction
                     << "*vdd, refractory " << si::format_value(p.refractory) << "s\n";
        } else {
            std::cerr << "error: unknown target '" << target
                      << "' (expected fig1f|fig2|fig3|fig3d|fig4|fig5|fig6)\n";
            return 1;
        }
    } catch (const SimulationError& e) {
        std::cerr << "simulation diverged: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    manifest << "files:\n";
    for (const auto& f : files) manifest << "  " << f << "\n";
    return write_file(dir / "manifest.txt", manifest.str());
}

int cmd_analyze(const std::string& csv_path, const std::string& in_channel,
                const std::string& out_channel, const std::string& metric, double vdd,
                double floor_fraction, double threshold_fraction, double refractory,
                std::optional<double> rest_in, std::optional<double> rest_out) {
    std::ifstream in(csv_path, std::ios::binary);
    if (!in) {
        std::cerr << "error: cannot open " << csv_path << "\n";
        return 1;
    }
    try {
        const Trace trace = csv::read_trace(in);
        // Traces start at rest, so the first sample is the default reference.
        auto rest_of = [&](const std::string& ch, const std::optional<double>& given) {
            return given ? *given : trace.channel(ch).front();
        };
        if (metric == "delay") {
            const auto d = delay(trace, in_channel, out_channel, rest_of(in_channel, rest_in),
                                 rest_of(out_channel, rest_out), floor_fraction * vdd);
            if (d) std::cout << si::format_double(*d) << "\n";
            else std::cout << "undefined\n";
        } else if (metric == "gain") {
            std::cout << si::format_double(gain(trace, in_channel, out_channel,
                                                rest_of(in_channel, rest_in),
                                                rest_of(out_channel, rest_out)))
                      << "\n";
        } else if (metric == "spikes") {
            std::cout << count_spikes(trace, out_channel, rest_of(out_channel, rest_out), vdd,
                                      threshold_fraction, refractory)
                      << "\n";
        } else {
            std::cerr << "error: unknown metric '" << metric << "'\n";
            return 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dendrite circuit simulator and experiment harness"};
    app.require_subcommand(1);

    // simulate
    std::string netlist_path, sim_out, method = "be";
    double duration = 0.03, dt = 1e-6;
    int stride = 1;
    auto* sim = app.add_subcommand("simulate", "Simulate a netlist and write a CSV trace");
    sim->add_option("netlist", netlist_path, "netlist file")->required();
    sim->add_option("--duration", duration, "simulated time, seconds");
    sim->add_option("--dt", dt, "time step, seconds");
    sim->add_option("--method", method, "be|trap")->check(CLI::IsMember({"be", "trap"}));
    sim->add_option("--stride", stride, "record every k-th step");
    sim->add_option("--out", sim_out, "output CSV path (default: stdout)");

    // reproduce
    std::string target, repro_dir = ".";
    auto* rep = app.add_subcommand("reproduce", "Run a built-in experiment and write CSVs");
    rep->add_option("target", target, "fig1f|fig2|fig3|fig3d|fig4|fig5|fig6")->required();
    rep->add_option("--out", repro_dir, "output directory");

    // analyze
    std::string csv_path, in_channel, out_channel, metric;
    double vdd = 5.0, floor_fraction = 0.02, threshold_fraction = 0.5, refractory = 2e-4;
    double rest_in_v = 0, rest_out_v = 0;
    auto* ana = app.add_subcommand("analyze", "Extract a metric from a trace CSV");
    ana->add_option("trace", csv_path, "trace CSV")->required();
    ana->add_option("--in-channel", in_channel, "input channel")->required();
    ana->add_option("--out-channel", out_channel, "output channel")->required();
    ana->add_option("--metric", metric, "delay|gain|spikes")
        ->required()
        ->check(CLI::IsMember({"delay", "gain", "spikes"}));
    ana->add_option("--vdd", vdd, "supply voltage for thresholds/floors");
    ana->add_option("--floor", floor_fraction, "delay measurability floor, fraction of vdd");
    ana->add_option("--threshold", threshold_fraction, "spike threshold, fraction of vdd");
    ana->add_option("--refractory", refractory, "spike merge window, seconds");
    auto* opt_rin = ana->add_option("--rest-in", rest_in_v, "input rest level (default: first sample)");
    auto* opt_rout = ana->add_option("--rest-out", rest_out_v, "output rest level (default: first sample)");

    CLI11_PARSE(app, argc, argv);

    if (sim->parsed()) return cmd_simulate(netlist_path, duration, dt, method, stride, sim_out);
    if (rep->parsed()) return cmd_reproduce(target, repro_dir);
    if (ana->parsed())
        return cmd_analyze(csv_path, in_channel, out_channel, metric, vdd, floor_fraction,
                           threshold_fraction, refractory,
                           opt_rin->count() ? std::optional<double>(rest_in_v) : std::nullopt,
                           opt_rout->count() ? std::optional<double>(rest_out_v) : std::nullopt);
    return 1;
}
