#pragma once

#include "dendrite/core.hpp"
#include "dendrite/csv.hpp"
#include "dendrite/measure.hpp"
#include "dendrite/transient.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

// Built-in circuit builders and sweep drivers for the standard
// characterisation experiments: delay/gain sweeps, chain propagation,
// temporal/spatial integration, the two-branch coincidence detector and the
// looped-dendrite bursting neuron.  Component values for the detector and
// the ring are the published ones; protocol details that the source material
// leaves open live in the protocol structs below and are surfaced in the
// reproduction manifests.

namespace dendrite::experiments {

// ---------------------------------------------------------------------------
// Sound-localisation coincidence detector (two delay branches into one
// integrating p-type segment).

enum class DetectorVariant { A, B, C };

struct DetectorBuild {
    Network network;
    std::string input_long;  // stimulus driving the tunable-delay branch (n1)
    std::string input_short; // stimulus driving the short-delay branch (n2)
    std::string probe;       // detector output channel (p1.vm)
};

/// Component values per variant; all capacitors 1 uF.  The integrating
/// p-type stage uses soft 16 kohm gate channels so a single branch cannot
/// rail the reservoir within its conduction window -- the detector
/// integrates rather than saturates.  See the builder for the per-gate
/// threshold calibration.
DetectorBuild build_sound_localisation(DetectorVariant variant);

struct LocalisationProtocol {
    double amplitude = 1.7;
    double width = 2e-3;
    double lead_time = 1e-3; // start of the leading (branch-1) pulse
    double sep_start = 0.0;
    double sep_stop = 10e-3;
    double sep_step = 0.25e-3;
    double duration = 35e-3;
    double dt = 1e-6;
};

std::vector<double> separation_grid(const LocalisationProtocol& p);

/// Response curve: branch-1 input leads by each separation; returns
/// (separation, max detector deviation) pairs in sweep order.
std::vector<std::pair<double, double>> run_sound_localisation(
    DetectorVariant variant, const LocalisationProtocol& protocol = {});

struct PassiveBaselineProtocol {
    int n_stages = 5;
    double r_leak = 1e3;
    double c = 1e-6;
    double short_r_axial = 100.0; // fixed fast branch
    double amplitude = 1.7;
    double width = 2e-3;
    double lead_time = 1e-3;
    double sep_start = 0.0;
    double sep_stop = 10e-3;
    double sep_step = 0.25e-3;
    double duration = 35e-3;
    double dt = 1e-6;
};

/// One response curve per branch resistance: two passive delay lines whose
/// final stages are summed, the slow branch receiving the leading pulse.
std::vector<std::vector<std::pair<double, double>>> run_passive_localisation_baseline(
    const std::vector<double>& branch_r_axial, const PassiveBaselineProtocol& protocol = {});

// ---------------------------------------------------------------------------
// Bursting neuron: ring of eight segments n1,p2,...,n7,p8 chained
// gate-to-membrane, p8's membrane fed back into n1, external pulse on n1.

/// Published ring component values with p8's leak resistance as the loop
/// gain knob.  Ring transistor thresholds sit close below the stage
/// amplitude caps (n 2.1 V, p 1.8 V; the stock 2.2 V p threshold exceeds
/// n5's largest possible dip of 2.05 V) and the feedback tap into n1 runs
/// through a softened 1 kohm channel; see the builder for the reasoning.
Network build_bursting_neuron(double p8_r_leak);

struct BurstProtocol {
    double amplitude = 5.0;
    double width = 5e-6;   // must stay below the ~40 us loop delay
    double t_start = 50e-6;
    double duration = 0.1; // 100 ms stability window
    double dt = 50e-9;
    int record_stride = 20;
    double threshold_fraction = 0.25;
    double refractory = 10e-6;
};

Trace run_bursting_trace(double p8_r_leak, const BurstProtocol& protocol = {});
int run_bursting_count(double p8_r_leak, const BurstProtocol& protocol = {});

/// Leak values swept by the fig-5 reproduction: the published 127/231/251
/// plus a grid over the burst-count transition region.
std::vector<double> bursting_sweep_grid();

// ---------------------------------------------------------------------------
// Characterisation sweeps.

enum class Characterisation {
    DelaySweep,
    GainSweep,
    ChainComparison,
    TemporalIntegration,
    SpatialIntegration,
};

struct DelayProtocol {
    std::vector<double> resistances;       // R_A = R_L, ohms
    std::vector<double> amplitudes;        // volts
    double c = 1e-6;
    double vdd = 5.0;
    double width = 2e-3;
    double t_start = 1e-3;
    double duration = 40e-3;
    double dt = 1e-6;
    double floor_fraction = 0.02;          // measurability floor, fraction of vdd

    DelayProtocol();
};

struct DelayPoint {
    Polarity polarity;
    double resistance;
    double amplitude;
    std::optional<double> delay;
};

std::vector<DelayPoint> run_delay_sweep(const DelayProtocol& protocol = {});

struct GainProtocol {
    double r_axial = 2e3;
    std::vector<double> r_leaks;
    std::vector<double> amplitudes;
    double c = 1e-6;
    double vdd = 5.0;
    double width = 2e-3;
    double t_start = 1e-3;
    double duration = 25e-3;
    double dt = 1e-6;

    GainProtocol();
};

struct GainPoint {
    Polarity polarity;
    double r_leak;
    double amplitude;
    double gain;
    double peak_out; // output deviation, volts
};

std::vector<GainPoint> run_gain_sweep(const GainProtocol& protocol = {});

struct ChainProtocol {
    int n_stages = 5;
    double r = 220.0;
    double c = 22e-9;
    double vdd = 9.0; // headroom above the p threshold; see manifest
    double amplitude = 1.7;
    double width = 5e-6;
    double t_start = 20e-6;
    double duration = 400e-6;
    double dt = 5e-8;
};

struct ChainComparisonResult {
    std::vector<double> passive_peaks; // per-stage peak deviation, volts
    std::vector<double> active_peaks;
};

ChainComparisonResult run_chain_comparison(const ChainProtocol& protocol = {});

struct TemporalProtocol {
    std::vector<double> periods; // seconds
    int count = 4;
    double amplitude = 3.0;
    double width = 0.95e-3;
    double t_start = 1e-3;
    double r = 1e3;
    double c = 1e-6;
    double vdd = 5.0;
    double duration = 30e-3;
    double dt = 1e-6;

    TemporalProtocol();
};

struct TemporalPoint {
    double period;
    int pulse_index;  // 0-based
    double peak;      // deviation peak within the pulse's window, volts
};

std::vector<TemporalPoint> run_temporal_integration(const TemporalProtocol& protocol = {});

struct SpatialProtocol {
    std::vector<double> offsets; // second input delay relative to the first
    double amplitude = 1.7;
    double width = 2e-3;
    double t_start = 1e-3;
    double r = 1e3;
    double c = 1e-6;
    double vdd = 5.0;
    double duration = 20e-3;
    double dt = 1e-6;

    SpatialProtocol();
};

struct SpatialResult {
    double single_peak;                             // one input driven alone
    std::vector<std::pair<double, double>> dual;    // (offset, overall peak)
};

SpatialResult run_spatial_integration(const SpatialProtocol& protocol = {});

/// Tidy table for any characterisation kind, assembled from the typed
/// runners above with their default protocols.
csv::Table run_characterisation(Characterisation kind);

// ---------------------------------------------------------------------------
// Free-response overlay (analytic vs simulated) for a set of initial
// reservoir voltages; single n-type segment, 1 kohm / 1 uF.

struct FreeResponseProtocol {
    std::vector<double> v0;
    double r = 1e3;
    double c = 1e-6;
    double vdd = 5.0;
    double span = 10e-3;   // overlay window after the charge pulse
    double charge_width = 10e-6;
    double dt = 0.5e-6;

    FreeResponseProtocol();
};

/// Columns: time_s then v0_<x>_analytic, v0_<x>_sim deviation pairs.
csv::Table run_free_response_overlay(const FreeResponseProtocol& protocol = {});

} // namespace dendrite::experiments
