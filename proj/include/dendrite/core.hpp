#pragma once

#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

// Domain types shared by the whole toolkit: dendrite segments, gate
// transistor models, stimuli, networks and recorded traces.
//
// Conventions used throughout:
//  - An n-type segment rests with both capacitor nodes at VDD; its membrane
//    dips towards ground while driven.  A p-type segment is the complement:
//    it rests at 0 V and its membrane rises towards VDD.
//  - Stimuli are non-negative "deviation" waveforms (volts away from the
//    resting drive level).  When a stimulus feeds an n-type gate the gate
//    sees s(t) directly; when it feeds a p-type gate it sees vdd - s(t),
//    mimicking the output polarity of the complementary segment that would
//    normally drive that gate.

namespace dendrite {

enum class Polarity { NType, PType };

/// Passive components of one dendrite segment.
struct SegmentParams {
    Polarity polarity = Polarity::NType;
    double r_axial = 0;     // R_A, ohms (reservoir node -> membrane node)
    double r_leak = 0;      // R_L, ohms (membrane node -> resting rail)
    double c_reservoir = 0; // C_R, farads (transistor drain node)
    double c_membrane = 0;  // C_M, farads (output node)

    bool operator==(const SegmentParams&) const = default;
};

/// Throws std::invalid_argument unless all four components are positive
/// and finite.
void validate(const SegmentParams& p);

enum class SwitchKind { HardSwitch, Smoothed };

/// Switch-level model of the input MOSFET.  v_threshold is measured from
/// ground for n-type gates and downward from VDD for p-type gates.
struct TransistorModel {
    SwitchKind kind = SwitchKind::Smoothed;
    double v_threshold = 0;
    double r_on = 0;
    double r_off = 0;
    double transition_width = 0; // volts; ignored for HardSwitch

    bool operator==(const TransistorModel&) const = default;
};

void validate(const TransistorModel& m);

/// Calibrated defaults: thresholds 1.7 V (n) / 2.2 V (p), r_on 50 ohm,
/// r_off 10 Mohm, smoothed over 50 mV.
TransistorModel default_transistor(Polarity polarity);

// ---------------------------------------------------------------------------
// Stimuli

struct SquarePulse {
    double amplitude = 0;
    double width = 0;
    double t_start = 0;

    bool operator==(const SquarePulse&) const = default;
};

struct PulseTrain {
    double amplitude = 0;
    double width = 0;
    double period = 0;
    int count = 0;
    double t_start = 0;

    bool operator==(const PulseTrain&) const = default;
};

/// Action-potential shaped waveform: the analytic membrane response of a
/// segment charged to v0, shifted to start at t_start.
struct AnalyticSpike {
    SegmentParams params;
    double v0 = 0;
    double t_start = 0;

    bool operator==(const AnalyticSpike&) const = default;
};

/// Explicit uniformly sampled waveform; linear interpolation inside the
/// support, zero outside.
struct Samples {
    double dt = 0;
    double t0 = 0;
    std::vector<double> values;

    bool operator==(const Samples&) const = default;
};

using Stimulus = std::variant<SquarePulse, PulseTrain, AnalyticSpike, Samples>;

void validate(const Stimulus& s);

/// Deterministic waveform value at time t (pure function).
double stimulus_value(const Stimulus& s, double t);

// ---------------------------------------------------------------------------
// Networks

struct StimulusRef {
    std::string name;
    bool operator==(const StimulusRef&) const = default;
};

struct MembraneNodeRef {
    std::string segment;
    bool operator==(const MembraneNodeRef&) const = default;
};

using GateSource = std::variant<StimulusRef, MembraneNodeRef>;

struct GateInput {
    TransistorModel model;
    GateSource source;

    bool operator==(const GateInput&) const = default;
};

/// One segment in a network.  Multiple gates all act on the single
/// reservoir node (spatial integration).
struct SegmentInstance {
    std::string name;
    SegmentParams params;
    std::vector<GateInput> gates;

    bool operator==(const SegmentInstance&) const = default;
};

struct Network {
    double vdd = 5.0;
    std::vector<SegmentInstance> segments;

    bool operator==(const Network&) const = default;
};

/// Full structural validation: vdd > 0, component invariants, unique names,
/// at least one gate per segment, and every gate source resolving to either
/// a declared stimulus or a declared segment.  Self and forward references
/// are allowed (loops are a feature).  Throws std::invalid_argument.
void validate(const Network& net, const std::set<std::string>& stimulus_names);

/// Quiescent membrane voltage: vdd for n-type, 0 for p-type.
/// Throws std::invalid_argument if vdd <= 0 or the segment is invalid.
double rest_voltage(const SegmentParams& segment, double vdd);

// ---------------------------------------------------------------------------
// Traces

/// Uniformly sampled multi-channel voltage recording.  dt is the recorded
/// sample spacing (simulation dt times the record stride).
class Trace {
public:
    Trace() = default;
    Trace(double dt, double t0) : dt_(dt), t0_(t0) {}

    double dt() const { return dt_; }
    double t0() const { return t0_; }

    std::size_t channel_count() const { return names_.size(); }
    std::size_t sample_count() const { return data_.empty() ? 0 : data_.front().size(); }
    double time(std::size_t i) const { return t0_ + dt_ * static_cast<double>(i); }

    const std::vector<std::string>& channel_names() const { return names_; }
    bool has_channel(const std::string& name) const;

    /// Throws std::out_of_range for unknown channels.
    const std::vector<double>& channel(const std::string& name) const;

    /// Appends a channel; all channels must have equal length.
    void add_channel(std::string name, std::vector<double> samples);

private:
    double dt_ = 0;
    double t0_ = 0;
    std::vector<std::string> names_;
    std::vector<std::vector<double>> data_;
};

/// Channel naming used by the simulator.
inline std::string reservoir_channel(const std::string& segment) { return segment + ".vr"; }
inline std::string membrane_channel(const std::string& segment) { return segment + ".vm"; }

} // namespace dendrite
