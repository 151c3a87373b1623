#pragma once

#include "dendrite/core.hpp"

#include <map>
#include <stdexcept>
#include <string>

// Nonlinear time-domain simulation of dendrite networks.  Each segment is a
// two-state RC system
//
//   C_R dv_R/dt = sum_g g_ds(v_gate) * (rail_drain - v_R) + (v_M - v_R)/R_A
//   C_M dv_M/dt = (v_R - v_M)/R_A + (rail_leak - v_M)/R_L
//
// with rail_drain = 0, rail_leak = vdd for n-type segments and the
// complement for p-type.  The linear RC part is updated implicitly every
// step with the gate conductances frozen at the step's gate voltages; gate
// voltages are read from stimuli or upstream membrane channels at the
// previous accepted step, so feedback loops incur a one-step delay.

namespace dendrite {

enum class Method { BackwardEuler, Trapezoidal };

struct SimConfig {
    double dt = 1e-6;      // fixed step, seconds
    double duration = 0;   // seconds
    Method method = Method::BackwardEuler;
    int record_stride = 1; // store every k-th step
};

void validate(const SimConfig& cfg);

/// Per-segment electrical state plus the derived branch currents.
struct SimState {
    double v_reservoir = 0; // physical volts
    double v_membrane = 0;
    double i_axial = 0;     // (v_R - v_M)/R_A, amperes
    double i_leak = 0;      // (rail_leak - v_M)/R_L
    double time = 0;
};

/// Reconstructs a segment's state (including the derived axial and leak
/// currents) from a recorded trace sample.
SimState segment_state(const Trace& trace, const std::string& segment,
                       const SegmentParams& params, double vdd, std::size_t sample);

/// Raised when the divergence guard trips: a node left the rail guard band
/// or went non-finite.
class SimulationError : public std::runtime_error {
public:
    SimulationError(const std::string& what, double time, std::string node)
        : std::runtime_error(what), time_(time), node_(std::move(node)) {}

    double time() const { return time_; }
    const std::string& node() const { return node_; }

private:
    double time_;
    std::string node_;
};

/// Drain-source conductance for a given gate voltage.  HardSwitch is a step
/// between 1/r_off and 1/r_on; Smoothed interpolates the conductance with a
/// logistic spanning transition_width around the threshold.  N-type gates
/// switch on as v_gate rises past v_threshold, p-type as it falls past
/// vdd - v_threshold.
double transistor_conductance(double v_gate, const TransistorModel& model, Polarity polarity,
                              double vdd);

/// Guard band check used by the simulators; exposed for direct testing.
/// Returns false if v is non-finite or outside [lo - 0.5, hi + 0.5].
bool within_guard_band(double v, double lo, double hi);

/// Integrates the network from its resting operating point.  The returned
/// trace contains one channel per stimulus (the raw waveform) plus
/// "<segment>.vr" and "<segment>.vm" channels in declaration order.
Trace simulate(const Network& net, const std::map<std::string, Stimulus>& stimuli,
               const SimConfig& cfg);

/// Classic passive RC delay line: n_stages nodes, each with c_membrane to
/// ground and r_leak to the resting rail (ground); r_axial links neighbours
/// and the stimulus drives stage 0 through a source resistance of r_axial.
/// Channels: "in" plus "stage0".."stage<n-1>".
Trace simulate_passive_chain(int n_stages, double r_axial, double r_leak, double c_membrane,
                             const Stimulus& stimulus, const SimConfig& cfg);

} // namespace dendrite
