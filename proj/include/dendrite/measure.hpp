#pragma once

#include "dendrite/core.hpp"

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

// Extraction of the reported circuit quantities from traces: peaks, delays,
// gains and spike counts.  Magnitudes are deviations from the channel's
// resting level; polarity is ignored.

namespace dendrite {

struct PeakInfo {
    double t_peak = 0;
    double magnitude = 0; // |v - rest| at the peak, volts
    double rest = 0;
};

/// Sample with the maximum deviation from rest; ties break to the earliest
/// time.  Throws std::invalid_argument on an empty channel.
PeakInfo peak(const Trace& trace, const std::string& channel, double rest);

/// Peak-to-peak time difference t_peak(out) - t_peak(in), or nullopt when
/// the output deviation never reaches floor_volts (an unmeasurably small
/// response, not an error).
std::optional<double> delay(const Trace& trace, const std::string& in_channel,
                            const std::string& out_channel, double rest_in, double rest_out,
                            double floor_volts);

/// Output peak magnitude over input peak magnitude.  Throws
/// std::invalid_argument when the input magnitude is zero.
double gain(const Trace& trace, const std::string& in_channel, const std::string& out_channel,
            double rest_in, double rest_out);

/// Number of rising crossings of |v - rest| above threshold_fraction * vdd,
/// with crossings inside the refractory window merged into one spike.
int count_spikes(const Trace& trace, const std::string& channel, double rest, double vdd,
                 double threshold_fraction = 0.5, double refractory = 2e-4);

/// Runs the circuit factory at each input separation and records the probe
/// channel's peak deviation.  Separations are evaluated concurrently; the
/// result preserves input order.
std::vector<std::pair<double, double>> response_curve(
    const std::function<Trace(double)>& run_at_separation, const std::vector<double>& separations,
    const std::string& probe_channel, double rest);

} // namespace dendrite
