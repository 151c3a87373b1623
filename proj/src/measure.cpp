#include "dendrite/measure.hpp"

#include "dendrite/parallel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace dendrite {

PeakInfo peak(const Trace& trace, const std::string& channel, double rest) {
    const auto& samples = trace.channel(channel);
    if (samples.empty()) throw std::invalid_argument("peak: channel '" + channel + "' is empty");
    std::size_t best = 0;
    double best_mag = std::abs(samples[0] - rest);
    for (std::size_t i = 1; i < samples.size(); ++i) {
        const double mag = std::abs(samples[i] - rest);
        if (mag > best_mag) {
            best_mag = mag;
            best = i;
        }
    }
    return PeakInfo{trace.time(best), best_mag, rest};
}

std::optional<double> delay(const Trace& trace, const std::string& in_channel,
                            const std::string& out_channel, double rest_in, double rest_out,
                            double floor_volts) {
    const PeakInfo in = peak(trace, in_channel, rest_in);
    const PeakInfo out = peak(trace, out_channel, rest_out);
    if (out.magnitude < floor_volts) return std::nullopt;
    return out.t_peak - in.t_peak;
}

double gain(const Trace& trace, const std::string& in_channel, const std::string& out_channel,
            double rest_in, double rest_out) {
    const PeakInfo in = peak(trace, in_channel, rest_in);
    if (in.magnitude == 0.0) throw std::invalid_argument("gain: input magnitude is zero");
    const PeakInfo out = peak(trace, out_channel, rest_out);
    return out.magnitude / in.magnitude;
}

int count_spikes(const Trace& trace, const std::string& channel, double rest, double vdd,
                 double threshold_fraction, double refractory) {
    if (!(threshold_fraction > 0.0 && threshold_fraction < 1.0))
        throw std::invalid_argument("count_spikes: threshold_fraction must be in (0, 1)");
    const auto& samples = trace.channel(channel);
    const double threshold = threshold_fraction * vdd;
    int count = 0;
    bool above = false;
    double last_spike_time = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const bool now_above = std::abs(samples[i] - rest) > threshold;
        if (now_above && !above) {
            const double t = trace.time(i);
            // Crossings within the refractory window of the last counted
            // spike are treated as the same spike.
            if (t - last_spike_time >= refractory) {
                ++count;
                last_spike_time = t;
            }
        }
        above = now_above;
    }
    return count;
}

std::vector<std::pair<double, double>> response_curve(
    const std::function<Trace(double)>& run_at_separation, const std::vector<double>& separations,
    const std::string& probe_channel, double rest) {
    if (separations.empty()) throw std::invalid_argument("response_curve: no separations given");
    auto peaks = parallel_map(separations.size(), [&](std::size_t i) {
        const Trace t = run_at_separation(separations[i]);
        return peak(t, probe_channel, rest).magnitude;
    });
    std::vector<std::pair<double, double>> out;
    out.reserve(separations.size());
    for (std::size_t i = 0; i < separations.size(); ++i) out.emplace_back(separations[i], peaks[i]);
    return out;
}

} // namespace dendrite
