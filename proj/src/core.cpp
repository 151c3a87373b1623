#include "dendrite/core.hpp"

#include "dendrite/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dendrite {

namespace {

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

bool valid_name(const std::string& name) {
    if (name.empty()) return false;
    for (char c : name) {
        const bool word = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                          (c >= '0' && c <= '9') || c == '_' || c == '-';
        if (!word) return false;
    }
    return true;
}

} // namespace

void validate(const SegmentParams& p) {
    require(positive_finite(p.r_axial), "segment: r_axial must be positive and finite");
    require(positive_finite(p.r_leak), "segment: r_leak must be positive and finite");
    require(positive_finite(p.c_reservoir), "segment: c_reservoir must be positive and finite");
    require(positive_finite(p.c_membrane), "segment: c_membrane must be positive and finite");
}

void validate(const TransistorModel& m) {
    require(positive_finite(m.r_on), "transistor: r_on must be positive and finite");
    require(positive_finite(m.r_off), "transistor: r_off must be positive and finite");
    require(m.r_on < m.r_off, "transistor: requires r_on < r_off");
    require(positive_finite(m.v_threshold), "transistor: v_threshold must be positive");
    if (m.kind == SwitchKind::Smoothed)
        require(positive_finite(m.transition_width), "transistor: transition_width must be positive");
}

TransistorModel default_transistor(Polarity polarity) {
    TransistorModel m;
    m.kind = SwitchKind::Smoothed;
    m.v_threshold = polarity == Polarity::NType ? 1.7 : 2.2;
    m.r_on = 50.0;
    m.r_off = 1e7;
    m.transition_width = 0.05;
    return m;
}

void validate(const Stimulus& s) {
    std::visit(
        [](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, SquarePulse>) {
                require(v.amplitude >= 0 && std::isfinite(v.amplitude), "pulse: amplitude must be >= 0");
                require(positive_finite(v.width), "pulse: width must be positive");
                require(v.t_start >= 0 && std::isfinite(v.t_start), "pulse: t0 must be >= 0");
            } else if constexpr (std::is_same_v<T, PulseTrain>) {
                require(v.amplitude >= 0 && std::isfinite(v.amplitude), "train: amplitude must be >= 0");
                require(positive_finite(v.width), "train: width must be positive");
                require(v.period > v.width, "train: period must exceed width");
                require(v.count >= 1, "train: count must be >= 1");
                require(v.t_start >= 0 && std::isfinite(v.t_start), "train: t0 must be >= 0");
            } else if constexpr (std::is_same_v<T, AnalyticSpike>) {
                validate(v.params);
                require(v.v0 >= 0 && std::isfinite(v.v0), "spike: v0 must be >= 0");
                require(v.t_start >= 0 && std::isfinite(v.t_start), "spike: t0 must be >= 0");
            } else {
                require(positive_finite(v.dt), "samples: dt must be positive");
                for (double x : v.values)
                    require(std::isfinite(x), "samples: all values must be finite");
            }
        },
        s);
}

double stimulus_value(const Stimulus& s, double t) {
    return std::visit(
        [t](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, SquarePulse>) {
                return (t >= v.t_start && t < v.t_start + v.width) ? v.amplitude : 0.0;
            } else if constexpr (std::is_same_v<T, PulseTrain>) {
                if (t < v.t_start) return 0.0;
                const double local = t - v.t_start;
                const double k = std::floor(local / v.period);
                if (k >= static_cast<double>(v.count)) return 0.0;
                return (local - k * v.period) < v.width ? v.amplitude : 0.0;
            } else if constexpr (std::is_same_v<T, AnalyticSpike>) {
                if (t < v.t_start || v.v0 == 0.0) return 0.0;
                const CharacteristicSolution sol = solve_free_response(v.params, v.v0);
                return membrane_voltage(sol, v.params, t - v.t_start);
            } else {
                if (v.values.empty()) return 0.0;
                const double pos = (t - v.t0) / v.dt;
                if (pos <= 0.0) return pos == 0.0 ? v.values.front() : 0.0;
                const auto last = static_cast<double>(v.values.size() - 1);
                if (pos >= last) return pos == last ? v.values.back() : 0.0;
                const auto i = static_cast<std::size_t>(pos);
                const double frac = pos - static_cast<double>(i);
                return v.values[i] + frac * (v.values[i + 1] - v.values[i]);
            }
        },
        s);
}

void validate(const Network& net, const std::set<std::string>& stimulus_names) {
    require(positive_finite(net.vdd), "network: vdd must be positive");
    std::set<std::string> segment_names;
    for (const auto& seg : net.segments) {
        require(valid_name(seg.name), "network: bad segment name '" + seg.name + "'");
        require(!segment_names.count(seg.name) && !stimulus_names.count(seg.name),
                "network: duplicate name '" + seg.name + "'");
        segment_names.insert(seg.name);
        validate(seg.params);
        require(!seg.gates.empty(), "network: segment '" + seg.name + "' has no gate inputs");
        for (const auto& g : seg.gates) validate(g.model);
    }
    for (const auto& seg : net.segments) {
        for (const auto& g : seg.gates) {
            if (const auto* sr = std::get_if<StimulusRef>(&g.source)) {
                require(stimulus_names.count(sr->name) > 0,
                        "network: segment '" + seg.name + "' gate references unknown stimulus '" +
                            sr->name + "'");
            } else {
                const auto& mr = std::get<MembraneNodeRef>(g.source);
                require(segment_names.count(mr.segment) > 0,
                        "network: segment '" + seg.name + "' gate references unknown segment '" +
                            mr.segment + "'");
            }
        }
    }
}

double rest_voltage(const SegmentParams& segment, double vdd) {
    validate(segment);
    require(positive_finite(vdd), "rest_voltage: vdd must be positive");
    return segment.polarity == Polarity::NType ? vdd : 0.0;
}

bool Trace::has_channel(const std::string& name) const {
    return std::find(names_.begin(), names_.end(), name) != names_.end();
}

const std::vector<double>& Trace::channel(const std::string& name) const {
    const auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) throw std::out_of_range("trace: no channel '" + name + "'");
    return data_[static_cast<std::size_t>(it - names_.begin())];
}

void Trace::add_channel(std::string name, std::vector<double> samples) {
    if (!data_.empty() && samples.size() != data_.front().size())
        throw std::invalid_argument("trace: channel length mismatch for '" + name + "'");
    names_.push_back(std::move(name));
    data_.push_back(std::move(samples));
}

} // namespace dendrite
