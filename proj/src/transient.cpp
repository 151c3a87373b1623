#include "dendrite/transient.hpp"

#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

namespace dendrite {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

// Numerically safe logistic.
double logistic(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

struct CompiledGate {
    TransistorModel model;
    bool from_stimulus = false;
    std::size_t index = 0; // stimulus index or segment index
};

struct CompiledSegment {
    Polarity polarity;
    double ra_inv;
    double rl_inv;
    double cr;
    double cm;
    double rail_drain;
    double rail_leak;
    std::vector<CompiledGate> gates;
};

// Solves the segment's 2x2 linear system A x = rhs.
struct TwoByTwo {
    double a11, a12, a21, a22;

    void solve(double r1, double r2, double& x1, double& x2) const {
        const double det = a11 * a22 - a12 * a21;
        x1 = (r1 * a22 - r2 * a12) / det;
        x2 = (a11 * r2 - a21 * r1) / det;
    }
};

} // namespace

void validate(const SimConfig& cfg) {
    require(cfg.dt > 0 && std::isfinite(cfg.dt), "sim: dt must be positive");
    require(cfg.duration >= cfg.dt, "sim: duration must be at least dt");
    require(cfg.record_stride >= 1, "sim: record_stride must be >= 1");
}

double transistor_conductance(double v_gate, const TransistorModel& model, Polarity polarity,
                              double vdd) {
    validate(model);
    const double g_on = 1.0 / model.r_on;
    const double g_off = 1.0 / model.r_off;
    // Overdrive grows positive in the switching direction of the device.
    const double overdrive = polarity == Polarity::NType
                                 ? v_gate - model.v_threshold
                                 : (vdd - model.v_threshold) - v_gate;
    if (model.kind == SwitchKind::HardSwitch) return overdrive >= 0.0 ? g_on : g_off;
    // Logistic covering ~96% of the swing across +-transition_width/2.
    const double x = 8.0 * overdrive / model.transition_width;
    return g_off + (g_on - g_off) * logistic(x);
}

bool within_guard_band(double v, double lo, double hi) {
    return std::isfinite(v) && v >= lo - 0.5 && v <= hi + 0.5;
}

SimState segment_state(const Trace& trace, const std::string& segment,
                       const SegmentParams& params, double vdd, std::size_t sample) {
    validate(params);
    SimState st;
    st.v_reservoir = trace.channel(reservoir_channel(segment)).at(sample);
    st.v_membrane = trace.channel(membrane_channel(segment)).at(sample);
    const double rail_leak = params.polarity == Polarity::NType ? vdd : 0.0;
    st.i_axial = (st.v_reservoir - st.v_membrane) / params.r_axial;
    st.i_leak = (rail_leak - st.v_membrane) / params.r_leak;
    st.time = trace.time(sample);
    return st;
}

Trace simulate(const Network& net, const std::map<std::string, Stimulus>& stimuli,
               const SimConfig& cfg) {
    std::set<std::string> stim_names;
    for (const auto& [name, s] : stimuli) {
        validate(s);
        stim_names.insert(name);
    }
    validate(net, stim_names);
    validate(cfg);

    const double vdd = net.vdd;
    const std::size_t n_seg = net.segments.size();

    // Stimulus vectors in map (name) order.
    std::vector<std::string> stim_order;
    std::vector<const Stimulus*> stim_ptr;
    for (const auto& [name, s] : stimuli) {
        stim_order.push_back(name);
        stim_ptr.push_back(&s);
    }

    std::map<std::string, std::size_t> seg_index;
    for (std::size_t i = 0; i < n_seg; ++i) seg_index[net.segments[i].name] = i;
    std::map<std::string, std::size_t> stim_index;
    for (std::size_t i = 0; i < stim_order.size(); ++i) stim_index[stim_order[i]] = i;

    std::vector<CompiledSegment> segs(n_seg);
    for (std::size_t i = 0; i < n_seg; ++i) {
        const auto& s = net.segments[i];
        auto& c = segs[i];
        c.polarity = s.params.polarity;
        c.ra_inv = 1.0 / s.params.r_axial;
        c.rl_inv = 1.0 / s.params.r_leak;
        c.cr = s.params.c_reservoir;
        c.cm = s.params.c_membrane;
        c.rail_drain = s.params.polarity == Polarity::NType ? 0.0 : vdd;
        c.rail_leak = s.params.polarity == Polarity::NType ? vdd : 0.0;
        for (const auto& g : s.gates) {
            CompiledGate cg;
            cg.model = g.model;
            if (const auto* sr = std::get_if<StimulusRef>(&g.source)) {
                cg.from_stimulus = true;
                cg.index = stim_index.at(sr->name);
            } else {
                cg.from_stimulus = false;
                cg.index = seg_index.at(std::get<MembraneNodeRef>(g.source).segment);
            }
            c.gates.push_back(cg);
        }
    }

    std::vector<double> vr(n_seg), vm(n_seg);
    for (std::size_t i = 0; i < n_seg; ++i) vr[i] = vm[i] = segs[i].rail_leak;

    std::vector<double> stim_now(stim_order.size());
    auto eval_stimuli = [&](double t) {
        for (std::size_t i = 0; i < stim_now.size(); ++i)
            stim_now[i] = stimulus_value(*stim_ptr[i], t);
    };

    // Gate voltage seen by gate g of segment i given current state.  A
    // stimulus drives an n-type gate upward from 0 and a p-type gate
    // downward from vdd, matching the output polarity of the complementary
    // segment that would normally sit upstream.
    auto gate_voltage = [&](const CompiledSegment& seg, const CompiledGate& g) {
        if (g.from_stimulus)
            return seg.polarity == Polarity::NType ? stim_now[g.index] : vdd - stim_now[g.index];
        return vm[g.index];
    };

    auto gate_conductance = [&](const CompiledSegment& seg) {
        double g_total = 0.0;
        for (const auto& g : seg.gates)
            g_total += transistor_conductance(gate_voltage(seg, g), g.model, seg.polarity, vdd);
        return g_total;
    };

    const double t0 = 0.0;
    eval_stimuli(t0);

    // Resting operating point: relax each segment onto its DC solution with
    // the gate conductances at the start-of-run drive, iterating because
    // gate voltages depend on upstream membranes.
    for (int iter = 0; iter < 64; ++iter) {
        double max_delta = 0.0;
        for (std::size_t i = 0; i < n_seg; ++i) {
            const auto& c = segs[i];
            const double g = gate_conductance(c);
            const TwoByTwo a{g + c.ra_inv, -c.ra_inv, -c.ra_inv, c.ra_inv + c.rl_inv};
            double nvr = 0.0, nvm = 0.0;
            a.solve(g * c.rail_drain, c.rl_inv * c.rail_leak, nvr, nvm);
            max_delta = std::max({max_delta, std::abs(nvr - vr[i]), std::abs(nvm - vm[i])});
            vr[i] = nvr;
            vm[i] = nvm;
        }
        if (max_delta < 1e-12 * vdd) break;
    }

    const auto total_steps = static_cast<std::size_t>(std::llround(cfg.duration / cfg.dt));
    const std::size_t stride = static_cast<std::size_t>(cfg.record_stride);
    const std::size_t n_rec = total_steps / stride + 1;

    std::vector<std::vector<double>> rec_stim(stim_order.size());
    std::vector<std::vector<double>> rec_vr(n_seg), rec_vm(n_seg);
    for (auto& v : rec_stim) v.reserve(n_rec);
    for (auto& v : rec_vr) v.reserve(n_rec);
    for (auto& v : rec_vm) v.reserve(n_rec);

    auto record = [&]() {
        for (std::size_t i = 0; i < stim_now.size(); ++i) rec_stim[i].push_back(stim_now[i]);
        for (std::size_t i = 0; i < n_seg; ++i) {
            rec_vr[i].push_back(vr[i]);
            rec_vm[i].push_back(vm[i]);
        }
    };

    auto check_guard = [&](double t) {
        for (std::size_t i = 0; i < n_seg; ++i) {
            if (!within_guard_band(vr[i], 0.0, vdd))
                throw SimulationError("simulation diverged at node " +
                                          reservoir_channel(net.segments[i].name) + ", t=" +
                                          std::to_string(t),
                                      t, reservoir_channel(net.segments[i].name));
            if (!within_guard_band(vm[i], 0.0, vdd))
                throw SimulationError("simulation diverged at node " +
                                          membrane_channel(net.segments[i].name) + ", t=" +
                                          std::to_string(t),
                                      t, membrane_channel(net.segments[i].name));
        }
    };

    record();

    const double dt = cfg.dt;
    const bool trapezoidal = cfg.method == Method::Trapezoidal;
    std::vector<double> g_step(n_seg);

    for (std::size_t step = 1; step <= total_steps; ++step) {
        const double t_prev = t0 + dt * static_cast<double>(step - 1);
        const double t_next = t_prev + dt;

        // Conductances frozen at the previous accepted step.
        eval_stimuli(t_prev);
        for (std::size_t i = 0; i < n_seg; ++i) g_step[i] = gate_conductance(segs[i]);

        for (std::size_t i = 0; i < n_seg; ++i) {
            const auto& c = segs[i];
            const double g = g_step[i];
            double nvr = 0.0, nvm = 0.0;
            if (!trapezoidal) {
                const TwoByTwo a{c.cr / dt + g + c.ra_inv, -c.ra_inv, -c.ra_inv,
                                 c.cm / dt + c.ra_inv + c.rl_inv};
                a.solve(c.cr / dt * vr[i] + g * c.rail_drain,
                        c.cm / dt * vm[i] + c.rl_inv * c.rail_leak, nvr, nvm);
            } else {
                const double h = dt / 2.0;
                const double fr = g * (c.rail_drain - vr[i]) + (vm[i] - vr[i]) * c.ra_inv;
                const double fm = (vr[i] - vm[i]) * c.ra_inv + (c.rail_leak - vm[i]) * c.rl_inv;
                const TwoByTwo a{c.cr / h + g + c.ra_inv, -c.ra_inv, -c.ra_inv,
                                 c.cm / h + c.ra_inv + c.rl_inv};
                a.solve(c.cr / h * vr[i] + fr + g * c.rail_drain,
                        c.cm / h * vm[i] + fm + c.rl_inv * c.rail_leak, nvr, nvm);
            }
            vr[i] = nvr;
            vm[i] = nvm;
        }

        check_guard(t_next);

        if (step % stride == 0) {
            eval_stimuli(t_next);
            record();
        }
    }

    Trace trace(dt * static_cast<double>(stride), t0);
    for (std::size_t i = 0; i < stim_order.size(); ++i)
        trace.add_channel(stim_order[i], std::move(rec_stim[i]));
    for (std::size_t i = 0; i < n_seg; ++i) {
        trace.add_channel(reservoir_channel(net.segments[i].name), std::move(rec_vr[i]));
        trace.add_channel(membrane_channel(net.segments[i].name), std::move(rec_vm[i]));
    }
    return trace;
}

Trace simulate_passive_chain(int n_stages, double r_axial, double r_leak, double c_membrane,
                             const Stimulus& stimulus, const SimConfig& cfg) {
    require(n_stages >= 1, "passive chain: n_stages must be >= 1");
    require(r_axial > 0 && r_leak > 0 && c_membrane > 0, "passive chain: components must be positive");
    validate(stimulus);
    validate(cfg);

    const auto n = static_cast<std::size_t>(n_stages);
    const double ga = 1.0 / r_axial;
    const double gl = 1.0 / r_leak;
    const double dt = cfg.dt;
    const bool trapezoidal = cfg.method == Method::Trapezoidal;

    // Node conductance matrix G (tridiagonal): stage 0 also sees the source
    // resistance; the last stage has no right neighbour.
    std::vector<double> diag(n), off(n > 1 ? n - 1 : 0);
    for (std::size_t k = 0; k < n; ++k) {
        double d = gl + ga; // left link (source resistance for stage 0)
        if (k + 1 < n) d += ga;
        diag[k] = d;
    }
    for (auto& o : off) o = -ga;

    std::vector<double> v(n, 0.0), rhs(n), x(n);
    // Thomas algorithm scratch.
    std::vector<double> cp(n), dp(n);

    const double h = trapezoidal ? dt / 2.0 : dt;
    auto solve_step = [&]() {
        // (C/h + G) x = rhs with rhs already assembled.
        cp[0] = off.empty() ? 0.0 : off[0] / (c_membrane / h + diag[0]);
        dp[0] = rhs[0] / (c_membrane / h + diag[0]);
        for (std::size_t k = 1; k < n; ++k) {
            const double m = c_membrane / h + diag[k] - off[k - 1] * cp[k - 1];
            cp[k] = (k + 1 < n) ? off[k] / m : 0.0;
            dp[k] = (rhs[k] - off[k - 1] * dp[k - 1]) / m;
        }
        x[n - 1] = dp[n - 1];
        for (std::size_t k = n - 1; k-- > 0;) x[k] = dp[k] - cp[k] * x[k + 1];
    };

    const auto total_steps = static_cast<std::size_t>(std::llround(cfg.duration / cfg.dt));
    const auto stride = static_cast<std::size_t>(cfg.record_stride);

    std::vector<double> rec_in;
    std::vector<std::vector<double>> rec(n);

    double stim_max = 0.0;
    auto record = [&](double t) {
        rec_in.push_back(stimulus_value(stimulus, t));
        for (std::size_t k = 0; k < n; ++k) rec[k].push_back(v[k]);
    };
    record(0.0);

    for (std::size_t step = 1; step <= total_steps; ++step) {
        const double t_prev = dt * static_cast<double>(step - 1);
        const double t_next = t_prev + dt;
        const double s_next = stimulus_value(stimulus, t_next);
        stim_max = std::max({stim_max, std::abs(s_next)});

        if (!trapezoidal) {
            for (std::size_t k = 0; k < n; ++k) rhs[k] = c_membrane / dt * v[k];
            rhs[0] += ga * s_next;
        } else {
            const double s_prev = stimulus_value(stimulus, t_prev);
            // rhs = C/h v + f(v, t_prev) + b(t_next)
            for (std::size_t k = 0; k < n; ++k) {
                double f = -diag[k] * v[k];
                if (k > 0) f += ga * v[k - 1];
                if (k + 1 < n) f += ga * v[k + 1];
                if (k == 0) f += ga * s_prev;
                rhs[k] = c_membrane / h * v[k] + f;
            }
            rhs[0] += ga * s_next;
        }
        solve_step();
        v = x;

        for (std::size_t k = 0; k < n; ++k)
            if (!within_guard_band(v[k], 0.0, stim_max))
                throw SimulationError("passive chain diverged at stage" + std::to_string(k) +
                                          ", t=" + std::to_string(t_next),
                                      t_next, "stage" + std::to_string(k));

        if (step % stride == 0) record(t_next);
    }

    Trace trace(dt * static_cast<double>(stride), 0.0);
    trace.add_channel("in", std::move(rec_in));
    for (std::size_t k = 0; k < n; ++k)
        trace.add_channel("stage" + std::to_string(k), std::move(rec[k]));
    return trace;
}

} // namespace dendrite
