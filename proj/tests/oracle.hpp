#pragma once

// Test-only reference integrators, independent of the library's analytic
// and transient solvers.  The free-response oracle integrates the governing
// second-order equation for the reservoir voltage with fixed-step RK4 and
// recovers the membrane voltage from v_M = v_R + R_A C_R dv_R/dt; no
// characteristic roots or implicit stepping are involved.

#include "dendrite/core.hpp"

#include <array>
#include <cstddef>
#include <vector>

namespace oracle {

template <std::size_t N, typename F>
std::vector<std::array<double, N>> rk4(F&& f, std::array<double, N> y, double dt,
                                       std::size_t steps) {
    std::vector<std::array<double, N>> out;
    out.reserve(steps + 1);
    out.push_back(y);
    auto blend = [](const std::array<double, N>& a, const std::array<double, N>& b, double s) {
        std::array<double, N> r{};
        for (std::size_t i = 0; i < N; ++i) r[i] = a[i] + s * b[i];
        return r;
    };
    for (std::size_t k = 0; k < steps; ++k) {
        const auto k1 = f(y);
        const auto k2 = f(blend(y, k1, dt / 2));
        const auto k3 = f(blend(y, k2, dt / 2));
        const auto k4 = f(blend(y, k3, dt));
        for (std::size_t i = 0; i < N; ++i)
            y[i] += dt / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        out.push_back(y);
    }
    return out;
}

struct FreeResponse {
    std::vector<double> v_r;
    std::vector<double> v_m;
    double dt = 0;
};

/// Free response of a charged segment in deviation coordinates:
/// v_R(0) = v0, v_M(0) = 0.
inline FreeResponse free_response(const dendrite::SegmentParams& p, double v0, double dt,
                                  std::size_t steps) {
    const double a = p.r_axial * p.c_reservoir * p.c_membrane;
    const double b = p.c_reservoir + p.c_membrane + p.c_reservoir * p.r_axial / p.r_leak;
    const double c = 1.0 / p.r_leak;
    const double rc = p.r_axial * p.c_reservoir;
    auto f = [&](const std::array<double, 2>& y) {
        return std::array<double, 2>{y[1], -(b * y[1] + c * y[0]) / a};
    };
    const auto ys = rk4<2>(f, {v0, -v0 / rc}, dt, steps);
    FreeResponse out;
    out.dt = dt;
    out.v_r.reserve(ys.size());
    out.v_m.reserve(ys.size());
    for (const auto& y : ys) {
        out.v_r.push_back(y[0]);
        out.v_m.push_back(y[0] + rc * y[1]);
    }
    return out;
}

/// Passive ladder reference: n nodes, stimulus through a source resistance
/// of r_axial, rest rail at 0.
inline std::vector<std::vector<double>> ladder_response(int n, double r_axial, double r_leak,
                                                        double c,
                                                        const dendrite::Stimulus& stim,
                                                        double dt, std::size_t steps) {
    const double ga = 1.0 / r_axial;
    const double gl = 1.0 / r_leak;
    std::vector<std::vector<double>> out(static_cast<std::size_t>(n));
    std::vector<double> v(static_cast<std::size_t>(n), 0.0);
    for (auto& ch : out) ch.push_back(0.0);
    auto deriv = [&](const std::vector<double>& y, double t) {
        std::vector<double> d(y.size());
        for (std::size_t k = 0; k < y.size(); ++k) {
            double i = -gl * y[k];
            i += ga * ((k == 0 ? dendrite::stimulus_value(stim, t) : y[k - 1]) - y[k]);
            if (k + 1 < y.size()) i += ga * (y[k + 1] - y[k]);
            d[k] = i / c;
        }
        return d;
    };
    for (std::size_t s = 0; s < steps; ++s) {
        const double t = dt * static_cast<double>(s);
        const auto k1 = deriv(v, t);
        std::vector<double> y2(v), y3(v), y4(v);
        for (std::size_t i = 0; i < v.size(); ++i) y2[i] += dt / 2 * k1[i];
        const auto k2 = deriv(y2, t + dt / 2);
        for (std::size_t i = 0; i < v.size(); ++i) y3[i] += dt / 2 * k2[i];
        const auto k3 = deriv(y3, t + dt / 2);
        for (std::size_t i = 0; i < v.size(); ++i) y4[i] += dt * k3[i];
        const auto k4 = deriv(y4, t + dt);
        for (std::size_t i = 0; i < v.size(); ++i)
            v[i] += dt / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        for (std::size_t k = 0; k < v.size(); ++k) out[k].push_back(v[k]);
    }
    return out;
}

} // namespace oracle
