#include "dendrite/measure.hpp"

#include "dendrite/transient.hpp"

#include <doctest.h>

#include <cmath>

using namespace dendrite;

namespace {

Trace make_trace(std::vector<std::pair<std::string, std::vector<double>>> channels,
                 double dt = 1e-3) {
    Trace t(dt, 0.0);
    for (auto& [name, data] : channels) t.add_channel(name, std::move(data));
    return t;
}

Trace saturating_ntype_trace(double amplitude) {
    Network net;
    net.vdd = 5.0;
    SegmentInstance seg;
    seg.name = "d1";
    seg.params = SegmentParams{Polarity::NType, 1e3, 1e3, 1e-6, 1e-6};
    seg.gates.push_back(GateInput{default_transistor(Polarity::NType), StimulusRef{"in"}});
    net.segments.push_back(seg);
    std::map<std::string, Stimulus> stims{{"in", SquarePulse{amplitude, 2e-3, 1e-3}}};
    SimConfig cfg;
    cfg.duration = 20e-3;
    return simulate(net, stims, cfg);
}

} // namespace

TEST_CASE("peak of a constant channel is at the start with zero magnitude") {
    const auto t = make_trace({{"a", {1.0, 1.0, 1.0, 1.0}}});
    const auto p = peak(t, "a", 1.0);
    CHECK(p.magnitude == 0.0);
    CHECK(p.t_peak == 0.0);
}

TEST_CASE("ties break to the earliest peak") {
    const auto t = make_trace({{"a", {0.0, 2.0, 1.0, 2.0, 0.0}}});
    const auto p = peak(t, "a", 0.0);
    CHECK(p.magnitude == 2.0);
    CHECK(p.t_peak == doctest::Approx(1e-3));
}

TEST_CASE("peak uses the absolute deviation from rest") {
    const auto t = make_trace({{"a", {5.0, 4.0, 2.5, 4.5, 5.0}}});
    const auto p = peak(t, "a", 5.0);
    CHECK(p.magnitude == doctest::Approx(2.5));
    CHECK(p.rest == 5.0);
}

TEST_CASE("peak rejects unknown and empty channels") {
    const auto t = make_trace({{"a", {}}});
    CHECK_THROWS_AS(peak(t, "missing", 0.0), std::out_of_range);
    CHECK_THROWS_AS(peak(t, "a", 0.0), std::invalid_argument);
}

TEST_CASE("delay of identical channels is zero") {
    const auto t = make_trace({{"a", {0.0, 1.0, 0.0}}, {"b", {0.0, 1.0, 0.0}}});
    const auto d = delay(t, "a", "b", 0.0, 0.0, 0.1);
    REQUIRE(d.has_value());
    CHECK(*d == 0.0);
}

TEST_CASE("delay is undefined below the measurability floor") {
    const auto t = make_trace({{"a", {0.0, 1.0, 0.0}}, {"b", {0.0, 0.01, 0.0}}});
    CHECK(!delay(t, "a", "b", 0.0, 0.0, 0.1).has_value());
}

TEST_CASE("delay is antisymmetric when both directions are measurable") {
    const auto t = make_trace({{"a", {0.0, 1.0, 0.0, 0.0}}, {"b", {0.0, 0.0, 0.8, 0.0}}});
    const auto ab = delay(t, "a", "b", 0.0, 0.0, 0.1);
    const auto ba = delay(t, "b", "a", 0.0, 0.0, 0.1);
    REQUIRE(ab.has_value());
    REQUIRE(ba.has_value());
    CHECK(*ab == doctest::Approx(-*ba));
    CHECK(*ab == doctest::Approx(1e-3));
}

TEST_CASE("a saturating n-type segment shows a millisecond-scale delay") {
    const Trace trace = saturating_ntype_trace(5.0);
    const auto d = delay(trace, "in", "d1.vm", 0.0, 5.0, 0.02 * 5.0);
    REQUIRE(d.has_value());
    CHECK(*d > 1e-3);
    CHECK(*d < 10e-3);
}

TEST_CASE("sub-threshold input leaves the delay undefined") {
    const Trace trace = saturating_ntype_trace(1.2);
    CHECK(!delay(trace, "in", "d1.vm", 0.0, 5.0, 0.02 * 5.0).has_value());
}

TEST_CASE("gain measures deviation ratios") {
    const auto t = make_trace({{"a", {0.0, 1.0, 0.0}}, {"b", {0.0, 1.0, 0.0}}});
    CHECK(gain(t, "a", "b", 0.0, 0.0) == doctest::Approx(1.0));

    const auto inv = make_trace({{"a", {0.0, 2.0, 0.0}}, {"b", {5.0, 2.0, 5.0}}});
    CHECK(gain(inv, "a", "b", 0.0, 5.0) == doctest::Approx(1.5)); // polarity ignored

    const auto zero = make_trace({{"a", {0.0, 0.0}}, {"b", {0.0, 1.0}}});
    CHECK_THROWS_AS(gain(zero, "a", "b", 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("sub-threshold gain is negligible") {
    const Trace trace = saturating_ntype_trace(1.2);
    CHECK(gain(trace, "in", "d1.vm", 0.0, 5.0) < 0.02);
}

TEST_CASE("spike counting") {
    const double vdd = 5.0;
    SUBCASE("constant channel") {
        const auto t = make_trace({{"a", std::vector<double>(10, 0.0)}});
        CHECK(count_spikes(t, "a", 0.0, vdd) == 0);
    }
    SUBCASE("single spike") {
        const auto t = make_trace({{"a", {0.0, 1.0, 3.0, 1.0, 0.0}}});
        CHECK(count_spikes(t, "a", 0.0, vdd) == 1);
    }
    SUBCASE("spikes separated beyond the refractory window count separately") {
        std::vector<double> v(20, 0.0);
        v[2] = 3.0;
        v[12] = 3.0;
        const auto t = make_trace({{"a", v}}); // dt 1 ms, spikes 10 ms apart
        CHECK(count_spikes(t, "a", 0.0, vdd, 0.5, 2e-3) == 2);
    }
    SUBCASE("crossings inside the refractory window merge") {
        std::vector<double> v(20, 0.0);
        v[2] = 3.0;
        v[4] = 3.0;
        const auto t = make_trace({{"a", v}});
        CHECK(count_spikes(t, "a", 0.0, vdd, 0.5, 5e-3) == 1);
    }
    SUBCASE("sub-threshold samples never change the count") {
        std::vector<double> v{0.0, 3.0, 0.0};
        const auto base = make_trace({{"a", v}});
        const int n = count_spikes(base, "a", 0.0, vdd);
        v.insert(v.end(), {0.3, 0.9, 1.1, 0.0, 2.4});
        const auto extended = make_trace({{"a", v}});
        CHECK(count_spikes(extended, "a", 0.0, vdd) == n);
    }
    SUBCASE("threshold fraction bounds") {
        const auto t = make_trace({{"a", {0.0}}});
        CHECK_THROWS_AS(count_spikes(t, "a", 0.0, vdd, 0.0, 1e-3), std::invalid_argument);
        CHECK_THROWS_AS(count_spikes(t, "a", 0.0, vdd, 1.0, 1e-3), std::invalid_argument);
    }
}

TEST_CASE("response curve evaluates every separation in order") {
    auto runner = [](double sep) {
        Trace t(1e-3, 0.0);
        t.add_channel("out", {0.0, 1.0 - std::abs(sep - 2e-3) * 100.0, 0.0});
        return t;
    };
    SUBCASE("single point") {
        const auto curve = response_curve(runner, {1e-3}, "out", 0.0);
        REQUIRE(curve.size() == 1);
        CHECK(curve[0].first == 1e-3);
    }
    SUBCASE("ordering preserved and values correct") {
        const std::vector<double> seps{0.0, 1e-3, 2e-3, 3e-3};
        const auto curve = response_curve(runner, seps, "out", 0.0);
        REQUIRE(curve.size() == 4);
        for (std::size_t i = 0; i < seps.size(); ++i) CHECK(curve[i].first == seps[i]);
        CHECK(curve[2].second == doctest::Approx(1.0));
    }
    SUBCASE("empty separations are rejected") {
        CHECK_THROWS_AS(response_curve(runner, {}, "out", 0.0), std::invalid_argument);
    }
}

TEST_CASE("identical branches respond symmetrically to input swap") {
    // Two equal passive branches summed; swapping which branch leads is the
    // same as negating the separation.
    auto run_pair = [](double lead_first, double lead_second) {
        SimConfig cfg;
        cfg.duration = 10e-3;
        const Stimulus a = SquarePulse{1.0, 1e-3, lead_first};
        const Stimulus b = SquarePulse{1.0, 1e-3, lead_second};
        const Trace ta = simulate_passive_chain(2, 500.0, 1e3, 1e-6, a, cfg);
        const Trace tb = simulate_passive_chain(2, 500.0, 1e3, 1e-6, b, cfg);
        double best = 0;
        for (std::size_t i = 0; i < ta.sample_count(); ++i)
            best = std::max(best, ta.channel("stage1")[i] + tb.channel("stage1")[i]);
        return best;
    };
    const double sep = 1.5e-3;
    CHECK(run_pair(1e-3, 1e-3 + sep) == doctest::Approx(run_pair(1e-3 + sep, 1e-3)));
}
