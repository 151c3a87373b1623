#include "dendrite/experiments.hpp"

#include "dendrite/netlist.hpp"

#include <doctest.h>

#include <set>
#include <sstream>

using namespace dendrite;
using namespace dendrite::experiments;

namespace {

const SegmentInstance& find_segment(const Network& net, const std::string& name) {
    for (const auto& s : net.segments)
        if (s.name == name) return s;
    throw std::out_of_range(name);
}

std::set<std::string> stimulus_names_for(const DetectorBuild& b) {
    return {b.input_long, b.input_short};
}

} // namespace

TEST_CASE("detector component values per variant") {
    const auto a = build_sound_localisation(DetectorVariant::A);
    CHECK(find_segment(a.network, "n1").params.r_axial == doctest::Approx(1.42e3));
    CHECK(find_segment(a.network, "n1").params.r_leak == doctest::Approx(1.94e3));

    const auto b = build_sound_localisation(DetectorVariant::B);
    CHECK(find_segment(b.network, "n1").params.r_axial == doctest::Approx(2.18e3));
    CHECK(find_segment(b.network, "n1").params.r_leak == doctest::Approx(5.34e3));

    const auto c = build_sound_localisation(DetectorVariant::C);
    CHECK(find_segment(c.network, "n1").params.r_axial == doctest::Approx(2.7e3));
    CHECK(find_segment(c.network, "n1").params.r_leak == doctest::Approx(8.89e3));

    for (const auto& build : {a, b, c}) {
        const auto& p1 = find_segment(build.network, "p1");
        CHECK(p1.params.r_axial == doctest::Approx(13.0));
        CHECK(p1.params.r_leak == doctest::Approx(1e3));
        REQUIRE(p1.gates.size() == 2); // spatial integration onto one reservoir
        for (const auto& seg : build.network.segments) {
            CHECK(seg.params.c_reservoir == 1e-6);
            CHECK(seg.params.c_membrane == 1e-6);
        }
    }
}

TEST_CASE("detector networks validate and round-trip") {
    for (auto variant : {DetectorVariant::A, DetectorVariant::B, DetectorVariant::C}) {
        const auto build = build_sound_localisation(variant);
        CHECK_NOTHROW(validate(build.network, stimulus_names_for(build)));

        std::map<std::string, Stimulus> stims{
            {build.input_long, SquarePulse{1.7, 2e-3, 1e-3}},
            {build.input_short, SquarePulse{1.7, 2e-3, 1e-3}}};
        const auto text = netlist::serialize(build.network, stims, {build.probe});
        const auto reparsed = netlist::parse(text);
        REQUIRE(reparsed.ok());
        CHECK(reparsed.network == build.network);
        CHECK(reparsed.stimuli == stims);
    }
    // the published values surface in the serialized text
    const auto b = build_sound_localisation(DetectorVariant::B);
    std::map<std::string, Stimulus> stims{{b.input_long, SquarePulse{1.7, 2e-3, 1e-3}},
                                          {b.input_short, SquarePulse{1.7, 2e-3, 1e-3}}};
    const auto text = netlist::serialize(b.network, stims, {});
    CHECK(text.find("ra=2.18k") != std::string::npos);
}

TEST_CASE("bursting ring structure and values") {
    const Network net = build_bursting_neuron(231.0);
    REQUIRE(net.segments.size() == 8);

    const auto& n1 = find_segment(net, "n1");
    CHECK(n1.params.r_axial == 220.0);
    CHECK(n1.params.r_leak == 1000.0);
    CHECK(n1.params.c_reservoir == doctest::Approx(3.3e-9));
    CHECK(n1.params.c_membrane == doctest::Approx(3.3e-9));

    const auto& p2 = find_segment(net, "p2");
    CHECK(p2.params.r_leak == 377.0);
    CHECK(p2.params.c_reservoir == doctest::Approx(22e-9));

    CHECK(find_segment(net, "n3").params.r_leak == 220.0);
    CHECK(find_segment(net, "p4").params.r_leak == 438.0);
    CHECK(find_segment(net, "n5").params.r_leak == 187.0);
    CHECK(find_segment(net, "p6").params.r_leak == 390.0);
    CHECK(find_segment(net, "n7").params.r_leak == 220.0);
    CHECK(find_segment(net, "p8").params.r_leak == 231.0);

    // chained gate-to-membrane with the feedback tap closing the ring on n1
    REQUIRE(n1.gates.size() == 2);
    CHECK(std::get<StimulusRef>(n1.gates[0].source).name == "in");
    CHECK(std::get<MembraneNodeRef>(n1.gates[1].source).segment == "p8");
    CHECK(std::get<MembraneNodeRef>(find_segment(net, "p8").gates[0].source).segment == "n7");

    CHECK_NOTHROW(validate(net, {"in"}));
    CHECK_THROWS_AS(build_bursting_neuron(0.0), std::invalid_argument);

    std::map<std::string, Stimulus> stims{{"in", SquarePulse{5.0, 5e-6, 50e-6}}};
    const auto reparsed = netlist::parse(netlist::serialize(net, stims, {}));
    REQUIRE(reparsed.ok());
    CHECK(reparsed.network == net);
}

TEST_CASE("separation grid covers the sweep inclusively") {
    const auto grid = separation_grid(LocalisationProtocol{});
    REQUIRE(grid.size() == 41);
    CHECK(grid.front() == 0.0);
    CHECK(grid.back() == doctest::Approx(10e-3));
}

TEST_CASE("passive baseline: one curve per branch resistance") {
    PassiveBaselineProtocol proto;
    proto.sep_stop = 1e-3;
    proto.sep_step = 0.5e-3;
    proto.duration = 10e-3;
    CHECK(run_passive_localisation_baseline({1000.0}, proto).size() == 1);
    CHECK_THROWS_AS(run_passive_localisation_baseline({}, proto), std::invalid_argument);
}

TEST_CASE("passive coincidence pair: more branch resistance means later, smaller peaks") {
    PassiveBaselineProtocol proto;
    proto.sep_step = 0.5e-3;
    const auto curves = run_passive_localisation_baseline({500.0, 2500.0}, proto);
    REQUIRE(curves.size() == 2);
    auto argmax = [](const std::vector<std::pair<double, double>>& c) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < c.size(); ++i)
            if (c[i].second > c[best].second) best = i;
        return best;
    };
    const auto fast = argmax(curves[0]);
    const auto slow = argmax(curves[1]);
    CHECK(curves[1][slow].first > curves[0][fast].first);   // peak shifts to larger separation
    CHECK(curves[1][slow].second < curves[0][fast].second); // and is attenuated
}

TEST_CASE("characterisation tables are deterministic") {
    const auto a = csv::to_string(run_characterisation(Characterisation::SpatialIntegration));
    const auto b = csv::to_string(run_characterisation(Characterisation::SpatialIntegration));
    CHECK(a == b);
    CHECK(a.find("mode,offset_s,peak_v") == 0);
}

TEST_CASE("free response overlay agrees with itself") {
    FreeResponseProtocol p;
    p.v0 = {0.4};
    p.span = 5e-3;
    const auto table = run_free_response_overlay(p);
    REQUIRE(table.header.size() == 3);
    double worst = 0;
    for (const auto& row : table.rows) {
        const double analytic = std::get<double>(row[1]);
        const double sim = std::get<double>(row[2]);
        worst = std::max(worst, std::abs(analytic - sim));
    }
    CHECK(worst < 0.01 * 0.4 + 5e-3);
}

TEST_CASE("csv table quoting and formatting") {
    csv::Table t;
    t.header = {"name", "value"};
    t.rows.push_back({csv::Cell{std::string("plain")}, csv::Cell{1.5}});
    t.rows.push_back({csv::Cell{std::string("with,comma")}, csv::Cell{static_cast<long long>(3)}});
    t.rows.push_back({csv::Cell{std::string("with\"quote")}, csv::Cell{0.1}});
    const auto text = csv::to_string(t);
    CHECK(text == "name,value\n"
                  "plain,1.5\n"
                  "\"with,comma\",3\n"
                  "\"with\"\"quote\",0.1\n");
}

TEST_CASE("trace csv round trip") {
    Trace t(1e-6, 0.0);
    t.add_channel("a", {0.0, 0.5, 1.0});
    t.add_channel("b", {5.0, 4.0, 3.5});
    const auto table = csv::trace_table(t);
    std::stringstream ss(csv::to_string(table));
    const Trace back = csv::read_trace(ss);
    CHECK(back.dt() == t.dt());
    CHECK(back.channel("a") == t.channel("a"));
    CHECK(back.channel("b") == t.channel("b"));

    std::stringstream bad("x,y\n1,2\n");
    CHECK_THROWS(csv::read_trace(bad));
    std::stringstream malformed("time_s,a\n0,not_a_number\n");
    CHECK_THROWS(csv::read_trace(malformed));
}
