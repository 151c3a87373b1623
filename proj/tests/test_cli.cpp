#include "dendrite/csv.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

// End-to-end checks of the command-line tool; the binary path and the data
// directory come from the build system.

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code;
    std::string output; // stdout + stderr
};

RunResult run(const std::string& args) {
    const fs::path out = fs::temp_directory_path() / "dendrite_cli_out.txt";
    const std::string cmd =
        std::string(DENDRITE_CLI_PATH) + " " + args + " > " + out.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    std::ifstream in(out);
    std::stringstream ss;
    ss << in.rdbuf();
    return {WEXITSTATUS(status), ss.str()};
}

const std::string kFig1b = std::string(DENDRITE_TEST_DATA) + "/fig1b.net";

} // namespace

TEST_CASE("simulate writes a trace whose membrane dips and recovers") {
    const fs::path csv_path = fs::temp_directory_path() / "fig1b_trace.csv";
    const auto r = run("simulate " + kFig1b + " --duration 0.02 --out " + csv_path.string());
    CHECK(r.exit_code == 0);

    std::ifstream in(csv_path);
    REQUIRE(in.good());
    const dendrite::Trace trace = dendrite::csv::read_trace(in);
    REQUIRE(trace.has_channel("d1.vm"));
    const auto& vm = trace.channel("d1.vm");
    double min_v = 5.0;
    for (double v : vm) min_v = std::min(min_v, v);
    CHECK(min_v < 4.0);
    CHECK(vm.back() > 4.9);
}

TEST_CASE("simulate output is bit-identical across runs") {
    const fs::path a = fs::temp_directory_path() / "trace_a.csv";
    const fs::path b = fs::temp_directory_path() / "trace_b.csv";
    REQUIRE(run("simulate " + kFig1b + " --duration 0.005 --out " + a.string()).exit_code == 0);
    REQUIRE(run("simulate " + kFig1b + " --duration 0.005 --out " + b.string()).exit_code == 0);
    std::ifstream fa(a), fb(b);
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    CHECK(sa.str() == sb.str());
    CHECK(sa.str().rfind("time_s,", 0) == 0);
}

TEST_CASE("missing netlist exits with code 1") {
    const auto r = run("simulate /no/such/file.net");
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("/no/such/file.net") != std::string::npos);
}

TEST_CASE("netlist errors are positioned and exit with code 1") {
    const fs::path bad = fs::temp_directory_path() / "bad.net";
    std::ofstream(bad) << "vdd 5\nseg d1 n ra=1k rl=1k cr=1u cm=1u gate=nosuch\n";
    const auto r = run("simulate " + bad.string());
    CHECK(r.exit_code == 1);
    CHECK(r.output.find(":2:") != std::string::npos);
    CHECK(r.output.find("nosuch") != std::string::npos);
}

TEST_CASE("analyze computes metrics from trace csvs") {
    const fs::path csv_path = fs::temp_directory_path() / "analyze_trace.csv";
    REQUIRE(run("simulate " + kFig1b + " --duration 0.02 --out " + csv_path.string()).exit_code ==
            0);

    SUBCASE("delay of a channel against itself is zero") {
        const auto r = run("analyze " + csv_path.string() +
                           " --in-channel s1 --out-channel s1 --metric delay");
        CHECK(r.exit_code == 0);
        CHECK(r.output == "0\n");
    }
    SUBCASE("membrane delay is on the millisecond scale") {
        const auto r = run("analyze " + csv_path.string() +
                           " --in-channel s1 --out-channel d1.vm --metric delay");
        CHECK(r.exit_code == 0);
        CHECK(std::stod(r.output) > 1e-3);
    }
    SUBCASE("spike count on the membrane dip") {
        const auto r = run("analyze " + csv_path.string() +
                           " --in-channel s1 --out-channel d1.vm --metric spikes"
                           " --rest-out 5 --threshold 0.4");
        CHECK(r.exit_code == 0);
        CHECK(r.output == "1\n");
    }
    SUBCASE("missing channel exits with code 1") {
        const auto r = run("analyze " + csv_path.string() +
                           " --in-channel s1 --out-channel ghost --metric gain");
        CHECK(r.exit_code == 1);
    }
    SUBCASE("malformed csv exits with code 1") {
        const fs::path junk = fs::temp_directory_path() / "junk.csv";
        std::ofstream(junk) << "definitely,not,a,trace\n1,2\n";
        const auto r = run("analyze " + junk.string() +
                           " --in-channel a --out-channel b --metric delay");
        CHECK(r.exit_code == 1);
    }
}

TEST_CASE("unknown reproduce target exits with code 1") {
    const auto r = run("reproduce fig99 --out " +
                       (fs::temp_directory_path() / "repro_none").string());
    CHECK(r.exit_code == 1);
}

TEST_CASE("reproduce fig1f writes the overlay and a manifest") {
    const fs::path dir = fs::temp_directory_path() / "repro_fig1f";
    fs::remove_all(dir);
    const auto r = run("reproduce fig1f --out " + dir.string());
    CHECK(r.exit_code == 0);
    CHECK(fs::exists(dir / "fig1f_overlay.csv"));
    REQUIRE(fs::exists(dir / "manifest.txt"));
    std::ifstream manifest(dir / "manifest.txt");
    std::stringstream ss;
    ss << manifest.rdbuf();
    CHECK(ss.str().find("fig1f_overlay.csv") != std::string::npos);
}
