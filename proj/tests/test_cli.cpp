// End-to-end checks of the installed binary: flag handling, exit codes and
// file output, via std::system.
#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

int run(const std::string& args) {
    const std::string cmd = std::string(NHSCATTER_BIN) + " " + args + " >cli_stdout.txt 2>cli_stderr.txt";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

const char* kDeltaConfig = R"json({
  "channels": 1,
  "window": [0, 0],
  "potential": [{"type": "delta", "position": 0, "strength": [[2]]}],
  "energies": {"list": [1.0, 4.0]}
})json";

}  // namespace

TEST_CASE("cli: scatter on a real delta") {
    spit("cli_delta.json", kDeltaConfig);
    CHECK(run("scatter --config cli_delta.json --energy 1.0") == 0);
    const std::string out = slurp("cli_stdout.txt");
    CHECK(out.find("t1_00_re") != std::string::npos);
    CHECK(out.find(",ok") != std::string::npos);
    // T1 = 0.5 somewhere in the row
    CHECK(out.find("0.5") != std::string::npos);
}

TEST_CASE("cli: scatter at a spectral singularity exits 3 but writes the record") {
    spit("cli_sing.json", R"json({
      "channels": 1,
      "window": [0, 0],
      "potential": [{"type": "delta", "position": 0, "strength": [[[0, 2]]]}]
    })json");
    CHECK(run("scatter --config cli_sing.json --energy 1.0") == 3);
    CHECK(slurp("cli_stdout.txt").find("singular") != std::string::npos);
}

TEST_CASE("cli: scan with linspace over an empty potential") {
    spit("cli_free.json", R"json({
      "channels": 1,
      "window": [0, 1],
      "potential": [],
      "energies": {"linspace": {"start": 0.5, "stop": 2.0, "count": 4}}
    })json");
    CHECK(run("scan --config cli_free.json") == 0);
    const std::string out = slurp("cli_stdout.txt");
    std::istringstream is(out);
    std::string line;
    std::getline(is, line);  // header
    std::size_t rows = 0;
    while (std::getline(is, line)) {
        ++rows;
        std::istringstream ls(line);
        std::string cell;
        for (int c = 0; c <= 3; ++c) std::getline(ls, cell, ',');
        CHECK(std::strtod(cell.c_str(), nullptr) == Catch::Approx(1.0).epsilon(1e-12));
    }
    CHECK(rows == 4);
}

TEST_CASE("cli: config errors exit 2") {
    spit("cli_bad.json", R"json({"channels": 1, "window": [0, 1], "potential": [], "bogus": 1})json");
    CHECK(run("scan --config cli_bad.json") == 2);
    CHECK(run("scan --config does_not_exist.json") == 2);
    // missing energies section
    spit("cli_none.json", R"json({"channels": 1, "window": [0, 1], "potential": []})json");
    CHECK(run("scan --config cli_none.json") == 2);
}

TEST_CASE("cli: evolve free packet keeps the norm") {
    spit("cli_evolve.json", R"json({
      "channels": 1,
      "window": [0, 4],
      "potential": [],
      "evolve": {"box_length": 4, "points": 128, "dt": 0.001, "steps": 60,
                 "psi_r": {"center": 1.5, "width": 0.3, "momentum": 6},
                 "psi_l": {"center": 1.5, "width": 0.3, "momentum": -6}}
    })json");
    CHECK(run("evolve --config cli_evolve.json") == 0);
    const std::string err = slurp("cli_stderr.txt");
    const auto pos = err.find("norm_drift_max ");
    REQUIRE(pos != std::string::npos);
    const double drift = std::strtod(err.c_str() + pos + 15, nullptr);
    CHECK(drift < 1e-12);
}

TEST_CASE("cli: scan twice into files is byte-identical") {
    spit("cli_det.json", kDeltaConfig);
    CHECK(run("scan --config cli_det.json --output cli_run_a.csv --quiet") == 0);
    CHECK(run("scan --config cli_det.json --output cli_run_b.csv --quiet") == 0);
    const std::string a = slurp("cli_run_a.csv");
    CHECK(!a.empty());
    CHECK(a == slurp("cli_run_b.csv"));
}

TEST_CASE("cli: json format flag") {
    spit("cli_json.json", kDeltaConfig);
    CHECK(run("scan --config cli_json.json --format json") == 0);
    const std::string out = slurp("cli_stdout.txt");
    CHECK(out.find("\"records\"") != std::string::npos);
}

TEST_CASE("cli: verify passes for several seeds") {
    for (int seed : {0, 1, 2, 3}) {
        CHECK(run("verify --seed " + std::to_string(seed)) == 0);
        CHECK(slurp("cli_stdout.txt").find("all suites passed") != std::string::npos);
    }
}
