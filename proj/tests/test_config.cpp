#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>

#include "nhqs/commands.hpp"
#include "nhqs/report.hpp"
#include "nhqs/run_config.hpp"

using namespace nhqs;

namespace {

const char* kDeltaScanConfig = R"json({
  "units": {"hbar": 1, "mass": 0.5},
  "channels": 1,
  "window": [0, 0],
  "potential": [{"type": "delta", "position": 0, "strength": [[2]]}],
  "energies": {"list": [1.0, 4.0]}
})json";

}  // namespace

TEST_CASE("config: minimal parse with defaults") {
    const RunConfig rc = parse_config_text(R"json({"channels": 1, "window": [0, 1], "potential": []})json");
    CHECK(rc.units.hbar == 1.0);
    CHECK(rc.units.mass == 0.5);
    CHECK(rc.channels == 1);
    CHECK(rc.output.format == OutputFormat::Csv);
    CHECK(rc.tol.invert == kDefaultInvertTol);
    CHECK_FALSE(rc.energies.has_value());
    CHECK_FALSE(rc.evolve.has_value());
}

TEST_CASE("config: unknown keys are rejected at every level") {
    CHECK_THROWS_AS(parse_config_text(R"json({"channels":1,"window":[0,1],"potential":[],"zzz":1})json"),
                    ConfigError);
    CHECK_THROWS_AS(
        parse_config_text(R"json({"channels":1,"window":[0,1],"potential":[],"units":{"h":1}})json"),
        ConfigError);
    CHECK_THROWS_AS(
        parse_config_text(
            R"json({"channels":1,"window":[0,1],"potential":[{"type":"delta","position":0,"strength":[[1]],"x":1}]})json"),
        ConfigError);
    CHECK_THROWS_AS(
        parse_config_text(
            R"json({"channels":1,"window":[0,1],"potential":[],"energies":{"list":[1],"linspace":{"start":1,"stop":2,"count":2}}})json"),
        ConfigError);
    CHECK_THROWS_AS(
        parse_config_text(R"json({"channels":1,"window":[0,1],"potential":[],"output":{"fmt":"csv"}})json"),
        ConfigError);
}

TEST_CASE("config: element and value forms") {
    const RunConfig rc = parse_config_text(R"json({
      "channels": 2,
      "window": [0, 5],
      "potential": [
        {"type": "delta", "position": 1.0, "strength": [[[0,0],[0.5,0]],[[0,0],[0,0]]]},
        {"type": "constant", "from": 2, "to": 3, "value": [[[1,0],[0,0]],[[0,0],[1,0]]]},
        {"type": "analytic", "from": 3.5, "to": 4.5,
         "expr": [["i*z", "0"], ["0", "exp(-(z-4)^2)"]]}
      ],
      "energies": {"linspace": {"start": 0.5, "stop": 2.0, "count": 4}}
    })json");
    CHECK(rc.elements.size() == 3);
    REQUIRE(rc.energies.has_value());
    CHECK(rc.energies->size() == 4);
    CHECK((*rc.energies)[0] == 0.5);
    CHECK((*rc.energies)[3] == 2.0);
    CHECK_NOTHROW(rc.potential());
}

TEST_CASE("config: scalar shorthand for 1x1 matrices and expressions") {
    const RunConfig rc = parse_config_text(R"json({
      "channels": 1,
      "window": [0, 4],
      "potential": [
        {"type": "delta", "position": 0.5, "strength": 2.0},
        {"type": "constant", "from": 1, "to": 2, "value": [-1, 0]},
        {"type": "analytic", "from": 2.5, "to": 3.5, "expr": "i*0.3*exp(-(z-3)^2)"}
      ]
    })json");
    const auto& d = std::get<DeltaSpike>(rc.elements[0]);
    CHECK(d.strength(0, 0) == Complex(2.0, 0.0));
    const auto& c = std::get<ConstantSegment>(rc.elements[1]);
    CHECK(c.value(0, 0) == Complex(-1.0, 0.0));
}

TEST_CASE("config: bad inputs raise ConfigError") {
    CHECK_THROWS_AS(parse_config_text("not json"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"json({"window":[0,1],"potential":[]})json"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"json({"channels":0,"window":[0,1],"potential":[]})json"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"json({"channels":1,"window":[0],"potential":[]})json"),
                    ConfigError);
    CHECK_THROWS_AS(
        parse_config_text(
            R"json({"channels":1,"window":[0,1],"potential":[{"type":"wedge","position":0}]})json"),
        ConfigError);
    // expression error with context
    try {
        parse_config_text(
            R"json({"channels":1,"window":[0,2],"potential":[{"type":"analytic","from":0,"to":1,"expr":"abs(z)"}]})json");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("abs") != std::string::npos);
    }
    // geometry problems surface as config errors
    CHECK_THROWS_AS(
        parse_config_text(
            R"json({"channels":1,"window":[0,1],"potential":[{"type":"delta","position":5,"strength":1}]})json"),
        ConfigError);
    // matrix dimension mismatch
    CHECK_THROWS_AS(
        parse_config_text(
            R"json({"channels":2,"window":[0,1],"potential":[{"type":"delta","position":0.5,"strength":[[1]]}]})json"),
        ConfigError);
}

TEST_CASE("fmt17 round-trips doubles") {
    for (double v : {1.0, 0.1, 1.0 / 3.0, 6.62607015e-34, -0.49999999999999994, 1e308}) {
        const std::string s = fmt17(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
}

TEST_CASE("scan renders: CSV structure and CSV/JSON value agreement") {
    const RunConfig rc = parse_config_text(kDeltaScanConfig);
    std::ostringstream out, log;
    CHECK(cmd_scan(rc, out, log, true) == exit_code::ok);
    const std::string csv = out.str();

    // header + 2 data rows
    std::vector<std::string> lines;
    std::istringstream is(csv);
    for (std::string line; std::getline(is, line);) lines.push_back(line);
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] ==
          "E,k0_re,k0_im,t1_00_re,t1_00_im,t2_00_re,t2_00_im,r1_00_re,r1_00_im,r2_00_re,"
          "r2_00_im,residual,flag");

    auto csv_cell = [&](std::size_t row, std::size_t col) {
        std::istringstream ls(lines[row]);
        std::string cell;
        for (std::size_t c = 0; c <= col; ++c) std::getline(ls, cell, ',');
        return cell;
    };
    CHECK(std::strtod(csv_cell(1, 3).c_str(), nullptr) == Catch::Approx(0.5).epsilon(1e-12));
    CHECK(std::strtod(csv_cell(2, 3).c_str(), nullptr) == Catch::Approx(0.8).epsilon(1e-12));

    // JSON twin carries the same doubles
    RunConfig rj = rc;
    rj.output.format = OutputFormat::Json;
    std::ostringstream jout;
    CHECK(cmd_scan(rj, jout, log, true) == exit_code::ok);
    const nlohmann::json parsed = nlohmann::json::parse(jout.str());
    REQUIRE(parsed["records"].size() == 2);
    for (std::size_t row = 0; row < 2; ++row) {
        const auto& rec = parsed["records"][row];
        CHECK(rec["E"].get<double>() == std::strtod(csv_cell(row + 1, 0).c_str(), nullptr));
        CHECK(rec["t1"][0][0][0].get<double>() ==
              std::strtod(csv_cell(row + 1, 3).c_str(), nullptr));
        CHECK(rec["residual"].get<double>() ==
              std::strtod(csv_cell(row + 1, 11).c_str(), nullptr));
        CHECK(rec["flag"] == "ok");
    }
}

TEST_CASE("scan output is deterministic") {
    const RunConfig rc = parse_config_text(kDeltaScanConfig);
    std::ostringstream a, b, log;
    CHECK(cmd_scan(rc, a, log, true) == exit_code::ok);
    CHECK(cmd_scan(rc, b, log, true) == exit_code::ok);
    CHECK(a.str() == b.str());
    CHECK(!a.str().empty());
}

TEST_CASE("scatter report: singular points stay in the table") {
    RunConfig rc = parse_config_text(R"json({
      "channels": 1,
      "window": [0, 0],
      "potential": [{"type": "delta", "position": 0, "strength": [[0, 2]]}]
    })json");
    std::ostringstream out, log;
    const int code = cmd_scatter(rc, 1.0, out, log, true);
    CHECK(code == exit_code::spectral_singularity);
    CHECK(out.str().find("singular") != std::string::npos);

    // JSON form re-parses and carries the error text
    rc.output.format = OutputFormat::Json;
    std::ostringstream jout;
    CHECK(cmd_scatter(rc, 1.0, jout, log, true) == exit_code::spectral_singularity);
    const nlohmann::json parsed = nlohmann::json::parse(jout.str());
    CHECK(parsed["flag"] == "singular");
    CHECK(parsed.contains("error"));
}

TEST_CASE("scatter report: healthy record carries blocks and coefficients") {
    RunConfig rc = parse_config_text(R"json({
      "channels": 1,
      "window": [0, 0],
      "potential": [{"type": "delta", "position": 0, "strength": [[2]]}],
      "output": {"format": "json"}
    })json");
    std::ostringstream out, log;
    CHECK(cmd_scatter(rc, 1.0, out, log, true) == exit_code::ok);
    const nlohmann::json parsed = nlohmann::json::parse(out.str());
    CHECK(parsed["t1"][0][0][0].get<double>() == Catch::Approx(0.5).epsilon(1e-12));
    CHECK(parsed["s_plus"].contains("b11"));
    CHECK(parsed["residual"].get<double>() < 1e-12);
}

TEST_CASE("evolve command: free run conserves norm row by row") {
    const RunConfig rc = parse_config_text(R"json({
      "channels": 1,
      "window": [0, 4],
      "potential": [],
      "evolve": {"box_length": 4, "points": 128, "dt": 0.001, "steps": 100,
                 "psi_r": {"center": 1.5, "width": 0.3, "momentum": 6},
                 "psi_l": {"center": 1.5, "width": 0.3, "momentum": -6}}
    })json");
    std::ostringstream out, log;
    CHECK(cmd_evolve(rc, out, log, true) == exit_code::ok);
    std::istringstream is(out.str());
    std::string header;
    std::getline(is, header);
    CHECK(header == "t,norm_re,norm_im,max_psi_r,max_psi_l");
    double n0_re = 0.0, n0_im = 0.0;
    std::size_t rows = 0;
    for (std::string line; std::getline(is, line); ++rows) {
        std::istringstream ls(line);
        std::string cell;
        std::getline(ls, cell, ',');
        std::getline(ls, cell, ',');
        const double nre = std::strtod(cell.c_str(), nullptr);
        std::getline(ls, cell, ',');
        const double nim = std::strtod(cell.c_str(), nullptr);
        if (rows == 0) {
            n0_re = nre;
            n0_im = nim;
        }
        CHECK(std::abs(Complex(nre - n0_re, nim - n0_im)) < 1e-12);
    }
    CHECK(rows == 101);
    CHECK(log.str().find("norm_drift_max") != std::string::npos);
}

TEST_CASE("command preconditions map to config errors") {
    const RunConfig no_energies =
        parse_config_text(R"json({"channels":1,"window":[0,1],"potential":[]})json");
    std::ostringstream out, log;
    CHECK_THROWS_AS(cmd_scan(no_energies, out, log, true), ConfigError);
    CHECK_THROWS_AS(cmd_evolve(no_energies, out, log, true), ConfigError);
    CHECK_THROWS_AS(cmd_scatter(no_energies, -1.0, out, log, true), ConfigError);
}
