// Batch-run configuration: a single JSON document describing units, channel
// count, the potential, the energy grid, evolution parameters, output target
// and tolerance overrides.  Complex numbers are two-element arrays [re, im],
// matrices are row-major nested arrays.  Unknown keys are rejected.
#ifndef NHQS_RUN_CONFIG_HPP
#define NHQS_RUN_CONFIG_HPP

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nhqs/dynamics.hpp"
#include "nhqs/errors.hpp"
#include "nhqs/potential.hpp"
#include "nhqs/scattering.hpp"

namespace nhqs {

enum class OutputFormat { Csv, Json };

struct OutputConfig {
    OutputFormat format = OutputFormat::Csv;
    std::string path;  // empty: stdout
};

struct EvolveConfig {
    double box_length = 0.0;
    std::size_t points = 0;
    double dt = 0.0;
    std::size_t steps = 0;
    GaussianPacket psi_r, psi_l;
    Sector sector = Sector::Retarded;
    std::vector<Complex> amplitudes;  // optional per-channel amplitudes
};

struct RunConfig {
    PhysicalParams units;
    std::size_t channels = 1;
    double window_lo = 0.0, window_hi = 0.0;
    std::vector<PotentialElement> elements;
    std::optional<std::vector<double>> energies;
    std::optional<EvolveConfig> evolve;
    OutputConfig output;
    Tolerances tol;

    PotentialSpec potential() const {
        return PotentialSpec(channels, window_lo, window_hi, elements);
    }
};

namespace cfg_detail {

using nlohmann::json;

inline void require_keys(const json& j, std::initializer_list<const char*> allowed,
                         const std::string& ctx) {
    if (!j.is_object()) throw ConfigError(ctx + ": expected an object");
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* k : allowed)
            if (item.key() == k) {
                ok = true;
                break;
            }
        if (!ok) throw ConfigError(ctx + ": unknown key '" + item.key() + "'");
    }
}

inline double as_number(const json& j, const std::string& ctx) {
    if (!j.is_number()) throw ConfigError(ctx + ": expected a number");
    return j.get<double>();
}

inline std::size_t as_count(const json& j, const std::string& ctx) {
    if (!j.is_number_integer() || j.get<long long>() < 0)
        throw ConfigError(ctx + ": expected a non-negative integer");
    return static_cast<std::size_t>(j.get<long long>());
}

inline Complex as_complex(const json& j, const std::string& ctx) {
    if (j.is_number()) return Complex(j.get<double>(), 0.0);
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return Complex(j[0].get<double>(), j[1].get<double>());
    throw ConfigError(ctx + ": expected a number or [re, im]");
}

inline ChannelMatrix as_matrix(const json& j, std::size_t n, const std::string& ctx) {
    if (j.is_number() || (j.is_array() && j.size() == 2 && j[0].is_number())) {
        if (n != 1) throw ConfigError(ctx + ": scalar given for a " + std::to_string(n) +
                                      "-channel matrix");
        ChannelMatrix m(1);
        m(0, 0) = as_complex(j, ctx);
        return m;
    }
    if (!j.is_array() || j.size() != n)
        throw ConfigError(ctx + ": expected " + std::to_string(n) + " rows");
    ChannelMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        const json& row = j[i];
        if (n == 1 && row.is_array() && row.size() == 2 && row[0].is_number() &&
            row[1].is_number()) {
            m(0, 0) = as_complex(row, ctx);  // [[re, im]] as a 1x1 complex matrix
            continue;
        }
        if (!row.is_array() || row.size() != n)
            throw ConfigError(ctx + ": row " + std::to_string(i) + " must have " +
                              std::to_string(n) + " entries");
        for (std::size_t c = 0; c < n; ++c)
            m(i, c) = as_complex(row[c], ctx + "[" + std::to_string(i) + "][" +
                                             std::to_string(c) + "]");
    }
    return m;
}

inline PotentialElement parse_element(const json& j, std::size_t n, const std::string& ctx) {
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
        throw ConfigError(ctx + ": element needs a string 'type'");
    const std::string type = j["type"].get<std::string>();
    if (type == "delta") {
        require_keys(j, {"type", "position", "strength"}, ctx);
        if (!j.contains("position") || !j.contains("strength"))
            throw ConfigError(ctx + ": delta needs 'position' and 'strength'");
        return DeltaSpike{as_number(j["position"], ctx + ".position"),
                          as_matrix(j["strength"], n, ctx + ".strength")};
    }
    if (type == "constant") {
        require_keys(j, {"type", "from", "to", "value"}, ctx);
        if (!j.contains("from") || !j.contains("to") || !j.contains("value"))
            throw ConfigError(ctx + ": constant needs 'from', 'to' and 'value'");
        return ConstantSegment{as_number(j["from"], ctx + ".from"),
                               as_number(j["to"], ctx + ".to"),
                               as_matrix(j["value"], n, ctx + ".value")};
    }
    if (type == "analytic") {
        require_keys(j, {"type", "from", "to", "expr"}, ctx);
        if (!j.contains("from") || !j.contains("to") || !j.contains("expr"))
            throw ConfigError(ctx + ": analytic needs 'from', 'to' and 'expr'");
        AnalyticSegment seg;
        seg.z_start = as_number(j["from"], ctx + ".from");
        seg.z_end = as_number(j["to"], ctx + ".to");
        seg.n = n;
        const json& ex = j["expr"];
        auto parse_entry = [&](const json& cell, const std::string& where) {
            if (!cell.is_string()) throw ConfigError(where + ": expected an expression string");
            try {
                return Expression::parse(cell.get<std::string>());
            } catch (const Error& e) {
                throw ConfigError(where + ": " + e.what());
            }
        };
        if (ex.is_string()) {
            if (n != 1) throw ConfigError(ctx + ".expr: scalar given for n > 1");
            seg.entries.push_back(parse_entry(ex, ctx + ".expr"));
            return seg;
        }
        if (!ex.is_array() || ex.size() != n)
            throw ConfigError(ctx + ".expr: expected " + std::to_string(n) + " rows");
        for (std::size_t i = 0; i < n; ++i) {
            const json& row = ex[i];
            if (!row.is_array() || row.size() != n)
                throw ConfigError(ctx + ".expr: row " + std::to_string(i) + " must have " +
                                  std::to_string(n) + " entries");
            for (std::size_t c = 0; c < n; ++c)
                seg.entries.push_back(parse_entry(row[c], ctx + ".expr[" + std::to_string(i) +
                                                              "][" + std::to_string(c) + "]"));
        }
        return seg;
    }
    throw ConfigError(ctx + ": unknown element type '" + type + "'");
}

inline std::vector<double> parse_energies(const json& j) {
    require_keys(j, {"list", "linspace"}, "energies");
    const bool has_list = j.contains("list");
    const bool has_lin = j.contains("linspace");
    if (has_list == has_lin)
        throw ConfigError("energies: exactly one of 'list' or 'linspace' required");
    std::vector<double> out;
    if (has_list) {
        const json& l = j["list"];
        if (!l.is_array() || l.empty()) throw ConfigError("energies.list: non-empty array");
        for (std::size_t i = 0; i < l.size(); ++i)
            out.push_back(as_number(l[i], "energies.list[" + std::to_string(i) + "]"));
    } else {
        const json& l = j["linspace"];
        require_keys(l, {"start", "stop", "count"}, "energies.linspace");
        if (!l.contains("start") || !l.contains("stop") || !l.contains("count"))
            throw ConfigError("energies.linspace needs start, stop, count");
        const double a = as_number(l["start"], "energies.linspace.start");
        const double b = as_number(l["stop"], "energies.linspace.stop");
        const std::size_t count = as_count(l["count"], "energies.linspace.count");
        if (count < 1) throw ConfigError("energies.linspace.count must be >= 1");
        for (std::size_t i = 0; i < count; ++i)
            out.push_back(count == 1 ? a
                                     : a + (b - a) * static_cast<double>(i) /
                                               static_cast<double>(count - 1));
    }
    return out;
}

inline GaussianPacket parse_packet(const json& j, const std::string& ctx) {
    require_keys(j, {"center", "width", "momentum"}, ctx);
    if (!j.contains("center") || !j.contains("width") || !j.contains("momentum"))
        throw ConfigError(ctx + " needs center, width, momentum");
    return GaussianPacket{as_number(j["center"], ctx + ".center"),
                          as_number(j["width"], ctx + ".width"),
                          as_number(j["momentum"], ctx + ".momentum")};
}

inline EvolveConfig parse_evolve(const json& j, std::size_t channels) {
    require_keys(j, {"box_length", "points", "dt", "steps", "psi_r", "psi_l", "sector",
                     "amplitudes"},
                 "evolve");
    for (const char* k : {"box_length", "points", "dt", "steps", "psi_r", "psi_l"})
        if (!j.contains(k)) throw ConfigError(std::string("evolve needs '") + k + "'");
    EvolveConfig ev;
    ev.box_length = as_number(j["box_length"], "evolve.box_length");
    ev.points = as_count(j["points"], "evolve.points");
    ev.dt = as_number(j["dt"], "evolve.dt");
    ev.steps = as_count(j["steps"], "evolve.steps");
    ev.psi_r = parse_packet(j["psi_r"], "evolve.psi_r");
    ev.psi_l = parse_packet(j["psi_l"], "evolve.psi_l");
    if (j.contains("sector")) {
        const std::string s = j["sector"].is_string() ? j["sector"].get<std::string>() : "";
        if (s == "retarded")
            ev.sector = Sector::Retarded;
        else if (s == "advanced")
            ev.sector = Sector::Advanced;
        else
            throw ConfigError("evolve.sector must be 'retarded' or 'advanced'");
    }
    if (j.contains("amplitudes")) {
        const json& a = j["amplitudes"];
        if (!a.is_array() || a.size() != channels)
            throw ConfigError("evolve.amplitudes must list one entry per channel");
        for (std::size_t i = 0; i < a.size(); ++i)
            ev.amplitudes.push_back(
                as_complex(a[i], "evolve.amplitudes[" + std::to_string(i) + "]"));
    }
    if (!(ev.box_length > 0.0)) throw ConfigError("evolve.box_length must be positive");
    if (ev.points < 8) throw ConfigError("evolve.points must be >= 8");
    if (!(ev.dt > 0.0)) throw ConfigError("evolve.dt must be positive");
    return ev;
}

}  // namespace cfg_detail

inline RunConfig parse_config(const nlohmann::json& j) {
    using cfg_detail::as_count;
    using cfg_detail::as_number;
    using cfg_detail::require_keys;

    require_keys(j, {"units", "channels", "window", "potential", "energies", "evolve", "output",
                     "tolerances"},
                 "config");
    RunConfig rc;

    if (j.contains("units")) {
        const auto& u = j["units"];
        require_keys(u, {"hbar", "mass"}, "units");
        if (u.contains("hbar")) rc.units.hbar = as_number(u["hbar"], "units.hbar");
        if (u.contains("mass")) rc.units.mass = as_number(u["mass"], "units.mass");
        if (!(rc.units.hbar > 0.0) || !(rc.units.mass > 0.0))
            throw ConfigError("units must be strictly positive");
    }

    if (!j.contains("channels")) throw ConfigError("config needs 'channels'");
    rc.channels = as_count(j["channels"], "channels");
    if (rc.channels < 1) throw ConfigError("channels must be >= 1");

    if (!j.contains("window") || !j["window"].is_array() || j["window"].size() != 2)
        throw ConfigError("config needs 'window': [z_lo, z_hi]");
    rc.window_lo = as_number(j["window"][0], "window[0]");
    rc.window_hi = as_number(j["window"][1], "window[1]");

    if (!j.contains("potential") || !j["potential"].is_array())
        throw ConfigError("config needs 'potential': array of elements");
    for (std::size_t i = 0; i < j["potential"].size(); ++i)
        rc.elements.push_back(cfg_detail::parse_element(
            j["potential"][i], rc.channels, "potential[" + std::to_string(i) + "]"));

    if (j.contains("energies")) rc.energies = cfg_detail::parse_energies(j["energies"]);
    if (j.contains("evolve")) rc.evolve = cfg_detail::parse_evolve(j["evolve"], rc.channels);

    if (j.contains("output")) {
        const auto& o = j["output"];
        require_keys(o, {"format", "path"}, "output");
        if (o.contains("format")) {
            const std::string f = o["format"].is_string() ? o["format"].get<std::string>() : "";
            if (f == "csv")
                rc.output.format = OutputFormat::Csv;
            else if (f == "json")
                rc.output.format = OutputFormat::Json;
            else
                throw ConfigError("output.format must be 'csv' or 'json'");
        }
        if (o.contains("path")) {
            if (!o["path"].is_string()) throw ConfigError("output.path must be a string");
            rc.output.path = o["path"].get<std::string>();
        }
    }

    if (j.contains("tolerances")) {
        const auto& t = j["tolerances"];
        require_keys(t, {"invert", "duality", "singularity"}, "tolerances");
        if (t.contains("invert")) rc.tol.invert = as_number(t["invert"], "tolerances.invert");
        if (t.contains("duality")) rc.tol.duality = as_number(t["duality"], "tolerances.duality");
        if (t.contains("singularity"))
            rc.tol.singularity = as_number(t["singularity"], "tolerances.singularity");
        if (!(rc.tol.invert > 0.0) || !(rc.tol.duality > 0.0) || !(rc.tol.singularity > 0.0))
            throw ConfigError("tolerances must be positive");
    }

    // Surface validation errors (geometry, dimensions) as config errors.
    try {
        (void)rc.potential();
    } catch (const Error& e) {
        throw ConfigError(std::string("potential: ") + e.what());
    }
    return rc;
}

inline RunConfig parse_config_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    return parse_config(j);
}

inline RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config_text(text);
}

}  // namespace nhqs

#endif  // NHQS_RUN_CONFIG_HPP
