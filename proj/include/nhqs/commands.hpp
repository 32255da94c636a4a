// Command implementations behind the CLI: scatter, scan, evolve, verify.
// Each returns the process exit code: 0 ok, 1 verify failure, 2 config
// error, 3 spectral singularity encountered, 4 numerical failure.
#ifndef NHQS_COMMANDS_HPP
#define NHQS_COMMANDS_HPP

#include <fstream>
#include <ostream>
#include <string>

#include "nhqs/dynamics.hpp"
#include "nhqs/report.hpp"
#include "nhqs/run_config.hpp"
#include "nhqs/scattering.hpp"
#include "nhqs/verify.hpp"

namespace nhqs {

namespace exit_code {
constexpr int ok = 0;
constexpr int verify_failed = 1;
constexpr int config_error = 2;
constexpr int spectral_singularity = 3;
constexpr int numerical_failure = 4;
}  // namespace exit_code

// Writes `content` to the configured path, or to `out` when no path is set.
inline void deliver_output(const OutputConfig& target, const std::string& content,
                           std::ostream& out, std::ostream& log, bool quiet) {
    if (target.path.empty()) {
        out << content;
        return;
    }
    std::ofstream f(target.path, std::ios::binary);
    if (!f) throw ConfigError("cannot write output file '" + target.path + "'");
    f << content;
    if (!quiet) log << "wrote " << target.path << "\n";
}

inline int cmd_scatter(const RunConfig& rc, double energy, std::ostream& out, std::ostream& log,
                       bool quiet = false) {
    if (!(energy > 0.0)) throw ConfigError("scatter requires an energy > 0");
    const PotentialSpec p = rc.potential();
    const EnergyPoint e = EnergyPoint::from_energy(Complex(energy, 0.0), rc.units);

    ScatterReport rep;
    rep.energy = e;
    try {
        const ReducedTransferPair rt = reduce(assemble_transfer(p, e, rc.units));
        const SMatrixPair sp = s_from_reduced(rt, rc.tol);
        rep.coeffs = coefficients(sp, rt, rc.tol);
        rep.smatrix = sp;
    } catch (const SpectralSingularity& ex) {
        rep.status = ScanStatus::SpectralSingularityHit;
        rep.detail = ex.what();
    }

    const std::string content = rc.output.format == OutputFormat::Csv
                                    ? render_scatter_csv(rep, rc.channels)
                                    : render_scatter_json(rep, rc.channels);
    deliver_output(rc.output, content, out, log, quiet);
    return rep.status == ScanStatus::SpectralSingularityHit ? exit_code::spectral_singularity
                                                            : exit_code::ok;
}

inline int cmd_scan(const RunConfig& rc, std::ostream& out, std::ostream& log,
                    bool quiet = false) {
    if (!rc.energies) throw ConfigError("scan requires an 'energies' section");
    const PotentialSpec p = rc.potential();
    ScanOptions opts;
    opts.tol = rc.tol;
    const std::vector<ScanRecord> records = scan(p, rc.units, *rc.energies, opts);
    const std::string content = rc.output.format == OutputFormat::Csv
                                    ? render_scan_csv(records, rc.channels)
                                    : render_scan_json(records, rc.channels);
    deliver_output(rc.output, content, out, log, quiet);
    return exit_code::ok;
}

inline int cmd_evolve(const RunConfig& rc, std::ostream& out, std::ostream& log,
                      bool quiet = false) {
    if (!rc.evolve) throw ConfigError("evolve requires an 'evolve' section");
    const EvolveConfig& ev = *rc.evolve;
    const PotentialSpec p = rc.potential();
    const FieldPair initial = make_gaussian_pair(rc.channels, ev.box_length, ev.points,
                                                 ev.psi_r, ev.psi_l, ev.amplitudes);
    EvolveOptions opts;
    opts.sector = ev.sector;
    opts.tol = rc.tol;
    const EvolveResult res = evolve(initial, p, rc.units, ev.dt, ev.steps, opts);

    const std::string content = rc.output.format == OutputFormat::Csv
                                    ? render_evolve_csv(res.records)
                                    : render_evolve_json(res);
    deliver_output(rc.output, content, out, log, quiet);
    log << "norm_drift_max " << fmt17(norm_drift_max(res.records)) << "\n";
    if (res.delta_bump_width > 0.0 && !quiet)
        log << "delta_bump_width " << fmt17(res.delta_bump_width) << "\n";
    return exit_code::ok;
}

inline int cmd_verify(std::uint64_t seed, std::ostream& out) {
    const auto results = verify::run_verification(seed);
    bool all_ok = true;
    for (const auto& r : results) {
        out << (r.passed ? "ok   " : "FAIL ") << r.name << "  residual " << fmt17(r.residual)
            << "  tol " << fmt17(r.tolerance) << "\n";
        all_ok = all_ok && r.passed;
    }
    out << (all_ok ? "verify: all suites passed\n" : "verify: FAILURES present\n");
    return all_ok ? exit_code::ok : exit_code::verify_failed;
}

}  // namespace nhqs

#endif  // NHQS_COMMANDS_HPP
