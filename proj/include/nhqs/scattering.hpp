// S-matrix pair from the reduced transfer pair, bilinear transmittivities and
// reflectivities, energy sweeps and the real-axis spectral-singularity scan.
//
// The formalism replaces unitarity by the bilinear duality
// S^(-)T S^(+) = 1; observables are bilinear products of the two sectors and
// need not lie in [0,1] for non-Hermitian potentials.
#ifndef NHQS_SCATTERING_HPP
#define NHQS_SCATTERING_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "nhqs/errors.hpp"
#include "nhqs/linalg.hpp"
#include "nhqs/potential.hpp"
#include "nhqs/transfer.hpp"

namespace nhqs {

struct Tolerances {
    double invert = kDefaultInvertTol;  // pivot / residual tolerance for block inverses
    double duality = 1e-9;              // identity checks (duality, sum rules, route match)
    double singularity = 1e-6;          // |det T~22| below which a refined minimum counts
};

struct SMatrixPair {
    Block2Matrix s_plus, s_minus;
    EnergyPoint energy;
    double duality_residual = 0.0;   // max norm of S^(-)T S^(+) - 1
    double route_discrepancy = 0.0;  // direct blocks vs transposed-inverse blocks
    bool near_singular = false;      // duality residual above tolerance
};

namespace detail {

inline ChannelMatrix invert_block(const ChannelMatrix& m, double tol, const char* label) {
    try {
        return invert(m, tol);
    } catch (const SingularMatrix& e) {
        throw SpectralSingularity(label, std::string("block ") + label + " singular: " + e.what());
    }
}

}  // namespace detail

// S^(+-) = [[ (T~^(-+)T_11)^-1, T~^(+-)_12 T~^(+-)_22^-1 ],
//           [ -T~^(+-)_22^-1 T~^(+-)_21, T~^(+-)_22^-1 ]].
// The transposed-inverse route of the same blocks is evaluated as a second
// construction; the max discrepancy between the two is recorded.
inline SMatrixPair s_from_reduced(const ReducedTransferPair& rt, const Tolerances& tol = {}) {
    const std::size_t n = rt.tt_plus.channels();
    const Block2Matrix& a = rt.tt_plus;
    const Block2Matrix& b = rt.tt_minus;

    const ChannelMatrix inv_a22 = detail::invert_block(a.b22, tol.invert, "tt_plus_22");
    const ChannelMatrix inv_b22 = detail::invert_block(b.b22, tol.invert, "tt_minus_22");
    const ChannelMatrix inv_bT11 =
        detail::invert_block(transpose(b.b11), tol.invert, "tt_minus_T11");
    const ChannelMatrix inv_aT11 =
        detail::invert_block(transpose(a.b11), tol.invert, "tt_plus_T11");

    SMatrixPair sp;
    sp.energy = rt.energy;
    sp.s_plus = Block2Matrix{inv_bT11, a.b12 * inv_a22, -(inv_a22 * a.b21), inv_a22};
    sp.s_minus = Block2Matrix{inv_aT11, b.b12 * inv_b22, -(inv_b22 * b.b21), inv_b22};

    // Second published construction: S^(-+)T expressed through T~^(+-)_11
    // inverses.  Transposing it back gives an independent route to S^(+-).
    const ChannelMatrix inv_a11 = detail::invert_block(a.b11, tol.invert, "tt_plus_11");
    const ChannelMatrix inv_b11 = detail::invert_block(b.b11, tol.invert, "tt_minus_11");
    const ChannelMatrix inv_aT22 =
        detail::invert_block(transpose(a.b22), tol.invert, "tt_plus_T22");
    const ChannelMatrix inv_bT22 =
        detail::invert_block(transpose(b.b22), tol.invert, "tt_minus_T22");
    const Block2Matrix s_plus_t{inv_b11, -(inv_b11 * b.b12), b.b21 * inv_b11, inv_aT22};
    const Block2Matrix s_minus_t{inv_a11, -(inv_a11 * a.b12), a.b21 * inv_a11, inv_bT22};
    const Block2Matrix s_plus_alt = transpose(s_plus_t);
    const Block2Matrix s_minus_alt = transpose(s_minus_t);
    sp.route_discrepancy = std::max(max_abs_diff(sp.s_plus, s_plus_alt),
                                    max_abs_diff(sp.s_minus, s_minus_alt));

    sp.duality_residual =
        max_abs_diff(block_mul(transpose(sp.s_minus), sp.s_plus), Block2Matrix::identity(n));
    sp.near_singular = !(sp.duality_residual <= tol.duality);
    return sp;
}

struct ScatteringCoefficients {
    ChannelMatrix t1, t2, r1, r2;
    double route_residual = 0.0;  // S-product route vs inverse-T~-product route

    // Sum-rule residual: max deviation of T1+R1 and T2+R2 from the identity.
    double sum_rule_residual() const {
        const std::size_t n = t1.size();
        const ChannelMatrix one = ChannelMatrix::identity(n);
        return std::max(max_abs_diff(t1 + r1, one), max_abs_diff(t2 + r2, one));
    }
};

// T1 = S^(-)T_11 S^(+)_11, T2 = S^(-)T_22 S^(+)_22, R1 = S^(-)T_21 S^(+)_21,
// R2 = S^(-)T_12 S^(+)_12.  T1 and T2 are also evaluated through the inverse
// transfer-block products (T~^(-)T_11 T~^(+)_11)^-1 and
// (T~^(+)_22 T~^(-)T_22)^-1; the max disagreement is recorded.
inline ScatteringCoefficients coefficients(const SMatrixPair& sp,
                                           const ReducedTransferPair& rt,
                                           const Tolerances& tol = {}) {
    ScatteringCoefficients c;
    c.t1 = transpose(sp.s_minus.b11) * sp.s_plus.b11;
    c.t2 = transpose(sp.s_minus.b22) * sp.s_plus.b22;
    c.r1 = transpose(sp.s_minus.b21) * sp.s_plus.b21;
    c.r2 = transpose(sp.s_minus.b12) * sp.s_plus.b12;

    const ChannelMatrix t1_alt =
        detail::invert_block(transpose(rt.tt_minus.b11) * rt.tt_plus.b11, tol.invert,
                             "tt_minus_T11 * tt_plus_11");
    const ChannelMatrix t2_alt =
        detail::invert_block(rt.tt_plus.b22 * transpose(rt.tt_minus.b22), tol.invert,
                             "tt_plus_22 * tt_minus_T22");
    c.route_residual = std::max(max_abs_diff(c.t1, t1_alt), max_abs_diff(c.t2, t2_alt));
    return c;
}

enum class ScanStatus { Ok, SpectralSingularityHit, Failed };

inline const char* to_string(ScanStatus s) {
    switch (s) {
        case ScanStatus::Ok: return "ok";
        case ScanStatus::SpectralSingularityHit: return "singular";
        case ScanStatus::Failed: return "failed";
    }
    return "?";
}

struct ScanRecord {
    EnergyPoint energy;
    std::optional<ScatteringCoefficients> coeffs;
    double duality_residual = std::numeric_limits<double>::quiet_NaN();
    ScanStatus status = ScanStatus::Ok;
    std::string detail;  // error message for non-ok records
};

struct ScanOptions {
    Tolerances tol;
    TransferOptions transfer;
    std::size_t threads = 0;  // 0: hardware concurrency
};

inline ScanRecord scatter_at(const PotentialSpec& p, const PhysicalParams& params,
                             const EnergyPoint& e, const Tolerances& tol,
                             const TransferOptions& topts) {
    ScanRecord rec;
    rec.energy = e;
    try {
        const ReducedTransferPair rt = reduce(assemble_transfer(p, e, params, topts));
        const SMatrixPair sp = s_from_reduced(rt, tol);
        rec.coeffs = coefficients(sp, rt, tol);
        rec.duality_residual = sp.duality_residual;
        rec.status = ScanStatus::Ok;
    } catch (const SpectralSingularity& ex) {
        rec.status = ScanStatus::SpectralSingularityHit;
        rec.detail = ex.what();
    } catch (const Error& ex) {
        rec.status = ScanStatus::Failed;
        rec.detail = ex.what();
    }
    return rec;
}

// One record per energy, in input order; failed points are flagged rather
// than aborting the sweep.  Energy points are distributed across worker
// threads; the output ordering is by grid index regardless of completion.
inline std::vector<ScanRecord> scan(const PotentialSpec& p, const PhysicalParams& params,
                                    const std::vector<double>& energies,
                                    const ScanOptions& opts = {}) {
    for (std::size_t i = 0; i < energies.size(); ++i) {
        if (!(energies[i] > 0.0))
            throw ValidationError("scan energies must be positive");
        if (i > 0 && !(energies[i] > energies[i - 1]))
            throw ValidationError("scan energies must be strictly increasing");
    }
    std::vector<ScanRecord> records(energies.size());
    if (energies.empty()) return records;

    std::size_t workers = opts.threads ? opts.threads : std::thread::hardware_concurrency();
    workers = std::max<std::size_t>(1, std::min(workers, energies.size()));

    auto run_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const EnergyPoint e = EnergyPoint::from_energy(Complex(energies[i], 0.0), params);
            records[i] = scatter_at(p, params, e, opts.tol, opts.transfer);
        }
    };

    if (workers == 1) {
        run_range(0, energies.size());
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (energies.size() + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(energies.size(), begin + chunk);
            if (begin >= end) break;
            pool.emplace_back(run_range, begin, end);
        }
        for (auto& th : pool) th.join();
    }
    return records;
}

struct SingularityReport {
    std::vector<double> energies;   // refined positions inside the scanned interval
    std::vector<double> residuals;  // |det T~^(+)_22| at the refined points
};

// Samples |det T~^(+)_22| over [e_lo, e_hi], golden-section refines every
// interior local minimum to relative width 1e-10 and keeps those whose
// refined residual falls below the singularity tolerance.
inline SingularityReport find_singularities(const PotentialSpec& p, const PhysicalParams& params,
                                            double e_lo, double e_hi, std::size_t samples,
                                            const Tolerances& tol = {},
                                            const TransferOptions& topts = {}) {
    if (!(0.0 < e_lo && e_lo < e_hi))
        throw ValidationError("singularity scan requires 0 < E_lo < E_hi");
    if (samples < 8) throw ValidationError("singularity scan requires samples >= 8");

    auto det_at = [&](double energy) {
        const EnergyPoint e = EnergyPoint::from_energy(Complex(energy, 0.0), params);
        const ReducedTransferPair rt = reduce(assemble_transfer(p, e, params, topts));
        return std::abs(det(rt.tt_plus.b22));
    };

    std::vector<double> grid(samples), val(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        grid[i] = e_lo + (e_hi - e_lo) * static_cast<double>(i) /
                             static_cast<double>(samples - 1);
        val[i] = det_at(grid[i]);
    }

    SingularityReport report;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    for (std::size_t i = 1; i + 1 < samples; ++i) {
        if (!(val[i] <= val[i - 1] && val[i] <= val[i + 1])) continue;
        double a = grid[i - 1], b = grid[i + 1];
        double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
        double f1 = det_at(x1), f2 = det_at(x2);
        while ((b - a) > 1e-10 * (0.5 * (a + b))) {
            if (f1 <= f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - gr * (b - a);
                f1 = det_at(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + gr * (b - a);
                f2 = det_at(x2);
            }
        }
        const double e_star = 0.5 * (a + b);
        const double f_star = det_at(e_star);
        if (f_star <= tol.singularity) {
            report.energies.push_back(e_star);
            report.residuals.push_back(f_star);
        }
    }
    return report;
}

}  // namespace nhqs

#endif  // NHQS_SCATTERING_HPP
