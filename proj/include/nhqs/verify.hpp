// Seeded self-verification: runs the library's invariants on random
// instances and reports the worst residual per suite.  Backs the `verify`
// CLI command; deterministic for a given seed (the uniform doubles are drawn
// straight from the engine bits, not from distribution objects).
#ifndef NHQS_VERIFY_HPP
#define NHQS_VERIFY_HPP

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "nhqs/dynamics.hpp"
#include "nhqs/linalg.hpp"
#include "nhqs/potential.hpp"
#include "nhqs/scattering.hpp"
#include "nhqs/transfer.hpp"

namespace nhqs::verify {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * unit(); }
    Complex box(double r) { return Complex(uniform(-r, r), uniform(-r, r)); }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(eng_() % n); }

private:
    std::mt19937_64 eng_;
};

inline ChannelMatrix random_matrix(Rng& rng, std::size_t n, double scale) {
    ChannelMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = rng.box(scale);
    return m;
}

inline ChannelMatrix random_symmetric_matrix(Rng& rng, std::size_t n, double scale) {
    ChannelMatrix m = random_matrix(rng, n, scale);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) m(j, i) = m(i, j);
    return m;
}

inline std::string fmtnum(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct PotentialMix {
    bool deltas = true;
    bool constants = true;
    bool analytic = true;
    bool symmetric = false;   // force V^T = V
    bool real_valued = false; // force real coefficients
};

// Random analytic entry: a localized bump, an affine term or a sine, with
// bounded complex coefficients.
inline std::string random_expression(Rng& rng, double z_a, double z_b, const PotentialMix& mix,
                                     bool force_zero) {
    if (force_zero) return "0";
    const double re = rng.uniform(-0.7, 0.7);
    const double im = mix.real_valued ? 0.0 : rng.uniform(-0.7, 0.7);
    const std::string coeff = "(" + fmtnum(re) + "+" + fmtnum(im) + "*i)";
    switch (rng.index(3)) {
        case 0: {
            const double c = rng.uniform(z_a + 0.2 * (z_b - z_a), z_b - 0.2 * (z_b - z_a));
            return coeff + "*exp(-(z-" + fmtnum(c) + ")^2)";
        }
        case 1: {
            const double sl_re = rng.uniform(-0.2, 0.2);
            const double sl_im = mix.real_valued ? 0.0 : rng.uniform(-0.2, 0.2);
            return coeff + "+(" + fmtnum(sl_re) + "+" + fmtnum(sl_im) + "*i)*z";
        }
        default: {
            const double k = rng.uniform(0.5, 2.0);
            return coeff + "*sin(" + fmtnum(k) + "*z)";
        }
    }
}

inline PotentialSpec random_potential(Rng& rng, std::size_t n, const PotentialMix& mix = {}) {
    std::vector<PotentialElement> elements;
    double cursor = rng.uniform(0.05, 0.3);
    const std::size_t count = 1 + rng.index(3);
    for (std::size_t k = 0; k < count; ++k) {
        cursor += rng.uniform(0.1, 0.4);
        std::vector<int> kinds;
        if (mix.deltas) kinds.push_back(0);
        if (mix.constants) kinds.push_back(1);
        if (mix.analytic) kinds.push_back(2);
        const int kind = kinds[rng.index(kinds.size())];
        auto matrix = [&](double scale) {
            ChannelMatrix m = mix.symmetric ? random_symmetric_matrix(rng, n, scale)
                                            : random_matrix(rng, n, scale);
            if (mix.real_valued)
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = 0; j < n; ++j) m(i, j) = Complex(m(i, j).real(), 0.0);
            return m;
        };
        if (kind == 0) {
            elements.push_back(DeltaSpike{cursor, matrix(0.8)});
        } else if (kind == 1) {
            const double w = rng.uniform(0.3, 0.9);
            elements.push_back(ConstantSegment{cursor, cursor + w, matrix(0.8)});
            cursor += w;
        } else {
            const double w = rng.uniform(0.5, 1.2);
            AnalyticSegment seg;
            seg.z_start = cursor;
            seg.z_end = cursor + w;
            seg.n = n;
            std::vector<std::string> sources(n * n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    if (mix.symmetric && j < i) {
                        sources[i * n + j] = sources[j * n + i];
                        continue;
                    }
                    const bool zero = i != j && rng.unit() < 0.4;
                    sources[i * n + j] = random_expression(rng, cursor, cursor + w, mix, zero);
                }
            for (const auto& src : sources) seg.entries.push_back(Expression::parse(src));
            elements.push_back(std::move(seg));
            cursor += w;
        }
    }
    const double hi = cursor + rng.uniform(0.1, 0.4);
    return PotentialSpec(n, 0.0, hi, std::move(elements));
}

struct SuiteResult {
    std::string name;
    double residual = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

namespace detail {

inline SuiteResult make_result(std::string name, double residual, double tolerance) {
    SuiteResult r;
    r.name = std::move(name);
    r.residual = residual;
    r.tolerance = tolerance;
    r.passed = residual <= tolerance;
    return r;
}

inline double textbook_well_transmission(double energy, double v0, double width) {
    const double kappa = std::sqrt(energy - v0);
    const double s = std::sin(kappa * width);
    return 1.0 / (1.0 + v0 * v0 * s * s / (4.0 * energy * (energy - v0)));
}

inline SuiteResult invert_roundtrip(Rng& rng) {
    double worst = 0.0;
    for (int it = 0; it < 40; ++it) {
        const std::size_t n = 1 + rng.index(4);
        const ChannelMatrix a = random_matrix(rng, n, rng.uniform(0.5, 2.0));
        ChannelMatrix b;
        try {
            b = invert(a);
        } catch (const SingularMatrix&) {
            continue;
        }
        if (max_norm(a) * max_norm(b) * static_cast<double>(n) > 1e6) continue;
        worst = std::max(worst, max_abs_diff(invert(b), a) / max_norm(a));
    }
    return make_result("linalg.invert_roundtrip", worst, 1e-10);
}

inline SuiteResult block_mul_associativity(Rng& rng) {
    double worst = 0.0;
    for (int it = 0; it < 30; ++it) {
        const std::size_t n = 1 + rng.index(3);
        auto rand_block = [&] {
            return Block2Matrix{random_matrix(rng, n, 1.0), random_matrix(rng, n, 1.0),
                                random_matrix(rng, n, 1.0), random_matrix(rng, n, 1.0)};
        };
        const Block2Matrix a = rand_block(), b = rand_block(), c = rand_block();
        const Block2Matrix lhs = block_mul(block_mul(a, b), c);
        const Block2Matrix rhs = block_mul(a, block_mul(b, c));
        worst = std::max(worst, max_abs_diff(lhs, rhs) / std::max(1.0, max_norm(lhs)));
    }
    return make_result("linalg.block_mul_associativity", worst, 1e-12);
}

inline SuiteResult transpose_product(Rng& rng) {
    double worst = 0.0;
    for (int it = 0; it < 30; ++it) {
        const std::size_t n = 1 + rng.index(3);
        auto rand_block = [&] {
            return Block2Matrix{random_matrix(rng, n, 1.0), random_matrix(rng, n, 1.0),
                                random_matrix(rng, n, 1.0), random_matrix(rng, n, 1.0)};
        };
        const Block2Matrix a = rand_block(), b = rand_block();
        const Block2Matrix lhs = transpose(block_mul(a, b));
        const Block2Matrix rhs = block_mul(transpose(b), transpose(a));
        worst = std::max(worst, max_abs_diff(lhs, rhs) / std::max(1.0, max_norm(lhs)));
    }
    return make_result("linalg.transpose_product", worst, 1e-14);
}

inline SuiteResult potential_involution(Rng& rng) {
    double worst = 0.0;
    for (int it = 0; it < 12; ++it) {
        const std::size_t n = 1 + rng.index(3);
        const PotentialSpec p = random_potential(rng, n);
        if (!structurally_equal(transpose_potential(transpose_potential(p)), p)) worst = 1.0;
        if (n == 1 && !structurally_equal(transpose_potential(p), p)) worst = 1.0;
    }
    return make_result("potential.transpose_involution", worst, 0.5);
}

inline SuiteResult potential_evaluate_transpose(Rng& rng) {
    double worst = 0.0;
    for (int it = 0; it < 12; ++it) {
        const std::size_t n = 1 + rng.index(3);
        const PotentialSpec p = random_potential(rng, n);
        const PotentialSpec pt = transpose_potential(p);
        for (int s = 0; s < 16; ++s) {
            const Complex z(rng.uniform(p.window_lo(), p.window_hi()), 0.0);
            worst = std::max(worst, max_abs_diff(evaluate(pt, z), transpose(evaluate(p, z))));
        }
    }
    return make_result("potential.evaluate_transpose", worst, 1e-14);
}

inline SuiteResult transfer_unimodular(Rng& rng) {
    double worst = 0.0;
    const PhysicalParams params;
    for (int it = 0; it < 12; ++it) {
        const PotentialSpec p = random_potential(rng, 1);
        const EnergyPoint e =
            EnergyPoint::from_energy(Complex(rng.uniform(0.6, 4.8), 0.0), params);
        const TransferPair tp = assemble_transfer(p, e, params);
        worst = std::max(worst, std::abs(det2(tp.t_plus) - Complex(1.0, 0.0)));
        worst = std::max(worst, std::abs(det2(tp.t_minus) - Complex(1.0, 0.0)));
    }
    return make_result("transfer.unimodular_det", worst, 1e-10);
}

inline SuiteResult transfer_symmetric_sectors(Rng& rng) {
    double worst = 0.0;
    const PhysicalParams params;
    PotentialMix mix;
    mix.symmetric = true;
    for (int it = 0; it < 10; ++it) {
        const std::size_t n = 1 + rng.index(3);
        const PotentialSpec p = random_potential(rng, n, mix);
        const EnergyPoint e =
            EnergyPoint::from_energy(Complex(rng.uniform(0.6, 4.8), 0.0), params);
        const TransferPair tp = assemble_transfer(p, e, params);
        const ReducedTransferPair rt = reduce(tp);
        worst = std::max(worst, max_abs_diff(tp.t_plus, tp.t_minus));
        // reduced sectors swap the incoming/outgoing index roles
        const Block2Matrix swapped{rt.tt_plus.b22, rt.tt_plus.b21, rt.tt_plus.b12,
                                   rt.tt_plus.b11};
        worst = std::max(worst, max_abs_diff(rt.tt_minus, swapped));
    }
    return make_result("transfer.symmetric_sectors", worst, 1e-12);
}

inline SuiteResult transfer_ode_order(Rng&) {
    const PhysicalParams params;
    const EnergyPoint e = EnergyPoint::from_energy(Complex(1.0, 0.0), params);
    AnalyticSegment seg;
    seg.z_start = 0.0;
    seg.z_end = std::acos(-1.0);
    seg.n = 1;
    seg.entries.push_back(Expression::parse("-1"));
    ChannelMatrix v0(1);
    v0(0, 0) = Complex(-1.0, 0.0);
    const Block2Matrix exact =
        constant_segment_transfer({seg.z_start, seg.z_end, v0}, e, params, Sector::Retarded);
    double err[3];
    std::size_t steps = 16;
    for (int k = 0; k < 3; ++k, steps *= 2)
        err[k] = max_abs_diff(ode_transfer(seg, e, params, Sector::Retarded, steps), exact);
    const double o1 = std::log2(err[0] / err[1]);
    const double o2 = std::log2(err[1] / err[2]);
    const double worst = std::max(std::abs(o1 - 4.0), std::abs(o2 - 4.0));
    return make_result("transfer.ode_vs_closed_form_order4", worst, 0.3);
}

inline SuiteResult transfer_reduce_affine(Rng& rng) {
    double worst = 0.0;
    const PhysicalParams params;
    for (int it = 0; it < 10; ++it) {
        const std::size_t n = 1 + rng.index(3);
        const Block2Matrix d{random_matrix(rng, n, 1.0), random_matrix(rng, n, 1.0),
                             random_matrix(rng, n, 1.0), random_matrix(rng, n, 1.0)};
        const EnergyPoint e =
            EnergyPoint::from_energy(Complex(rng.uniform(0.3, 4.0), 0.0), params);
        auto deviation = [&](double a) {
            TransferPair tp;
            tp.energy = e;
            tp.t_plus = Block2Matrix::identity(n) + Complex(a, 0.0) * d;
            tp.t_minus = tp.t_plus;
            return reduce(tp).tt_plus - Block2Matrix::identity(n);
        };
        const Block2Matrix d1 = deviation(0.25);
        const Block2Matrix d2 = deviation(0.5);
        worst = std::max(worst, max_abs_diff(d2, Complex(2.0, 0.0) * d1) /
                                    std::max(1e-30, max_norm(d2)));
    }
    return make_result("transfer.reduce_affine", worst, 1e-8);
}

inline SuiteResult transfer_delta_limit(Rng& rng) {
    double worst = 0.0;
    const PhysicalParams params;
    const EnergyPoint e = EnergyPoint::from_energy(Complex(1.0, 0.0), params);
    for (int it = 0; it < 8; ++it) {
        ChannelMatrix g(1);
        g(0, 0) = rng.box(1.5);
        DeltaSpike d{0.0, g};
        const Block2Matrix exact = delta_transfer(d, params, Sector::Retarded);
        auto err_at = [&](double w) {
            ChannelMatrix v = (Complex(1.0 / w, 0.0)) * g;
            return max_abs_diff(
                constant_segment_transfer({0.0, w, v}, e, params, Sector::Retarded), exact);
        };
        const double ratio = err_at(0.01) / err_at(0.02);
        worst = std::max(worst, std::abs(ratio - 0.5));
    }
    return make_result("transfer.delta_limit", worst, 0.2);
}

struct EnsembleResiduals {
    double duality = 0.0;
    double sum_rule = 0.0;
    double routes = 0.0;
    double reciprocal = 0.0;
};

inline EnsembleResiduals scattering_ensemble(Rng& rng, int instances) {
    EnsembleResiduals res;
    const PhysicalParams params;
    const Tolerances tol;
    for (int it = 0; it < instances; ++it) {
        const std::size_t n = 1 + rng.index(3);
        const PotentialSpec p = random_potential(rng, n);
        const EnergyPoint e =
            EnergyPoint::from_energy(Complex(rng.uniform(0.6, 4.8), 0.0), params);
        try {
            const ReducedTransferPair rt = reduce(assemble_transfer(p, e, params));
            const SMatrixPair sp = s_from_reduced(rt, tol);
            const ScatteringCoefficients co = coefficients(sp, rt, tol);
            res.duality = std::max(res.duality, sp.duality_residual);
            res.sum_rule = std::max(res.sum_rule, co.sum_rule_residual());
            res.routes = std::max(res.routes, std::max(sp.route_discrepancy, co.route_residual));

            // Swap roles: rebuild S^(-) = (S^(+) ^-1)^T from S^(+) alone and
            // recompute the coefficients.
            const Block2Matrix s_minus_rec =
                block_from_dense(transpose(invert(to_dense(sp.s_plus), tol.invert)));
            double rec = 0.0;
            rec = std::max(rec, max_abs_diff(transpose(s_minus_rec.b11) * sp.s_plus.b11, co.t1));
            rec = std::max(rec, max_abs_diff(transpose(s_minus_rec.b22) * sp.s_plus.b22, co.t2));
            rec = std::max(rec, max_abs_diff(transpose(s_minus_rec.b21) * sp.s_plus.b21, co.r1));
            rec = std::max(rec, max_abs_diff(transpose(s_minus_rec.b12) * sp.s_plus.b12, co.r2));
            res.reciprocal = std::max(res.reciprocal, rec);
        } catch (const SingularMatrix&) {
            continue;  // vanishing probability; a singular draw is not a failure
        } catch (const SpectralSingularity&) {
            continue;
        }
    }
    return res;
}

inline SuiteResult scattering_hermitian(Rng& rng) {
    double worst = 0.0;
    const PhysicalParams params;  // hbar = 1, M = 1/2
    const Tolerances tol;
    auto t1_of_well = [&](double v0, double w, double energy) {
        ChannelMatrix v(1);
        v(0, 0) = Complex(v0, 0.0);
        PotentialSpec p(1, 0.0, w, {ConstantSegment{0.0, w, v}});
        const EnergyPoint e = EnergyPoint::from_energy(Complex(energy, 0.0), params);
        const ReducedTransferPair rt = reduce(assemble_transfer(p, e, params));
        const SMatrixPair sp = s_from_reduced(rt, tol);
        return coefficients(sp, rt, tol).t1(0, 0);
    };

    const double pi = std::acos(-1.0);
    struct Case {
        double v0, w, e;
    };
    std::vector<Case> cases = {{-1.0, pi, 1.0}};
    for (int it = 0; it < 6; ++it)
        cases.push_back({-rng.uniform(0.2, 2.0), rng.uniform(0.5, 3.0), rng.uniform(0.2, 5.0)});
    for (const Case& c : cases) {
        const Complex t1 = t1_of_well(c.v0, c.w, c.e);
        worst = std::max(worst, std::abs(t1.imag()));
        worst = std::max(worst, std::abs(t1.real() - textbook_well_transmission(c.e, c.v0, c.w)));
    }
    for (int k = 0; k < 40; ++k) {
        const double energy = 0.1 + (10.0 - 0.1) * static_cast<double>(k) / 39.0;
        const Complex t1 = t1_of_well(-1.0, pi, energy);
        worst = std::max(worst, std::max(0.0, t1.real() - 1.0));
        worst = std::max(worst, std::max(0.0, -t1.real()));
    }
    return make_result("scattering.hermitian_reduction", worst, 1e-8);
}

inline PotentialSpec gaussian_potential(double amp_re, double amp_im) {
    AnalyticSegment seg;
    seg.z_start = 0.0;
    seg.z_end = 4.0;
    seg.n = 1;
    seg.entries.push_back(Expression::parse("(" + fmtnum(amp_re) + "+" + fmtnum(amp_im) +
                                            "*i)*exp(-(z-2)^2)"));
    return PotentialSpec(1, 0.0, 4.0, {std::move(seg)});
}

inline SuiteResult dynamics_norm_free(Rng&) {
    const PhysicalParams params;
    PotentialSpec p(1, 0.0, 4.0, {});
    FieldPair fp = make_gaussian_pair(1, 4.0, 256, {1.6, 0.3, 5.0}, {1.6, 0.3, -5.0});
    const EvolveResult res = evolve(fp, p, params, 2e-3, 200);
    double drift = 0.0;
    for (const auto& r : res.records)
        drift = std::max(drift, std::abs(r.norm - res.records.front().norm));
    return make_result("dynamics.norm_conservation_free", drift, 1e-12);
}

inline SuiteResult dynamics_norm_nh(Rng&) {
    const PhysicalParams params;
    const PotentialSpec p = gaussian_potential(0.0, 0.5);
    FieldPair fp = make_gaussian_pair(1, 4.0, 256, {1.6, 0.3, 5.0}, {1.6, 0.3, -5.0});
    const EvolveResult res = evolve(fp, p, params, 2e-3, 200);
    double drift = 0.0;
    for (const auto& r : res.records)
        drift = std::max(drift, std::abs(r.norm - res.records.front().norm));
    return make_result("dynamics.norm_conservation_nh", drift, 1e-10);
}

// Interior residual of d_t rho + d_z j = 0 between two recorded steps, with
// time-averaged fields in the current.
inline double continuity_residual(const FieldPair& a, const FieldPair& b, double dt,
                                  const PhysicalParams& params) {
    const std::size_t m = a.points;
    const double dz = a.dz();
    const Complex pref =
        Complex(params.hbar2_over_2m(), 0.0) / (Complex(0.0, 1.0) * Complex(params.hbar, 0.0));
    auto mid = [&](const FieldPair& f, const FieldPair& g, std::size_t j, bool left) {
        return 0.5 * ((left ? f.l(j, 0) : f.r(j, 0)) + (left ? g.l(j, 0) : g.r(j, 0)));
    };
    auto current_at = [&](std::size_t j) {
        const Complex dpsi_r = (mid(a, b, j + 1, false) - mid(a, b, j - 1, false)) /
                               Complex(2.0 * dz, 0.0);
        const Complex dpsi_l = (mid(a, b, j + 1, true) - mid(a, b, j - 1, true)) /
                               Complex(2.0 * dz, 0.0);
        return pref * (mid(a, b, j, true) * dpsi_r - dpsi_l * mid(a, b, j, false));
    };
    double worst = 0.0;
    for (std::size_t j = 2; j + 2 < m; ++j) {
        const Complex drho = (b.l(j, 0) * b.r(j, 0) - a.l(j, 0) * a.r(j, 0)) / Complex(dt, 0.0);
        const Complex dj = (current_at(j + 1) - current_at(j - 1)) / Complex(2.0 * dz, 0.0);
        worst = std::max(worst, std::abs(drho + dj));
    }
    return worst;
}

inline SuiteResult dynamics_continuity(Rng&) {
    const PhysicalParams params;
    const PotentialSpec p = gaussian_potential(0.4, 0.0);
    auto residual_at = [&](std::size_t points, double dt, std::size_t steps) {
        FieldPair fp = make_gaussian_pair(1, 4.0, points, {1.4, 0.35, 4.0}, {1.4, 0.35, -4.0});
        std::vector<FieldPair> keep;
        EvolveOptions opts;
        opts.observer = [&](const FieldPair& state) {
            if (keep.size() < 2 && state.time >= dt * static_cast<double>(steps / 2))
                keep.push_back(state);
        };
        (void)evolve(fp, p, params, dt, steps, opts);
        return continuity_residual(keep.at(0), keep.at(1), dt, params);
    };
    const double coarse = residual_at(129, 4e-3, 30);
    const double fine = residual_at(257, 2e-3, 60);
    const double ratio = coarse / fine;
    return make_result("dynamics.discrete_continuity_order2", std::abs(std::log2(ratio) - 2.0),
                       0.8);
}

inline SuiteResult dynamics_stationary_exact(Rng& rng) {
    const PhysicalParams params;
    double worst = 0.0;
    for (int it = 0; it < 6; ++it) {
        ChannelMatrix g(1), v(1);
        g(0, 0) = rng.box(1.5);
        v(0, 0) = rng.box(0.8);
        PotentialSpec p(1, 0.0, 3.0,
                        {ConstantSegment{0.4, 1.2, v}, DeltaSpike{1.8, g}});
        const EnergyPoint e =
            EnergyPoint::from_energy(Complex(rng.uniform(0.5, 4.0), 0.0), params);
        const StationaryField sf = solve_stationary(p, e, params, Incidence::Left, 512);
        worst = std::max(worst, current_constancy(sf));
    }
    return make_result("dynamics.stationary_current_exact", worst, 1e-8);
}

inline SuiteResult dynamics_stationary_ode(Rng&) {
    const PhysicalParams params;
    const PotentialSpec p = gaussian_potential(0.0, 0.3);
    const EnergyPoint e = EnergyPoint::from_energy(Complex(1.0, 0.0), params);
    const StationaryField sf = solve_stationary(p, e, params, Incidence::Left, 2048);
    return make_result("dynamics.stationary_current_ode", current_constancy(sf), 1e-6);
}

inline SuiteResult dynamics_hermitian_pairing(Rng&) {
    const PhysicalParams params;
    ChannelMatrix v(1);
    v(0, 0) = Complex(-0.8, 0.0);
    PotentialSpec p(1, 1.0, 3.0, {ConstantSegment{1.0, 3.0, v}});
    FieldPair fp = make_gaussian_pair(1, 4.0, 256, {1.2, 0.3, 4.0}, {1.2, 0.3, -4.0});
    const EvolveResult res = evolve(fp, p, params, 2e-3, 100);
    double worst = 0.0;
    for (std::size_t j = 0; j < res.final_state.points; ++j)
        worst = std::max(worst,
                         std::abs(res.final_state.l(j, 0) - std::conj(res.final_state.r(j, 0))));
    return make_result("dynamics.hermitian_conjugate_pairing", worst, 1e-10);
}

inline SuiteResult dynamics_contour(Rng&) {
    const PhysicalParams params;
    const PotentialSpec p = gaussian_potential(0.0, 0.3);
    const EnergyPoint e = EnergyPoint::from_energy(Complex(1.0, 0.0), params);
    const StationaryField on_axis = solve_stationary(p, e, params, Incidence::Left, 2048);
    const Contour bow = Contour::bowed(0.0, 4.0, Complex(0.0, 0.3));
    const StationaryField off_axis =
        solve_stationary(p, e, params, Incidence::Left, bow, 2048);
    const double diff = std::abs(current(on_axis, on_axis.size() / 2) -
                                 current(off_axis, off_axis.size() / 2));
    return make_result("dynamics.contour_invariance", diff, 1e-5);
}

}  // namespace detail

inline std::vector<SuiteResult> run_verification(std::uint64_t seed) {
    std::vector<SuiteResult> out;
    auto rng_for = [&](std::uint64_t salt) {
        return Rng(seed * 0x9E3779B97F4A7C15ull + salt * 0xBF58476D1CE4E5B9ull + 1ull);
    };

    {
        Rng r = rng_for(1);
        out.push_back(detail::invert_roundtrip(r));
    }
    {
        Rng r = rng_for(2);
        out.push_back(detail::block_mul_associativity(r));
    }
    {
        Rng r = rng_for(3);
        out.push_back(detail::transpose_product(r));
    }
    {
        Rng r = rng_for(4);
        out.push_back(detail::potential_involution(r));
    }
    {
        Rng r = rng_for(5);
        out.push_back(detail::potential_evaluate_transpose(r));
    }
    {
        Rng r = rng_for(6);
        out.push_back(detail::transfer_unimodular(r));
    }
    {
        Rng r = rng_for(7);
        out.push_back(detail::transfer_symmetric_sectors(r));
    }
    {
        Rng r = rng_for(8);
        out.push_back(detail::transfer_ode_order(r));
    }
    {
        Rng r = rng_for(9);
        out.push_back(detail::transfer_reduce_affine(r));
    }
    {
        Rng r = rng_for(10);
        out.push_back(detail::transfer_delta_limit(r));
    }
    {
        Rng r = rng_for(11);
        const detail::EnsembleResiduals res = detail::scattering_ensemble(r, 24);
        out.push_back(detail::make_result("scattering.duality", res.duality, 1e-9));
        out.push_back(detail::make_result("scattering.flux_sum_rule", res.sum_rule, 1e-9));
        out.push_back(detail::make_result("scattering.route_agreement", res.routes, 1e-9));
        out.push_back(
            detail::make_result("scattering.reciprocal_transpose", res.reciprocal, 1e-9));
    }
    {
        Rng r = rng_for(12);
        out.push_back(detail::scattering_hermitian(r));
    }
    {
        Rng r = rng_for(13);
        out.push_back(detail::dynamics_norm_free(r));
        out.push_back(detail::dynamics_norm_nh(r));
        out.push_back(detail::dynamics_continuity(r));
        out.push_back(detail::dynamics_stationary_exact(r));
        out.push_back(detail::dynamics_stationary_ode(r));
        out.push_back(detail::dynamics_hermitian_pairing(r));
        out.push_back(detail::dynamics_contour(r));
    }
    return out;
}

}  // namespace nhqs::verify

#endif  // NHQS_VERIFY_HPP
