#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "nhqs/scattering.hpp"
#include "nhqs/verify.hpp"

using namespace nhqs;

namespace {

const PhysicalParams kParams;  // hbar = 1, M = 1/2
const double kPi = std::acos(-1.0);

ChannelMatrix mat1(Complex v) {
    ChannelMatrix m(1);
    m(0, 0) = v;
    return m;
}

EnergyPoint at_energy(double e) {
    return EnergyPoint::from_energy(Complex(e, 0.0), kParams);
}

PotentialSpec scalar_delta(Complex g, double window = 0.0) {
    return PotentialSpec(1, -window, window, {DeltaSpike{0.0, mat1(g)}});
}

SMatrixPair s_of(const PotentialSpec& p, double e) {
    return s_from_reduced(reduce(assemble_transfer(p, at_energy(e), kParams)));
}

ScatteringCoefficients coeffs_of(const PotentialSpec& p, double e) {
    const ReducedTransferPair rt = reduce(assemble_transfer(p, at_energy(e), kParams));
    return coefficients(s_from_reduced(rt), rt);
}

// Closed-form bilinear transmittivity of a scalar delta (2M/hbar^2 = 1):
// T1 = [(1 - g/(2 i k0)) (1 + g/(2 i k0))]^-1.
Complex delta_t1_oracle(Complex g, double k0) {
    const Complex x = g / (Complex(0.0, 2.0) * Complex(k0, 0.0));
    return Complex(1.0, 0.0) / ((Complex(1.0, 0.0) - x) * (Complex(1.0, 0.0) + x));
}

}  // namespace

TEST_CASE("s_from_reduced: identity window") {
    ReducedTransferPair rt;
    rt.energy = at_energy(1.0);
    rt.tt_plus = Block2Matrix::identity(2);
    rt.tt_minus = Block2Matrix::identity(2);
    const SMatrixPair sp = s_from_reduced(rt);
    CHECK(max_abs_diff(sp.s_plus, Block2Matrix::identity(2)) < 1e-15);
    CHECK(max_abs_diff(sp.s_minus, Block2Matrix::identity(2)) < 1e-15);
    CHECK(sp.duality_residual < 1e-15);
    CHECK(sp.route_discrepancy < 1e-15);
    CHECK_FALSE(sp.near_singular);
}

TEST_CASE("s_from_reduced: free window gives transmission phases only") {
    const double w = 1.1;
    const PotentialSpec p(1, 0.0, w, {});
    const SMatrixPair sp = s_of(p, 4.0);  // k0 = 2
    const Complex phase = std::exp(Complex(0.0, 2.0 * w));
    CHECK(std::abs(sp.s_plus.b11(0, 0) - phase) < 1e-13);
    CHECK(std::abs(sp.s_plus.b22(0, 0) - phase) < 1e-13);
    CHECK(std::abs(sp.s_plus.b12(0, 0)) < 1e-13);
    CHECK(std::abs(sp.s_plus.b21(0, 0)) < 1e-13);
    CHECK(sp.duality_residual < 1e-13);
}

TEST_CASE("s_from_reduced: scalar delta matches the closed form") {
    const Complex g(2.0, 0.0);
    const SMatrixPair sp = s_of(scalar_delta(g), 1.0);  // k0 = 1
    // S(+)_11 = (1 + i g/(2 k0))^-1
    const Complex expected = Complex(1.0, 0.0) / (Complex(1.0, 0.0) + Complex(0.0, 1.0) * g / 2.0);
    CHECK(std::abs(sp.s_plus.b11(0, 0) - expected) < 1e-14);
    CHECK(sp.duality_residual < 1e-13);
    CHECK(sp.route_discrepancy < 1e-13);
}

TEST_CASE("spectral singularity raises with the offending block label") {
    // g = 2i at k0 = 1 zeroes tt(+)_22 = tt(-)^T_11 exactly
    try {
        (void)s_of(scalar_delta(Complex(0.0, 2.0)), 1.0);
        FAIL("expected SpectralSingularity");
    } catch (const SpectralSingularity& e) {
        CHECK((e.block() == "tt_plus_22" || e.block() == "tt_minus_T11"));
    }
}

TEST_CASE("coefficients: scalar delta closed forms") {
    {
        const ScatteringCoefficients c = coeffs_of(scalar_delta(Complex(2.0, 0.0)), 1.0);
        CHECK(std::abs(c.t1(0, 0) - Complex(0.5, 0.0)) < 1e-13);
        CHECK(std::abs(c.r1(0, 0) - Complex(0.5, 0.0)) < 1e-13);
        CHECK(c.sum_rule_residual() < 1e-13);
        CHECK(c.route_residual < 1e-13);
    }
    {
        // purely imaginary g = i: bilinear T1 = 4/3 exceeds 1, R1 = -1/3
        const ScatteringCoefficients c = coeffs_of(scalar_delta(Complex(0.0, 1.0)), 1.0);
        CHECK(std::abs(c.t1(0, 0) - Complex(4.0 / 3.0, 0.0)) < 1e-13);
        CHECK(std::abs(c.r1(0, 0) - Complex(-1.0 / 3.0, 0.0)) < 1e-13);
    }
}

TEST_CASE("coefficients: delta oracle over random strengths (property)") {
    verify::Rng rng(2024);
    for (int it = 0; it < 50; ++it) {
        const Complex g = rng.box(2.5);
        const double e = 0.4 + 4.0 * rng.unit();
        const double k0 = std::sqrt(e);
        const Complex denom_a = Complex(1.0, 0.0) - g / (Complex(0.0, 2.0 * k0));
        const Complex denom_b = Complex(1.0, 0.0) + g / (Complex(0.0, 2.0 * k0));
        if (std::abs(denom_a) < 0.05 || std::abs(denom_b) < 0.05) continue;
        const ScatteringCoefficients c = coeffs_of(scalar_delta(g, 0.7), e);
        const Complex expected = delta_t1_oracle(g, k0);
        CHECK(std::abs(c.t1(0, 0) - expected) <= 1e-10 * std::abs(expected));
    }
}

TEST_CASE("coefficients: nilpotent two-channel delta") {
    for (double gamma : {0.5, 1.0, 2.0}) {
        ChannelMatrix g(2);
        g(0, 1) = Complex(gamma, 0.0);
        const PotentialSpec p(2, 0.0, 0.0, {DeltaSpike{0.0, g}});
        const ReducedTransferPair rt = reduce(assemble_transfer(p, at_energy(1.0), kParams));
        const SMatrixPair sp = s_from_reduced(rt);
        const ScatteringCoefficients c = coefficients(sp, rt);
        CHECK(max_abs_diff(c.t1, ChannelMatrix::identity(2)) < 1e-12);
        CHECK(max_norm(c.r1) < 1e-12);
        // the S-matrix itself still scatters between the channels
        CHECK(max_norm(sp.s_plus.b12) > 0.1);
    }
}

TEST_CASE("duality, sum rule and both routes on a random ensemble (property)") {
    verify::Rng rng(99);
    int tested = 0;
    for (int it = 0; it < 30; ++it) {
        const std::size_t n = 1 + rng.index(3);
        const PotentialSpec p = verify::random_potential(rng, n);
        const double e = rng.uniform(0.6, 4.8);
        try {
            const ReducedTransferPair rt = reduce(assemble_transfer(p, at_energy(e), kParams));
            const SMatrixPair sp = s_from_reduced(rt);
            const ScatteringCoefficients c = coefficients(sp, rt);
            CHECK(sp.duality_residual <= 1e-9);
            CHECK(c.sum_rule_residual() <= 1e-9);
            CHECK(sp.route_discrepancy <= 1e-9);
            CHECK(c.route_residual <= 1e-9);
            ++tested;
        } catch (const SpectralSingularity&) {
            continue;
        }
    }
    CHECK(tested >= 25);
}

TEST_CASE("hermitian reduction: real square well against the textbook formula") {
    // independent oracle: T = [1 + V0^2 sin^2(kappa w) / (4 E (E - V0))]^-1
    auto textbook = [](double e, double v0, double w) {
        const double kappa = std::sqrt(e - v0);
        const double s = std::sin(kappa * w);
        return 1.0 / (1.0 + v0 * v0 * s * s / (4.0 * e * (e - v0)));
    };
    const PotentialSpec well(1, 0.0, kPi, {ConstantSegment{0.0, kPi, mat1(-1.0)}});
    const ScatteringCoefficients c = coeffs_of(well, 1.0);
    CHECK(std::abs(c.t1(0, 0).imag()) < 1e-12);
    CHECK(std::abs(c.t1(0, 0).real() - textbook(1.0, -1.0, kPi)) < 1e-8);

    for (int k = 0; k < 25; ++k) {
        const double e = 0.15 + 0.4 * k;
        const Complex t1 = coeffs_of(well, e).t1(0, 0);
        CHECK(std::abs(t1.imag()) < 1e-10);
        CHECK(t1.real() >= -1e-10);
        CHECK(t1.real() <= 1.0 + 1e-10);
    }
}

TEST_CASE("scan: trivial and closed-form rows") {
    const PotentialSpec empty(1, 0.0, 1.0, {});
    const auto rows = scan(empty, kParams, {0.5, 1.0, 1.5, 2.0});
    REQUIRE(rows.size() == 4);
    for (const auto& r : rows) {
        REQUIRE(r.status == ScanStatus::Ok);
        CHECK(std::abs(r.coeffs->t1(0, 0) - Complex(1.0, 0.0)) < 1e-12);
        CHECK(r.duality_residual < 1e-12);
    }

    const auto drows = scan(scalar_delta(Complex(2.0, 0.0)), kParams, {1.0, 4.0});
    REQUIRE(drows.size() == 2);
    CHECK(std::abs(drows[0].coeffs->t1(0, 0) - Complex(0.5, 0.0)) < 1e-12);
    CHECK(std::abs(drows[1].coeffs->t1(0, 0) - Complex(0.8, 0.0)) < 1e-12);
}

TEST_CASE("scan: singular points are flagged, not fatal") {
    const auto rows = scan(scalar_delta(Complex(0.0, 2.0)), kParams, {0.5, 1.0, 2.0});
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].status == ScanStatus::Ok);
    CHECK(rows[1].status == ScanStatus::SpectralSingularityHit);
    CHECK(!rows[1].detail.empty());
    CHECK(rows[2].status == ScanStatus::Ok);
}

TEST_CASE("scan: grid preconditions") {
    const PotentialSpec empty(1, 0.0, 1.0, {});
    CHECK_THROWS_AS(scan(empty, kParams, {1.0, 1.0}), ValidationError);
    CHECK_THROWS_AS(scan(empty, kParams, {2.0, 1.0}), ValidationError);
    CHECK_THROWS_AS(scan(empty, kParams, {-1.0, 1.0}), ValidationError);
    CHECK(scan(empty, kParams, {}).empty());
}

TEST_CASE("scan: work is split across threads deterministically") {
    std::vector<double> grid;
    for (int i = 0; i < 24; ++i) grid.push_back(0.5 + 0.2 * i);
    ScanOptions serial;
    serial.threads = 1;
    ScanOptions parallel;
    parallel.threads = 4;
    const PotentialSpec p = scalar_delta(Complex(1.0, 0.7), 0.5);
    const auto a = scan(p, kParams, grid, serial);
    const auto b = scan(p, kParams, grid, parallel);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        REQUIRE(a[i].status == b[i].status);
        CHECK(max_abs_diff(a[i].coeffs->t1, b[i].coeffs->t1) == 0.0);
    }
}

TEST_CASE("find_singularities: real delta has none, imaginary deltas pinpoint") {
    // real g: |1 + i g/(2 k0)| never vanishes on the real axis
    const auto none = find_singularities(scalar_delta(Complex(2.0, 0.0)), kParams, 0.5, 2.0, 16);
    CHECK(none.energies.empty());

    // g = 2i: zero of 1 + i g / (2 k0) at k0 = 1, i.e. E = 1
    const auto one = find_singularities(scalar_delta(Complex(0.0, 2.0)), kParams, 0.5, 2.0, 33);
    REQUIRE(one.energies.size() == 1);
    CHECK(std::abs(one.energies[0] - 1.0) < 1e-8);
    CHECK(one.residuals[0] < 1e-7);

    // g = 4i: zero at k0 = 2, i.e. E = 4
    const auto four = find_singularities(scalar_delta(Complex(0.0, 4.0)), kParams, 0.5, 6.0, 64);
    REQUIRE(four.energies.size() == 1);
    CHECK(std::abs(four.energies[0] - 4.0) < 1e-7);

    CHECK_THROWS_AS(find_singularities(scalar_delta(Complex(0.0, 2.0)), kParams, 0.5, 2.0, 4),
                    ValidationError);
    CHECK_THROWS_AS(find_singularities(scalar_delta(Complex(0.0, 2.0)), kParams, -1.0, 2.0, 16),
                    ValidationError);
}
