#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "nhqs/linalg.hpp"

using namespace nhqs;

namespace {

// Deterministic uniform doubles straight from the engine bits.
struct TestRng {
    std::mt19937_64 eng;
    explicit TestRng(std::uint64_t seed) : eng(seed) {}
    double unit() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * unit(); }
    Complex box(double r) { return {uniform(-r, r), uniform(-r, r)}; }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(eng() % n); }
};

ChannelMatrix rand_matrix(TestRng& rng, std::size_t n, double scale = 1.0) {
    ChannelMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = rng.box(scale);
    return m;
}

Block2Matrix rand_block(TestRng& rng, std::size_t n) {
    return {rand_matrix(rng, n), rand_matrix(rng, n), rand_matrix(rng, n), rand_matrix(rng, n)};
}

ChannelMatrix mat1(Complex v) {
    ChannelMatrix m(1);
    m(0, 0) = v;
    return m;
}

}  // namespace

TEST_CASE("invert: identity and scalar reciprocal") {
    CHECK(max_abs_diff(invert(ChannelMatrix::identity(2)), ChannelMatrix::identity(2)) == 0.0);

    // 1/(1-i) = (1+i)/2
    const ChannelMatrix inv = invert(mat1(Complex(1.0, -1.0)));
    CHECK(std::abs(inv(0, 0) - Complex(0.5, 0.5)) < 1e-15);
}

TEST_CASE("invert: upper triangular 2x2") {
    ChannelMatrix a(2);
    a(0, 0) = 1.0;
    a(0, 1) = Complex(0.0, 1.0);
    a(1, 1) = 1.0;
    const ChannelMatrix b = invert(a);
    // oracle: multiplying back must give the identity
    CHECK(max_abs_diff(a * b, ChannelMatrix::identity(2)) < 1e-15);
    // frozen closed form [[1, -i], [0, 1]]
    CHECK(std::abs(b(0, 0) - Complex(1.0, 0.0)) < 1e-15);
    CHECK(std::abs(b(0, 1) - Complex(0.0, -1.0)) < 1e-15);
    CHECK(std::abs(b(1, 0)) < 1e-15);
    CHECK(std::abs(b(1, 1) - Complex(1.0, 0.0)) < 1e-15);
}

TEST_CASE("invert: singular and invalid input") {
    ChannelMatrix rank1(2);
    rank1(0, 0) = rank1(0, 1) = rank1(1, 0) = rank1(1, 1) = 1.0;
    CHECK_THROWS_AS(invert(rank1), SingularMatrix);
    CHECK_THROWS_AS(invert(ChannelMatrix::zero(3)), SingularMatrix);
    CHECK_THROWS_AS(invert(mat1(1.0), -1.0), ValidationError);

    ChannelMatrix bad(1);
    bad(0, 0) = Complex(std::numeric_limits<double>::infinity(), 0.0);
    CHECK_THROWS_AS(invert(bad), NonFiniteValue);
}

TEST_CASE("invert: double inversion returns the original (property)") {
    TestRng rng(71);
    for (int it = 0; it < 60; ++it) {
        const std::size_t n = 1 + rng.index(4);
        const ChannelMatrix a = rand_matrix(rng, n, rng.uniform(0.3, 3.0));
        ChannelMatrix b;
        try {
            b = invert(a);
        } catch (const SingularMatrix&) {
            continue;
        }
        if (max_norm(a) * max_norm(b) * static_cast<double>(n) > 1e6) continue;
        CHECK(max_abs_diff(invert(b), a) <= 1e-10 * max_norm(a));
    }
}

TEST_CASE("block_mul: identity and delta composition") {
    const Block2Matrix id = Block2Matrix::identity(1);
    auto delta_like = [](Complex g) {
        Block2Matrix t = Block2Matrix::identity(1);
        t.b21 = mat1(g);
        return t;
    };
    CHECK(max_abs_diff(block_mul(id, id), id) == 0.0);
    CHECK(max_abs_diff(block_mul(delta_like(2.0), id), delta_like(2.0)) == 0.0);
    // [[1,0],[g2,1]] [[1,0],[g1,1]] = [[1,0],[g1+g2,1]]
    const Block2Matrix prod = block_mul(delta_like(Complex(0.0, 1.5)), delta_like(2.0));
    CHECK(max_abs_diff(prod, delta_like(Complex(2.0, 1.5))) < 1e-15);
}

TEST_CASE("block_mul: associativity and dimension checks (property)") {
    TestRng rng(123);
    for (int it = 0; it < 40; ++it) {
        const std::size_t n = 1 + rng.index(3);
        const Block2Matrix a = rand_block(rng, n), b = rand_block(rng, n), c = rand_block(rng, n);
        const Block2Matrix lhs = block_mul(block_mul(a, b), c);
        const Block2Matrix rhs = block_mul(a, block_mul(b, c));
        CHECK(max_abs_diff(lhs, rhs) <= 1e-12 * std::max(1.0, max_norm(lhs)));
    }
    CHECK_THROWS_AS(block_mul(Block2Matrix::identity(2), Block2Matrix::identity(3)),
                    DimensionMismatch);
}

TEST_CASE("transpose reverses block products (property)") {
    TestRng rng(321);
    for (int it = 0; it < 40; ++it) {
        const std::size_t n = 1 + rng.index(3);
        const Block2Matrix a = rand_block(rng, n), b = rand_block(rng, n);
        const Block2Matrix lhs = transpose(block_mul(a, b));
        const Block2Matrix rhs = block_mul(transpose(b), transpose(a));
        CHECK(max_abs_diff(lhs, rhs) <= 1e-14 * std::max(1.0, max_norm(lhs)));
    }
}

TEST_CASE("determinants and dense round-trip") {
    ChannelMatrix a(2);
    a(0, 0) = 1.0;
    a(0, 1) = 2.0;
    a(1, 0) = 3.0;
    a(1, 1) = 4.0;
    CHECK(std::abs(det(a) - Complex(-2.0, 0.0)) < 1e-14);
    CHECK(std::abs(det2(Block2Matrix::identity(3)) - Complex(1.0, 0.0)) < 1e-14);

    TestRng rng(9);
    const Block2Matrix blk = rand_block(rng, 2);
    CHECK(max_abs_diff(block_from_dense(to_dense(blk)), blk) == 0.0);
}

TEST_CASE("mat_vec basics") {
    ChannelMatrix a(2);
    a(0, 0) = 1.0;
    a(0, 1) = Complex(0.0, 1.0);
    a(1, 0) = 0.0;
    a(1, 1) = 2.0;
    const std::vector<Complex> x{Complex(1.0, 0.0), Complex(0.0, 1.0)};
    const std::vector<Complex> y = mat_vec(a, x);
    CHECK(std::abs(y[0] - Complex(0.0, 0.0)) < 1e-15);  // 1 + i*i = 0
    CHECK(std::abs(y[1] - Complex(0.0, 2.0)) < 1e-15);
    CHECK_THROWS_AS(mat_vec(a, std::vector<Complex>{Complex(1.0, 0.0)}), DimensionMismatch);
}
