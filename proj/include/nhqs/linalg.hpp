// Dense complex linear algebra over scattering channels: n x n matrices and
// the 2x2 block matrices the transfer formalism is built from.  Channel
// counts are desk scale (n <= ~8), so everything is direct and dense.
#ifndef NHQS_LINALG_HPP
#define NHQS_LINALG_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "nhqs/errors.hpp"

namespace nhqs {

using Complex = std::complex<double>;

inline bool is_finite(Complex v) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
}

constexpr double kDefaultInvertTol = 1e-12;

// Square complex matrix over channel space, row-major.  Treated as an
// immutable value everywhere: operations return fresh matrices.
class ChannelMatrix {
public:
    ChannelMatrix() = default;
    explicit ChannelMatrix(std::size_t n) : n_(n), a_(n * n, Complex(0.0, 0.0)) {}

    static ChannelMatrix identity(std::size_t n) {
        ChannelMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
    static ChannelMatrix zero(std::size_t n) { return ChannelMatrix(n); }
    static ChannelMatrix scalar(std::size_t n, Complex value) {
        ChannelMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = value;
        return m;
    }

    std::size_t size() const { return n_; }

    Complex& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    Complex operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

    bool finite() const {
        for (const Complex& v : a_)
            if (!is_finite(v)) return false;
        return true;
    }

    ChannelMatrix& operator+=(const ChannelMatrix& o);
    ChannelMatrix& operator-=(const ChannelMatrix& o);
    ChannelMatrix& operator*=(Complex s) {
        for (Complex& v : a_) v *= s;
        return *this;
    }

private:
    std::size_t n_ = 0;
    std::vector<Complex> a_;
};

inline void require_same_size(const ChannelMatrix& a, const ChannelMatrix& b,
                              const char* what) {
    if (a.size() != b.size())
        throw DimensionMismatch(std::string(what) + ": " + std::to_string(a.size()) +
                                " vs " + std::to_string(b.size()));
}

inline ChannelMatrix& ChannelMatrix::operator+=(const ChannelMatrix& o) {
    require_same_size(*this, o, "matrix add");
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
    return *this;
}

inline ChannelMatrix& ChannelMatrix::operator-=(const ChannelMatrix& o) {
    require_same_size(*this, o, "matrix subtract");
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
    return *this;
}

inline ChannelMatrix operator+(ChannelMatrix a, const ChannelMatrix& b) { return a += b; }
inline ChannelMatrix operator-(ChannelMatrix a, const ChannelMatrix& b) { return a -= b; }
inline ChannelMatrix operator*(ChannelMatrix a, Complex s) { return a *= s; }
inline ChannelMatrix operator*(Complex s, ChannelMatrix a) { return a *= s; }
inline ChannelMatrix operator-(ChannelMatrix a) { return a *= Complex(-1.0, 0.0); }

inline ChannelMatrix operator*(const ChannelMatrix& a, const ChannelMatrix& b) {
    require_same_size(a, b, "matrix multiply");
    const std::size_t n = a.size();
    ChannelMatrix c(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const Complex aik = a(i, k);
            if (aik == Complex(0.0, 0.0)) continue;
            for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

inline std::vector<Complex> mat_vec(const ChannelMatrix& a, const std::vector<Complex>& x) {
    if (a.size() != x.size())
        throw DimensionMismatch("mat_vec: " + std::to_string(a.size()) + " vs " +
                                std::to_string(x.size()));
    const std::size_t n = a.size();
    std::vector<Complex> y(n, Complex(0.0, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) y[i] += a(i, j) * x[j];
    return y;
}

inline ChannelMatrix transpose(const ChannelMatrix& a) {
    const std::size_t n = a.size();
    ChannelMatrix t(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) t(j, i) = a(i, j);
    return t;
}

// Largest entry magnitude (max norm); the norm used by all residual checks.
inline double max_norm(const ChannelMatrix& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a(i, j)));
    return m;
}

inline double max_abs_diff(const ChannelMatrix& a, const ChannelMatrix& b) {
    require_same_size(a, b, "matrix compare");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j)
            m = std::max(m, std::abs(a(i, j) - b(i, j)));
    return m;
}

// Determinant via partially pivoted elimination on a scratch copy.
inline Complex det(const ChannelMatrix& a) {
    const std::size_t n = a.size();
    if (n == 0) return Complex(1.0, 0.0);
    ChannelMatrix u = a;
    Complex d(1.0, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        double best = std::abs(u(k, k));
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(u(i, k)) > best) {
                best = std::abs(u(i, k));
                p = i;
            }
        if (best == 0.0) return Complex(0.0, 0.0);
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(u(k, j), u(p, j));
            d = -d;
        }
        d *= u(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            const Complex f = u(i, k) / u(k, k);
            for (std::size_t j = k; j < n; ++j) u(i, j) -= f * u(k, j);
        }
    }
    return d;
}

// Inverse by Gauss-Jordan elimination with partial pivoting.  A pivot that
// collapses below tol relative to the (growth-tracked) matrix scale raises
// SingularMatrix; on a reduced-transfer diagonal block that condition is the
// numerical signature of a spectral singularity.  The returned B satisfies
// max_norm(A*B - 1) <= tol * max_norm(A) * max_norm(B) * n.
inline ChannelMatrix invert(const ChannelMatrix& a, double tol = kDefaultInvertTol) {
    const std::size_t n = a.size();
    if (n == 0) throw DimensionMismatch("invert: empty matrix");
    if (tol <= 0.0) throw ValidationError("invert: tol must be positive");
    if (!a.finite()) throw NonFiniteValue("invert: non-finite entry in input");

    const double scale0 = max_norm(a);
    if (scale0 == 0.0) throw SingularMatrix("invert: zero matrix");

    ChannelMatrix w = a;
    ChannelMatrix b = ChannelMatrix::identity(n);
    double grown = scale0;

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        double best = std::abs(w(k, k));
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(w(i, k)) > best) {
                best = std::abs(w(i, k));
                p = i;
            }
        if (best <= tol * static_cast<double>(n) * grown)
            throw SingularMatrix("invert: pivot " + std::to_string(k) +
                                 " below tolerance (rank deficient)");
        if (p != k)
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(w(k, j), w(p, j));
                std::swap(b(k, j), b(p, j));
            }
        const Complex piv = w(k, k);
        for (std::size_t j = 0; j < n; ++j) {
            w(k, j) /= piv;
            b(k, j) /= piv;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k) continue;
            const Complex f = w(i, k);
            if (f == Complex(0.0, 0.0)) continue;
            for (std::size_t j = 0; j < n; ++j) {
                w(i, j) -= f * w(k, j);
                b(i, j) -= f * b(k, j);
            }
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) grown = std::max(grown, std::abs(w(i, j)));
    }

    const double resid = max_abs_diff(a * b, ChannelMatrix::identity(n));
    const double bound = tol * std::max(1.0, max_norm(a) * max_norm(b)) * static_cast<double>(n);
    if (!(resid <= bound))
        throw SingularMatrix("invert: residual " + std::to_string(resid) +
                             " exceeds bound (effectively singular)");
    return b;
}

// 2x2 block matrix of equal-sized channel blocks; carries transfer and
// S-matrices.
struct Block2Matrix {
    ChannelMatrix b11, b12, b21, b22;

    Block2Matrix() = default;
    Block2Matrix(ChannelMatrix m11, ChannelMatrix m12, ChannelMatrix m21, ChannelMatrix m22)
        : b11(std::move(m11)), b12(std::move(m12)), b21(std::move(m21)), b22(std::move(m22)) {
        if (b11.size() != b12.size() || b11.size() != b21.size() || b11.size() != b22.size())
            throw DimensionMismatch("Block2Matrix: blocks differ in size");
    }

    static Block2Matrix identity(std::size_t n) {
        return {ChannelMatrix::identity(n), ChannelMatrix::zero(n), ChannelMatrix::zero(n),
                ChannelMatrix::identity(n)};
    }
    static Block2Matrix zero(std::size_t n) {
        return {ChannelMatrix::zero(n), ChannelMatrix::zero(n), ChannelMatrix::zero(n),
                ChannelMatrix::zero(n)};
    }

    std::size_t channels() const { return b11.size(); }

    bool finite() const {
        return b11.finite() && b12.finite() && b21.finite() && b22.finite();
    }
};

inline Block2Matrix block_mul(const Block2Matrix& a, const Block2Matrix& b) {
    if (a.channels() != b.channels())
        throw DimensionMismatch("block_mul: channel counts " + std::to_string(a.channels()) +
                                " vs " + std::to_string(b.channels()));
    return {a.b11 * b.b11 + a.b12 * b.b21, a.b11 * b.b12 + a.b12 * b.b22,
            a.b21 * b.b11 + a.b22 * b.b21, a.b21 * b.b12 + a.b22 * b.b22};
}

// Transpose of the full 2n x 2n matrix: diagonal blocks transpose in place,
// off-diagonal blocks swap.
inline Block2Matrix transpose(const Block2Matrix& a) {
    return {transpose(a.b11), transpose(a.b21), transpose(a.b12), transpose(a.b22)};
}

inline Block2Matrix operator+(const Block2Matrix& a, const Block2Matrix& b) {
    return {a.b11 + b.b11, a.b12 + b.b12, a.b21 + b.b21, a.b22 + b.b22};
}

inline Block2Matrix operator-(const Block2Matrix& a, const Block2Matrix& b) {
    return {a.b11 - b.b11, a.b12 - b.b12, a.b21 - b.b21, a.b22 - b.b22};
}

inline Block2Matrix operator*(Complex s, const Block2Matrix& a) {
    return {s * a.b11, s * a.b12, s * a.b21, s * a.b22};
}

inline double max_norm(const Block2Matrix& a) {
    return std::max(std::max(max_norm(a.b11), max_norm(a.b12)),
                    std::max(max_norm(a.b21), max_norm(a.b22)));
}

inline double max_abs_diff(const Block2Matrix& a, const Block2Matrix& b) {
    return std::max(std::max(max_abs_diff(a.b11, b.b11), max_abs_diff(a.b12, b.b12)),
                    std::max(max_abs_diff(a.b21, b.b21), max_abs_diff(a.b22, b.b22)));
}

inline ChannelMatrix to_dense(const Block2Matrix& a) {
    const std::size_t n = a.channels();
    ChannelMatrix full(2 * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            full(i, j) = a.b11(i, j);
            full(i, j + n) = a.b12(i, j);
            full(i + n, j) = a.b21(i, j);
            full(i + n, j + n) = a.b22(i, j);
        }
    return full;
}

inline Block2Matrix block_from_dense(const ChannelMatrix& m) {
    if (m.size() % 2 != 0) throw DimensionMismatch("block_from_dense: odd size");
    const std::size_t n = m.size() / 2;
    Block2Matrix a = Block2Matrix::zero(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            a.b11(i, j) = m(i, j);
            a.b12(i, j) = m(i, j + n);
            a.b21(i, j) = m(i + n, j);
            a.b22(i, j) = m(i + n, j + n);
        }
    return a;
}

// Determinant of the full 2n x 2n matrix.  Used by the n=1 unimodularity
// checks and the singularity scan.
inline Complex det2(const Block2Matrix& a) { return det(to_dense(a)); }

}  // namespace nhqs

#endif  // NHQS_LINALG_HPP
