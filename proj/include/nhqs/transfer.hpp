// Retarded/advanced transfer matrices T^(+-) for composite potentials, their
// composition across a window, and the reduction to plane-wave amplitude form
// T~^(+-).  The retarded sector propagates with V, the advanced sector with
// V^T; for symmetric potentials the two coincide.
#ifndef NHQS_TRANSFER_HPP
#define NHQS_TRANSFER_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include "nhqs/errors.hpp"
#include "nhqs/linalg.hpp"
#include "nhqs/potential.hpp"

namespace nhqs {

enum class Sector { Retarded, Advanced };

// Energy sample with its wavenumber k0 = sqrt(2ME/hbar^2), principal branch
// normalized to Re k0 > 0 (positive imaginary axis for real E < 0).
struct EnergyPoint {
    Complex energy{};
    Complex k0{};

    static EnergyPoint from_energy(Complex e, const PhysicalParams& params) {
        params.validate();
        if (e == Complex(0.0, 0.0)) throw ValidationError("energy must be nonzero");
        if (!is_finite(e)) throw NonFiniteValue("energy must be finite");
        Complex k = std::sqrt(Complex(params.two_m_over_hbar2(), 0.0) * e);
        if (k.real() < 0.0 || (k.real() == 0.0 && k.imag() < 0.0)) k = -k;
        return {e, k};
    }

    bool complex_energy() const { return energy.imag() != 0.0; }
};

struct TransferPair {
    Block2Matrix t_plus, t_minus;
    EnergyPoint energy;
    double window_lo = 0.0, window_hi = 0.0;
};

struct ReducedTransferPair {
    Block2Matrix tt_plus, tt_minus;
    EnergyPoint energy;
};

struct TransferOptions {
    std::size_t ode_steps = 2048;  // RK4 steps per analytic segment
};

// Exact transfer matrix of a delta spike: unit diagonal, lower-left block
// (2M/hbar^2) g (g^T in the advanced sector).
inline Block2Matrix delta_transfer(const DeltaSpike& s, const PhysicalParams& params,
                                   Sector sector) {
    const std::size_t n = s.strength.size();
    Block2Matrix t = Block2Matrix::identity(n);
    const ChannelMatrix g =
        sector == Sector::Retarded ? s.strength : transpose(s.strength);
    t.b21 = Complex(params.two_m_over_hbar2(), 0.0) * g;
    return t;
}

namespace detail {

// Fundamental matrix over a constant potential block, via the even/odd
// power series in X = K^2 w^2 with K^2 = (2M/hbar^2)(E 1 - V0):
//   T = [[C(X), w S(X)], [-K^2 w S(X), C(X)]],
//   C = sum (-1)^m X^m/(2m)!,  S = sum (-1)^m X^m/(2m+1)!.
// Both series are entire in X, so no branch of K is ever chosen.  For large
// ||X|| the half-width result is squared back up (the flow property of the
// fundamental matrix).
inline Block2Matrix constant_transfer_from_k2(const ChannelMatrix& k2, double width) {
    const std::size_t n = k2.size();
    std::size_t squarings = 0;
    double w = width;
    while (max_norm(k2) * w * w > 1.0) {
        w *= 0.5;
        ++squarings;
        if (squarings > 200) throw NonFiniteValue("constant segment transfer: scale overflow");
    }

    const ChannelMatrix x = (Complex(w * w, 0.0) * k2);
    ChannelMatrix c_sum = ChannelMatrix::identity(n);
    ChannelMatrix s_sum = ChannelMatrix::identity(n);
    ChannelMatrix c_term = ChannelMatrix::identity(n);
    ChannelMatrix s_term = ChannelMatrix::identity(n);
    for (std::size_t m = 1; m <= 48; ++m) {
        const double dm = static_cast<double>(m);
        c_term = c_term * x * Complex(-1.0 / ((2.0 * dm - 1.0) * (2.0 * dm)), 0.0);
        s_term = s_term * x * Complex(-1.0 / ((2.0 * dm) * (2.0 * dm + 1.0)), 0.0);
        c_sum += c_term;
        s_sum += s_term;
        if (max_norm(c_term) + max_norm(s_term) < 1e-18) break;
    }

    Block2Matrix t{c_sum, Complex(w, 0.0) * s_sum,
                   Complex(-w, 0.0) * (k2 * s_sum), c_sum};
    for (std::size_t q = 0; q < squarings; ++q) t = block_mul(t, t);
    return t;
}

}  // namespace detail

inline Block2Matrix constant_segment_transfer(const ConstantSegment& seg, const EnergyPoint& e,
                                              const PhysicalParams& params, Sector sector) {
    const double width = seg.z_end - seg.z_start;
    if (!(width > 0.0))
        throw ValidationError("constant segment transfer requires positive width");
    const std::size_t n = seg.value.size();
    const ChannelMatrix v =
        sector == Sector::Retarded ? seg.value : transpose(seg.value);
    const ChannelMatrix k2 = Complex(params.two_m_over_hbar2(), 0.0) *
                             (ChannelMatrix::scalar(n, e.energy) - v);
    return detail::constant_transfer_from_k2(k2, width);
}

// Transfer across a free stretch (V = 0); sector independent.
inline Block2Matrix free_transfer(double width, const EnergyPoint& e,
                                  const PhysicalParams& params, std::size_t n) {
    if (width == 0.0) return Block2Matrix::identity(n);
    const ChannelMatrix k2 =
        ChannelMatrix::scalar(n, Complex(params.two_m_over_hbar2(), 0.0) * e.energy);
    return detail::constant_transfer_from_k2(k2, width);
}

// Fundamental matrix of the first-order 2n-system (phi, phi')' =
// (phi', (2M/hbar^2)(V(z) - E) phi) across an analytic segment, classical
// RK4 with `steps` uniform steps and identity initial data.
inline Block2Matrix ode_transfer(const AnalyticSegment& seg, const EnergyPoint& e,
                                 const PhysicalParams& params, Sector sector,
                                 std::size_t steps) {
    if (steps < 16) throw ValidationError("ode_transfer requires steps >= 16");
    const double width = seg.z_end - seg.z_start;
    if (!(width > 0.0)) throw ValidationError("ode_transfer requires positive width");
    const std::size_t n = seg.n;
    const double c = params.two_m_over_hbar2();

    auto w_at = [&](double z) {
        ChannelMatrix v = seg.eval(Complex(z, 0.0));
        if (sector == Sector::Advanced) v = transpose(v);
        return Complex(c, 0.0) * (v - ChannelMatrix::scalar(n, e.energy));
    };
    auto rhs = [&](const ChannelMatrix& w, const Block2Matrix& y) {
        return Block2Matrix{y.b21, y.b22, w * y.b11, w * y.b12};
    };

    const double h = width / static_cast<double>(steps);
    Block2Matrix y = Block2Matrix::identity(n);
    ChannelMatrix w0 = w_at(seg.z_start);
    for (std::size_t k = 0; k < steps; ++k) {
        const double z = seg.z_start + h * static_cast<double>(k);
        const ChannelMatrix wh = w_at(z + 0.5 * h);
        const ChannelMatrix w1 = w_at(z + h);
        const Block2Matrix k1 = rhs(w0, y);
        const Block2Matrix k2 = rhs(wh, y + Complex(0.5 * h, 0.0) * k1);
        const Block2Matrix k3 = rhs(wh, y + Complex(0.5 * h, 0.0) * k2);
        const Block2Matrix k4 = rhs(w1, y + Complex(h, 0.0) * k3);
        y = y + Complex(h / 6.0, 0.0) *
                    (k1 + Complex(2.0, 0.0) * k2 + Complex(2.0, 0.0) * k3 + k4);
        if (!(max_norm(y) < 1e140) || !y.finite())
            throw NonFiniteState("ode_transfer: state overflow (growing evanescent solution)");
        w0 = w1;
    }
    return y;
}

namespace detail {

inline Block2Matrix element_transfer(const PotentialElement& el, const EnergyPoint& e,
                                     const PhysicalParams& params, Sector sector,
                                     const TransferOptions& opts) {
    if (const auto* d = std::get_if<DeltaSpike>(&el)) return delta_transfer(*d, params, sector);
    if (const auto* c = std::get_if<ConstantSegment>(&el))
        return constant_segment_transfer(*c, e, params, sector);
    return ode_transfer(std::get<AnalyticSegment>(el), e, params, sector, opts.ode_steps);
}

inline Block2Matrix sector_transfer(const PotentialSpec& p, const EnergyPoint& e,
                                    const PhysicalParams& params, Sector sector,
                                    const TransferOptions& opts) {
    const std::size_t n = p.channels();
    Block2Matrix total = Block2Matrix::identity(n);
    double cursor = p.window_lo();
    for (std::size_t idx : p.sorted_order()) {
        const auto& el = p.elements()[idx];
        const double start = element_start(el);
        if (start > cursor)
            total = block_mul(free_transfer(start - cursor, e, params, n), total);
        total = block_mul(element_transfer(el, e, params, sector, opts), total);
        cursor = std::max(cursor, element_end(el));
    }
    if (p.window_hi() > cursor)
        total = block_mul(free_transfer(p.window_hi() - cursor, e, params, n), total);
    return total;
}

}  // namespace detail

// Left-to-right ordered product over elements and the interleaved free
// stretches: T = T_m ... T_1.  The advanced factor is built from the
// transposed potential.
inline TransferPair assemble_transfer(const PotentialSpec& p, const EnergyPoint& e,
                                      const PhysicalParams& params,
                                      const TransferOptions& opts = {}) {
    params.validate();
    TransferPair tp;
    tp.energy = e;
    tp.window_lo = p.window_lo();
    tp.window_hi = p.window_hi();
    tp.t_plus = detail::sector_transfer(p, e, params, Sector::Retarded, opts);
    tp.t_minus = detail::sector_transfer(p, e, params, Sector::Advanced, opts);
    return tp;
}

namespace detail {

// T~ = 1 + (sqrt(k0)/2) [[1, s/(i k0)], [1, -s/(i k0)]] (T - 1)
//          [[1, 1], [s i k0, -s i k0]] (1/sqrt(k0)),  s = +1 (-1) for the
// retarded (advanced) sector.  The scalar 2x2 sandwich acts blockwise.
inline Block2Matrix reduce_sector(const Block2Matrix& t, Complex k0, double s) {
    const std::size_t n = t.channels();
    const Complex ik = Complex(0.0, 1.0) * k0;
    const Complex l12 = Complex(s, 0.0) / ik;
    const Complex r2 = Complex(s, 0.0) * ik;
    const Complex sqrt_k0 = std::sqrt(k0);

    const Block2Matrix d = t - Block2Matrix::identity(n);
    // M1 = L * D with L = [[1, l12], [1, -l12]]
    const ChannelMatrix m1_11 = d.b11 + l12 * d.b21;
    const ChannelMatrix m1_12 = d.b12 + l12 * d.b22;
    const ChannelMatrix m1_21 = d.b11 - l12 * d.b21;
    const ChannelMatrix m1_22 = d.b12 - l12 * d.b22;
    // M2 = M1 * R with R = [[1, 1], [r2, -r2]]
    Block2Matrix m2{m1_11 + r2 * m1_12, m1_11 - r2 * m1_12,
                    m1_21 + r2 * m1_22, m1_21 - r2 * m1_22};
    // Literal sqrt(k0)/2 ... 1/sqrt(k0) scalar factors.
    m2 = (sqrt_k0 / Complex(2.0, 0.0)) * m2;
    m2 = (Complex(1.0, 0.0) / sqrt_k0) * m2;
    return Block2Matrix::identity(n) + m2;
}

}  // namespace detail

inline ReducedTransferPair reduce(const TransferPair& tp) {
    if (tp.energy.k0 == Complex(0.0, 0.0))
        throw ValidationError("reduce requires a nonzero wavenumber");
    ReducedTransferPair rt;
    rt.energy = tp.energy;
    rt.tt_plus = detail::reduce_sector(tp.t_plus, tp.energy.k0, +1.0);
    rt.tt_minus = detail::reduce_sector(tp.t_minus, tp.energy.k0, -1.0);
    return rt;
}

}  // namespace nhqs

#endif  // NHQS_TRANSFER_HPP
