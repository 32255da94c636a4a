// Stationary field reconstruction with bilinear current checks (real axis or
// complex contour) and time-dependent co-evolution of the dual field pair
// (psi_R, psi_L) with the bilinear scalar product sum psi_L^T psi_R dz.
//
// The implicit trapezoidal step conserves that product exactly in exact
// arithmetic: the psi_L update operator is the inverse transpose of the psi_R
// update operator.
#ifndef NHQS_DYNAMICS_HPP
#define NHQS_DYNAMICS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "nhqs/errors.hpp"
#include "nhqs/linalg.hpp"
#include "nhqs/potential.hpp"
#include "nhqs/scattering.hpp"
#include "nhqs/transfer.hpp"

namespace nhqs {

// ---------------------------------------------------------------------------
// Stationary scattering fields
// ---------------------------------------------------------------------------

enum class Incidence { Left, Right };

struct ContourNode {
    double s = 0.0;  // parameter in [0, 1]
    Complex z;
};

// Piecewise-linear path z(s) from the left window endpoint to the right one;
// the endpoints must be real.
class Contour {
public:
    explicit Contour(std::vector<ContourNode> nodes) : nodes_(std::move(nodes)) {
        if (nodes_.size() < 2) throw ValidationError("contour needs at least two nodes");
        for (std::size_t k = 0; k + 1 < nodes_.size(); ++k)
            if (!(nodes_[k].s < nodes_[k + 1].s))
                throw ValidationError("contour parameters must be strictly increasing");
        if (nodes_.front().s != 0.0 || nodes_.back().s != 1.0)
            throw ValidationError("contour parameter must run from 0 to 1");
        if (nodes_.front().z.imag() != 0.0 || nodes_.back().z.imag() != 0.0)
            throw ValidationError("contour endpoints must be real");
    }

    static Contour bowed(double z_lo, double z_hi, Complex mid_offset) {
        return Contour({{0.0, Complex(z_lo, 0.0)},
                        {0.5, Complex(0.5 * (z_lo + z_hi), 0.0) + mid_offset},
                        {1.0, Complex(z_hi, 0.0)}});
    }

    const std::vector<ContourNode>& nodes() const { return nodes_; }

    Complex at(double s) const {
        for (std::size_t k = 0; k + 1 < nodes_.size(); ++k) {
            if (s <= nodes_[k + 1].s || k + 2 == nodes_.size()) {
                const double f = (s - nodes_[k].s) / (nodes_[k + 1].s - nodes_[k].s);
                return nodes_[k].z + Complex(f, 0.0) * (nodes_[k + 1].z - nodes_[k].z);
            }
        }
        return nodes_.back().z;
    }

private:
    std::vector<ContourNode> nodes_;
};

struct StationaryOptions {
    std::vector<Complex> amplitude;  // incident amplitude per channel; default: channel 0
    Tolerances tol;
    TransferOptions transfer;
};

struct StationaryField {
    std::size_t channels = 1;
    EnergyPoint energy;
    PhysicalParams params;
    std::vector<Complex> grid;  // sample points; imag = 0 on the real axis
    // Per sample point, per channel:
    std::vector<std::vector<Complex>> phi_r, dphi_r;  // phi_R^(+) and d/dz
    std::vector<std::vector<Complex>> phi_l, dphi_l;  // phi_L^(-) and d/dz

    std::size_t size() const { return grid.size(); }
};

// Trapezoid weights for line integrals along the stored grid.
inline std::vector<Complex> grid_weights(const StationaryField& sf) {
    const std::size_t m = sf.grid.size();
    std::vector<Complex> w(m, Complex(0.0, 0.0));
    if (m < 2) return w;
    for (std::size_t i = 0; i < m; ++i) {
        const Complex lo = i == 0 ? sf.grid[0] : sf.grid[i - 1];
        const Complex hi = i + 1 == m ? sf.grid[m - 1] : sf.grid[i + 1];
        w[i] = Complex(0.5, 0.0) * (hi - lo);
    }
    return w;
}

namespace detail {

struct DualState {
    std::vector<Complex> phi_r, dphi_r, phi_l, dphi_l;
};

inline void apply_block2(const Block2Matrix& t, std::vector<Complex>& phi,
                         std::vector<Complex>& dphi) {
    std::vector<Complex> f = mat_vec(t.b11, phi);
    const std::vector<Complex> g = mat_vec(t.b12, dphi);
    std::vector<Complex> fd = mat_vec(t.b21, phi);
    const std::vector<Complex> gd = mat_vec(t.b22, dphi);
    for (std::size_t c = 0; c < phi.size(); ++c) {
        phi[c] = f[c] + g[c];
        dphi[c] = fd[c] + gd[c];
    }
}

inline void apply_delta_jump(const DeltaSpike& d, const PhysicalParams& params,
                             DualState& st) {
    const Complex c(params.two_m_over_hbar2(), 0.0);
    const std::vector<Complex> jr = mat_vec(d.strength, st.phi_r);
    const std::vector<Complex> jl = mat_vec(transpose(d.strength), st.phi_l);
    for (std::size_t k = 0; k < st.phi_r.size(); ++k) {
        st.dphi_r[k] += c * jr[k];
        st.dphi_l[k] += c * jl[k];
    }
}

// Incident/reflected plane-wave data at the left window endpoint, with unit
// (or user-supplied) incoming amplitude in the e/a convention of the reduced
// transfer matrices.  phi_R^(+) rides on exp(+ik z), its dual phi_L^(-) on
// exp(-ik z).
inline DualState initial_state(const PotentialSpec& p, const SMatrixPair& sp,
                               const PhysicalParams& params, Incidence incidence,
                               const std::vector<Complex>& amplitude) {
    const std::size_t n = p.channels();
    const Complex k = sp.energy.k0;
    const Complex ik = Complex(0.0, 1.0) * k;
    const double z_lo = p.window_lo();
    const double z_hi = p.window_hi();
    const Complex sigma = std::sqrt(Complex(params.hbar / params.mass, 0.0) * k);

    std::vector<Complex> u(n, Complex(0.0, 0.0));
    if (amplitude.empty())
        u[0] = Complex(1.0, 0.0);
    else if (amplitude.size() == n)
        u = amplitude;
    else
        throw ValidationError("incident amplitude dimension mismatch");

    const Complex phase_lo_p = std::exp(ik * Complex(z_lo, 0.0));
    const Complex phase_lo_m = std::exp(-ik * Complex(z_lo, 0.0));

    // Plane-wave coefficients at z_<: c_r rides exp(+ikz)/exp(-ikz) for the
    // plus field, the dual field swaps the roles.
    std::vector<Complex> c_r_fwd(n), c_r_bwd(n), c_l_fwd(n), c_l_bwd(n);
    if (incidence == Incidence::Left) {
        // e_1^(+-) = unit; a_2^(+-) = S^(+-)_21 e_1^(+-)
        std::vector<Complex> e1p(n), e1m(n);
        for (std::size_t c = 0; c < n; ++c) {
            e1p[c] = phase_lo_p * sigma * u[c];
            e1m[c] = phase_lo_m * sigma * u[c];
        }
        const std::vector<Complex> a2p = mat_vec(sp.s_plus.b21, e1p);
        const std::vector<Complex> a2m = mat_vec(sp.s_minus.b21, e1m);
        for (std::size_t c = 0; c < n; ++c) {
            c_r_fwd[c] = u[c];
            c_r_bwd[c] = a2p[c] * phase_lo_p / sigma;
            c_l_fwd[c] = u[c];
            c_l_bwd[c] = a2m[c] * phase_lo_m / sigma;
        }
    } else {
        // e_2^(+-) = unit; a_2^(+-) = S^(+-)_22 e_2^(+-)
        const Complex phase_hi_p = std::exp(-ik * Complex(z_hi, 0.0));
        const Complex phase_hi_m = std::exp(ik * Complex(z_hi, 0.0));
        std::vector<Complex> e2p(n), e2m(n);
        for (std::size_t c = 0; c < n; ++c) {
            e2p[c] = phase_hi_p * sigma * u[c];
            e2m[c] = phase_hi_m * sigma * u[c];
        }
        const std::vector<Complex> a2p = mat_vec(sp.s_plus.b22, e2p);
        const std::vector<Complex> a2m = mat_vec(sp.s_minus.b22, e2m);
        for (std::size_t c = 0; c < n; ++c) {
            c_r_fwd[c] = Complex(0.0, 0.0);
            c_r_bwd[c] = a2p[c] * phase_lo_p / sigma;
            c_l_fwd[c] = Complex(0.0, 0.0);
            c_l_bwd[c] = a2m[c] * phase_lo_m / sigma;
        }
    }

    DualState st;
    st.phi_r.resize(n);
    st.dphi_r.resize(n);
    st.phi_l.resize(n);
    st.dphi_l.resize(n);
    for (std::size_t c = 0; c < n; ++c) {
        st.phi_r[c] = c_r_fwd[c] * phase_lo_p + c_r_bwd[c] * phase_lo_m;
        st.dphi_r[c] = ik * (c_r_fwd[c] * phase_lo_p - c_r_bwd[c] * phase_lo_m);
        st.phi_l[c] = c_l_fwd[c] * phase_lo_m + c_l_bwd[c] * phase_lo_p;
        st.dphi_l[c] = ik * (c_l_bwd[c] * phase_lo_p - c_l_fwd[c] * phase_lo_m);
    }
    return st;
}

enum class RegionKind { Free, Constant, Analytic };

struct Region {
    double z_a = 0.0, z_b = 0.0;
    RegionKind kind = RegionKind::Free;
    const ConstantSegment* constant = nullptr;
    const AnalyticSegment* analytic = nullptr;
};

// Flatten a potential into contiguous regions plus delta positions.
struct Walk {
    std::vector<Region> regions;
    std::vector<std::pair<double, const DeltaSpike*>> deltas;  // sorted, list order kept
};

inline Walk build_walk(const PotentialSpec& p) {
    Walk w;
    double cursor = p.window_lo();
    for (std::size_t idx : p.sorted_order()) {
        const auto& el = p.elements()[idx];
        const double a = element_start(el);
        if (a > cursor) w.regions.push_back({cursor, a, RegionKind::Free, nullptr, nullptr});
        if (const auto* d = std::get_if<DeltaSpike>(&el)) {
            w.deltas.emplace_back(d->position, d);
        } else if (const auto* c = std::get_if<ConstantSegment>(&el)) {
            w.regions.push_back({c->z_start, c->z_end, RegionKind::Constant, c, nullptr});
        } else {
            const auto& s = std::get<AnalyticSegment>(el);
            w.regions.push_back({s.z_start, s.z_end, RegionKind::Analytic, nullptr, &s});
        }
        cursor = std::max(cursor, element_end(el));
    }
    if (p.window_hi() > cursor)
        w.regions.push_back({cursor, p.window_hi(), RegionKind::Free, nullptr, nullptr});
    return w;
}

inline const Region* region_at(const Walk& w, double z_mid) {
    for (const auto& r : w.regions)
        if (z_mid >= r.z_a && z_mid <= r.z_b) return &r;
    return nullptr;
}

// One RK4 step of the dual pair through an analytic-potential stretch along a
// straight line z(t) = z0 + t*dir, t in [0, h].  w_at must return
// W(z) = (2M/hbar^2)(V(z) - E) for the region being crossed.
template <typename WEval>
inline void rk4_dual_step(const WEval& w_at, Complex z0, Complex dir, double h, DualState& st) {
    const std::size_t n = st.phi_r.size();

    struct Deriv {
        std::vector<Complex> fr, gr, fl, gl;
    };
    auto rhs = [&](const ChannelMatrix& w, const DualState& s) {
        Deriv d;
        d.fr = s.dphi_r;
        d.gr = mat_vec(w, s.phi_r);
        d.fl = s.dphi_l;
        d.gl = mat_vec(transpose(w), s.phi_l);
        for (auto& v : d.fr) v *= dir;
        for (auto& v : d.gr) v *= dir;
        for (auto& v : d.fl) v *= dir;
        for (auto& v : d.gl) v *= dir;
        return d;
    };
    auto advanced = [&](const DualState& s, const Deriv& d, double f) {
        DualState o = s;
        for (std::size_t c = 0; c < n; ++c) {
            o.phi_r[c] += f * d.fr[c];
            o.dphi_r[c] += f * d.gr[c];
            o.phi_l[c] += f * d.fl[c];
            o.dphi_l[c] += f * d.gl[c];
        }
        return o;
    };

    const ChannelMatrix w0 = w_at(z0);
    const ChannelMatrix wh = w_at(z0 + Complex(0.5 * h, 0.0) * dir);
    const ChannelMatrix w1 = w_at(z0 + Complex(h, 0.0) * dir);
    const Deriv k1 = rhs(w0, st);
    const Deriv k2 = rhs(wh, advanced(st, k1, 0.5 * h));
    const Deriv k3 = rhs(wh, advanced(st, k2, 0.5 * h));
    const Deriv k4 = rhs(w1, advanced(st, k3, h));
    for (std::size_t c = 0; c < n; ++c) {
        st.phi_r[c] += (h / 6.0) * (k1.fr[c] + 2.0 * k2.fr[c] + 2.0 * k3.fr[c] + k4.fr[c]);
        st.dphi_r[c] += (h / 6.0) * (k1.gr[c] + 2.0 * k2.gr[c] + 2.0 * k3.gr[c] + k4.gr[c]);
        st.phi_l[c] += (h / 6.0) * (k1.fl[c] + 2.0 * k2.fl[c] + 2.0 * k3.fl[c] + k4.fl[c]);
        st.dphi_l[c] += (h / 6.0) * (k1.gl[c] + 2.0 * k2.gl[c] + 2.0 * k3.gl[c] + k4.gl[c]);
        if (!is_finite(st.phi_r[c]) || !is_finite(st.phi_l[c]))
            throw NonFiniteState("stationary propagation overflow");
    }
}

inline void record_point(StationaryField& sf, Complex z, const DualState& st) {
    sf.grid.push_back(z);
    sf.phi_r.push_back(st.phi_r);
    sf.dphi_r.push_back(st.dphi_r);
    sf.phi_l.push_back(st.phi_l);
    sf.dphi_l.push_back(st.dphi_l);
}

}  // namespace detail

// Reconstructs (phi_R^(+), phi_L^(-)) across the window by element-wise
// propagation with unit incoming amplitude.  Piecewise-exact transfer for
// free/constant stretches, one RK4 substep per grid interval inside analytic
// segments, exact jumps at delta spikes.
inline StationaryField solve_stationary(const PotentialSpec& p, const EnergyPoint& e,
                                        const PhysicalParams& params, Incidence incidence,
                                        std::size_t grid_density,
                                        const StationaryOptions& opts = {}) {
    if (grid_density < 2) throw ValidationError("grid_density must be >= 2");
    const ReducedTransferPair rt = reduce(assemble_transfer(p, e, params, opts.transfer));
    const SMatrixPair sp = s_from_reduced(rt, opts.tol);

    // Sample grid: uniform + element boundaries + delta positions.
    const double lo = p.window_lo(), hi = p.window_hi();
    std::vector<double> zs;
    zs.reserve(grid_density + 8);
    for (std::size_t i = 0; i <= grid_density; ++i)
        zs.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid_density));
    for (const auto& el : p.elements()) {
        zs.push_back(detail::element_start(el));
        zs.push_back(detail::element_end(el));
    }
    std::sort(zs.begin(), zs.end());
    zs.erase(std::unique(zs.begin(), zs.end()), zs.end());

    const detail::Walk walk = detail::build_walk(p);
    detail::DualState st = detail::initial_state(p, sp, params, incidence, opts.amplitude);

    StationaryField sf;
    sf.channels = p.channels();
    sf.energy = e;
    sf.params = params;

    std::size_t next_delta = 0;
    auto apply_deltas_at = [&](double z) {
        while (next_delta < walk.deltas.size() && walk.deltas[next_delta].first <= z) {
            detail::apply_delta_jump(*walk.deltas[next_delta].second, params, st);
            ++next_delta;
        }
    };

    detail::record_point(sf, Complex(zs.front(), 0.0), st);
    apply_deltas_at(zs.front());
    for (std::size_t i = 0; i + 1 < zs.size(); ++i) {
        const double za = zs[i], zb = zs[i + 1];
        const double h = zb - za;
        const detail::Region* reg = detail::region_at(walk, 0.5 * (za + zb));
        if (reg == nullptr || reg->kind == detail::RegionKind::Free) {
            const Block2Matrix t = free_transfer(h, e, params, p.channels());
            detail::apply_block2(t, st.phi_r, st.dphi_r);
            detail::apply_block2(t, st.phi_l, st.dphi_l);
        } else if (reg->kind == detail::RegionKind::Constant) {
            const ConstantSegment sub{za, zb, reg->constant->value};
            detail::apply_block2(constant_segment_transfer(sub, e, params, Sector::Retarded),
                                 st.phi_r, st.dphi_r);
            detail::apply_block2(constant_segment_transfer(sub, e, params, Sector::Advanced),
                                 st.phi_l, st.dphi_l);
        } else {
            const AnalyticSegment* seg = reg->analytic;
            auto w_at = [&](Complex z) {
                return Complex(params.two_m_over_hbar2(), 0.0) *
                       (seg->eval(z) - ChannelMatrix::scalar(p.channels(), e.energy));
            };
            detail::rk4_dual_step(w_at, Complex(za, 0.0), Complex(1.0, 0.0), h, st);
        }
        detail::record_point(sf, Complex(zb, 0.0), st);
        apply_deltas_at(zb);
    }
    return sf;
}

// Contour variant: integrates the same dual pair along a piecewise-linear
// complex path with matching real endpoints.  Every element under the path
// interior must be analytic (free stretches are fine).
inline StationaryField solve_stationary(const PotentialSpec& p, const EnergyPoint& e,
                                        const PhysicalParams& params, Incidence incidence,
                                        const Contour& contour, std::size_t grid_density,
                                        const StationaryOptions& opts = {}) {
    if (grid_density < 2) throw ValidationError("grid_density must be >= 2");
    if (contour.nodes().front().z != Complex(p.window_lo(), 0.0) ||
        contour.nodes().back().z != Complex(p.window_hi(), 0.0))
        throw ValidationError("contour endpoints must coincide with the window endpoints");

    const ReducedTransferPair rt = reduce(assemble_transfer(p, e, params, opts.transfer));
    const SMatrixPair sp = s_from_reduced(rt, opts.tol);
    detail::DualState st = detail::initial_state(p, sp, params, incidence, opts.amplitude);

    // Parameter grid: uniform in s, plus the contour nodes.
    std::vector<double> ss;
    ss.reserve(grid_density + contour.nodes().size());
    for (std::size_t i = 0; i <= grid_density; ++i)
        ss.push_back(static_cast<double>(i) / static_cast<double>(grid_density));
    for (const auto& nd : contour.nodes()) ss.push_back(nd.s);
    std::sort(ss.begin(), ss.end());
    ss.erase(std::unique(ss.begin(), ss.end()), ss.end());

    StationaryField sf;
    sf.channels = p.channels();
    sf.energy = e;
    sf.params = params;

    auto w_at = [&](Complex z) {
        return Complex(params.two_m_over_hbar2(), 0.0) *
               (evaluate(p, z) - ChannelMatrix::scalar(p.channels(), e.energy));
    };

    detail::record_point(sf, contour.at(ss.front()), st);
    for (std::size_t i = 0; i + 1 < ss.size(); ++i) {
        const Complex za = contour.at(ss[i]);
        const Complex zb = contour.at(ss[i + 1]);
        const Complex dz = zb - za;
        const double h = std::abs(dz);
        if (h == 0.0) continue;
        const Complex dir = dz / Complex(h, 0.0);
        detail::rk4_dual_step(w_at, za, dir, h, st);
        detail::record_point(sf, zb, st);
    }
    return sf;
}

// Bilinear energy current at a sample point: no complex conjugation anywhere.
inline Complex current(const StationaryField& sf, std::size_t index) {
    if (index >= sf.size()) throw ValidationError("current: index out of range");
    const Complex pref = Complex(sf.params.hbar2_over_2m(), 0.0) /
                         (Complex(0.0, 1.0) * Complex(sf.params.hbar, 0.0));
    Complex j(0.0, 0.0);
    for (std::size_t c = 0; c < sf.channels; ++c)
        j += sf.phi_l[index][c] * sf.dphi_r[index][c] - sf.dphi_l[index][c] * sf.phi_r[index][c];
    return pref * j;
}

// Max deviation of the current from its value at the first sample; on a
// contour grid this probes contour independence of the stationary current.
inline double current_constancy(const StationaryField& sf) {
    if (sf.size() == 0) return 0.0;
    const Complex j0 = current(sf, 0);
    double worst = 0.0;
    for (std::size_t i = 0; i < sf.size(); ++i) worst = std::max(worst, std::abs(current(sf, i) - j0));
    return worst;
}

// ---------------------------------------------------------------------------
// Time evolution
// ---------------------------------------------------------------------------

struct GaussianPacket {
    double center = 0.0;
    double width = 1.0;
    double momentum = 0.0;
};

// Co-evolved dual fields on a hard-wall grid over [0, L]; boundary values are
// pinned to zero.  Point-major storage: index j*n + c.
struct FieldPair {
    std::size_t channels = 1;
    double box_length = 0.0;
    std::size_t points = 0;
    double time = 0.0;
    std::vector<Complex> psi_r, psi_l;

    double dz() const { return box_length / static_cast<double>(points - 1); }
    Complex& r(std::size_t j, std::size_t c) { return psi_r[j * channels + c]; }
    Complex& l(std::size_t j, std::size_t c) { return psi_l[j * channels + c]; }
    Complex r(std::size_t j, std::size_t c) const { return psi_r[j * channels + c]; }
    Complex l(std::size_t j, std::size_t c) const { return psi_l[j * channels + c]; }
};

inline FieldPair make_gaussian_pair(std::size_t channels, double box_length, std::size_t points,
                                    const GaussianPacket& right, const GaussianPacket& left,
                                    const std::vector<Complex>& amplitudes = {}) {
    if (points < 8) throw ValidationError("field grid needs at least 8 points");
    if (!(box_length > 0.0)) throw ValidationError("box length must be positive");
    if (!(right.width > 0.0) || !(left.width > 0.0))
        throw ValidationError("packet widths must be positive");
    FieldPair fp;
    fp.channels = channels;
    fp.box_length = box_length;
    fp.points = points;
    fp.psi_r.assign(points * channels, Complex(0.0, 0.0));
    fp.psi_l.assign(points * channels, Complex(0.0, 0.0));
    const double dz = fp.dz();
    for (std::size_t j = 1; j + 1 < points; ++j) {
        const double z = dz * static_cast<double>(j);
        const Complex gr = std::exp(Complex(-0.5 * std::pow((z - right.center) / right.width, 2),
                                            right.momentum * z));
        const Complex gl = std::exp(Complex(-0.5 * std::pow((z - left.center) / left.width, 2),
                                            left.momentum * z));
        for (std::size_t c = 0; c < channels; ++c) {
            const Complex a =
                amplitudes.empty() ? Complex(1.0, 0.0) : amplitudes[c % amplitudes.size()];
            fp.r(j, c) = a * gr;
            fp.l(j, c) = a * gl;
        }
    }
    return fp;
}

inline Complex bilinear_norm(const FieldPair& fp) {
    Complex acc(0.0, 0.0);
    for (std::size_t j = 0; j < fp.points; ++j)
        for (std::size_t c = 0; c < fp.channels; ++c) acc += fp.l(j, c) * fp.r(j, c);
    return acc * Complex(fp.dz(), 0.0);
}

// Pointwise bilinear density rho^(+) = psi_L^T psi_R; complex in general, no
// modulus taken.
inline std::vector<Complex> density_profile(const FieldPair& fp) {
    std::vector<Complex> rho(fp.points, Complex(0.0, 0.0));
    for (std::size_t j = 0; j < fp.points; ++j)
        for (std::size_t c = 0; c < fp.channels; ++c) rho[j] += fp.l(j, c) * fp.r(j, c);
    return rho;
}

namespace detail {

// Block-tridiagonal Thomas solver with identical scalar off-diagonals; the
// diagonal blocks are factored once per evolve call.
class BlockTridiagSolver {
public:
    BlockTridiagSolver(std::vector<ChannelMatrix> diag, Complex off, double tol)
        : n_(diag.empty() ? 0 : diag[0].size()), m_(diag.size()), off_(off) {
        inv_dhat_.reserve(m_);
        try {
            ChannelMatrix prev_inv;
            for (std::size_t j = 0; j < m_; ++j) {
                ChannelMatrix dhat = diag[j];
                if (j > 0) dhat -= (off_ * off_) * prev_inv;
                prev_inv = invert(dhat, tol);
                inv_dhat_.push_back(prev_inv);
            }
        } catch (const SingularMatrix& e) {
            throw LinearSolveFailure(std::string("implicit step factorization failed: ") +
                                     e.what());
        }
    }

    // Solves A x = b in place; b is point-major of size m_ * n_.
    void solve(std::vector<Complex>& b) const {
        std::vector<Complex> tmp(n_);
        // forward sweep
        for (std::size_t j = 1; j < m_; ++j) {
            for (std::size_t c = 0; c < n_; ++c) tmp[c] = b[(j - 1) * n_ + c];
            tmp = mat_vec(inv_dhat_[j - 1], tmp);
            for (std::size_t c = 0; c < n_; ++c) b[j * n_ + c] -= off_ * tmp[c];
        }
        // back substitution
        for (std::size_t c = 0; c < n_; ++c) tmp[c] = b[(m_ - 1) * n_ + c];
        tmp = mat_vec(inv_dhat_[m_ - 1], tmp);
        for (std::size_t c = 0; c < n_; ++c) b[(m_ - 1) * n_ + c] = tmp[c];
        for (std::size_t jj = m_ - 1; jj-- > 0;) {
            for (std::size_t c = 0; c < n_; ++c)
                tmp[c] = b[jj * n_ + c] - off_ * b[(jj + 1) * n_ + c];
            tmp = mat_vec(inv_dhat_[jj], tmp);
            for (std::size_t c = 0; c < n_; ++c) b[jj * n_ + c] = tmp[c];
        }
    }

private:
    std::size_t n_, m_;
    Complex off_;
    std::vector<ChannelMatrix> inv_dhat_;
};

}  // namespace detail

struct EvolveRecord {
    double t = 0.0;
    Complex norm;
    double max_abs_r = 0.0;
    double max_abs_l = 0.0;
};

struct EvolveOptions {
    Sector sector = Sector::Retarded;  // advanced flips the time signs of both fields
    Tolerances tol;
    std::function<void(const FieldPair&)> observer;  // called on every recorded state
};

struct EvolveResult {
    std::vector<EvolveRecord> records;  // steps + 1 entries, including t = 0
    FieldPair final_state;
    double delta_bump_width = 0.0;  // mollification width when deltas were present
};

// Implicit trapezoidal co-evolution:
//   psi_R <- (1 + i lam H)^-1 (1 - i lam H) psi_R,
//   psi_L <- (1 - i lam H^T)^-1 (1 + i lam H^T) psi_L,   lam = dt / (2 hbar),
// with H = -(hbar^2/2M) d^2/dz^2 + V on the hard-wall grid and H^T realized
// as the literal transpose of the discrete H.  Delta spikes are mollified
// onto the two nearest grid cells with equal integral (width 2 dz).
inline EvolveResult evolve(const FieldPair& initial, const PotentialSpec& p,
                           const PhysicalParams& params, double dt, std::size_t steps,
                           const EvolveOptions& opts = {}) {
    params.validate();
    if (!(dt > 0.0)) throw ValidationError("evolve requires dt > 0");
    if (initial.points < 8) throw ValidationError("evolve requires at least 8 grid points");
    if (initial.psi_r.size() != initial.points * initial.channels ||
        initial.psi_l.size() != initial.points * initial.channels)
        throw ValidationError("field storage size mismatch");
    if (p.channels() != initial.channels)
        throw ValidationError("field/potential channel mismatch");

    const std::size_t n = initial.channels;
    const std::size_t m = initial.points;
    const std::size_t mi = m - 2;  // interior points
    const double dz = initial.dz();

    FieldPair fp = initial;
    for (std::size_t c = 0; c < n; ++c) {
        fp.r(0, c) = fp.l(0, c) = Complex(0.0, 0.0);
        fp.r(m - 1, c) = fp.l(m - 1, c) = Complex(0.0, 0.0);
    }

    // Potential samples on interior points; deltas deposited on the two
    // nearest cells with the exact integral.
    EvolveResult result;
    std::vector<ChannelMatrix> v(mi, ChannelMatrix::zero(n));
    for (std::size_t j = 0; j < mi; ++j) {
        const double z = dz * static_cast<double>(j + 1);
        v[j] = evaluate(p, Complex(z, 0.0));
    }
    for (const auto& el : p.elements()) {
        const auto* d = std::get_if<DeltaSpike>(&el);
        if (!d) continue;
        result.delta_bump_width = 2.0 * dz;
        const double x = d->position / dz;  // grid units
        const auto j0 = static_cast<long>(std::floor(x));
        const double frac = x - static_cast<double>(j0);
        const Complex w0((1.0 - frac) / dz, 0.0), w1(frac / dz, 0.0);
        if (j0 >= 1 && j0 <= static_cast<long>(mi)) v[j0 - 1] += w0 * d->strength;
        if (j0 + 1 >= 1 && j0 + 1 <= static_cast<long>(mi)) v[j0] += w1 * d->strength;
    }

    const double kinetic = params.hbar2_over_2m() / (dz * dz);
    const double lam = dt / (2.0 * params.hbar);
    const Complex mu = Complex(0.0, opts.sector == Sector::Retarded ? lam : -lam);

    // A_R = 1 + mu H, B_R = 1 - mu H;  A_L = 1 - mu H^T, B_L = 1 + mu H^T.
    std::vector<ChannelMatrix> diag_r(mi), diag_l(mi), h_diag(mi), h_diag_t(mi);
    for (std::size_t j = 0; j < mi; ++j) {
        h_diag[j] = ChannelMatrix::scalar(n, Complex(2.0 * kinetic, 0.0)) + v[j];
        h_diag_t[j] = transpose(h_diag[j]);
        diag_r[j] = ChannelMatrix::identity(n) + mu * h_diag[j];
        diag_l[j] = ChannelMatrix::identity(n) - mu * h_diag_t[j];
    }
    const Complex h_off(-kinetic, 0.0);
    const detail::BlockTridiagSolver solver_r(std::move(diag_r), mu * h_off, opts.tol.invert);
    const detail::BlockTridiagSolver solver_l(std::move(diag_l), -mu * h_off, opts.tol.invert);

    auto apply_rhs = [&](const std::vector<Complex>& psi, const std::vector<ChannelMatrix>& hd,
                         Complex sign_mu, std::vector<Complex>& out) {
        // out_j = psi_j + sign_mu * (h_off (psi_{j-1} + psi_{j+1}) + Hd_j psi_j), interior only
        out.assign(mi * n, Complex(0.0, 0.0));
        std::vector<Complex> col(n), hcol(n);
        for (std::size_t j = 0; j < mi; ++j) {
            const std::size_t g = j + 1;  // global grid index
            for (std::size_t c = 0; c < n; ++c) col[c] = psi[g * n + c];
            hcol = mat_vec(hd[j], col);
            for (std::size_t c = 0; c < n; ++c) {
                Complex nb = psi[(g - 1) * n + c] + psi[(g + 1) * n + c];
                out[j * n + c] = col[c] + sign_mu * (h_off * nb + hcol[c]);
            }
        }
    };

    auto record = [&](const FieldPair& state) {
        EvolveRecord rec;
        rec.t = state.time;
        rec.norm = bilinear_norm(state);
        for (const Complex& x : state.psi_r) rec.max_abs_r = std::max(rec.max_abs_r, std::abs(x));
        for (const Complex& x : state.psi_l) rec.max_abs_l = std::max(rec.max_abs_l, std::abs(x));
        result.records.push_back(rec);
        if (opts.observer) opts.observer(state);
    };

    record(fp);
    std::vector<Complex> rhs;
    for (std::size_t step = 0; step < steps; ++step) {
        apply_rhs(fp.psi_r, h_diag, -mu, rhs);
        solver_r.solve(rhs);
        for (std::size_t j = 0; j < mi; ++j)
            for (std::size_t c = 0; c < n; ++c) fp.r(j + 1, c) = rhs[j * n + c];

        apply_rhs(fp.psi_l, h_diag_t, mu, rhs);
        solver_l.solve(rhs);
        for (std::size_t j = 0; j < mi; ++j)
            for (std::size_t c = 0; c < n; ++c) fp.l(j + 1, c) = rhs[j * n + c];

        fp.time += dt;
        for (const Complex& x : fp.psi_r)
            if (!is_finite(x)) throw LinearSolveFailure("field overflow during evolution");
        record(fp);
    }
    result.final_state = std::move(fp);
    return result;
}

}  // namespace nhqs

#endif  // NHQS_DYNAMICS_HPP
