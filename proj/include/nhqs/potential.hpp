// Composite one-dimensional complex (possibly matrix-valued) potentials:
// delta spikes, constant segments and analytic expression segments inside a
// window of vanishing potential.  The transposed potential V^T feeds the
// left/dual equations.
#ifndef NHQS_POTENTIAL_HPP
#define NHQS_POTENTIAL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "nhqs/errors.hpp"
#include "nhqs/expression.hpp"
#include "nhqs/linalg.hpp"

namespace nhqs {

struct PhysicalParams {
    double hbar = 1.0;
    double mass = 0.5;  // default hbar^2 / 2M = 1

    void validate() const {
        if (!(hbar > 0.0) || !(mass > 0.0))
            throw ValidationError("physical parameters must be strictly positive");
    }
    double hbar2_over_2m() const { return hbar * hbar / (2.0 * mass); }
    double two_m_over_hbar2() const { return 2.0 * mass / (hbar * hbar); }
};

struct DeltaSpike {
    double position = 0.0;
    ChannelMatrix strength;  // complex, possibly non-symmetric
};

struct ConstantSegment {
    double z_start = 0.0;
    double z_end = 0.0;
    ChannelMatrix value;
};

// Matrix of analytic expressions in z, row-major n x n.
struct AnalyticSegment {
    double z_start = 0.0;
    double z_end = 0.0;
    std::size_t n = 0;
    std::vector<Expression> entries;

    const Expression& entry(std::size_t i, std::size_t j) const { return entries[i * n + j]; }

    ChannelMatrix eval(Complex z) const {
        ChannelMatrix v(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) v(i, j) = entry(i, j).eval(z);
        return v;
    }
};

using PotentialElement = std::variant<DeltaSpike, ConstantSegment, AnalyticSegment>;

namespace detail {
inline double element_start(const PotentialElement& e) {
    if (const auto* d = std::get_if<DeltaSpike>(&e)) return d->position;
    if (const auto* c = std::get_if<ConstantSegment>(&e)) return c->z_start;
    return std::get<AnalyticSegment>(e).z_start;
}
inline double element_end(const PotentialElement& e) {
    if (const auto* d = std::get_if<DeltaSpike>(&e)) return d->position;
    if (const auto* c = std::get_if<ConstantSegment>(&e)) return c->z_end;
    return std::get<AnalyticSegment>(e).z_end;
}
inline bool element_is_delta(const PotentialElement& e) {
    return std::holds_alternative<DeltaSpike>(e);
}
inline bool element_is_analytic(const PotentialElement& e) {
    return std::holds_alternative<AnalyticSegment>(e);
}
}  // namespace detail

// Ordered composite potential on a window (z_lo, z_hi); V = 0 outside the
// elements.  Element footprints may touch but not overlap; coincident delta
// positions are allowed and compose in list order.  A degenerate window
// z_lo == z_hi is admitted for the textbook single-delta setup z_< = a-0,
// z_> = a+0.
class PotentialSpec {
public:
    PotentialSpec(std::size_t n, double z_lo, double z_hi,
                  std::vector<PotentialElement> elements)
        : n_(n), z_lo_(z_lo), z_hi_(z_hi), elements_(std::move(elements)) {
        validate();
    }

    std::size_t channels() const { return n_; }
    double window_lo() const { return z_lo_; }
    double window_hi() const { return z_hi_; }
    const std::vector<PotentialElement>& elements() const { return elements_; }

    // Indices of elements_ sorted by footprint start (stable, so coincident
    // deltas keep list order).
    std::vector<std::size_t> sorted_order() const {
        std::vector<std::size_t> idx(elements_.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::stable_sort(idx.begin(), idx.end(), [this](std::size_t a, std::size_t b) {
            return detail::element_start(elements_[a]) < detail::element_start(elements_[b]);
        });
        return idx;
    }

    bool has_delta() const {
        for (const auto& e : elements_)
            if (detail::element_is_delta(e)) return true;
        return false;
    }

    bool all_analytic() const {
        for (const auto& e : elements_)
            if (!detail::element_is_analytic(e)) return false;
        return true;
    }

private:
    void validate() const {
        if (n_ < 1) throw ValidationError("channel count must be >= 1");
        if (!std::isfinite(z_lo_) || !std::isfinite(z_hi_) || !(z_lo_ <= z_hi_))
            throw ValidationError("window must be ordered and finite");
        for (const auto& e : elements_) {
            const double a = detail::element_start(e);
            const double b = detail::element_end(e);
            if (!std::isfinite(a) || !std::isfinite(b))
                throw ValidationError("element endpoints must be finite");
            if (!detail::element_is_delta(e) && !(a < b))
                throw ValidationError("segment endpoints must satisfy z_start < z_end");
            if (a < z_lo_ || b > z_hi_)
                throw ValidationError("element extends outside the window");
            if (const auto* d = std::get_if<DeltaSpike>(&e)) {
                if (d->strength.size() != n_)
                    throw ValidationError("delta strength dimension mismatch");
                if (!d->strength.finite())
                    throw NonFiniteValue("delta strength has non-finite entries");
            } else if (const auto* c = std::get_if<ConstantSegment>(&e)) {
                if (c->value.size() != n_)
                    throw ValidationError("constant segment value dimension mismatch");
                if (!c->value.finite())
                    throw NonFiniteValue("constant segment value has non-finite entries");
            } else {
                const auto& s = std::get<AnalyticSegment>(e);
                if (s.n != n_ || s.entries.size() != n_ * n_)
                    throw ValidationError("analytic segment expression grid dimension mismatch");
            }
        }
        // Disjoint interiors, deltas not inside any segment interior.
        const auto order = sorted_order();
        for (std::size_t k = 0; k + 1 < order.size(); ++k) {
            const auto& prev = elements_[order[k]];
            const auto& next = elements_[order[k + 1]];
            if (detail::element_start(next) < detail::element_end(prev))
                throw ValidationError("element footprints overlap");
        }
    }

    std::size_t n_;
    double z_lo_, z_hi_;
    std::vector<PotentialElement> elements_;
};

// Pointwise V(z).  Delta spikes never contribute here (they only enter via
// their exact transfer matrices).  Off the real axis every element covering
// Re z must be analytic.
inline ChannelMatrix evaluate(const PotentialSpec& p, Complex z) {
    const double x = z.real();
    const bool off_axis = z.imag() != 0.0;
    for (const auto& e : p.elements()) {
        const double a = detail::element_start(e);
        const double b = detail::element_end(e);
        if (x < a || x > b) continue;
        if (const auto* d = std::get_if<DeltaSpike>(&e)) {
            (void)d;
            if (off_axis)
                throw NonAnalyticAtComplexPoint("delta spike under a complex evaluation point");
            continue;  // distributional, no pointwise value
        }
        if (const auto* c = std::get_if<ConstantSegment>(&e)) {
            if (off_axis)
                throw NonAnalyticAtComplexPoint(
                    "constant segment under a complex evaluation point");
            return c->value;
        }
        return std::get<AnalyticSegment>(e).eval(z);
    }
    return ChannelMatrix::zero(p.channels());
}

inline AnalyticSegment transpose_segment(const AnalyticSegment& s) {
    AnalyticSegment t;
    t.z_start = s.z_start;
    t.z_end = s.z_end;
    t.n = s.n;
    t.entries.reserve(s.entries.size());
    for (std::size_t i = 0; i < s.n; ++i)
        for (std::size_t j = 0; j < s.n; ++j) t.entries.push_back(s.entry(j, i));
    return t;
}

// V -> V^T elementwise; geometry untouched.  An involution.
inline PotentialSpec transpose_potential(const PotentialSpec& p) {
    std::vector<PotentialElement> out;
    out.reserve(p.elements().size());
    for (const auto& e : p.elements()) {
        if (const auto* d = std::get_if<DeltaSpike>(&e))
            out.push_back(DeltaSpike{d->position, transpose(d->strength)});
        else if (const auto* c = std::get_if<ConstantSegment>(&e))
            out.push_back(ConstantSegment{c->z_start, c->z_end, transpose(c->value)});
        else
            out.push_back(transpose_segment(std::get<AnalyticSegment>(e)));
    }
    return PotentialSpec(p.channels(), p.window_lo(), p.window_hi(), std::move(out));
}

// Structural equality, used by involution checks and config round-trips.
inline bool structurally_equal(const PotentialSpec& a, const PotentialSpec& b) {
    if (a.channels() != b.channels() || a.window_lo() != b.window_lo() ||
        a.window_hi() != b.window_hi() || a.elements().size() != b.elements().size())
        return false;
    for (std::size_t k = 0; k < a.elements().size(); ++k) {
        const auto& ea = a.elements()[k];
        const auto& eb = b.elements()[k];
        if (ea.index() != eb.index()) return false;
        if (const auto* da = std::get_if<DeltaSpike>(&ea)) {
            const auto& db = std::get<DeltaSpike>(eb);
            if (da->position != db.position || max_abs_diff(da->strength, db.strength) != 0.0)
                return false;
        } else if (const auto* ca = std::get_if<ConstantSegment>(&ea)) {
            const auto& cb = std::get<ConstantSegment>(eb);
            if (ca->z_start != cb.z_start || ca->z_end != cb.z_end ||
                max_abs_diff(ca->value, cb.value) != 0.0)
                return false;
        } else {
            const auto& sa = std::get<AnalyticSegment>(ea);
            const auto& sb = std::get<AnalyticSegment>(eb);
            if (sa.z_start != sb.z_start || sa.z_end != sb.z_end || sa.n != sb.n) return false;
            for (std::size_t i = 0; i < sa.entries.size(); ++i)
                if (!(sa.entries[i] == sb.entries[i])) return false;
        }
    }
    return true;
}

}  // namespace nhqs

#endif  // NHQS_POTENTIAL_HPP
