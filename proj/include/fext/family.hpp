#pragma once

#include <Eigen/Dense>
#include <complex>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "fext/domain.hpp"

namespace fext {

using Complex = std::complex<double>;

namespace detail {

/// sin(pi x) / (pi x), stable near the origin.
inline double sinc(double x) {
    const double t = std::numbers::pi * x;
    if (std::abs(t) < 1e-6) return 1.0 - t * t / 6.0;
    return std::sin(t) / t;
}

inline Complex unit_phase(double angle) { return Complex(std::cos(angle), std::sin(angle)); }

}  // namespace detail

// prod_j sinc(z_j)^p  -- transform of a centered B-spline of degree p-1 for p>=1.
struct SincPower {
    int power;
    bool operator==(const SincPower&) const = default;
};

// Transform of the indicator of shift + [0,1]^d.
struct IndicatorBoxTransform {
    std::vector<double> shift;
    bool operator==(const IndicatorBoxTransform&) const = default;
};

// Closed-form member: evaluates kind at (dilation * xi) and applies the
// modulation phase e^{-2 pi i xi . x0} in the original variable.
struct ClosedForm {
    std::variant<SincPower, IndicatorBoxTransform> kind;
    std::vector<double> modulation;  // x0; empty means 0
    double dilation = 1.0;
    bool operator==(const ClosedForm&) const = default;
};

// Band-limited interpolant of discrete data a(q), q in {0..N-1}^d, with the
// box-indicator kernel: f(xi) = phihat(xi) sum_q a(q) e^{-2 pi i dx q.xi},
// phihat(xi) = prod_j dx e^{-pi i dx xi_j} sinc(dx xi_j). The spatial scaling
// constant is folded into phihat so f(0) = phihat(0) sum_q a(q).
struct DiscreteInterpolant {
    std::vector<int> shape;        // N per axis
    std::vector<Complex> coeffs;   // row-major, last axis fastest
    double dx = 1.0;
    bool operator==(const DiscreteInterpolant&) const = default;
};

using MemberSpec = std::variant<ClosedForm, DiscreteInterpolant>;

namespace detail {

inline int member_dimension_hint(const MemberSpec& m) {
    // Returns the dimension a spec pins down, or 0 when any dimension works.
    if (const auto* cf = std::get_if<ClosedForm>(&m)) {
        if (!cf->modulation.empty()) return static_cast<int>(cf->modulation.size());
        if (const auto* box = std::get_if<IndicatorBoxTransform>(&cf->kind);
            box && !box->shift.empty())
            return static_cast<int>(box->shift.size());
        return 0;
    }
    return static_cast<int>(std::get<DiscreteInterpolant>(m).shape.size());
}

inline Complex eval_member(const MemberSpec& m, std::span<const double> xi) {
    if (const auto* cf = std::get_if<ClosedForm>(&m)) {
        double phase = 0.0;
        for (size_t j = 0; j < cf->modulation.size(); ++j) phase -= 2.0 * std::numbers::pi * xi[j] * cf->modulation[j];
        Complex value = unit_phase(phase);
        const double s = cf->dilation;
        if (const auto* sp = std::get_if<SincPower>(&cf->kind)) {
            double prod = 1.0;
            for (double x : xi) prod *= std::pow(sinc(s * x), sp->power);
            value *= prod;
        } else {
            const auto& box = std::get<IndicatorBoxTransform>(cf->kind);
            double boxphase = 0.0;
            double mag = 1.0;
            for (size_t j = 0; j < xi.size(); ++j) {
                const double z = s * xi[j];
                const double shift = j < box.shift.size() ? box.shift[j] : 0.0;
                boxphase -= std::numbers::pi * z * (1.0 + 2.0 * shift);
                mag *= sinc(z);
            }
            value *= mag * unit_phase(boxphase);
        }
        return value;
    }
    const auto& di = std::get<DiscreteInterpolant>(m);
    const int d = static_cast<int>(di.shape.size());
    Complex kernel(1.0, 0.0);
    for (int j = 0; j < d; ++j) {
        const double z = di.dx * xi[j];
        kernel *= di.dx * sinc(z) * unit_phase(-std::numbers::pi * z);
    }
    // tensor-product phase sum
    Complex acc(0.0, 0.0);
    if (d == 1) {
        const Complex step = unit_phase(-2.0 * std::numbers::pi * di.dx * xi[0]);
        Complex p(1.0, 0.0);
        for (int q = 0; q < di.shape[0]; ++q, p *= step) acc += di.coeffs[q] * p;
    } else if (d == 2) {
        const Complex step0 = unit_phase(-2.0 * std::numbers::pi * di.dx * xi[0]);
        const Complex step1 = unit_phase(-2.0 * std::numbers::pi * di.dx * xi[1]);
        Complex p0(1.0, 0.0);
        size_t idx = 0;
        for (int q0 = 0; q0 < di.shape[0]; ++q0, p0 *= step0) {
            Complex row(0.0, 0.0);
            Complex p1(1.0, 0.0);
            for (int q1 = 0; q1 < di.shape[1]; ++q1, p1 *= step1) row += di.coeffs[idx++] * p1;
            acc += p0 * row;
        }
    } else {
        throw std::invalid_argument("DiscreteInterpolant: only d = 1, 2 supported");
    }
    return kernel * acc;
}

}  // namespace detail

/// Finite collection F = {f_1, ..., f_n} of Fourier transforms of compactly
/// supported functions. Immutable after construction; copies are cheap.
class FunctionFamily {
public:
    FunctionFamily(int dimension, std::vector<MemberSpec> members)
        : impl_(std::make_shared<const Impl>(make_impl(dimension, std::move(members)))) {}

    int dimension() const { return impl_->d; }
    int size() const { return static_cast<int>(impl_->members.size()); }
    const std::vector<MemberSpec>& members() const { return impl_->members; }

    /// Values (f_1(xi), ..., f_n(xi)).
    Eigen::VectorXcd eval(std::span<const double> xi) const {
        if (static_cast<int>(xi.size()) != impl_->d)
            throw std::invalid_argument("FunctionFamily::eval: point dimension mismatch");
        const int n = size();
        Eigen::VectorXcd out(n);
        if (impl_->stacked) {
            // all members are interpolants over the same grid: one phase vector,
            // one matrix-vector product for the whole family
            const auto& st = *impl_->stacked;
            Complex kernel(1.0, 0.0);
            for (int j = 0; j < impl_->d; ++j) {
                const double z = st.dx * xi[j];
                kernel *= st.dx * detail::sinc(z) * detail::unit_phase(-std::numbers::pi * z);
            }
            Eigen::VectorXcd w(st.cols);
            if (impl_->d == 1) {
                const Complex step = detail::unit_phase(-2.0 * std::numbers::pi * st.dx * xi[0]);
                Complex p(1.0, 0.0);
                for (int q = 0; q < st.shape[0]; ++q, p *= step) w(q) = p;
            } else {
                const Complex step0 = detail::unit_phase(-2.0 * std::numbers::pi * st.dx * xi[0]);
                const Complex step1 = detail::unit_phase(-2.0 * std::numbers::pi * st.dx * xi[1]);
                Complex p0(1.0, 0.0);
                int idx = 0;
                for (int q0 = 0; q0 < st.shape[0]; ++q0, p0 *= step0) {
                    Complex p1(1.0, 0.0);
                    for (int q1 = 0; q1 < st.shape[1]; ++q1, p1 *= step1) w(idx++) = p0 * p1;
                }
            }
            out.noalias() = st.coeffs * w;
            out *= kernel;
            return out;
        }
        for (int i = 0; i < n; ++i) out(i) = detail::eval_member(impl_->members[i], xi);
        return out;
    }

    Eigen::VectorXcd eval(const std::vector<double>& xi) const {
        return eval(std::span<const double>(xi));
    }

private:
    struct Stacked {
        Eigen::MatrixXcd coeffs;  // n x prod(shape)
        std::vector<int> shape;
        int cols = 0;
        double dx = 1.0;
    };
    struct Impl {
        int d = 0;
        std::vector<MemberSpec> members;
        std::optional<Stacked> stacked;
    };
    std::shared_ptr<const Impl> impl_;

    static Impl make_impl(int dimension, std::vector<MemberSpec> members) {
        Impl impl;
        impl.d = dimension;
        impl.members = std::move(members);
        if (impl.d < 1) throw std::invalid_argument("FunctionFamily: dimension must be positive");
        if (impl.members.empty()) throw std::invalid_argument("FunctionFamily: need at least one member");
        for (const auto& m : impl.members) {
            const int hint = detail::member_dimension_hint(m);
            if (hint != 0 && hint != impl.d)
                throw std::invalid_argument("FunctionFamily: member dimension mismatch");
        }
        for (size_t i = 0; i < impl.members.size(); ++i)
            for (size_t j = i + 1; j < impl.members.size(); ++j)
                if (impl.members[i] == impl.members[j])
                    throw std::invalid_argument("FunctionFamily: members must be pairwise distinct");

        // stacked fast path when every member interpolates the same grid
        bool homogeneous = true;
        const DiscreteInterpolant* first = std::get_if<DiscreteInterpolant>(&impl.members[0]);
        if (!first) homogeneous = false;
        for (size_t i = 1; homogeneous && i < impl.members.size(); ++i) {
            const auto* di = std::get_if<DiscreteInterpolant>(&impl.members[i]);
            homogeneous = di && di->shape == first->shape && di->dx == first->dx;
        }
        if (homogeneous && (impl.d == 1 || impl.d == 2)) {
            Stacked st;
            st.shape = first->shape;
            st.dx = first->dx;
            st.cols = 1;
            for (int s : st.shape) st.cols *= s;
            st.coeffs.resize(static_cast<int>(impl.members.size()), st.cols);
            for (size_t i = 0; i < impl.members.size(); ++i) {
                const auto& di = std::get<DiscreteInterpolant>(impl.members[i]);
                if (static_cast<int>(di.coeffs.size()) != st.cols)
                    throw std::invalid_argument("DiscreteInterpolant: coefficient count does not match shape");
                for (int c = 0; c < st.cols; ++c) st.coeffs(static_cast<int>(i), c) = di.coeffs[c];
            }
            impl.stacked = std::move(st);
        }
        return impl;
    }
};

inline Eigen::VectorXcd eval_family(const FunctionFamily& family, std::span<const double> xi) {
    return family.eval(xi);
}

inline Eigen::VectorXcd eval_family(const FunctionFamily& family, const std::vector<double>& xi) {
    return family.eval(xi);
}

/// f(alpha xi): exactly eval_family at the dilated point (same code path).
inline Eigen::VectorXcd eval_family_dilated(const FunctionFamily& family, double alpha,
                                            std::span<const double> xi) {
    if (!(alpha > 1.0)) throw std::invalid_argument("eval_family_dilated: alpha must be > 1");
    std::vector<double> scaled(xi.size());
    for (size_t j = 0; j < xi.size(); ++j) scaled[j] = alpha * xi[j];
    return family.eval(scaled);
}

/// {base, e^{-2 pi i xi.x_1} base, ...}: base plus its modulates at the offsets.
inline FunctionFamily make_translates(const MemberSpec& base, const std::vector<std::vector<double>>& offsets) {
    for (size_t i = 0; i < offsets.size(); ++i)
        for (size_t j = i + 1; j < offsets.size(); ++j)
            if (offsets[i] == offsets[j]) throw std::invalid_argument("make_translates: duplicate offsets");
    const auto* cf = std::get_if<ClosedForm>(&base);
    if (!cf) throw std::invalid_argument("make_translates: base must be a closed form");
    int d = detail::member_dimension_hint(base);
    if (d == 0) d = offsets.empty() ? 1 : static_cast<int>(offsets[0].size());
    std::vector<MemberSpec> members;
    members.push_back(base);
    for (const auto& x : offsets) {
        if (static_cast<int>(x.size()) != d)
            throw std::invalid_argument("make_translates: offset dimension mismatch");
        ClosedForm t = *cf;
        if (t.modulation.empty()) t.modulation.assign(d, 0.0);
        for (int j = 0; j < d; ++j) t.modulation[j] += x[j];
        members.push_back(t);
    }
    return FunctionFamily(d, std::move(members));
}

/// Scaling family: member k evaluates the base at alpha^{-k} xi, k = 0..count-1.
inline FunctionFamily make_scalings(const MemberSpec& base, double alpha, int count) {
    if (count < 1) throw std::invalid_argument("make_scalings: count must be >= 1");
    if (!(alpha > 1.0)) throw std::invalid_argument("make_scalings: alpha must be > 1");
    const auto* cf = std::get_if<ClosedForm>(&base);
    if (!cf) throw std::invalid_argument("make_scalings: base must be a closed form");
    int d = detail::member_dimension_hint(base);
    if (d == 0) d = 1;
    std::vector<MemberSpec> members;
    double s = 1.0;
    for (int k = 0; k < count; ++k, s /= alpha) {
        ClosedForm m = *cf;
        m.dilation = cf->dilation * s;
        // the modulation phase scales with the argument
        for (size_t j = 0; j < m.modulation.size(); ++j) m.modulation[j] = cf->modulation[j] * s;
        members.push_back(m);
    }
    return FunctionFamily(d, std::move(members));
}

/// Grid minimum of sum_k |f_k|^2 over the domain. Zero flags a common zero of
/// the family on the grid; small values warn of ill-conditioning.
inline double min_abs_sq_on_domain(const FunctionFamily& family, const FrequencyDomain& domain,
                                   int grid_resolution) {
    if (grid_resolution < 2) throw std::invalid_argument("min_abs_sq_on_domain: resolution must be >= 2");
    if (family.dimension() != domain.dimension())
        throw std::invalid_argument("min_abs_sq_on_domain: dimension mismatch");
    const auto [lo, hi] = bounding_box(domain);
    const int d = domain.dimension();
    std::vector<double> xi(d);
    std::vector<int> idx(d, 0);
    double best = std::numeric_limits<double>::infinity();
    bool any = false;
    while (true) {
        for (int j = 0; j < d; ++j)
            xi[j] = lo[j] + (hi[j] - lo[j]) * (idx[j] + 0.5) / grid_resolution;
        if (contains(domain, xi)) {
            any = true;
            best = std::min(best, family.eval(xi).squaredNorm());
        }
        int j = d - 1;
        while (j >= 0 && ++idx[j] == grid_resolution) idx[j--] = 0;
        if (j < 0) break;
    }
    if (!any) throw std::runtime_error("min_abs_sq_on_domain: grid has no points inside the domain");
    return best;
}

}  // namespace fext
