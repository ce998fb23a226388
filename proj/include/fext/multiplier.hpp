#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <complex>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "fext/domain.hpp"
#include "fext/family.hpp"
#include "fext/hermitian.hpp"

namespace fext {

/// Pointwise Sigma-multiplier
///
///   m(xi) = <f(xi), (delta I + Sigma) f(alpha xi)> / <f(xi), (delta I + Sigma) f(xi)>
///
/// with the inner product conjugate-linear in the first slot. The
/// unregularized multiplier is the delta = 0 case of the same code path.
/// Denominators at or below the floor evaluate to 0; every such event is
/// counted (the counter is shared across copies and atomically updated, so
/// bulk evaluation may run node-parallel).
class SigmaMultiplier {
public:
    SigmaMultiplier(FunctionFamily family, double alpha, HermitianMatrix sigma, double delta,
                    double denominator_floor)
        : family_(std::move(family)),
          alpha_(alpha),
          sigma_(std::move(sigma)),
          delta_(delta),
          floor_(denominator_floor),
          events_(std::make_shared<std::atomic<long long>>(0)) {
        if (!(alpha_ > 1.0)) throw std::invalid_argument("SigmaMultiplier: alpha must be > 1");
        if (delta_ < 0.0) throw std::invalid_argument("SigmaMultiplier: delta must be >= 0");
        if (floor_ < 0.0) throw std::invalid_argument("SigmaMultiplier: floor must be >= 0");
        if (sigma_.size() != family_.size())
            throw std::invalid_argument("SigmaMultiplier: Sigma size must match the family");
        if (min_eigenvalue(sigma_) < -1e-10 * (sigma_.frobenius_norm() + 1e-300))
            throw std::invalid_argument("SigmaMultiplier: Sigma must be positive semidefinite");
        m_ = sigma_.matrix();
        m_.diagonal().array() += delta_;
    }

    /// Floor defaulted from a probe grid over the domain:
    /// 1e-14 * max over probe nodes of <f, (delta I + Sigma) f>.
    SigmaMultiplier(FunctionFamily family, double alpha, HermitianMatrix sigma, double delta,
                    const FrequencyDomain& domain, int probe_resolution = 33)
        : SigmaMultiplier(family, alpha, sigma, delta,
                          default_floor(family, sigma, delta, domain, probe_resolution)) {}

    const FunctionFamily& family() const { return family_; }
    double alpha() const { return alpha_; }
    const HermitianMatrix& sigma() const { return sigma_; }
    double delta() const { return delta_; }
    double denominator_floor() const { return floor_; }
    long long floor_events() const { return events_->load(); }

    std::complex<double> eval(std::span<const double> xi) const {
        const Eigen::VectorXcd v = family_.eval(xi);
        std::vector<double> scaled(xi.size());
        for (std::size_t j = 0; j < xi.size(); ++j) scaled[j] = alpha_ * xi[j];
        const Eigen::VectorXcd w = family_.eval(scaled);
        return eval_from_values(v, w);
    }

    /// Quotient from precomputed family values v = f(xi), w = f(alpha xi).
    std::complex<double> eval_from_values(const Eigen::VectorXcd& v, const Eigen::VectorXcd& w) const {
        const Eigen::VectorXcd mv = m_ * v;
        const double den = v.dot(mv).real();  // Eigen dot conjugates the first argument
        if (!(den > floor_)) {
            events_->fetch_add(1, std::memory_order_relaxed);
            return {0.0, 0.0};
        }
        const std::complex<double> num = mv.dot(w);  // (Mv)^* w = v^* M w for Hermitian M
        return num / den;
    }

    std::complex<double> operator()(std::span<const double> xi) const { return eval(xi); }
    std::complex<double> operator()(const std::vector<double>& xi) const {
        return eval(std::span<const double>(xi));
    }

    static double default_floor(const FunctionFamily& family, const HermitianMatrix& sigma,
                                double delta, const FrequencyDomain& domain, int probe_resolution = 33) {
        if (probe_resolution < 2) throw std::invalid_argument("default_floor: probe resolution must be >= 2");
        Eigen::MatrixXcd m = sigma.matrix();
        m.diagonal().array() += delta;
        const auto [lo, hi] = bounding_box(domain);
        const int d = domain.dimension();
        std::vector<double> xi(d);
        std::vector<int> idx(d, 0);
        double peak = 0.0;
        while (true) {
            for (int j = 0; j < d; ++j) xi[j] = lo[j] + (hi[j] - lo[j]) * (idx[j] + 0.5) / probe_resolution;
            if (contains(domain, xi)) {
                const Eigen::VectorXcd v = family.eval(xi);
                peak = std::max(peak, v.dot(m * v).real());
            }
            int j = d - 1;
            while (j >= 0 && ++idx[j] == probe_resolution) idx[j--] = 0;
            if (j < 0) break;
        }
        return 1e-14 * peak;
    }

private:
    FunctionFamily family_;
    double alpha_;
    HermitianMatrix sigma_;
    double delta_;
    double floor_;
    Eigen::MatrixXcd m_;  // delta I + Sigma
    std::shared_ptr<std::atomic<long long>> events_;
};

/// m_I(xi) = sum_i f_i(xi)^* f_i(alpha xi) / sum_i |f_i(xi)|^2, the Sigma = I,
/// delta = 0 multiplier, with the same denominator-floor behavior.
inline std::complex<double> trace_multiplier(const FunctionFamily& family, double alpha,
                                             std::span<const double> xi, double floor = 0.0) {
    if (!(alpha > 1.0)) throw std::invalid_argument("trace_multiplier: alpha must be > 1");
    const Eigen::VectorXcd v = family.eval(xi);
    std::vector<double> scaled(xi.size());
    for (std::size_t j = 0; j < xi.size(); ++j) scaled[j] = alpha * xi[j];
    const Eigen::VectorXcd w = family.eval(scaled);
    const double den = v.squaredNorm();
    if (!(den > floor)) return {0.0, 0.0};
    return v.dot(w) / den;
}

inline std::complex<double> trace_multiplier(const FunctionFamily& family, double alpha,
                                             const std::vector<double>& xi, double floor = 0.0) {
    return trace_multiplier(family, alpha, std::span<const double>(xi), floor);
}

/// Elementwise eval over a node set, order preserved.
inline std::vector<std::complex<double>> eval_on_nodes(const SigmaMultiplier& mult,
                                                       const std::vector<std::vector<double>>& nodes) {
    std::vector<std::complex<double>> out;
    out.reserve(nodes.size());
    for (const auto& xi : nodes) out.push_back(mult.eval(xi));
    return out;
}

}  // namespace fext
