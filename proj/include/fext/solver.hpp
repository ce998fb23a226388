#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "fext/domain.hpp"
#include "fext/family.hpp"
#include "fext/gram.hpp"
#include "fext/hermitian.hpp"
#include "fext/multiplier.hpp"
#include "fext/projection.hpp"
#include "fext/quadrature.hpp"

namespace fext {

struct SolverConfig {
    double delta = 1e-6;
    double tau_g = 0.25;
    double tau_sigma = 0.50;
    int iterations = 100;
    SpectralSet W = SpectralSet::nuclear_ball(1.0);
    std::optional<NodeSchedule> schedule;      // Monte Carlo path
    std::optional<QuadratureRule> fixed_rule;  // deterministic path
    std::uint64_t seed = 0;
    std::optional<HermitianMatrix> sigma0;     // default: identity
    // The unregularized iteration (delta = 0) is undefined wherever the Sigma
    // seminorm of f vanishes; it is allowed only as a diagnostic.
    bool allow_unregularized = false;
    // called with (k, Sigma_{k+1}) after every update; for instrumentation
    std::function<void(int, const HermitianMatrix&)> iterate_observer;

    void validate() const {
        if (delta <= 0.0 && !allow_unregularized)
            throw std::invalid_argument("SolverConfig: delta must be > 0 (set allow_unregularized for the diagnostic path)");
        if (delta < 0.0) throw std::invalid_argument("SolverConfig: delta must be >= 0");
        if (tau_g < 0.0 || tau_sigma < 0.0) throw std::invalid_argument("SolverConfig: tau_G, tau_Sigma must be >= 0");
        if (iterations < 1) throw std::invalid_argument("SolverConfig: iterations must be >= 1");
        if (!schedule && !fixed_rule) throw std::invalid_argument("SolverConfig: need a node schedule or a fixed rule");
    }
};

struct IterationRecord {
    int iteration = 0;
    double objective = 0.0;    // sigma_W(G) + delta trace(G)
    double step = 0.0;         // ||Sigma_{k+1} - Sigma_k||_F
    long long nodes = 0;
    double sigma_norm = 0.0;   // ||Sigma_k||_F
    long long floor_events = 0;
};

struct SolverTrace {
    std::vector<IterationRecord> records;
};

struct SolveResult {
    HermitianMatrix sigma;
    SigmaMultiplier multiplier;
    SolverTrace trace;
};

/// Estimates of the contraction constants. `bound` is
/// tau_Sigma + 2 n tau_G R_F L_M (1 + R_M); the iteration is certified
/// contractive when it is < 1.
struct ContractionDiagnostics {
    double kappa = 0.0;     // n + Delta / delta
    double delta_cap = 0.0; // Delta = sup { trace X : X in W }
    double R_M = 0.0;
    double L_M = 0.0;
    double R_F = 0.0;
    double bound = 0.0;
    bool satisfied = false;
};

namespace detail {

struct NodeValues {
    // f(xi) and f(alpha xi) stacked columnwise over the rule nodes
    Eigen::MatrixXcd v;
    Eigen::MatrixXcd w;
};

inline NodeValues family_values(const FunctionFamily& family, double alpha, const QuadratureRule& rule) {
    NodeValues out;
    const int n = family.size();
    out.v.resize(n, static_cast<Eigen::Index>(rule.size()));
    out.w.resize(n, static_cast<Eigen::Index>(rule.size()));
    std::vector<double> scaled(static_cast<std::size_t>(rule.d));
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const auto xi = rule.node(i);
        out.v.col(static_cast<Eigen::Index>(i)) = family.eval(xi);
        for (int j = 0; j < rule.d; ++j) scaled[static_cast<std::size_t>(j)] = alpha * xi[j];
        out.w.col(static_cast<Eigen::Index>(i)) = family.eval(scaled);
    }
    return out;
}

}  // namespace detail

/// Regularized fixed-point iteration
///
///   m_{k+1}     = <f, D_alpha f>_{delta I + Sigma_k} / ||f||^2_{delta I + Sigma_k}
///   Sigma_{k+1} = proj_W(tau_Sigma Sigma_k + tau_G G(m_{k+1}))
///
/// run for a fixed number of iterations. The per-iteration denominator floor
/// is 1e-14 times the largest denominator over the iteration's own nodes.
/// Monte Carlo node counts follow the schedule; the iteration-k seed is
/// splitmix-derived from (config.seed, k).
inline SolveResult solve(const FunctionFamily& family, double alpha, const FrequencyDomain& domain,
                         const SolverConfig& config) {
    config.validate();
    if (!(alpha > 1.0)) throw std::invalid_argument("solve: alpha must be > 1");
    const int n = family.size();

    HermitianMatrix sigma = config.sigma0 ? *config.sigma0 : HermitianMatrix::identity(n);
    if (sigma.size() != n) throw std::invalid_argument("solve: sigma0 size mismatch");

    std::optional<detail::NodeValues> fixed_values;
    if (config.fixed_rule) fixed_values = detail::family_values(family, alpha, *config.fixed_rule);

    SolverTrace trace;
    trace.records.reserve(static_cast<std::size_t>(config.iterations));
    double last_floor = 0.0;

    QuadratureRule mc_rule;
    for (int k = 0; k < config.iterations; ++k) {
        const QuadratureRule* rule = nullptr;
        const detail::NodeValues* values = nullptr;
        detail::NodeValues scratch;
        if (config.fixed_rule) {
            rule = &*config.fixed_rule;
            values = &*fixed_values;
        } else {
            const int count = config.schedule->count_at(k, config.iterations);
            mc_rule = monte_carlo_rule(domain, count, detail::derive_seed(config.seed, static_cast<std::uint64_t>(k)));
            scratch = detail::family_values(family, alpha, mc_rule);
            rule = &mc_rule;
            values = &scratch;
        }
        const Eigen::Index count = values->v.cols();

        Eigen::MatrixXcd big_m = sigma.matrix();
        big_m.diagonal().array() += config.delta;

        // pass 1: denominators and numerators; the floor needs the global max
        Eigen::MatrixXcd mv = big_m * values->v;
        Eigen::VectorXd den(count);
        Eigen::VectorXcd num(count);
        for (Eigen::Index i = 0; i < count; ++i) {
            den(i) = values->v.col(i).dot(mv.col(i)).real();
            num(i) = mv.col(i).dot(values->w.col(i));
        }
        const double floor = 1e-14 * den.maxCoeff();
        last_floor = floor;

        // pass 2: multiplier values and Gram assembly in node order
        long long floor_events = 0;
        Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(n, n);
        for (Eigen::Index i = 0; i < count; ++i) {
            std::complex<double> m_val(0.0, 0.0);
            if (den(i) > floor) {
                m_val = num(i) / den(i);
            } else {
                ++floor_events;
            }
            const Eigen::VectorXcd r = values->w.col(i) - m_val * values->v.col(i);
            g.noalias() += (0.5 * rule->weights[i]) * (r * r.adjoint());
        }
        HermitianMatrix gram(g);

        const double objective = worst_case_objective(config.W, gram, config.delta);
        if (!std::isfinite(objective)) {
            std::ostringstream os;
            os << "solve: non-finite objective at iteration " << k << " (rule " << rule->id << ")";
            throw std::runtime_error(os.str());
        }

        Eigen::MatrixXcd candidate = config.tau_sigma * sigma.matrix() + config.tau_g * gram.matrix();
        HermitianMatrix next = project_spectral(config.W, HermitianMatrix(candidate));

        IterationRecord rec;
        rec.iteration = k;
        rec.objective = objective;
        rec.step = (next.matrix() - sigma.matrix()).norm();
        rec.nodes = static_cast<long long>(count);
        rec.sigma_norm = sigma.frobenius_norm();
        rec.floor_events = floor_events;
        trace.records.push_back(rec);

        sigma = std::move(next);
        if (config.iterate_observer) config.iterate_observer(k, sigma);
    }

    SigmaMultiplier multiplier(family, alpha, sigma, config.delta, last_floor);
    return SolveResult{std::move(sigma), std::move(multiplier), std::move(trace)};
}

/// Quadrature estimates of the contraction constants over a probe rule.
inline ContractionDiagnostics validate_params(const FunctionFamily& family, double alpha,
                                              const FrequencyDomain& domain, const SolverConfig& config,
                                              const QuadratureRule& probe_rule) {
    (void)domain;
    if (probe_rule.size() == 0) throw std::invalid_argument("validate_params: probe rule is empty");
    if (!(alpha > 1.0)) throw std::invalid_argument("validate_params: alpha must be > 1");
    if (!(config.delta > 0.0)) throw std::invalid_argument("validate_params: delta must be > 0");
    const int n = family.size();

    ContractionDiagnostics diag;
    diag.delta_cap = sup_trace(config.W, n);
    diag.kappa = n + diag.delta_cap / config.delta;

    const detail::NodeValues values = detail::family_values(family, alpha, probe_rule);
    double volume = 0.0, mean_r2 = 0.0, mean_r4 = 0.0, r_f = 0.0;
    for (std::size_t i = 0; i < probe_rule.size(); ++i) {
        const Eigen::Index c = static_cast<Eigen::Index>(i);
        const double nv = values.v.col(c).squaredNorm();
        const double nw = values.w.col(c).squaredNorm();
        if (nv <= 0.0) {
            std::ostringstream os;
            os << "validate_params: ||f|| = 0 at probe node " << i
               << "; shrink the domain away from the common-zero set";
            throw std::runtime_error(os.str());
        }
        const double ratio2 = nw / nv;
        volume += probe_rule.weights[i];
        mean_r2 += probe_rule.weights[i] * ratio2;
        mean_r4 += probe_rule.weights[i] * ratio2 * ratio2;
        r_f = std::max({r_f, values.v.col(c).cwiseAbs().maxCoeff(), values.w.col(c).cwiseAbs().maxCoeff()});
    }
    mean_r2 /= volume;
    mean_r4 /= volume;

    diag.R_M = diag.kappa * std::sqrt(volume) * std::sqrt(mean_r2);
    diag.L_M = std::sqrt(volume) / config.delta * (1.0 + diag.kappa * std::sqrt(mean_r4));
    diag.R_F = r_f;
    diag.bound = config.tau_sigma + 2.0 * n * config.tau_g * diag.R_F * diag.L_M * (1.0 + diag.R_M);
    diag.satisfied = diag.bound < 1.0;
    return diag;
}

/// || Sigma - proj_W(tau_Sigma Sigma + tau_G G(m_{Sigma,delta})) ||_F over the
/// given rule; a certified fixed point returns (numerically) zero.
inline double fixed_point_residual(const HermitianMatrix& sigma, const FunctionFamily& family,
                                   double alpha, const SolverConfig& config, const QuadratureRule& rule) {
    if (rule.size() == 0) throw std::invalid_argument("fixed_point_residual: rule is empty");
    const detail::NodeValues values = detail::family_values(family, alpha, rule);
    const Eigen::Index count = values.v.cols();
    const int n = family.size();

    Eigen::MatrixXcd big_m = sigma.matrix();
    big_m.diagonal().array() += config.delta;
    Eigen::MatrixXcd mv = big_m * values.v;
    Eigen::VectorXd den(count);
    Eigen::VectorXcd num(count);
    for (Eigen::Index i = 0; i < count; ++i) {
        den(i) = values.v.col(i).dot(mv.col(i)).real();
        num(i) = mv.col(i).dot(values.w.col(i));
    }
    const double floor = 1e-14 * den.maxCoeff();
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index i = 0; i < count; ++i) {
        const std::complex<double> m_val = den(i) > floor ? num(i) / den(i) : std::complex<double>(0.0, 0.0);
        const Eigen::VectorXcd r = values.w.col(i) - m_val * values.v.col(i);
        g.noalias() += (0.5 * rule.weights[i]) * (r * r.adjoint());
    }
    const HermitianMatrix next = project_spectral(
        config.W, HermitianMatrix(config.tau_sigma * sigma.matrix() + config.tau_g * g));
    return (sigma.matrix() - next.matrix()).norm();
}

}  // namespace fext
