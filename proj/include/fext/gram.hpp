#pragma once

#include <Eigen/Dense>
#include <complex>
#include <sstream>
#include <stdexcept>
#include <string>

#include "fext/family.hpp"
#include "fext/hermitian.hpp"
#include "fext/multiplier.hpp"
#include "fext/projection.hpp"
#include "fext/quadrature.hpp"

namespace fext {

struct GramResult {
    HermitianMatrix G;
    std::string rule_id;
    long long floor_events = 0;
};

namespace detail {

template <class M>
Eigen::MatrixXcd assemble_gram(const FunctionFamily& family, double alpha, const M& m,
                               const QuadratureRule& rule) {
    const int n = family.size();
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(n, n);
    std::vector<double> scaled(static_cast<std::size_t>(rule.d));
    // rank-1 updates in fixed node order: bit-reproducible across equal rules
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const auto xi = rule.node(i);
        const Eigen::VectorXcd v = family.eval(xi);
        for (int j = 0; j < rule.d; ++j) scaled[static_cast<std::size_t>(j)] = alpha * xi[j];
        const Eigen::VectorXcd w = family.eval(scaled);
        const Eigen::VectorXcd r = w - m(xi) * v;
        if (!r.allFinite()) {
            std::ostringstream os;
            os << "gram_matrix: non-finite residual at node " << i;
            throw std::runtime_error(os.str());
        }
        g.noalias() += (0.5 * rule.weights[i]) * (r * r.adjoint());
    }
    return g;
}

}  // namespace detail

/// G(m) = 1/2 sum_i w_i r(xi_i) r(xi_i)^* with r(xi) = f(alpha xi) - m(xi) f(xi).
/// Symmetrized on construction; PSD up to quadrature rounding.
template <class M>
GramResult gram_matrix(const FunctionFamily& family, double alpha, const M& m,
                       const QuadratureRule& rule) {
    if (rule.size() == 0) throw std::invalid_argument("gram_matrix: rule is empty");
    if (rule.d != family.dimension()) throw std::invalid_argument("gram_matrix: dimension mismatch");
    GramResult result{HermitianMatrix(detail::assemble_gram(family, alpha, m, rule)), rule.id, 0};
    return result;
}

inline GramResult gram_matrix(const FunctionFamily& family, double alpha, const SigmaMultiplier& m,
                              const QuadratureRule& rule) {
    if (rule.size() == 0) throw std::invalid_argument("gram_matrix: rule is empty");
    if (rule.d != family.dimension()) throw std::invalid_argument("gram_matrix: dimension mismatch");
    const long long before = m.floor_events();
    GramResult result{HermitianMatrix(detail::assemble_gram(family, alpha, m, rule)), rule.id, 0};
    result.floor_events = m.floor_events() - before;
    return result;
}

/// e(c, m) = Re(c^* G(m) c); tiny negative rounding is clipped at 0.
inline double approximation_error(const Eigen::VectorXcd& c, const HermitianMatrix& g) {
    if (c.size() != g.size()) throw std::invalid_argument("approximation_error: dimension mismatch");
    const double value = c.dot(g.matrix() * c).real();
    return value < 0.0 ? 0.0 : value;
}

/// sigma_W(G) + delta * trace(G).
inline double worst_case_objective(const SpectralSet& w, const HermitianMatrix& g, double delta) {
    if (delta < 0.0) throw std::invalid_argument("worst_case_objective: delta must be >= 0");
    return support_value(w, g) + delta * g.trace();
}

}  // namespace fext
