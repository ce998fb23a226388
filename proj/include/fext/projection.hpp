#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "fext/hermitian.hpp"

namespace fext {

/// Unitarily-invariant convex constraint set W for the Hermitian variable,
/// described through its orthosymmetric eigenvalue set D_W:
///   nuclear_ball(r)  -> D_W = { d : sum |d_i| <= r }
///   operator_ball(r) -> D_W = { d : max |d_i| <= r }
///   trace_cap(Delta) -> D_W = { d : d >= 0, sum d_i <= Delta }  (PSD cone cap)
struct SpectralSet {
    enum class Kind { nuclear_ball, operator_ball, trace_cap };
    Kind kind = Kind::nuclear_ball;
    double radius = 1.0;

    static SpectralSet nuclear_ball(double r) { return {Kind::nuclear_ball, check(r)}; }
    static SpectralSet operator_ball(double r) { return {Kind::operator_ball, check(r)}; }
    static SpectralSet trace_cap(double delta) { return {Kind::trace_cap, check(delta)}; }

private:
    static double check(double r) {
        if (!(r > 0)) throw std::invalid_argument("SpectralSet: radius must be > 0");
        return r;
    }
};

/// Euclidean projection onto { d : sum |d_i| <= r }. Exact sort-based KKT
/// solution; preserves signs and the zero pattern.
inline Eigen::VectorXd project_l1_ball(const Eigen::VectorXd& v, double r) {
    if (!(r > 0)) throw std::invalid_argument("project_l1_ball: radius must be > 0");
    const Eigen::Index n = v.size();
    if (v.cwiseAbs().sum() <= r) return v;
    std::vector<double> u(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) u[static_cast<std::size_t>(i)] = std::abs(v(i));
    std::sort(u.begin(), u.end(), std::greater<double>());
    double cumulative = 0.0;
    double theta = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        cumulative += u[k];
        const double t = (cumulative - r) / static_cast<double>(k + 1);
        if (k + 1 == u.size() || u[k + 1] <= t) {
            theta = t;
            break;
        }
    }
    Eigen::VectorXd out(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double mag = std::max(std::abs(v(i)) - theta, 0.0);
        out(i) = v(i) >= 0 ? mag : -mag;
    }
    return out;
}

/// Clip each coordinate to [-r, r].
inline Eigen::VectorXd project_box(const Eigen::VectorXd& v, double r) {
    if (!(r > 0)) throw std::invalid_argument("project_box: radius must be > 0");
    return v.cwiseMax(-r).cwiseMin(r);
}

/// Euclidean projection onto { d : d >= 0, sum d_i <= Delta }.
inline Eigen::VectorXd project_simplex_cap(const Eigen::VectorXd& v, double delta) {
    if (!(delta > 0)) throw std::invalid_argument("project_simplex_cap: cap must be > 0");
    Eigen::VectorXd w = v.cwiseMax(0.0);
    if (w.sum() <= delta) return w;
    // project onto the simplex { d >= 0, sum d = Delta }
    std::vector<double> u(static_cast<std::size_t>(w.size()));
    for (Eigen::Index i = 0; i < w.size(); ++i) u[static_cast<std::size_t>(i)] = w(i);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double cumulative = 0.0;
    double theta = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        cumulative += u[k];
        const double t = (cumulative - delta) / static_cast<double>(k + 1);
        if (k + 1 == u.size() || u[k + 1] <= t) {
            theta = t;
            break;
        }
    }
    return (w.array() - theta).cwiseMax(0.0).matrix();
}

inline Eigen::VectorXd project_eigenvalues(const SpectralSet& w, const Eigen::VectorXd& lambda) {
    switch (w.kind) {
        case SpectralSet::Kind::nuclear_ball: return project_l1_ball(lambda, w.radius);
        case SpectralSet::Kind::operator_ball: return project_box(lambda, w.radius);
        case SpectralSet::Kind::trace_cap: return project_simplex_cap(lambda, w.radius);
    }
    throw std::logic_error("project_eigenvalues: unknown set kind");
}

/// proj_W(X) = U diag(proj_{D_W}(lambda)) U*. PSD inputs stay PSD because the
/// eigenvalue projection preserves signs on an orthosymmetric set.
inline HermitianMatrix project_spectral(const SpectralSet& w, const HermitianMatrix& x) {
    const EigenDecomposition dec = eigendecompose(x);
    const Eigen::VectorXd proj = project_eigenvalues(w, dec.lambda);
    Eigen::MatrixXcd out = dec.U * proj.asDiagonal() * dec.U.adjoint();
    return HermitianMatrix(out);
}

/// Support function sigma_W evaluated spectrally from the extreme points of D_W.
inline double support_value(const SpectralSet& w, const Eigen::VectorXd& lambda) {
    switch (w.kind) {
        case SpectralSet::Kind::nuclear_ball: return w.radius * lambda.cwiseAbs().maxCoeff();
        case SpectralSet::Kind::operator_ball: return w.radius * lambda.cwiseAbs().sum();
        case SpectralSet::Kind::trace_cap: return w.radius * std::max(lambda.maxCoeff(), 0.0);
    }
    throw std::logic_error("support_value: unknown set kind");
}

inline double support_value(const SpectralSet& w, const HermitianMatrix& x) {
    return support_value(w, eigendecompose(x).lambda);
}

/// sup { trace(X) : X in W }; the Delta of the contraction diagnostics.
inline double sup_trace(const SpectralSet& w, int n) {
    switch (w.kind) {
        case SpectralSet::Kind::nuclear_ball: return w.radius;
        case SpectralSet::Kind::operator_ball: return w.radius * n;
        case SpectralSet::Kind::trace_cap: return w.radius;
    }
    throw std::logic_error("sup_trace: unknown set kind");
}

/// Membership test up to a tolerance on the eigenvalue constraints.
inline bool member(const SpectralSet& w, const HermitianMatrix& x, double tol = 1e-10) {
    const Eigen::VectorXd lambda = eigendecompose(x).lambda;
    switch (w.kind) {
        case SpectralSet::Kind::nuclear_ball: return lambda.cwiseAbs().sum() <= w.radius + tol;
        case SpectralSet::Kind::operator_ball: return lambda.cwiseAbs().maxCoeff() <= w.radius + tol;
        case SpectralSet::Kind::trace_cap:
            return lambda.minCoeff() >= -tol && lambda.sum() <= w.radius + tol;
    }
    throw std::logic_error("member: unknown set kind");
}

}  // namespace fext
