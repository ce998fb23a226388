#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <stdexcept>

namespace fext {

/// Dense Hermitian matrix. Construction symmetrizes as (A + A*)/2 and rejects
/// inputs whose asymmetry exceeds 1e-12 relative to the Frobenius norm
/// (quadrature noise may break exact symmetry; anything larger is a bug).
class HermitianMatrix {
public:
    explicit HermitianMatrix(const Eigen::MatrixXcd& a) {
        if (a.rows() != a.cols()) throw std::invalid_argument("HermitianMatrix: matrix must be square");
        if (!a.allFinite()) throw std::invalid_argument("HermitianMatrix: entries must be finite");
        const double scale = a.norm();
        const double asym = (a - a.adjoint()).norm();
        if (asym > 1e-12 * scale + 1e-300)
            throw std::invalid_argument("HermitianMatrix: input is not Hermitian within tolerance");
        m_ = 0.5 * (a + a.adjoint().eval());
        // force exactly real diagonal
        for (Eigen::Index i = 0; i < m_.rows(); ++i) m_(i, i) = std::complex<double>(m_(i, i).real(), 0.0);
    }

    static HermitianMatrix identity(int n) { return HermitianMatrix(Eigen::MatrixXcd::Identity(n, n)); }
    static HermitianMatrix zero(int n) { return HermitianMatrix(Eigen::MatrixXcd::Zero(n, n)); }

    int size() const { return static_cast<int>(m_.rows()); }
    const Eigen::MatrixXcd& matrix() const { return m_; }
    double trace() const { return m_.trace().real(); }
    double frobenius_norm() const { return m_.norm(); }
    std::complex<double> operator()(int i, int j) const { return m_(i, j); }

private:
    Eigen::MatrixXcd m_;
};

/// U unitary, lambda real sorted descending, with A = U diag(lambda) U*.
struct EigenDecomposition {
    Eigen::MatrixXcd U;
    Eigen::VectorXd lambda;
};

inline EigenDecomposition eigendecompose(const HermitianMatrix& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(a.matrix());
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigendecompose: eigen solver did not converge");
    const int n = a.size();
    EigenDecomposition dec;
    dec.U.resize(n, n);
    dec.lambda.resize(n);
    // Eigen returns ascending order; the canonical form here is descending.
    for (int i = 0; i < n; ++i) {
        dec.lambda(i) = solver.eigenvalues()(n - 1 - i);
        dec.U.col(i) = solver.eigenvectors().col(n - 1 - i);
    }
    return dec;
}

/// <A, B>_F = Re trace(A* B).
inline double frobenius_inner(const HermitianMatrix& a, const HermitianMatrix& b) {
    if (a.size() != b.size()) throw std::invalid_argument("frobenius_inner: size mismatch");
    return (a.matrix().adjoint() * b.matrix()).trace().real();
}

inline double min_eigenvalue(const HermitianMatrix& a) {
    const auto dec = eigendecompose(a);
    return dec.lambda(dec.lambda.size() - 1);
}

}  // namespace fext
