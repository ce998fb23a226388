#include <catch2/catch_amalgamated.hpp>

#include <numbers>

#include "fext/gram.hpp"

using Catch::Approx;
using fext::ClosedForm;
using fext::FrequencyDomain;
using fext::FunctionFamily;
using fext::HermitianMatrix;
using fext::SigmaMultiplier;
using fext::SincPower;
using fext::SpectralSet;

namespace {

constexpr double kPi = std::numbers::pi;
double sinc2(double x) {
    if (x == 0.0) return 1.0;
    const double s = std::sin(kPi * x) / (kPi * x);
    return s * s;
}

FunctionFamily sinc2_family() { return FunctionFamily(1, {ClosedForm{SincPower{2}, {}, 1.0}}); }

// independent two-loop accumulation (per-entry scalar sums, reversed node
// order) used as the assembly oracle
template <class M>
Eigen::MatrixXcd gram_oracle(const FunctionFamily& family, double alpha, const M& m,
                             const fext::QuadratureRule& rule) {
    const int n = family.size();
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            std::complex<double> acc(0.0, 0.0);
            for (std::size_t k = rule.size(); k-- > 0;) {
                const auto xi = rule.node(k);
                std::vector<double> scaled(xi.begin(), xi.end());
                for (auto& v : scaled) v *= alpha;
                const Eigen::VectorXcd f = family.eval(xi);
                const Eigen::VectorXcd fa = family.eval(scaled);
                const std::complex<double> mv = m(xi);
                acc += 0.5 * rule.weights[k] * (fa(i) - mv * f(i)) * std::conj(fa(j) - mv * f(j));
            }
            g(i, j) = acc;
        }
    }
    return g;
}

}  // namespace

TEST_CASE("exact multiplier yields a vanishing Gram matrix") {
    const auto fam = sinc2_family();
    const SigmaMultiplier m(fam, 2.0, HermitianMatrix::identity(1), 0.0, 0.0);
    const auto rule = fext::tensor_rule(FrequencyDomain::cube(1, 0.5), 512);
    const auto result = fext::gram_matrix(fam, 2.0, m, rule);
    CHECK(result.G.frobenius_norm() <= 1e-12);
    CHECK(result.floor_events == 0);
    CHECK(result.rule_id == rule.id);
}

TEST_CASE("zero multiplier gives the dilated autocorrelation, strictly PSD") {
    const auto fam = sinc2_family();
    const auto rule = fext::tensor_rule(FrequencyDomain::cube(1, 0.5), 1024);
    auto zero = [](std::span<const double>) { return std::complex<double>(0.0, 0.0); };
    const auto result = fext::gram_matrix(fam, 2.0, zero, rule);
    // oracle: 1/2 integral of sinc^2(2 xi)^2 over [-1/2, 1/2]
    const auto fine = fext::tensor_rule(FrequencyDomain::cube(1, 0.5), 100000);
    const double expected = 0.5 * fext::integrate(fine, [](std::span<const double> xi) {
                                      const double v = sinc2(2 * xi[0]);
                                      return std::complex<double>(v * v, 0.0);
                                  }).real();
    CHECK(result.G(0, 0).real() == Approx(expected).epsilon(1e-5));
    CHECK(fext::min_eigenvalue(result.G) > 0.0);
}

TEST_CASE("assembly matches the independent two-loop oracle") {
    const auto fam = fext::make_translates(ClosedForm{SincPower{2}, {}, 1.0}, {{0.2}, {0.4}});
    const SigmaMultiplier m(fam, 2.0, HermitianMatrix::identity(3), 0.0, 0.0);
    const auto rule = fext::tensor_rule(FrequencyDomain::cube(1, 0.5), 257);
    const auto fast = fext::gram_matrix(fam, 2.0, m, rule);
    const Eigen::MatrixXcd slow = gram_oracle(fam, 2.0, m, rule);
    CHECK((fast.G.matrix() - slow).norm() <= 1e-12 * (1.0 + slow.norm()));
}

TEST_CASE("quadrature refinement stabilizes the entries") {
    const auto fam = fext::make_translates(ClosedForm{SincPower{2}, {}, 1.0}, {{0.25}});
    auto tm = [&](std::span<const double> xi) { return fext::trace_multiplier(fam, 2.0, xi); };
    const auto coarse = fext::gram_matrix(fam, 2.0, tm, fext::tensor_rule(FrequencyDomain::cube(1, 0.5), 2048));
    const auto fine = fext::gram_matrix(fam, 2.0, tm, fext::tensor_rule(FrequencyDomain::cube(1, 0.5), 4096));
    CHECK((coarse.G.matrix() - fine.G.matrix()).cwiseAbs().maxCoeff() <= 1e-6);

    // empirical first-order refinement: errors shrink roughly like 1/R
    const auto reference = fext::gram_matrix(fam, 2.0, tm, fext::tensor_rule(FrequencyDomain::cube(1, 0.5), 16384));
    const double e1 = (coarse.G.matrix() - reference.G.matrix()).norm();
    const double e2 = (fine.G.matrix() - reference.G.matrix()).norm();
    CHECK(e2 <= e1 + 1e-12);
}

TEST_CASE("Gram matrices are PSD within tolerance") {
    const auto fam = fext::make_translates(ClosedForm{SincPower{2}, {}, 1.0}, {{0.2}, {0.4}});
    auto rough = [](std::span<const double> xi) {
        return std::complex<double>(std::cos(xi[0]), 0.25 * std::sin(3.0 * xi[0]));
    };
    const auto rule = fext::monte_carlo_rule(FrequencyDomain::cube(1, 0.5), 2000, 11);
    const auto result = fext::gram_matrix(fam, 2.0, rough, rule);
    CHECK(fext::min_eigenvalue(result.G) >= -1e-8 * (1.0 + result.G.frobenius_norm()));
}

TEST_CASE("rank diagnostic: zero-multiplier Gram has full rank for independent members") {
    const auto fam = fext::make_translates(ClosedForm{SincPower{2}, {}, 1.0}, {{0.2}, {0.4}});
    auto zero = [](std::span<const double>) { return std::complex<double>(0.0, 0.0); };
    const auto rule = fext::tensor_rule(FrequencyDomain::cube(1, 0.5), 512);
    const auto result = fext::gram_matrix(fam, 2.0, zero, rule);
    const auto dec = fext::eigendecompose(result.G);
    CHECK(dec.lambda(dec.lambda.size() - 1) > 1e-8);  // smallest eigenvalue bounded away from zero
}

TEST_CASE("approximation error") {
    SECTION("zero coordinates give zero error") {
        CHECK(fext::approximation_error(Eigen::VectorXcd::Zero(2), HermitianMatrix::identity(2)) == 0.0);
    }
    SECTION("identity Gram with a basis vector") {
        Eigen::VectorXcd c = Eigen::VectorXcd::Zero(2);
        c(0) = 1.0;
        CHECK(fext::approximation_error(c, HermitianMatrix::identity(2)) == Approx(1.0));
    }
    SECTION("quadratic form matches the direct residual integral") {
        const auto fam = fext::make_translates(ClosedForm{SincPower{2}, {}, 1.0}, {{0.25}});
        const SigmaMultiplier m(fam, 2.0, HermitianMatrix::identity(2), 0.0, 0.0);
        const auto rule = fext::tensor_rule(FrequencyDomain::cube(1, 0.5), 4096);
        const auto result = fext::gram_matrix(fam, 2.0, m, rule);
        Eigen::VectorXcd c(2);
        c << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
        const double direct = 0.5 * fext::integrate(rule, [&](std::span<const double> xi) {
                                        std::vector<double> scaled{2.0 * xi[0]};
                                        const Eigen::VectorXcd f = fam.eval(xi);
                                        const Eigen::VectorXcd fa = fam.eval(scaled);
                                        const std::complex<double> r = c.dot(fa - m(xi) * f);
                                        return std::complex<double>(std::norm(r), 0.0);
                                    }).real();
        CHECK(fext::approximation_error(c, result.G) == Approx(direct).margin(1e-10));
    }
    SECTION("nonnegative for random coordinates") {
        const auto fam = fext::make_translates(ClosedForm{SincPower{2}, {}, 1.0}, {{0.2}});
        const SigmaMultiplier m(fam, 2.0, HermitianMatrix::identity(2), 0.0, 0.0);
        const auto rule = fext::tensor_rule(FrequencyDomain::cube(1, 0.5), 256);
        const auto result = fext::gram_matrix(fam, 2.0, m, rule);
        std::mt19937_64 rng(8);
        std::normal_distribution<double> normal(0.0, 1.0);
        for (int t = 0; t < 50; ++t) {
            Eigen::VectorXcd c(2);
            for (int i = 0; i < 2; ++i) c(i) = std::complex<double>(normal(rng), normal(rng));
            CHECK(fext::approximation_error(c, result.G) >= 0.0);
        }
    }
    SECTION("dimension mismatch throws") {
        CHECK_THROWS_AS(fext::approximation_error(Eigen::VectorXcd::Zero(3), HermitianMatrix::identity(2)),
                        std::invalid_argument);
    }
}

TEST_CASE("worst-case objective") {
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(2, 2);
    d(0, 0) = 3.0;
    d(1, 1) = 1.0;
    const HermitianMatrix g(d);
    CHECK(fext::worst_case_objective(SpectralSet::nuclear_ball(1.0), g, 0.0) == Approx(3.0));
    CHECK(fext::worst_case_objective(SpectralSet::operator_ball(1.0), g, 0.0) == Approx(4.0));
    CHECK(fext::worst_case_objective(SpectralSet::nuclear_ball(1.0), HermitianMatrix::zero(2), 0.5) == 0.0);
    CHECK(fext::worst_case_objective(SpectralSet::nuclear_ball(1.0), g, 0.1) == Approx(3.4));
}
