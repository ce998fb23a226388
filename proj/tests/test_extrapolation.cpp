#include <catch2/catch_amalgamated.hpp>

#include <numbers>

#include "fext/extrapolation.hpp"

using Catch::Approx;
using fext::ClosedForm;
using fext::FrequencyDomain;
using fext::FunctionFamily;
using fext::GridField;
using fext::HermitianMatrix;
using fext::SigmaMultiplier;
using fext::SincPower;

namespace {

constexpr double kPi = std::numbers::pi;

double sinc2(double x) {
    if (x == 0.0) return 1.0;
    const double s = std::sin(kPi * x) / (kPi * x);
    return s * s;
}

FunctionFamily sinc2_family() { return FunctionFamily(1, {ClosedForm{SincPower{2}, {}, 1.0}}); }

GridField sample_sinc2(const GridField& spec) {
    return fext::sample_on_grid(spec, [](std::span<const double> xi) {
        return std::complex<double>(sinc2(xi[0]), 0.0);
    });
}

}  // namespace

TEST_CASE("extrapolation of sinc^2 by its exact multiplier is exact") {
    const auto fam = sinc2_family();
    const SigmaMultiplier m(fam, 2.0, HermitianMatrix::identity(1), 0.0, 0.0);
    const auto omega0 = FrequencyDomain::cube(1, 0.5);
    // low field on cube(1/2), node-centered, 512 nodes
    GridField low = fext::make_grid({512}, {1.0 / 512}, {-0.5 + 0.5 / 512});
    low = sample_sinc2(low);
    const GridField out = fext::extrapolate_field(m, low, 2.0, omega0);

    std::vector<double> xi;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.coord(i, xi);
        if (std::abs(xi[0]) <= 1.0) {
            CHECK(std::abs(out.values[i] - std::complex<double>(sinc2(xi[0]), 0.0)) <= 1e-12);
        } else {
            CHECK(out.values[i] == std::complex<double>(0.0, 0.0));
        }
    }
}

TEST_CASE("extrapolate_field restricted to Omega_0 is the identity on the input") {
    const auto fam = sinc2_family();
    const SigmaMultiplier m(fam, 2.0, HermitianMatrix::identity(1), 0.0, 0.0);
    const auto omega0 = FrequencyDomain::cube(1, 0.5);
    GridField low = fext::make_grid({128}, {1.0 / 128}, {-0.5 + 0.5 / 128});
    low = sample_sinc2(low);
    const GridField out = fext::extrapolate_field(m, low, 2.0, omega0);
    // locate the copied block and compare bitwise
    std::vector<double> xi;
    std::size_t matched = 0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.coord(i, xi);
        for (std::size_t j = 0; j < low.size(); ++j) {
            std::vector<double> xj;
            low.coord(j, xj);
            if (std::abs(xj[0] - xi[0]) < 1e-12) {
                CHECK(out.values[i] == low.values[j]);
                ++matched;
            }
        }
    }
    CHECK(matched == low.size());
}

TEST_CASE("zero multiplier zero-pads the low field") {
    const auto fam = sinc2_family();
    const SigmaMultiplier m(fam, 2.0, HermitianMatrix::identity(1), 0.0, 1e30);  // floor everything
    const auto omega0 = FrequencyDomain::cube(1, 0.5);
    GridField low = fext::make_grid({64}, {1.0 / 64}, {-0.5 + 0.5 / 64});
    low = sample_sinc2(low);
    const GridField out = fext::extrapolate_field(m, low, 2.0, omega0);
    std::vector<double> xi;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.coord(i, xi);
        if (std::abs(xi[0]) > 0.5) CHECK(out.values[i] == std::complex<double>(0.0, 0.0));
    }
}

TEST_CASE("extrapolation is linear in the field") {
    // two synthetic fields on the same grid, interpolation path (no exact)
    const auto fam = sinc2_family();
    const SigmaMultiplier m(fam, 2.0, HermitianMatrix::identity(1), 0.0, 0.0);
    const auto omega0 = FrequencyDomain::cube(1, 0.5);
    GridField base = fext::make_grid({96}, {1.0 / 96}, {-0.5 + 0.5 / 96});
    GridField f1 = base, f2 = base;
    std::vector<double> xi;
    for (std::size_t i = 0; i < base.size(); ++i) {
        base.coord(i, xi);
        f1.values[i] = std::complex<double>(std::cos(xi[0]), 0.1 * xi[0]);
        f2.values[i] = std::complex<double>(xi[0] * xi[0], -0.3);
    }
    GridField combo = base;
    const std::complex<double> a(2.0, 0.5), b(-1.0, 0.25);
    for (std::size_t i = 0; i < base.size(); ++i) combo.values[i] = a * f1.values[i] + b * f2.values[i];

    const GridField e1 = fext::extrapolate_field(m, f1, 2.0, omega0);
    const GridField e2 = fext::extrapolate_field(m, f2, 2.0, omega0);
    const GridField ec = fext::extrapolate_field(m, combo, 2.0, omega0);
    for (std::size_t i = 0; i < ec.size(); ++i) {
        CHECK(std::abs(ec.values[i] - (a * e1.values[i] + b * e2.values[i])) <= 1e-12);
    }
}

TEST_CASE("reconstruct_space basics") {
    SECTION("zero field gives a zero image") {
        GridField field = fext::make_grid({32}, {0.25}, {-4.0});
        const GridField img = fext::reconstruct_space(field, {16}, {0.0}, {1.0});
        for (const auto& v : img.values) CHECK(v == std::complex<double>(0.0, 0.0));
    }
    SECTION("single DC sample gives a constant image") {
        GridField field = fext::make_grid({1}, {0.5}, {0.0});
        field.values[0] = std::complex<double>(3.0, 0.0);
        const GridField img = fext::reconstruct_space(field, {8}, {0.0}, {1.0});
        for (const auto& v : img.values) CHECK(std::abs(v - std::complex<double>(1.5, 0.0)) <= 1e-14);
    }
    SECTION("value at the origin is the field sum times the cell volume") {
        GridField field = fext::make_grid({64}, {0.125}, {-4.0 + 0.0625});
        std::vector<double> xi;
        std::complex<double> sum(0.0, 0.0);
        for (std::size_t i = 0; i < field.size(); ++i) {
            field.coord(i, xi);
            field.values[i] = std::complex<double>(std::exp(-xi[0] * xi[0]), 0.2 * xi[0]);
            sum += field.values[i];
        }
        const GridField img = fext::reconstruct_space(field, {3}, {-1.0}, {1.0});
        CHECK(std::abs(img.values[1] - sum * 0.125) <= 1e-12);
    }
    SECTION("sinc^2 sampled densely on cube(4) matches the dense-synthesis oracle") {
        GridField field = fext::make_grid({4097}, {8.0 / 4096}, {-4.0});
        field = sample_sinc2(field);
        const GridField img = fext::reconstruct_space(field, {512}, {-1.5}, {1.5});
        GridField dense = fext::make_grid({65537}, {8.0 / 65536}, {-4.0});
        dense = sample_sinc2(dense);
        const GridField oracle = fext::reconstruct_space(dense, {512}, {-1.5}, {1.5});
        double sup = 0.0;
        for (std::size_t i = 0; i < img.size(); ++i)
            sup = std::max(sup, std::abs(img.values[i] - oracle.values[i]));
        CHECK(sup <= 0.02);
    }
    SECTION("a window of 8 recovers the analytic hat to two percent") {
        GridField field = fext::make_grid({8193}, {16.0 / 8192}, {-8.0});
        field = sample_sinc2(field);
        const GridField img = fext::reconstruct_space(field, {512}, {-1.5}, {1.5});
        double sup = 0.0;
        std::vector<double> x;
        for (std::size_t i = 0; i < img.size(); ++i) {
            img.coord(i, x);
            const double hat = std::max(0.0, 1.0 - std::abs(x[0]));
            sup = std::max(sup, std::abs(img.values[i].real() - hat));
            sup = std::max(sup, std::abs(img.values[i].imag()));
        }
        CHECK(sup <= 0.02);
    }
}

TEST_CASE("extrapolation error metric") {
    GridField a = fext::make_grid({32}, {0.125}, {-2.0 + 0.0625});
    std::vector<double> xi;
    for (std::size_t i = 0; i < a.size(); ++i) {
        a.coord(i, xi);
        a.values[i] = std::complex<double>(std::cos(xi[0]), xi[0]);
    }
    const auto region = FrequencyDomain::cube(1, 2.0);
    SECTION("identical fields have zero error") {
        CHECK(fext::extrapolation_error(a, a, region) == 0.0);
    }
    SECTION("zero prediction against nonzero truth gives one") {
        GridField zero = a;
        for (auto& v : zero.values) v = {0.0, 0.0};
        CHECK(fext::extrapolation_error(zero, a, region) == Approx(1.0));
    }
    SECTION("grid mismatch throws") {
        GridField other = fext::make_grid({32}, {0.125}, {-2.0});
        CHECK_THROWS_AS(fext::extrapolation_error(a, other, region), std::invalid_argument);
    }
}

TEST_CASE("GP iteration") {
    // discrete hat supported on Q = [0, 1]; data on Omega_0 = cube(1)
    const auto omega0 = FrequencyDomain::cube(1, 1.0);
    const long n = 512;
    const double window = 1.5;
    const double h = 2.0 * window / static_cast<double>(n);
    GridField truth = fext::make_grid({n}, {h}, {-window + 0.5 * h});
    {
        // spatial samples of the hat on the DFT dual grid, transformed exactly
        const double period = 1.0 / h;
        std::vector<std::complex<double>> u(static_cast<std::size_t>(n));
        for (long l = 0; l < n; ++l) {
            double x = static_cast<double>(l) * period / static_cast<double>(n);
            if (x >= period / 2) x -= period;
            u[static_cast<std::size_t>(l)] = std::max(0.0, 1.0 - std::abs(2.0 * x - 1.0));
        }
        // analysis: value at node j of the synthesis convention in gp_iterate
        for (long j = 0; j < n; ++j) {
            std::vector<double> xi;
            truth.coord(static_cast<std::size_t>(j), xi);
            std::complex<double> acc(0.0, 0.0);
            for (long l = 0; l < n; ++l) {
                double x = static_cast<double>(l) * period / static_cast<double>(n);
                if (x >= period / 2) x -= period;
                acc += u[static_cast<std::size_t>(l)] *
                       std::exp(std::complex<double>(0, -2.0 * kPi * xi[0] * x));
            }
            truth.values[static_cast<std::size_t>(j)] = acc / static_cast<double>(n);
        }
    }

    SECTION("zero steps returns the zero-extended data") {
        const auto gp = fext::gp_iterate(truth, omega0, {0.0}, {1.0}, 0);
        CHECK(gp.residuals.empty());
        std::vector<double> xi;
        for (std::size_t i = 0; i < gp.field.size(); ++i) {
            gp.field.coord(i, xi);
            if (std::abs(xi[0]) <= 1.0) {
                CHECK(gp.field.values[i] == truth.values[i]);
            } else {
                CHECK(gp.field.values[i] == std::complex<double>(0.0, 0.0));
            }
        }
    }
    SECTION("supported target: residual nonincreasing and converging") {
        const auto gp = fext::gp_iterate(truth, omega0, {0.0}, {1.0}, 100);
        REQUIRE(gp.residuals.size() == 100);
        for (std::size_t k = 1; k < gp.residuals.size(); ++k)
            CHECK(gp.residuals[k] <= gp.residuals[k - 1] + 1e-14);
        CHECK(gp.residuals.back() < gp.residuals.front());
    }
    SECTION("support-violating target: residual plateaus above zero") {
        GridField bad = truth;
        // target supported on [0, 1.4] breaks the Q = [0,1] constraint
        const double period = 1.0 / h;
        for (long j = 0; j < n; ++j) {
            std::vector<double> xi;
            bad.coord(static_cast<std::size_t>(j), xi);
            std::complex<double> acc(0.0, 0.0);
            for (long l = 0; l < n; ++l) {
                double x = static_cast<double>(l) * period / static_cast<double>(n);
                if (x >= period / 2) x -= period;
                const double v = std::max(0.0, 1.0 - std::abs(2.0 * (x / 1.4) - 1.0));
                acc += v * std::exp(std::complex<double>(0, -2.0 * kPi * xi[0] * x));
            }
            bad.values[static_cast<std::size_t>(j)] = acc / static_cast<double>(n);
        }
        const auto gp = fext::gp_iterate(bad, omega0, {0.0}, {1.0}, 150);
        for (std::size_t k = 1; k < gp.residuals.size(); ++k)
            CHECK(gp.residuals[k] <= gp.residuals[k - 1] + 1e-14);
        CHECK(gp.residuals.back() > 1e-3);  // cannot reach the intersection
    }
    SECTION("wide-window geometry converges slowly (the classic ill-conditioning)") {
        // same data on a grid extending to |xi| <= 8: residual decays but
        // plateaus well above rounding after 50 steps
        const long n2 = 1024;
        const double w2 = 8.0;
        const double h2 = 2.0 * w2 / static_cast<double>(n2);
        GridField wide = fext::make_grid({n2}, {h2}, {-w2 + 0.5 * h2});
        const double period = 1.0 / h2;
        for (long j = 0; j < n2; ++j) {
            std::vector<double> xi;
            wide.coord(static_cast<std::size_t>(j), xi);
            std::complex<double> acc(0.0, 0.0);
            for (long l = 0; l < n2; ++l) {
                double x = static_cast<double>(l) * period / static_cast<double>(n2);
                if (x >= period / 2) x -= period;
                const double v = std::max(0.0, 1.0 - std::abs(2.0 * x - 1.0));
                acc += v * std::exp(std::complex<double>(0, -2.0 * kPi * xi[0] * x));
            }
            wide.values[static_cast<std::size_t>(j)] = acc / static_cast<double>(n2);
        }
        const auto gp = fext::gp_iterate(wide, omega0, {0.0}, {1.0}, 50);
        CHECK(gp.residuals.back() > 1e-6);
        CHECK(gp.residuals.back() < gp.residuals.front());
    }
}

TEST_CASE("spatial filter of the exact sinc^2 multiplier") {
    const auto fam = sinc2_family();
    const SigmaMultiplier m(fam, 2.0, HermitianMatrix::identity(1), 0.0, 0.0);
    const auto omega0 = FrequencyDomain::cube(1, 0.5);
    const GridField eta = fext::spatial_filter(m, omega0, 2.0, 512, {257}, {-2.0}, {2.0});
    // band chi_{[1/4,1/2]} symmetric: eta should be real up to rounding
    double max_imag = 0.0, max_real = 0.0;
    for (const auto& v : eta.values) {
        max_imag = std::max(max_imag, std::abs(v.imag()));
        max_real = std::max(max_real, std::abs(v.real()));
    }
    CHECK(max_real > 0.0);
    CHECK(max_imag <= 1e-10 * std::max(1.0, max_real));
}
