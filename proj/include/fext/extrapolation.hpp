#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "fext/domain.hpp"
#include "fext/grid.hpp"
#include "fext/multiplier.hpp"

namespace fext {

/// Fill the decomposition
///
///   out(xi) = low(xi)                       on Omega_0 (and `keep`, if given)
///           = m(xi/alpha) low(xi/alpha)     on alpha Omega_0 minus the above
///           = 0                             outside Omega_1
///
/// on a grid with the same spacing as `low`, extended to cover
/// Omega_1 = Omega_0 union alpha Omega_0. Low-frequency samples are copied
/// node-for-node; the dilated term uses the field's exact evaluator when
/// present (no interpolation error) and multilinear interpolation otherwise.
/// `keep` widens the verbatim-copy region, e.g. an inner disk whose data is
/// available but sits outside the multiplier's fitting domain.
inline GridField extrapolate_field(const SigmaMultiplier& m, const GridField& low, double alpha,
                                   const FrequencyDomain& omega0,
                                   const std::optional<FrequencyDomain>& keep = std::nullopt) {
    if (!(alpha > 1.0)) throw std::invalid_argument("extrapolate_field: alpha must be > 1");
    if (low.d != omega0.dimension()) throw std::invalid_argument("extrapolate_field: dimension mismatch");
    const int d = low.d;
    const FrequencyDomain omega_alpha = dilate(omega0, alpha);

    // bbox of Omega_1, merged with the keep region
    auto [lo1, hi1] = bounding_box(omega_alpha);
    {
        const auto [lo0, hi0] = bounding_box(omega0);
        for (int a = 0; a < d; ++a) {
            lo1[static_cast<std::size_t>(a)] = std::min(lo1[static_cast<std::size_t>(a)], lo0[static_cast<std::size_t>(a)]);
            hi1[static_cast<std::size_t>(a)] = std::max(hi1[static_cast<std::size_t>(a)], hi0[static_cast<std::size_t>(a)]);
        }
        if (keep) {
            const auto [lok, hik] = bounding_box(*keep);
            for (int a = 0; a < d; ++a) {
                lo1[static_cast<std::size_t>(a)] = std::min(lo1[static_cast<std::size_t>(a)], lok[static_cast<std::size_t>(a)]);
                hi1[static_cast<std::size_t>(a)] = std::max(hi1[static_cast<std::size_t>(a)], hik[static_cast<std::size_t>(a)]);
            }
        }
    }

    // extend low's lattice (same spacing, low nodes exactly preserved)
    std::vector<long> offset(static_cast<std::size_t>(d));
    std::vector<long> shape(static_cast<std::size_t>(d));
    std::vector<double> origin(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) {
        const double h = low.spacing[static_cast<std::size_t>(a)];
        const double o = low.origin[static_cast<std::size_t>(a)];
        const long k_lo = std::max(0L, static_cast<long>(std::ceil((o - lo1[static_cast<std::size_t>(a)]) / h - 1e-12)));
        const long last = std::max(
            low.shape[static_cast<std::size_t>(a)] - 1,
            static_cast<long>(std::ceil((hi1[static_cast<std::size_t>(a)] - o) / h - 1e-12)));
        offset[static_cast<std::size_t>(a)] = k_lo;
        origin[static_cast<std::size_t>(a)] = o - static_cast<double>(k_lo) * h;
        shape[static_cast<std::size_t>(a)] = k_lo + last + 1;
    }

    GridField out = make_grid(shape, low.spacing, origin);
    std::vector<double> xi;
    std::vector<double> xi_low(static_cast<std::size_t>(d));
    std::vector<long> idx(static_cast<std::size_t>(d));
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.coord(i, xi);
        const bool in0 = contains(omega0, xi) || (keep && contains(*keep, xi));
        if (in0) {
            // node-for-node copy from the low field
            std::size_t rem = i;
            bool inside = true;
            for (int a = d - 1; a >= 0; --a) {
                const long n = out.shape[static_cast<std::size_t>(a)];
                const long j = static_cast<long>(rem % static_cast<std::size_t>(n)) - offset[static_cast<std::size_t>(a)];
                rem /= static_cast<std::size_t>(n);
                if (j < 0 || j >= low.shape[static_cast<std::size_t>(a)]) { inside = false; break; }
                idx[static_cast<std::size_t>(a)] = j;
            }
            if (inside) {
                out.values[i] = low.values[low.flat_index(idx)];
            } else if (low.exact) {
                out.values[i] = low.exact(xi);
            }
            continue;
        }
        if (contains(omega_alpha, xi)) {
            for (int a = 0; a < d; ++a) xi_low[static_cast<std::size_t>(a)] = xi[static_cast<std::size_t>(a)] / alpha;
            const std::complex<double> low_val = low.exact ? low.exact(xi_low) : interpolate(low, xi_low);
            out.values[i] = m(xi_low) * low_val;
        }
    }
    return out;
}

/// Discrete inverse Fourier synthesis u(x_j) = sum_xi field(xi) e^{+2 pi i xi.x_j} cellvol
/// on a regular spatial grid over [lo, hi] (defaults to the unit cube),
/// endpoints included. Linear in the field.
inline GridField reconstruct_space(const GridField& field, const std::vector<long>& out_shape,
                                   std::vector<double> lo = {}, std::vector<double> hi = {}) {
    const int d = field.d;
    if (static_cast<int>(out_shape.size()) != d) throw std::invalid_argument("reconstruct_space: shape dimension mismatch");
    if (lo.empty()) lo.assign(static_cast<std::size_t>(d), 0.0);
    if (hi.empty()) hi.assign(static_cast<std::size_t>(d), 1.0);
    if (static_cast<int>(lo.size()) != d || static_cast<int>(hi.size()) != d)
        throw std::invalid_argument("reconstruct_space: window dimension mismatch");

    std::vector<double> spacing(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) {
        const long n = out_shape[static_cast<std::size_t>(a)];
        spacing[static_cast<std::size_t>(a)] = n > 1 ? (hi[static_cast<std::size_t>(a)] - lo[static_cast<std::size_t>(a)]) / static_cast<double>(n - 1) : 1.0;
    }
    GridField image = make_grid(out_shape, spacing, lo);
    const double cell = field.cell_volume();

    std::vector<double> x;
    std::vector<double> xi;
    for (std::size_t p = 0; p < image.size(); ++p) {
        image.coord(p, x);
        std::complex<double> acc(0.0, 0.0);
        for (std::size_t i = 0; i < field.size(); ++i) {
            field.coord(i, xi);
            double phase = 0.0;
            for (int a = 0; a < d; ++a) phase += xi[static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(a)];
            acc += field.values[i] * std::complex<double>(std::cos(2.0 * std::numbers::pi * phase),
                                                          std::sin(2.0 * std::numbers::pi * phase));
        }
        image.values[p] = acc * cell;
    }
    return image;
}

struct GpResult {
    GridField field;
    std::vector<double> residuals;  // Omega_0 data residual after each step
};

/// Gerchberg-Papoulis baseline: alternate (i) overwriting the Omega_0 grid
/// values with the data and (ii) the spatial support projection (synthesize,
/// zero outside Q, analyze back), realized exactly through the grid's DFT
/// dual. `data` lives on the full frequency grid; values outside Omega_0 are
/// ignored and v^(0) is the data zero-extended. The recorded residual is
/// ||(v - data) chi_Omega0|| / ||data chi_Omega0|| (absolute when the data
/// norm vanishes).
inline GpResult gp_iterate(const GridField& data, const FrequencyDomain& omega0,
                           const std::vector<double>& q_lo, const std::vector<double>& q_hi,
                           int steps) {
    if (steps < 0) throw std::invalid_argument("gp_iterate: steps must be >= 0");
    const int d = data.d;
    if (omega0.dimension() != d) throw std::invalid_argument("gp_iterate: dimension mismatch");
    if (static_cast<int>(q_lo.size()) != d || static_cast<int>(q_hi.size()) != d)
        throw std::invalid_argument("gp_iterate: support cube dimension mismatch");

    const std::size_t total = data.size();
    std::vector<bool> in_omega(total);
    std::vector<double> xi;
    double data_norm2 = 0.0;
    for (std::size_t i = 0; i < total; ++i) {
        data.coord(i, xi);
        in_omega[i] = contains(omega0, xi);
        if (in_omega[i]) data_norm2 += std::norm(data.values[i]);
    }
    const double data_norm = std::sqrt(data_norm2);

    // spatial mask over the DFT dual grid: x_a = l_a / (N_a h_a), wrapped to
    // the principal period
    std::vector<bool> in_q(total);
    for (std::size_t i = 0; i < total; ++i) {
        std::size_t rem = i;
        bool inside = true;
        for (int a = d - 1; a >= 0; --a) {
            const long n = data.shape[static_cast<std::size_t>(a)];
            const long l = static_cast<long>(rem % static_cast<std::size_t>(n));
            rem /= static_cast<std::size_t>(n);
            const double period = 1.0 / data.spacing[static_cast<std::size_t>(a)];
            double x = static_cast<double>(l) * period / static_cast<double>(n);
            if (x >= period / 2.0) x -= period;
            if (x < q_lo[static_cast<std::size_t>(a)] - 1e-12 || x > q_hi[static_cast<std::size_t>(a)] + 1e-12) {
                inside = false;
                break;
            }
        }
        in_q[i] = inside;
    }

    GridField v = data;
    v.exact = nullptr;
    for (std::size_t i = 0; i < total; ++i)
        if (!in_omega[i]) v.values[i] = {0.0, 0.0};

    GpResult result;
    result.residuals.reserve(static_cast<std::size_t>(steps));
    const double inv_total = 1.0 / static_cast<double>(total);
    for (int k = 0; k < steps; ++k) {
        for (std::size_t i = 0; i < total; ++i)
            if (in_omega[i]) v.values[i] = data.values[i];
        detail::fft_nd(v.values, v.shape, /*inverse=*/true);
        for (std::size_t i = 0; i < total; ++i)
            if (!in_q[i]) v.values[i] = {0.0, 0.0};
        detail::fft_nd(v.values, v.shape, /*inverse=*/false);
        for (std::size_t i = 0; i < total; ++i) v.values[i] *= inv_total;

        double r2 = 0.0;
        for (std::size_t i = 0; i < total; ++i)
            if (in_omega[i]) r2 += std::norm(v.values[i] - data.values[i]);
        double r = std::sqrt(r2);
        if (data_norm > 0.0) r /= data_norm;
        result.residuals.push_back(r);
    }
    result.field = std::move(v);
    return result;
}

/// Relative L2 error over grid nodes inside `region`; absolute when the truth
/// vanishes there.
inline double extrapolation_error(const GridField& pred, const GridField& truth,
                                  const FrequencyDomain& region) {
    if (pred.d != truth.d || pred.shape != truth.shape)
        throw std::invalid_argument("extrapolation_error: grid shape mismatch");
    for (int a = 0; a < pred.d; ++a) {
        if (std::abs(pred.spacing[static_cast<std::size_t>(a)] - truth.spacing[static_cast<std::size_t>(a)]) > 1e-12 ||
            std::abs(pred.origin[static_cast<std::size_t>(a)] - truth.origin[static_cast<std::size_t>(a)]) > 1e-12)
            throw std::invalid_argument("extrapolation_error: grid geometry mismatch");
    }
    double num = 0.0, den = 0.0;
    std::vector<double> xi;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        pred.coord(i, xi);
        if (!contains(region, xi)) continue;
        num += std::norm(pred.values[i] - truth.values[i]);
        den += std::norm(truth.values[i]);
    }
    if (den == 0.0) return std::sqrt(num);
    return std::sqrt(num / den);
}

/// Spatial filter eta = inverse transform of chi_{Omega_0 \ alpha^{-1} Omega_0} m,
/// the convolution kernel that synthesizes the extrapolated detail band.
inline GridField spatial_filter(const SigmaMultiplier& m, const FrequencyDomain& omega0, double alpha,
                                int freq_resolution, const std::vector<long>& out_shape,
                                const std::vector<double>& lo, const std::vector<double>& hi) {
    if (freq_resolution < 2) throw std::invalid_argument("spatial_filter: resolution must be >= 2");
    const int d = omega0.dimension();
    const auto [blo, bhi] = bounding_box(omega0);
    std::vector<long> shape(static_cast<std::size_t>(d), freq_resolution);
    std::vector<double> spacing(static_cast<std::size_t>(d));
    std::vector<double> origin(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) {
        spacing[static_cast<std::size_t>(a)] = (bhi[static_cast<std::size_t>(a)] - blo[static_cast<std::size_t>(a)]) / freq_resolution;
        origin[static_cast<std::size_t>(a)] = blo[static_cast<std::size_t>(a)] + 0.5 * spacing[static_cast<std::size_t>(a)];
    }
    GridField band = make_grid(shape, spacing, origin);
    std::vector<double> xi;
    std::vector<double> scaled(static_cast<std::size_t>(d));
    for (std::size_t i = 0; i < band.size(); ++i) {
        band.coord(i, xi);
        if (!contains(omega0, xi)) continue;
        for (int a = 0; a < d; ++a) scaled[static_cast<std::size_t>(a)] = alpha * xi[static_cast<std::size_t>(a)];
        if (contains(omega0, scaled)) continue;  // xi in alpha^{-1} Omega_0
        band.values[i] = m(xi);
    }
    return reconstruct_space(band, out_shape, lo, hi);
}

}  // namespace fext
