#pragma once

#include <atomic>
#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "fext/grid.hpp"
#include "fext/multiplier.hpp"

namespace fext {

/// Pointwise frequency map used by the mask pipeline.
using FreqMap = std::function<std::complex<double>(std::span<const double>)>;

inline FreqMap freq_map_1d(std::function<std::complex<double>(double)> f) {
    return [of = std::move(f)](std::span<const double> xi) { return of(xi[0]); };
}

inline FreqMap freq_map_from_multiplier(const SigmaMultiplier& m) {
    return [m](std::span<const double> xi) { return m.eval(xi); };
}

/// w_N(xi) m(xi) with the boundary weight
/// w_N(xi) = prod_k ((1 + e^{2 pi i xi_k}) / 2)^N, forcing mask zeros at the
/// half-integer frequencies so the cascade limit decays.
inline FreqMap apply_boundary_window(FreqMap m, int N) {
    if (N < 0) throw std::invalid_argument("apply_boundary_window: N must be >= 0");
    if (N == 0) return m;
    return [m = std::move(m), N](std::span<const double> xi) {
        std::complex<double> w(1.0, 0.0);
        for (double x : xi) {
            const std::complex<double> factor =
                0.5 * (1.0 + std::complex<double>(std::cos(2.0 * std::numbers::pi * x),
                                                  std::sin(2.0 * std::numbers::pi * x)));
            std::complex<double> p(1.0, 0.0);
            for (int k = 0; k < N; ++k) p *= factor;
            w *= p;
        }
        return w * m(xi);
    };
}

/// 2^p m(xi); the rescaling a semidefinite Sigma calls for when the multiplier
/// has an origin zero of order p.
inline FreqMap rescale_mask(FreqMap m, int p) {
    if (p == 0) return m;
    const double scale = std::ldexp(1.0, p);
    return [m = std::move(m), scale](std::span<const double> xi) { return scale * m(xi); };
}

namespace detail {

inline double wrap_half(double x) {
    // map to [-1/2, 1/2)
    return (x + 0.5) - std::floor(x + 0.5) - 0.5;
}

}  // namespace detail

/// 1-periodic mask: samples on a uniform grid over [-1/2, 1/2)^d, evaluated by
/// periodic wrap plus multilinear interpolation, or through the exact callable
/// it was built from.
class PeriodicMask {
public:
    PeriodicMask(int dimension, long resolution, std::vector<std::complex<double>> samples,
                 FreqMap exact = nullptr)
        : d_(dimension), resolution_(resolution), samples_(std::move(samples)), exact_(std::move(exact)) {
        if (d_ < 1) throw std::invalid_argument("PeriodicMask: dimension must be positive");
        if (resolution_ < 2) throw std::invalid_argument("PeriodicMask: resolution must be >= 2");
        std::size_t want = 1;
        for (int a = 0; a < d_; ++a) want *= static_cast<std::size_t>(resolution_);
        if (samples_.size() != want) throw std::invalid_argument("PeriodicMask: sample count mismatch");
    }

    int dimension() const { return d_; }
    long resolution() const { return resolution_; }
    const std::vector<std::complex<double>>& samples() const { return samples_; }
    bool has_exact() const { return static_cast<bool>(exact_); }
    const FreqMap& exact() const { return exact_; }

    std::complex<double> eval(std::span<const double> xi) const {
        if (static_cast<int>(xi.size()) != d_) throw std::invalid_argument("PeriodicMask: dimension mismatch");
        if (d_ > kMaxDim) throw std::invalid_argument("PeriodicMask: dimension too large");
        double wrapped[kMaxDim];
        if (exact_) {
            for (int a = 0; a < d_; ++a) wrapped[a] = detail::wrap_half(xi[static_cast<std::size_t>(a)]);
            return exact_(std::span<const double>(wrapped, static_cast<std::size_t>(d_)));
        }
        // periodic multilinear interpolation
        long base[kMaxDim];
        double frac[kMaxDim];
        for (int a = 0; a < d_; ++a) {
            const double w = detail::wrap_half(xi[static_cast<std::size_t>(a)]);
            const double t = (w + 0.5) * static_cast<double>(resolution_);
            long b = static_cast<long>(std::floor(t));
            if (b >= resolution_) b -= resolution_;
            base[a] = b;
            frac[a] = t - std::floor(t);
        }
        std::complex<double> acc(0.0, 0.0);
        const int corners = 1 << d_;
        for (int c = 0; c < corners; ++c) {
            double weight = 1.0;
            std::size_t flat = 0;
            for (int a = 0; a < d_; ++a) {
                const bool hi = (c >> a) & 1;
                long j = base[a] + (hi ? 1 : 0);
                if (j >= resolution_) j -= resolution_;
                flat = flat * static_cast<std::size_t>(resolution_) + static_cast<std::size_t>(j);
                weight *= hi ? frac[a] : 1.0 - frac[a];
            }
            if (weight != 0.0) acc += weight * samples_[flat];
        }
        return acc;
    }

    std::complex<double> operator()(std::span<const double> xi) const { return eval(xi); }
    std::complex<double> operator()(double xi) const {
        const double x[1] = {xi};
        return eval(std::span<const double>(x, 1));
    }

private:
    static constexpr int kMaxDim = 4;
    int d_;
    long resolution_;
    std::vector<std::complex<double>> samples_;
    FreqMap exact_;
};

/// 1-periodic wrap of a map given on [-1/2, 1/2)^d. With keep_exact the mask
/// evaluates through the callable (no interpolation error); without it the
/// mask interpolates its samples, which is much cheaper per evaluation when
/// the callable is expensive (error O(resolution^-2) for smooth maps).
inline PeriodicMask periodize_mask(const FreqMap& m, int dimension, long resolution,
                                   bool keep_exact = true) {
    if (resolution < 2) throw std::invalid_argument("periodize_mask: resolution must be >= 2");
    std::size_t total = 1;
    for (int a = 0; a < dimension; ++a) total *= static_cast<std::size_t>(resolution);
    std::vector<std::complex<double>> samples(total);
    std::vector<double> xi(static_cast<std::size_t>(dimension));
    std::vector<long> idx(static_cast<std::size_t>(dimension), 0);
    for (std::size_t i = 0; i < total; ++i) {
        for (int a = 0; a < dimension; ++a)
            xi[static_cast<std::size_t>(a)] = -0.5 + static_cast<double>(idx[static_cast<std::size_t>(a)]) / static_cast<double>(resolution);
        samples[i] = m(xi);
        int a = dimension - 1;
        while (a >= 0 && ++idx[static_cast<std::size_t>(a)] == resolution) idx[static_cast<std::size_t>(a--)] = 0;
    }
    FreqMap exact = nullptr;
    if (keep_exact) exact = [m](std::span<const double> w) { return m(w); };  // w pre-wrapped by eval
    return PeriodicMask(dimension, resolution, std::move(samples), std::move(exact));
}

struct CascadeResult {
    GridField grid;              // phi_hat_J on the output grid
    int products = 0;            // J
    long long zero_set_hits = 0; // factors that evaluated exactly to zero
    double cauchy_increment = 0; // sup_{|xi|<=2} |phi_J - phi_{J-1}|
    std::complex<double> mask_at_origin{1.0, 0.0};
    bool mask_origin_ok = true;  // |mask(0) - 1| <= 1e-8
    std::function<std::complex<double>(std::span<const double>)> exact;
};

/// Partial cascade product phi_hat_J(xi) = prod_{j=1..J} mask(2^{-j} xi) on the
/// given grid. The limit solves D_2 phi_hat = mask phi_hat.
inline CascadeResult cascade(const PeriodicMask& mask, int J, GridField out_grid) {
    if (J < 1) throw std::invalid_argument("cascade: J must be >= 1");
    if (out_grid.d != mask.dimension()) throw std::invalid_argument("cascade: grid/mask dimension mismatch");

    CascadeResult result;
    result.products = J;
    {
        std::vector<double> zero(static_cast<std::size_t>(mask.dimension()), 0.0);
        result.mask_at_origin = mask.eval(zero);
        result.mask_origin_ok = std::abs(result.mask_at_origin - std::complex<double>(1.0, 0.0)) <= 1e-8;
    }

    std::vector<double> xi;
    std::vector<double> scaled(static_cast<std::size_t>(out_grid.d));
    for (std::size_t i = 0; i < out_grid.size(); ++i) {
        out_grid.coord(i, xi);
        bool window = true;
        for (double x : xi) window = window && std::abs(x) <= 2.0;
        std::complex<double> p(1.0, 0.0);
        std::complex<double> prev(1.0, 0.0);
        for (int j = 1; j <= J; ++j) {
            const double s = std::ldexp(1.0, -j);
            for (int a = 0; a < out_grid.d; ++a) scaled[static_cast<std::size_t>(a)] = s * xi[static_cast<std::size_t>(a)];
            const std::complex<double> factor = mask.eval(scaled);
            if (!std::isfinite(factor.real()) || !std::isfinite(factor.imag()))
                throw std::runtime_error("cascade: non-finite mask factor");
            if (factor == std::complex<double>(0.0, 0.0)) ++result.zero_set_hits;
            if (j == J) prev = p;
            p *= factor;
        }
        if (window) result.cauchy_increment = std::max(result.cauchy_increment, std::abs(p - prev));
        out_grid.values[i] = p;
    }
    result.grid = std::move(out_grid);
    result.exact = [mask, J](std::span<const double> xi_in) {
        double s[4];
        const std::size_t d = std::min<std::size_t>(xi_in.size(), 4);
        std::complex<double> p(1.0, 0.0);
        for (int j = 1; j <= J; ++j) {
            const double f = std::ldexp(1.0, -j);
            for (std::size_t a = 0; a < d; ++a) s[a] = f * xi_in[a];
            p *= mask.eval(std::span<const double>(s, d));
        }
        return p;
    };
    return result;
}

/// Phi(xi) = sum_{|k| <= (K-1)/2} |phi_hat(xi + k)|^2 on [-1/2, 1/2), the
/// 1-periodization of |phi_hat|^2 truncated to K terms (d = 1).
inline PeriodicMask periodization_Phi(const CascadeResult& phi_hat, int terms, long resolution = 1024) {
    if (phi_hat.grid.d != 1) throw std::invalid_argument("periodization_Phi: d = 1 only");
    if (terms < 1 || terms % 2 == 0) throw std::invalid_argument("periodization_Phi: terms must be odd and >= 1");
    const int half = (terms - 1) / 2;

    if (!phi_hat.exact) {
        const double left = phi_hat.grid.origin[0];
        const double right = left + (phi_hat.grid.shape[0] - 1) * phi_hat.grid.spacing[0];
        if (left > -0.5 - half || right < 0.5 + half - 1e-12)
            throw std::invalid_argument("periodization_Phi: grid does not cover the requested shifts");
    }

    std::vector<std::complex<double>> samples(static_cast<std::size_t>(resolution));
    double point[1];
    for (long j = 0; j < resolution; ++j) {
        const double xi = -0.5 + static_cast<double>(j) / static_cast<double>(resolution);
        double acc = 0.0;
        for (int k = -half; k <= half; ++k) {
            point[0] = xi + k;
            const std::complex<double> v = phi_hat.exact
                                               ? phi_hat.exact(std::span<const double>(point, 1))
                                               : interpolate(phi_hat.grid, std::span<const double>(point, 1));
            acc += std::norm(v);
        }
        samples[static_cast<std::size_t>(j)] = acc;
    }

    FreqMap exact = nullptr;
    if (phi_hat.exact) {
        exact = [phi = phi_hat.exact, half](std::span<const double> xi_in) {
            double acc = 0.0;
            double p[1];
            for (int k = -half; k <= half; ++k) {
                p[0] = xi_in[0] + k;
                acc += std::norm(phi(std::span<const double>(p, 1)));
            }
            return std::complex<double>(acc, 0.0);
        };
    }
    return PeriodicMask(1, resolution, std::move(samples), std::move(exact));
}

/// Wavelet mask g(xi) = m(xi + 1/2)^* Phi(xi + 1/2) e^{-2 pi i xi} (d = 1).
inline PeriodicMask wavelet_mask(const PeriodicMask& m, const PeriodicMask& phi) {
    if (m.dimension() != 1 || phi.dimension() != 1)
        throw std::invalid_argument("wavelet_mask: d = 1 only");
    const long resolution = std::max(m.resolution(), phi.resolution());
    std::vector<std::complex<double>> samples(static_cast<std::size_t>(resolution));
    for (long j = 0; j < resolution; ++j) {
        const double xi = -0.5 + static_cast<double>(j) / static_cast<double>(resolution);
        const std::complex<double> phase(std::cos(-2.0 * std::numbers::pi * xi),
                                         std::sin(-2.0 * std::numbers::pi * xi));
        samples[static_cast<std::size_t>(j)] = std::conj(m(xi + 0.5)) * phi(xi + 0.5) * phase;
    }
    FreqMap exact = nullptr;
    if (m.has_exact() && phi.has_exact()) {
        exact = [m, phi](std::span<const double> xi_in) {
            const double xi = xi_in[0];
            const std::complex<double> phase(std::cos(-2.0 * std::numbers::pi * xi),
                                             std::sin(-2.0 * std::numbers::pi * xi));
            return std::conj(m(xi + 0.5)) * phi(xi + 0.5) * phase;
        };
    }
    return PeriodicMask(1, resolution, std::move(samples), std::move(exact));
}

/// psi_hat(xi) = g(xi/2) phi_hat(xi/2) on the cascade grid.
inline GridField wavelet_hat(const PeriodicMask& g, const CascadeResult& phi_hat) {
    if (g.dimension() != 1 || phi_hat.grid.d != 1)
        throw std::invalid_argument("wavelet_hat: d = 1 only");
    GridField out = phi_hat.grid;
    out.exact = nullptr;
    std::vector<double> xi;
    double halfpoint[1];
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.coord(i, xi);
        halfpoint[0] = 0.5 * xi[0];
        const std::complex<double> phi_half =
            phi_hat.exact ? phi_hat.exact(std::span<const double>(halfpoint, 1))
                          : interpolate(phi_hat.grid, std::span<const double>(halfpoint, 1));
        out.values[i] = g(halfpoint[0]) * phi_half;
    }
    return out;
}

}  // namespace fext
