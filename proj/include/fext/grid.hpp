#pragma once

#include <complex>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace fext {

/// Regular complex-valued grid in frequency (or space). Node j has coordinate
/// origin + j * spacing per axis; values are row-major with the last axis
/// fastest. `exact` optionally records the pointwise map the field was
/// sampled from, so later stages can re-evaluate off-grid without
/// interpolation error.
struct GridField {
    int d = 1;
    std::vector<long> shape;
    std::vector<double> spacing;
    std::vector<double> origin;
    std::vector<std::complex<double>> values;
    std::function<std::complex<double>(std::span<const double>)> exact;

    std::size_t size() const {
        std::size_t n = 1;
        for (long s : shape) n *= static_cast<std::size_t>(s);
        return n;
    }

    double cell_volume() const {
        double v = 1.0;
        for (double h : spacing) v *= h;
        return v;
    }

    void coord(std::size_t flat, std::vector<double>& out) const {
        out.resize(static_cast<std::size_t>(d));
        for (int a = d - 1; a >= 0; --a) {
            const long n = shape[static_cast<std::size_t>(a)];
            const long j = static_cast<long>(flat % static_cast<std::size_t>(n));
            flat /= static_cast<std::size_t>(n);
            out[static_cast<std::size_t>(a)] = origin[static_cast<std::size_t>(a)] + j * spacing[static_cast<std::size_t>(a)];
        }
    }

    std::size_t flat_index(std::span<const long> idx) const {
        std::size_t f = 0;
        for (int a = 0; a < d; ++a) f = f * static_cast<std::size_t>(shape[static_cast<std::size_t>(a)]) + static_cast<std::size_t>(idx[static_cast<std::size_t>(a)]);
        return f;
    }
};

inline GridField make_grid(std::vector<long> shape, std::vector<double> spacing, std::vector<double> origin) {
    GridField g;
    g.d = static_cast<int>(shape.size());
    if (spacing.size() != shape.size() || origin.size() != shape.size())
        throw std::invalid_argument("make_grid: shape/spacing/origin sizes must agree");
    for (long s : shape)
        if (s < 1) throw std::invalid_argument("make_grid: shape entries must be >= 1");
    for (double h : spacing)
        if (!(h > 0)) throw std::invalid_argument("make_grid: spacing must be > 0");
    g.shape = std::move(shape);
    g.spacing = std::move(spacing);
    g.origin = std::move(origin);
    g.values.assign(g.size(), {0.0, 0.0});
    return g;
}

/// Symmetric 1-d grid over [-window, window] with 0 an exact node (count odd
/// forces it; even counts place 0 halfway). Used for mask and cascade panels.
inline GridField make_grid_1d(double window, long count) {
    if (count < 2) throw std::invalid_argument("make_grid_1d: count must be >= 2");
    const double h = 2.0 * window / static_cast<double>(count - 1);
    return make_grid({count}, {h}, {-window});
}

template <class Fn>
GridField sample_on_grid(GridField grid, const Fn& fn) {
    std::vector<double> xi;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        grid.coord(i, xi);
        grid.values[i] = fn(std::span<const double>(xi));
    }
    grid.exact = [fn](std::span<const double> x) { return std::complex<double>(fn(x)); };
    return grid;
}

/// Multilinear interpolation. Points up to half a cell beyond the boundary
/// nodes are allowed (the natural margin of node-centered sampling) and use
/// the nearest cell's linear extension; anything farther out throws.
inline std::complex<double> interpolate(const GridField& field, std::span<const double> x) {
    const int d = field.d;
    std::vector<long> base(static_cast<std::size_t>(d));
    std::vector<double> frac(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) {
        const double t = (x[static_cast<std::size_t>(a)] - field.origin[static_cast<std::size_t>(a)]) / field.spacing[static_cast<std::size_t>(a)];
        const long n = field.shape[static_cast<std::size_t>(a)];
        if (t < -0.5 - 1e-9 || t > static_cast<double>(n - 1) + 0.5 + 1e-9)
            throw std::out_of_range("interpolate: point outside the grid");
        long b = static_cast<long>(std::floor(t));
        if (b < 0) b = 0;
        if (b > n - 2) b = n - 2;
        if (n == 1) b = 0;
        base[static_cast<std::size_t>(a)] = b;
        frac[static_cast<std::size_t>(a)] = n == 1 ? 0.0 : t - static_cast<double>(b);
    }
    std::complex<double> acc(0.0, 0.0);
    const int corners = 1 << d;
    std::vector<long> idx(static_cast<std::size_t>(d));
    for (int c = 0; c < corners; ++c) {
        double weight = 1.0;
        for (int a = 0; a < d; ++a) {
            const bool hi = (c >> a) & 1;
            const long n = field.shape[static_cast<std::size_t>(a)];
            long j = base[static_cast<std::size_t>(a)] + (hi ? 1 : 0);
            if (j > n - 1) j = n - 1;
            idx[static_cast<std::size_t>(a)] = j;
            weight *= hi ? frac[static_cast<std::size_t>(a)] : 1.0 - frac[static_cast<std::size_t>(a)];
        }
        if (weight != 0.0) acc += weight * field.values[field.flat_index(idx)];
    }
    return acc;
}

namespace detail {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// In-place complex FFT (inverse = unnormalized conjugate transform).
/// Radix-2 for power-of-two lengths, direct DFT otherwise.
inline void fft_1d(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n <= 1) return;
    if (!is_power_of_two(n)) {
        std::vector<std::complex<double>> out(n, {0.0, 0.0});
        const double sign = inverse ? 1.0 : -1.0;
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t j = 0; j < n; ++j) {
                const double ang = sign * 2.0 * std::numbers::pi * static_cast<double>(k * j % n) / static_cast<double>(n);
                out[k] += a[j] * std::complex<double>(std::cos(ang), std::sin(ang));
            }
        }
        a = std::move(out);
        return;
    }
    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const std::complex<double> u = a[i + j];
                const std::complex<double> t = w * a[i + j + len / 2];
                a[i + j] = u + t;
                a[i + j + len / 2] = u - t;
                w *= wlen;
            }
        }
    }
}

/// Axis-wise unnormalized FFT of a row-major d-dimensional array.
inline void fft_nd(std::vector<std::complex<double>>& values, const std::vector<long>& shape, bool inverse) {
    const int d = static_cast<int>(shape.size());
    std::size_t total = values.size();
    for (int axis = 0; axis < d; ++axis) {
        const std::size_t n = static_cast<std::size_t>(shape[static_cast<std::size_t>(axis)]);
        std::size_t stride = 1;
        for (int a = axis + 1; a < d; ++a) stride *= static_cast<std::size_t>(shape[static_cast<std::size_t>(a)]);
        const std::size_t block = stride * n;
        std::vector<std::complex<double>> line(n);
        for (std::size_t start = 0; start < total; start += block) {
            for (std::size_t off = 0; off < stride; ++off) {
                for (std::size_t k = 0; k < n; ++k) line[k] = values[start + off + k * stride];
                fft_1d(line, inverse);
                for (std::size_t k = 0; k < n; ++k) values[start + off + k * stride] = line[k];
            }
        }
    }
}

}  // namespace detail

}  // namespace fext
