#pragma once

#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace fext {

// Shapes for the low-frequency set. All lengths are in frequency units
// (cycles per spatial unit). Membership is closed-set (boundary included).

struct Cube {
    double half_width;
};

struct Ball {
    double radius;
};

struct Annulus {
    double r_min;
    double r_max;
};

// Pair of angular sectors, symmetric under xi -> -xi so that families built
// from real-valued data keep conjugate symmetry. `axis` is a unit vector and
// membership requires |<axis, xi>| >= cos_half_angle * |xi|.
struct SectorPair {
    std::vector<double> axis;
    double cos_half_angle;
    double r_min;
    double r_max;
};

/// Geometric description of a compact frequency set (Omega_0 or a dilate of it).
class FrequencyDomain {
public:
    using Shape = std::variant<Cube, Ball, Annulus, SectorPair>;

    FrequencyDomain(int dimension, Shape shape)
        : d_(dimension), shape_(std::move(shape)) {
        if (d_ < 1) throw std::invalid_argument("FrequencyDomain: dimension must be positive");
        validate();
    }

    static FrequencyDomain cube(int dimension, double half_width) {
        return FrequencyDomain(dimension, Cube{half_width});
    }
    static FrequencyDomain ball(int dimension, double radius) {
        return FrequencyDomain(dimension, Ball{radius});
    }
    static FrequencyDomain annulus(int dimension, double r_min, double r_max) {
        return FrequencyDomain(dimension, Annulus{r_min, r_max});
    }
    static FrequencyDomain sector_pair(std::vector<double> axis, double cos_half_angle,
                                       double r_min, double r_max) {
        const int d = static_cast<int>(axis.size());
        return FrequencyDomain(d, SectorPair{std::move(axis), cos_half_angle, r_min, r_max});
    }

    int dimension() const { return d_; }
    const Shape& shape() const { return shape_; }

private:
    int d_;
    Shape shape_;

    void validate() const {
        std::visit(
            [this](const auto& s) {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, Cube>) {
                    if (!(s.half_width > 0)) throw std::invalid_argument("cube: half_width must be > 0");
                } else if constexpr (std::is_same_v<T, Ball>) {
                    if (!(s.radius > 0)) throw std::invalid_argument("ball: radius must be > 0");
                } else if constexpr (std::is_same_v<T, Annulus>) {
                    if (!(s.r_min >= 0) || !(s.r_min < s.r_max))
                        throw std::invalid_argument("annulus: need 0 <= r_min < r_max");
                } else {
                    if (static_cast<int>(s.axis.size()) != d_)
                        throw std::invalid_argument("sector_pair: axis dimension mismatch");
                    double n2 = 0;
                    for (double a : s.axis) n2 += a * a;
                    if (std::abs(std::sqrt(n2) - 1.0) > 1e-9)
                        throw std::invalid_argument("sector_pair: axis must be a unit vector");
                    if (!(s.cos_half_angle > 0) || !(s.cos_half_angle < 1))
                        throw std::invalid_argument("sector_pair: cos_half_angle must lie in (0,1)");
                    if (!(s.r_min >= 0) || !(s.r_min < s.r_max))
                        throw std::invalid_argument("sector_pair: need 0 <= r_min < r_max");
                }
            },
            shape_);
    }
};

namespace detail {

inline double norm2(std::span<const double> xi) {
    double s = 0;
    for (double v : xi) s += v * v;
    return std::sqrt(s);
}

}  // namespace detail

/// Closed-set membership test; agrees with the analytic shape definition.
inline bool contains(const FrequencyDomain& domain, std::span<const double> xi) {
    if (static_cast<int>(xi.size()) != domain.dimension())
        throw std::invalid_argument("contains: point dimension mismatch");
    return std::visit(
        [&](const auto& s) -> bool {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Cube>) {
                for (double v : xi)
                    if (std::abs(v) > s.half_width) return false;
                return true;
            } else if constexpr (std::is_same_v<T, Ball>) {
                return detail::norm2(xi) <= s.radius;
            } else if constexpr (std::is_same_v<T, Annulus>) {
                const double r = detail::norm2(xi);
                return r >= s.r_min && r <= s.r_max;
            } else {
                const double r = detail::norm2(xi);
                if (r < s.r_min || r > s.r_max) return false;
                double dot = 0;
                for (size_t i = 0; i < xi.size(); ++i) dot += s.axis[i] * xi[i];
                return std::abs(dot) >= s.cos_half_angle * r;
            }
        },
        domain.shape());
}

inline bool contains(const FrequencyDomain& domain, const std::vector<double>& xi) {
    return contains(domain, std::span<const double>(xi));
}

/// The set alpha * Omega_0; shape parameters scale linearly.
inline FrequencyDomain dilate(const FrequencyDomain& domain, double alpha) {
    if (!(alpha > 1.0)) throw std::invalid_argument("dilate: alpha must be > 1");
    return std::visit(
        [&](const auto& s) -> FrequencyDomain {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Cube>) {
                return FrequencyDomain(domain.dimension(), Cube{alpha * s.half_width});
            } else if constexpr (std::is_same_v<T, Ball>) {
                return FrequencyDomain(domain.dimension(), Ball{alpha * s.radius});
            } else if constexpr (std::is_same_v<T, Annulus>) {
                return FrequencyDomain(domain.dimension(), Annulus{alpha * s.r_min, alpha * s.r_max});
            } else {
                return FrequencyDomain(domain.dimension(),
                                       SectorPair{s.axis, s.cos_half_angle, alpha * s.r_min, alpha * s.r_max});
            }
        },
        domain.shape());
}

/// Axis-aligned box containing the domain; tight for cube/ball/annulus.
inline std::pair<std::vector<double>, std::vector<double>> bounding_box(const FrequencyDomain& domain) {
    const int d = domain.dimension();
    double ext = std::visit(
        [](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Cube>) return s.half_width;
            else if constexpr (std::is_same_v<T, Ball>) return s.radius;
            else if constexpr (std::is_same_v<T, Annulus>) return s.r_max;
            else return s.r_max;
        },
        domain.shape());
    return {std::vector<double>(d, -ext), std::vector<double>(d, ext)};
}

inline std::string shape_name(const FrequencyDomain& domain) {
    return std::visit(
        [](const auto& s) -> std::string {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Cube>) return "cube";
            else if constexpr (std::is_same_v<T, Ball>) return "ball";
            else if constexpr (std::is_same_v<T, Annulus>) return "annulus";
            else return "sector_pair";
        },
        domain.shape());
}

}  // namespace fext
