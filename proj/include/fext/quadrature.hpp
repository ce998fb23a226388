#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fext/domain.hpp"

namespace fext {

namespace detail {

// splitmix64: the per-iteration seed derivation used by the solver and the
// double generator below. Portable across platforms, unlike the standard
// library distributions.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k) {
    std::uint64_t s = seed + k * 0x9E3779B97F4A7C15ULL;
    return splitmix64(s);
}

// uniform double in [0,1) from the top 53 bits of an mt19937_64 draw
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// Nodes and positive weights approximating the Lebesgue integral over a domain.
struct QuadratureRule {
    enum class Kind { tensor, monte_carlo };

    int d = 1;
    Kind kind = Kind::tensor;
    std::vector<double> nodes;    // flat, size() * d
    std::vector<double> weights;
    std::optional<std::uint64_t> seed;
    std::string id;

    std::size_t size() const { return weights.size(); }
    std::span<const double> node(std::size_t i) const {
        return {nodes.data() + i * static_cast<std::size_t>(d), static_cast<std::size_t>(d)};
    }
    double total_weight() const {
        double s = 0;
        for (double w : weights) s += w;
        return s;
    }
};

struct NodeSchedule {
    enum class Growth { linear, geometric };
    int min_nodes = 1;
    int max_nodes = 1;
    Growth growth = Growth::geometric;
    // optional per-iteration geometric factor; when unset (<= 1) the geometric
    // schedule is pinned to reach max_nodes on the final iteration
    double factor = 0.0;

    /// Node count for iteration k of `total`; nondecreasing from min to max.
    int count_at(int k, int total) const {
        if (min_nodes < 1 || min_nodes > max_nodes)
            throw std::invalid_argument("NodeSchedule: need 1 <= min_nodes <= max_nodes");
        if (min_nodes == max_nodes) return min_nodes;
        double c;
        if (growth == Growth::geometric && factor > 1.0) {
            c = min_nodes * std::pow(factor, k);
        } else if (total <= 1) {
            c = k == 0 ? min_nodes : max_nodes;
        } else {
            const double t = static_cast<double>(k) / static_cast<double>(total - 1);
            if (growth == Growth::linear) {
                c = min_nodes + t * (max_nodes - min_nodes);
            } else {
                c = min_nodes * std::pow(static_cast<double>(max_nodes) / min_nodes, t);
            }
        }
        const int n = static_cast<int>(std::lround(std::min(c, 2.147e9)));
        return std::min(std::max(n, min_nodes), max_nodes);
    }
};

/// Midpoint rule on the bounding box with nodes outside the domain dropped;
/// weight = cell volume.
inline QuadratureRule tensor_rule(const FrequencyDomain& domain, int resolution) {
    if (resolution < 2) throw std::invalid_argument("tensor_rule: resolution must be >= 2");
    const int d = domain.dimension();
    const auto [lo, hi] = bounding_box(domain);
    double cell = 1.0;
    for (int j = 0; j < d; ++j) cell *= (hi[j] - lo[j]) / resolution;

    QuadratureRule rule;
    rule.d = d;
    rule.kind = QuadratureRule::Kind::tensor;
    {
        std::ostringstream os;
        os << "tensor:" << shape_name(domain) << ":res" << resolution;
        rule.id = os.str();
    }
    std::vector<int> idx(d, 0);
    std::vector<double> xi(d);
    while (true) {
        for (int j = 0; j < d; ++j) xi[j] = lo[j] + (hi[j] - lo[j]) * (idx[j] + 0.5) / resolution;
        if (contains(domain, xi)) {
            rule.nodes.insert(rule.nodes.end(), xi.begin(), xi.end());
            rule.weights.push_back(cell);
        }
        int j = d - 1;
        while (j >= 0 && ++idx[j] == resolution) idx[j--] = 0;
        if (j < 0) break;
    }
    if (rule.weights.empty()) throw std::runtime_error("tensor_rule: no node falls inside the domain");
    return rule;
}

/// Rejection-sampled uniform nodes; each weight is |Omega_0|_est / count with
/// |Omega_0|_est = box volume * acceptance rate. Reproducible given the seed.
inline QuadratureRule monte_carlo_rule(const FrequencyDomain& domain, int count, std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("monte_carlo_rule: count must be >= 1");
    const int d = domain.dimension();
    const auto [lo, hi] = bounding_box(domain);
    double box_volume = 1.0;
    for (int j = 0; j < d; ++j) box_volume *= (hi[j] - lo[j]);

    QuadratureRule rule;
    rule.d = d;
    rule.kind = QuadratureRule::Kind::monte_carlo;
    rule.seed = seed;
    {
        std::ostringstream os;
        os << "mc:" << shape_name(domain) << ":n" << count << ":seed" << seed;
        rule.id = os.str();
    }
    std::mt19937_64 rng(seed);
    std::vector<double> xi(d);
    long long attempts = 0;
    const long long max_attempts = 1000LL * count + 1000000LL;
    rule.nodes.reserve(static_cast<std::size_t>(count) * d);
    int accepted = 0;
    while (accepted < count) {
        if (attempts >= max_attempts)
            throw std::runtime_error("monte_carlo_rule: acceptance rate is zero (domain too thin for its bounding box?)");
        ++attempts;
        for (int j = 0; j < d; ++j) xi[j] = lo[j] + (hi[j] - lo[j]) * detail::uniform01(rng);
        if (!contains(domain, xi)) continue;
        rule.nodes.insert(rule.nodes.end(), xi.begin(), xi.end());
        ++accepted;
    }
    const double acceptance = static_cast<double>(count) / static_cast<double>(attempts);
    const double w = box_volume * acceptance / count;
    rule.weights.assign(static_cast<std::size_t>(count), w);
    return rule;
}

/// sum_i w_i g(xi_i), accumulated in node order.
template <class G>
std::complex<double> integrate(const QuadratureRule& rule, const G& g) {
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const std::complex<double> v = g(rule.node(i));
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            std::ostringstream os;
            os << "integrate: non-finite integrand at node " << i << " = (";
            const auto xi = rule.node(i);
            for (std::size_t j = 0; j < xi.size(); ++j) os << (j ? ", " : "") << xi[j];
            os << ")";
            throw std::runtime_error(os.str());
        }
        acc += rule.weights[i] * v;
    }
    return acc;
}

}  // namespace fext
