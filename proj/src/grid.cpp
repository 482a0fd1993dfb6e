#include "plap/grid.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

#include "plap/error.hpp"

namespace plap::grid {

RadialGrid RadialGrid::from_nodes(std::vector<double> nodes) {
    if (nodes.size() < kMinPoints)
        throw InvalidArgument("a radial grid needs at least " + std::to_string(kMinPoints) +
                              " nodes, got " + std::to_string(nodes.size()));
    if (nodes.front() != 0.0) throw InvalidArgument("first grid node must be exactly 0");
    for (std::size_t k = 1; k < nodes.size(); ++k)
        if (!(nodes[k] > nodes[k - 1]) || !std::isfinite(nodes[k]))
            throw InvalidArgument("grid nodes must be finite and strictly increasing (node " +
                                  std::to_string(k) + ")");
    return RadialGrid(std::make_shared<const std::vector<double>>(std::move(nodes)), Uniform{});
}

bool RadialGrid::same_nodes(const RadialGrid& other) const noexcept {
    return nodes_ == other.nodes_ || *nodes_ == *other.nodes_;
}

RadialGrid make_grid(double r_max, std::size_t points, Grading grading) {
    if (!(r_max > 0.0) || !std::isfinite(r_max)) throw InvalidArgument("r_max must be positive");
    if (points < kMinPoints)
        throw InvalidArgument("grid needs at least " + std::to_string(kMinPoints) + " points");
    const std::size_t cells = points - 1;
    std::vector<double> nodes(points);
    if (const auto* geo = std::get_if<Geometric>(&grading)) {
        if (!(geo->ratio > 1.0)) throw InvalidArgument("geometric ratio must exceed 1");
        const double log_ratio = std::log(geo->ratio);
        const double denom = std::expm1(static_cast<double>(cells) * log_ratio);
        for (std::size_t k = 0; k < cells; ++k)
            nodes[k] = r_max * (std::expm1(static_cast<double>(k) * log_ratio) / denom);
    } else {
        for (std::size_t k = 0; k < cells; ++k)
            nodes[k] = r_max * static_cast<double>(k) / static_cast<double>(cells);
    }
    nodes.back() = r_max;
    for (std::size_t k = 1; k < points; ++k)
        if (!(nodes[k] > nodes[k - 1]))
            throw InvalidArgument("grid spacing underflows; reduce the geometric ratio");
    return RadialGrid(std::make_shared<const std::vector<double>>(std::move(nodes)), grading);
}

GridFunction::GridFunction(RadialGrid g, std::vector<double> v)
    : grid(std::move(g)), values(std::move(v)) {
    if (values.size() != grid.size())
        throw InvalidArgument("grid function has " + std::to_string(values.size()) +
                              " values for " + std::to_string(grid.size()) + " nodes");
}

void cumulative_integral(std::span<const double> nodes, std::span<const double> f,
                         std::span<double> out) {
    out[0] = 0.0;
    for (std::size_t k = 1; k < nodes.size(); ++k)
        out[k] = out[k - 1] + 0.5 * (nodes[k] - nodes[k - 1]) * (f[k] + f[k - 1]);
}

GridFunction cumulative_integral(const GridFunction& f) {
    std::vector<double> out(f.values.size());
    cumulative_integral(f.grid.nodes(), f.values, out);
    return {f.grid, std::move(out)};
}

// With s = a + Δx on a cell [a, b], (a + Δx)^n expands into nonnegative terms
// C(n,i) a^{n-i} Δ^i x^i, so both hat moments are sums of positive numbers.
RadialWeights::RadialWeights(const RadialGrid& grid, int dimension)
    : grid_(grid), dimension_(dimension) {
    if (dimension < 2) throw InvalidArgument("dimension N must be at least 2");
    const auto r = grid.nodes();
    const int n = dimension - 1;
    left_.assign(r.size(), 0.0);
    right_.assign(r.size(), 0.0);
    inverse_power_.assign(r.size(), 0.0);

    std::vector<double> binom(n + 1);
    binom[0] = 1.0;
    for (int i = 1; i <= n; ++i) binom[i] = binom[i - 1] * (n - i + 1) / i;

    for (std::size_t k = 1; k < r.size(); ++k) {
        const double a = r[k - 1];
        const double delta = r[k] - a;
        double lsum = 0.0, rsum = 0.0;
        double dpow = 1.0;
        for (int i = 0; i <= n; ++i) {
            const double term = binom[i] * std::pow(a, n - i) * dpow;
            rsum += term / (i + 2);
            lsum += term / ((i + 1.0) * (i + 2.0));
            dpow *= delta;
        }
        left_[k] = delta * lsum;
        right_[k] = delta * rsum;
        inverse_power_[k] = std::pow(r[k], -n);
    }
}

void RadialWeights::inner_integral(std::span<const double> h, std::span<double> out) const {
    out[0] = 0.0;
    double acc = 0.0;
    for (std::size_t k = 1; k < h.size(); ++k) {
        acc += left_[k] * h[k - 1] + right_[k] * h[k];
        out[k] = acc * inverse_power_[k];
    }
}

GridFunction weighted_inner_integral(const GridFunction& h, int dimension) {
    const RadialWeights weights(h.grid, dimension);
    std::vector<double> out(h.values.size());
    weights.inner_integral(h.values, out);
    return {h.grid, std::move(out)};
}

namespace {

GaussRule compute_gauss_legendre(std::size_t n) {
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (std::size_t j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

}  // namespace

const GaussRule& gauss_legendre(std::size_t n) {
    if (n == 0) throw InvalidArgument("Gauss-Legendre rule needs at least one node");
    static std::mutex mutex;
    static std::map<std::size_t, GaussRule> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
    return it->second;
}

}  // namespace plap::grid
