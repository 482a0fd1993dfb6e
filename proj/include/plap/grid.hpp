#pragma once

// Radial grids on [0, r_max] and the cumulative quadratures the integral
// operators are assembled from.

#include <cstddef>
#include <memory>
#include <span>
#include <variant>
#include <vector>

namespace plap::grid {

struct Uniform {};
/// Node spacing grows by `ratio` from one cell to the next (ratio > 1).
struct Geometric {
    double ratio;
};
using Grading = std::variant<Uniform, Geometric>;

inline constexpr std::size_t kMinPoints = 17;

/// Strictly increasing nodes r_0 = 0 < r_1 < ... < r_M, M >= 16.
/// Copies share the node storage.
class RadialGrid {
public:
    /// Wraps explicit nodes; throws InvalidArgument unless the invariants hold.
    static RadialGrid from_nodes(std::vector<double> nodes);

    std::span<const double> nodes() const noexcept { return *nodes_; }
    std::size_t size() const noexcept { return nodes_->size(); }
    double operator[](std::size_t k) const noexcept { return (*nodes_)[k]; }
    double r_max() const noexcept { return nodes_->back(); }
    const Grading& grading() const noexcept { return grading_; }

    bool same_nodes(const RadialGrid& other) const noexcept;

private:
    friend RadialGrid make_grid(double, std::size_t, Grading);
    RadialGrid(std::shared_ptr<const std::vector<double>> nodes, Grading grading)
        : nodes_(std::move(nodes)), grading_(grading) {}

    std::shared_ptr<const std::vector<double>> nodes_;
    Grading grading_;
};

/// Throws InvalidArgument on r_max <= 0, points < 17 or ratio <= 1.
RadialGrid make_grid(double r_max, std::size_t points, Grading grading = Uniform{});

/// Samples of a function on the nodes of a grid.
struct GridFunction {
    RadialGrid grid;
    std::vector<double> values;

    GridFunction(RadialGrid g, std::vector<double> v);
    double operator[](std::size_t k) const noexcept { return values[k]; }
};

/// Composite trapezoid running integral; F(r_0) = 0.
GridFunction cumulative_integral(const GridFunction& f);
void cumulative_integral(std::span<const double> nodes, std::span<const double> f,
                         std::span<double> out);

/// Per-cell moments of s^{N-1} against the two linear hat functions of the
/// cell, plus r_k^{1-N}. Built once per (grid, N) and reused.
class RadialWeights {
public:
    RadialWeights(const RadialGrid& grid, int dimension);

    int dimension() const noexcept { return dimension_; }
    const RadialGrid& grid() const noexcept { return grid_; }

    /// t ↦ t^{1-N} ∫_0^t s^{N-1} h(s) ds at every node, h piecewise linear
    /// between nodes; value 0 at t = 0.
    void inner_integral(std::span<const double> h, std::span<double> out) const;

private:
    RadialGrid grid_;
    int dimension_;
    std::vector<double> left_;   // ∫ s^{N-1} (r_k - s)/Δ over cell k
    std::vector<double> right_;  // ∫ s^{N-1} (s - r_{k-1})/Δ over cell k
    std::vector<double> inverse_power_;
};

/// t ↦ t^{1-N} ∫_0^t s^{N-1} h(s) ds. Throws InvalidArgument for N < 2.
GridFunction weighted_inner_integral(const GridFunction& h, int dimension);

/// n-point Gauss-Legendre rule on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const GaussRule& gauss_legendre(std::size_t n);

}  // namespace plap::grid
