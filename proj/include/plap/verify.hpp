#pragma once

// Independent checks on computed profiles: fixed-point and differential
// residuals, iterate monotonicity, and bounded-vs-large growth under domain
// doubling.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "plap/solver.hpp"

namespace plap::verify {

struct ResidualReport {
    double sup_fixed_point_residual = 0.0;
    /// Radial-operator residual at nodes 2 .. M-2 (central differences).
    double sup_ode_residual_interior = 0.0;
    /// Node (and component) where the fixed-point residual peaks.
    std::size_t node_of_max = 0;
    std::size_t component_of_max = 0;
};

ResidualReport fixed_point_residual(const solver::ProblemSpec& problem,
                                    const grid::RadialGrid& grid,
                                    const solver::ProfileSet& profiles);

/// First place where an iterate drops below its predecessor by more than
/// 1e-12 (1 + |w|). `iteration` is the index of the later iterate.
std::optional<solver::MonotoneViolation> check_monotone_in_k(
    std::span<const solver::ProfileSet> history);

/// True when every profile is nondecreasing in r and starts at `beta`.
bool nondecreasing_in_r(const solver::ProfileSet& profiles, double beta);

enum class GrowthKind { Saturating, Growing, Inconclusive };
std::string_view to_string(GrowthKind kind) noexcept;

struct GrowthSettings {
    /// Saturation: relative sup increase in the last doubling below this.
    double saturation_tolerance = 1e-3;
    /// Growing: last log-log slope above this.
    double min_growth_exponent = 0.2;
    /// Slopes count as stabilized when successive ones differ by at most
    /// this fraction of the last one (or keep increasing).
    double slope_stability = 0.25;
};

struct GrowthReport {
    std::vector<double> domain_radii;
    std::vector<double> sup_values;
    std::vector<double> slopes;
    std::vector<int> iterations;
    std::vector<bool> converged;
    std::vector<bool> capped;
    GrowthKind classification = GrowthKind::Inconclusive;
    /// Last log-log slope; +inf when a solve hit value_cap.
    double exponent_estimate = 0.0;
    std::string note;
};

/// Solves on [0, R], [0, 2R], ..., [0, 2^doublings R] with a common uniform
/// spacing R / (points - 1), so each grid contains the previous one.
GrowthReport classify_growth(const solver::ProblemSpec& problem, double base_R, int doublings,
                             const solver::IterationConfig& config, std::size_t points = 4001,
                             const GrowthSettings& settings = {});

}  // namespace plap::verify
