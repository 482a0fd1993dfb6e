#pragma once

// Finite-vs-infinite classification of the improper integrals that decide
// existence, non-existence and largeness, and the combined prediction.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "plap/expr.hpp"
#include "plap/grid.hpp"
#include "plap/solver.hpp"

namespace plap::criteria {

enum class VerdictKind { ConvergesFinite, Diverges, Inconclusive };

/// Which part of the classifier settled the verdict.
enum class Stage { TailExponent, WindowRatio, Unresolved };

struct Verdict {
    VerdictKind kind = VerdictKind::Inconclusive;
    /// Local slope of log h vs log t in the farthest window (±inf when the
    /// integrand underflows to 0 or overflows).
    double tail_exponent_estimate = 0.0;
    std::vector<double> window_slopes;
    /// ∫ h over [2^k T, 2^{k+1} T] for consecutive k.
    std::vector<double> window_increments;
    std::pair<double, double> evidence_range{0.0, 0.0};
    Stage decided_by = Stage::Unresolved;
    /// Integrand vanished identically on every sample.
    bool degenerate = false;
    /// Set when a check could not be evaluated (e.g. a negative integrand).
    std::string note;

    bool diverges() const noexcept { return kind == VerdictKind::Diverges; }
    bool converges() const noexcept { return kind == VerdictKind::ConvergesFinite; }
};

std::string_view to_string(VerdictKind kind) noexcept;
std::string_view to_string(Stage stage) noexcept;

struct ClassifierSettings {
    /// Band half-width around exponent -1 handed to the window-ratio stage.
    double margin = 0.05;
    /// Increment ratio at or below which windows count as geometric decay.
    double decay_ratio = 0.9;
    /// Relative slack for "non-decreasing" increments.
    double flat_tolerance = 1e-6;
    /// Octaves between t_lo and the start of the farthest slope window.
    int octaves = 32;
};

using Integrand = std::function<double(double)>;

/// Farthest abscissa the classifier samples for a given t_lo.
double classifier_horizon(double t_lo, const ClassifierSettings& settings = {});

/// Classifies ∫_{t_lo}^∞ h(t) dt as finite or infinite. Throws
/// NonPositiveIntegrand when a sample is below -1e-12.
Verdict classify_improper_integral(const Integrand& integrand, double t_lo, std::size_t samples,
                                   const ClassifierSettings& settings = {});
/// Same, for an expression in the variable t.
Verdict classify_improper_integral(const expr::Expression& integrand, double t_lo,
                                   std::size_t samples, const ClassifierSettings& settings = {});

inline constexpr std::size_t kDefaultSamples = 16;

/// ∫_1^∞ F(s)^{-1/p} ds with F(s) = ∫_0^s Σ f_i(t, ..., t) dt.
/// Diverges means the Keller-Osserman type condition holds.
Verdict check_C3(std::span<const expr::Expression> nonlinearities, std::size_t m, double p);

/// ∫_1^∞ [∫_0^s f_i(t, ..., t) dt]^{-1/p} ds for a single component.
Verdict check_component_integral(const expr::Expression& nonlinearity, std::size_t m, double p);

/// ∫_1^∞ (Σ f_i(s, ..., s))^{-1/(p-1)} ds.
Verdict check_reciprocal_sum(std::span<const expr::Expression> nonlinearities, std::size_t m,
                             double p);

/// ∫_0^∞ t^{1+ε} (Σ φ_j(t))^{2/p} dt.
Verdict check_condition_5(std::span<const expr::Expression> phi, double p, double epsilon);

/// ∫_0^∞ t^{1/(p-1)} Σ ψ_j(t)^{1/(p-1)} dt.
Verdict check_condition_5b(std::span<const expr::Expression> psi, double p);

/// Per component: ∫_0^∞ (t^{1-N} ∫_0^t s^{N-1} a_j(s) ds)^{1/(p-1)} dt.
std::vector<Verdict> check_condition_12(std::span<const expr::Expression> a, int N, double p);

/// ∫_0^∞ r^{1+ε} (Σ a_j(r))^{2/p} dr.
Verdict check_condition_13(std::span<const expr::Expression> a, double p, double epsilon);

struct WeightMonotonicity {
    bool eventually_monotone = false;
    /// First node from which r^{p(N-1)/(p-1)} Σ φ_j(r) never decreases.
    std::size_t from_index = 0;
    double from_radius = 0.0;
};

WeightMonotonicity check_weight_monotonicity(std::span<const expr::Expression> phi, double p,
                                             int N, const grid::RadialGrid& grid);

enum class Prediction { BoundedExists, NoBoundedRadial, AllSolutionsLarge, Inconclusive, Conflict };
std::string_view to_string(Prediction prediction) noexcept;

struct CriteriaReport {
    Verdict c3;
    Verdict cond5;
    double cond5_epsilon = 0.5;
    Verdict cond5b;
    std::vector<Verdict> cond12;
    Verdict cond13;
    double cond13_epsilon = 0.5;
    WeightMonotonicity weight;

    bool bounded_exists_fires = false;
    bool no_bounded_radial_fires = false;
    bool all_solutions_large_fires = false;
    bool degenerate_coefficients = false;
    bool hypotheses_violated = false;

    Prediction prediction = Prediction::Inconclusive;
    std::string details;
    std::vector<std::string> notes;
};

struct PredictOptions {
    /// ε for the large-solution condition; defaults to the existence ε.
    std::optional<double> epsilon13;
    /// Grid for the weight-monotonicity scan; uniform [0, 100] by default.
    std::optional<grid::RadialGrid> weight_grid;
};

CriteriaReport predict(const solver::ProblemSpec& problem, double epsilon,
                       const PredictOptions& options = {});

inline constexpr double kDefaultEpsilon = 0.5;
inline constexpr double kEpsilonScan[] = {0.01, 0.1, 0.5, 1.0};

}  // namespace plap::criteria
