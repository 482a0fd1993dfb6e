#include "plap/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "plap/error.hpp"

namespace plap::criteria {

namespace {

constexpr double kNegativeTolerance = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

double checked(const Integrand& h, double t) {
    const double v = h(t);
    if (std::isnan(v)) throw InvalidArgument("integrand is NaN at t = " + std::to_string(t));
    if (v < -kNegativeTolerance) throw NonPositiveIntegrand(t, v);
    return std::max(v, 0.0);
}

// Least-squares slope of log h against log t on geometric samples of [T, 4T].
double window_slope(const Integrand& h, double T, std::size_t samples) {
    std::vector<double> x(samples), y(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        const double t = T * std::pow(4.0, static_cast<double>(i) / (samples - 1));
        const double v = checked(h, t);
        if (v == 0.0) return -kInf;
        if (std::isinf(v)) return kInf;
        x[i] = std::log(t);
        y[i] = std::log(v);
    }
    const double n = static_cast<double>(samples);
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < samples; ++i) sx += x[i], sy += y[i];
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < samples; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    return sxy / sxx;
}

// ∫_a^b h(t) dt evaluated as ∫ h(e^u) e^u du with a 16-point Gauss rule.
double log_window_integral(const Integrand& h, double a, double b) {
    const auto& rule = grid::gauss_legendre(16);
    const double la = std::log(a), lb = std::log(b);
    const double half = 0.5 * (lb - la), mid = 0.5 * (lb + la);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double t = std::exp(mid + half * rule.nodes[i]);
        sum += rule.weights[i] * checked(h, t) * t;
    }
    return half * sum;
}

Verdict make_error_verdict(const std::string& what, const std::exception& e) {
    Verdict v;
    v.kind = VerdictKind::Inconclusive;
    v.note = what + ": " + e.what();
    return v;
}

// F(s) = ∫_0^s g on geometric cells, Gauss-Legendre inside each cell.
class CumulativeTable {
public:
    CumulativeTable(Integrand g, double end)
        : g_(std::move(g)), grid_(grid::make_grid(end, 1201, grid::Geometric{1.04})) {
        const auto r = grid_.nodes();
        cumulative_.assign(r.size(), 0.0);
        for (std::size_t k = 1; k < r.size(); ++k)
            cumulative_[k] = cumulative_[k - 1] + cell(r[k - 1], r[k]);
    }

    double operator()(double s) const {
        const auto r = grid_.nodes();
        if (s <= 0.0) return 0.0;
        if (s > r.back()) throw InvalidArgument("cumulative table queried beyond its end");
        const auto it = std::upper_bound(r.begin(), r.end(), s);
        const std::size_t k = static_cast<std::size_t>(it - r.begin()) - 1;
        return cumulative_[k] + (s > r[k] ? cell(r[k], s) : 0.0);
    }

private:
    double cell(double a, double b) const {
        const auto& rule = grid::gauss_legendre(8);
        const double half = 0.5 * (b - a), mid = 0.5 * (b + a);
        double sum = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double s = mid + half * rule.nodes[i];
            const double v = g_(s);
            if (v < -kNegativeTolerance) throw NonPositiveIntegrand(s, v);
            sum += rule.weights[i] * v;
        }
        return half * sum;
    }

    Integrand g_;
    grid::RadialGrid grid_;
    std::vector<double> cumulative_;
};

Integrand diagonal_sum(std::span<const expr::Expression> fs, std::size_t m) {
    std::vector<expr::Expression> copy(fs.begin(), fs.end());
    return [copy = std::move(copy), m](double s) {
        const std::vector<double> diag(m, s);
        double total = 0.0;
        for (const auto& f : copy) total += f(diag);
        return total;
    };
}

Verdict classify_keller_osserman(Integrand g, double p) {
    const double end = classifier_horizon(1.0) * 1.01;
    auto table = std::make_shared<const CumulativeTable>(std::move(g), end);
    return classify_improper_integral(
        [table, p](double s) {
            const double F = (*table)(s);
            if (F < -kNegativeTolerance) throw NonPositiveIntegrand(s, F);
            return F <= 0.0 ? kInf : std::pow(F, -1.0 / p);
        },
        1.0, kDefaultSamples);
}

double coefficient_sum(std::span<const expr::Expression> a, double t) {
    double total = 0.0;
    for (const auto& e : a) total += e(t);
    if (total < -kNegativeTolerance) throw NonPositiveIntegrand(t, total);
    return std::max(total, 0.0);
}

void require_positive(double value, const char* name) {
    if (!(value > 0.0)) throw InvalidArgument(std::string(name) + " must be positive");
}

}  // namespace

std::string_view to_string(VerdictKind kind) noexcept {
    switch (kind) {
        case VerdictKind::ConvergesFinite: return "ConvergesFinite";
        case VerdictKind::Diverges: return "Diverges";
        case VerdictKind::Inconclusive: return "Inconclusive";
    }
    return "?";
}

std::string_view to_string(Stage stage) noexcept {
    switch (stage) {
        case Stage::TailExponent: return "tail_exponent";
        case Stage::WindowRatio: return "window_ratio";
        case Stage::Unresolved: return "unresolved";
    }
    return "?";
}

std::string_view to_string(Prediction prediction) noexcept {
    switch (prediction) {
        case Prediction::BoundedExists: return "BoundedExists";
        case Prediction::NoBoundedRadial: return "NoBoundedRadial";
        case Prediction::AllSolutionsLarge: return "AllSolutionsLarge";
        case Prediction::Inconclusive: return "Inconclusive";
        case Prediction::Conflict: return "Conflict";
    }
    return "?";
}

double classifier_horizon(double t_lo, const ClassifierSettings& settings) {
    return t_lo * std::ldexp(1.0, settings.octaves + 1);
}

Verdict classify_improper_integral(const Integrand& integrand, double t_lo, std::size_t samples,
                                   const ClassifierSettings& settings) {
    if (!(t_lo > 0.0)) throw InvalidArgument("t_lo must be positive");
    if (samples < 3) throw InvalidArgument("at least 3 samples per window are needed");
    if (settings.octaves < 8) throw InvalidArgument("classifier needs at least 8 octaves");

    const int J = settings.octaves;
    const auto octave = [&](int j) { return t_lo * std::ldexp(1.0, j); };

    Verdict v;
    v.evidence_range = {octave(J - 7), classifier_horizon(t_lo, settings)};

    bool all_zero = true;
    for (int j = 0; j <= J + 1 && all_zero; ++j) all_zero = checked(integrand, octave(j)) == 0.0;

    for (int j = J - 3; j < J; ++j) v.window_slopes.push_back(window_slope(integrand, octave(j), samples));
    v.tail_exponent_estimate = v.window_slopes.back();

    for (int j = J - 7; j <= J; ++j)
        v.window_increments.push_back(log_window_integral(integrand, octave(j), octave(j + 1)));

    if (all_zero && std::all_of(v.window_increments.begin(), v.window_increments.end(),
                                [](double x) { return x == 0.0; })) {
        v.degenerate = true;
        v.kind = VerdictKind::ConvergesFinite;
        v.decided_by = Stage::TailExponent;
        v.tail_exponent_estimate = -kInf;
        return v;
    }

    const double lo = -1.0 - settings.margin, hi = -1.0 + settings.margin;
    if (std::all_of(v.window_slopes.begin(), v.window_slopes.end(),
                    [&](double s) { return s <= lo; })) {
        v.kind = VerdictKind::ConvergesFinite;
        v.decided_by = Stage::TailExponent;
        return v;
    }
    if (std::all_of(v.window_slopes.begin(), v.window_slopes.end(),
                    [&](double s) { return s >= hi; })) {
        v.kind = VerdictKind::Diverges;
        v.decided_by = Stage::TailExponent;
        return v;
    }

    // Borderline band: compare successive window increments.
    const auto& inc = v.window_increments;
    bool decaying = true, flat_or_growing = true;
    for (std::size_t i = inc.size() - 4; i < inc.size(); ++i) {
        const double prev = inc[i - 1], cur = inc[i];
        if (!(cur <= settings.decay_ratio * prev)) decaying = false;
        if (!(cur >= (1.0 - settings.flat_tolerance) * prev) || prev == 0.0) flat_or_growing = false;
    }
    if (decaying) {
        v.kind = VerdictKind::ConvergesFinite;
        v.decided_by = Stage::WindowRatio;
    } else if (flat_or_growing) {
        v.kind = VerdictKind::Diverges;
        v.decided_by = Stage::WindowRatio;
    } else {
        v.kind = VerdictKind::Inconclusive;
        v.decided_by = Stage::Unresolved;
    }
    return v;
}

Verdict classify_improper_integral(const expr::Expression& integrand, double t_lo,
                                   std::size_t samples, const ClassifierSettings& settings) {
    if (integrand.variables().size() != 1)
        throw InvalidArgument("integrand must be an expression in one variable");
    return classify_improper_integral([&integrand](double t) { return integrand(t); }, t_lo,
                                      samples, settings);
}

Verdict check_C3(std::span<const expr::Expression> nonlinearities, std::size_t m, double p) {
    if (!(p > 1.0)) throw InvalidArgument("p must exceed 1");
    return classify_keller_osserman(diagonal_sum(nonlinearities, m), p);
}

Verdict check_component_integral(const expr::Expression& nonlinearity, std::size_t m, double p) {
    if (!(p > 1.0)) throw InvalidArgument("p must exceed 1");
    return classify_keller_osserman(diagonal_sum(std::span(&nonlinearity, 1), m), p);
}

Verdict check_reciprocal_sum(std::span<const expr::Expression> nonlinearities, std::size_t m,
                             double p) {
    if (!(p > 1.0)) throw InvalidArgument("p must exceed 1");
    const Integrand g = diagonal_sum(nonlinearities, m);
    return classify_improper_integral(
        [g, p](double s) {
            const double v = g(s);
            if (v < -kNegativeTolerance) throw NonPositiveIntegrand(s, v);
            return v <= 0.0 ? kInf : std::pow(v, -1.0 / (p - 1.0));
        },
        1.0, kDefaultSamples);
}

Verdict check_condition_5(std::span<const expr::Expression> phi, double p, double epsilon) {
    require_positive(epsilon, "epsilon");
    std::vector<expr::Expression> a(phi.begin(), phi.end());
    return classify_improper_integral(
        [a = std::move(a), p, epsilon](double t) {
            return std::pow(t, 1.0 + epsilon) * std::pow(coefficient_sum(a, t), 2.0 / p);
        },
        1.0, kDefaultSamples);
}

Verdict check_condition_5b(std::span<const expr::Expression> psi, double p) {
    if (!(p > 1.0)) throw InvalidArgument("p must exceed 1");
    std::vector<expr::Expression> a(psi.begin(), psi.end());
    const double q = 1.0 / (p - 1.0);
    return classify_improper_integral(
        [a = std::move(a), q](double t) {
            double total = 0.0;
            for (const auto& e : a) {
                const double v = e(t);
                if (v < -kNegativeTolerance) throw NonPositiveIntegrand(t, v);
                total += std::pow(std::max(v, 0.0), q);
            }
            return std::pow(t, q) * total;
        },
        1.0, kDefaultSamples);
}

std::vector<Verdict> check_condition_12(std::span<const expr::Expression> a, int N, double p) {
    if (!(p > 1.0)) throw InvalidArgument("p must exceed 1");
    if (static_cast<double>(N) - 1.0 < p) throw InvalidArgument("N - 1 >= p is required");

    constexpr double kInnerRadius = 1e6;
    const grid::RadialGrid g = grid::make_grid(kInnerRadius, 2001, grid::Geometric{1.01});
    const grid::RadialWeights weights(g, N);
    const auto r = g.nodes();
    const double q = 1.0 / (p - 1.0);

    std::vector<Verdict> verdicts;
    for (const auto& aj : a) {
        std::vector<double> h(r.size());
        for (std::size_t k = 0; k < r.size(); ++k) {
            h[k] = aj(r[k]);
            if (h[k] < -kNegativeTolerance) throw NonPositiveIntegrand(r[k], h[k]);
            h[k] = std::max(h[k], 0.0);
        }
        auto outer = std::make_shared<std::vector<double>>(r.size());
        weights.inner_integral(h, *outer);
        for (auto& v : *outer) v = std::pow(std::max(v, 0.0), q);

        // Power-law tail fitted on the last octave of the grid.
        double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
        bool zero_tail = false;
        for (std::size_t k = 0; k < r.size(); ++k) {
            if (r[k] < 0.5 * kInnerRadius) continue;
            if ((*outer)[k] == 0.0) {
                zero_tail = true;
                break;
            }
            const double x = std::log(r[k]), y = std::log((*outer)[k]);
            sx += x, sy += y, sxx += x * x, sxy += x * y, n += 1;
        }
        const double tail_slope = zero_tail ? 0.0 : (n * sxy - sx * sy) / (n * sxx - sx * sx);
        const double tail_value = zero_tail ? 0.0 : outer->back();

        auto integrand = [g, outer, tail_slope, tail_value](double t) {
            const auto nodes = g.nodes();
            if (t >= nodes.back()) return tail_value * std::pow(t / nodes.back(), tail_slope);
            const auto it = std::upper_bound(nodes.begin(), nodes.end(), t);
            const std::size_t k = static_cast<std::size_t>(it - nodes.begin());
            const double w = (t - nodes[k - 1]) / (nodes[k] - nodes[k - 1]);
            return (1.0 - w) * (*outer)[k - 1] + w * (*outer)[k];
        };
        Verdict v = classify_improper_integral(integrand, 1.0, kDefaultSamples);
        if (std::all_of(outer->begin(), outer->end(), [](double x) { return x == 0.0; })) {
            v.degenerate = true;
            v.note = "coefficient vanishes identically";
        }
        verdicts.push_back(std::move(v));
    }
    return verdicts;
}

Verdict check_condition_13(std::span<const expr::Expression> a, double p, double epsilon) {
    return check_condition_5(a, p, epsilon);
}

WeightMonotonicity check_weight_monotonicity(std::span<const expr::Expression> phi, double p,
                                             int N, const grid::RadialGrid& grid) {
    const double e = p * (N - 1.0) / (p - 1.0);
    auto weight = [&](double r) {
        double total = 0.0;
        for (const auto& a : phi) total += a(r);
        return std::pow(r, e) * total;
    };
    const auto r = grid.nodes();
    std::vector<double> w(r.size());
    for (std::size_t k = 0; k < r.size(); ++k) w[k] = weight(r[k]);

    auto decreases = [](double from, double to) { return to < from - 1e-10 * std::abs(from); };
    std::optional<std::size_t> last_decrease;
    for (std::size_t k = 0; k + 1 < w.size(); ++k)
        if (decreases(w[k], w[k + 1])) last_decrease = k;

    WeightMonotonicity out;
    out.from_index = last_decrease ? *last_decrease + 1 : 0;
    out.from_radius = r[out.from_index];
    const bool persists = last_decrease && r[*last_decrease + 1] > 0.5 * grid.r_max();
    const bool beyond = decreases(w.back(), weight(2.0 * grid.r_max()));
    out.eventually_monotone = !persists && !beyond;
    return out;
}

CriteriaReport predict(const solver::ProblemSpec& problem, double epsilon,
                       const PredictOptions& options) {
    problem.validate();
    require_positive(epsilon, "epsilon");
    CriteriaReport report;
    report.cond5_epsilon = epsilon;
    report.cond13_epsilon = options.epsilon13.value_or(epsilon);
    require_positive(report.cond13_epsilon, "epsilon13");

    const auto& phi = problem.coefficients;
    const auto& psi = problem.coefficients_lower ? *problem.coefficients_lower : phi;
    const auto& f = problem.nonlinearities;

    const auto validation = expr::validate_nonlinearity(f, problem.m, 10.0, 9);
    if (!validation.passed()) {
        report.hypotheses_violated = true;
        report.notes.emplace_back("sampled checks of f(0)=0, positivity or monotonicity failed");
    }

    auto guarded = [&](const char* name, auto&& check) -> Verdict {
        try {
            return check();
        } catch (const Error& e) {
            report.notes.push_back(std::string(name) + " not evaluable: " + e.what());
            return make_error_verdict(name, e);
        }
    };
    report.c3 = guarded("C3", [&] { return check_C3(f, problem.m, problem.p); });
    report.cond5 = guarded("cond5", [&] { return check_condition_5(phi, problem.p, epsilon); });
    report.cond5b = guarded("cond5b", [&] { return check_condition_5b(psi, problem.p); });
    try {
        report.cond12 = check_condition_12(phi, problem.N, problem.p);
    } catch (const Error& e) {
        report.notes.push_back(std::string("cond12 not evaluable: ") + e.what());
        report.cond12.assign(problem.m, make_error_verdict("cond12", e));
    }
    report.cond13 = guarded("cond13", [&] {
        return check_condition_13(phi, problem.p, report.cond13_epsilon);
    });

    const grid::RadialGrid weight_grid =
        options.weight_grid.value_or(grid::make_grid(100.0, 2001));
    report.weight = check_weight_monotonicity(phi, problem.p, problem.N, weight_grid);

    bool any_nonzero = false;
    for (const auto& a : phi) {
        for (double r : weight_grid.nodes()) any_nonzero = any_nonzero || a(r) != 0.0;
        for (int j = 0; j <= 34 && !any_nonzero; ++j) any_nonzero = a(std::ldexp(1.0, j)) != 0.0;
    }
    report.degenerate_coefficients = !any_nonzero;
    if (report.degenerate_coefficients) report.notes.emplace_back("coefficients vanish identically");

    const bool monotone = report.weight.eventually_monotone;
    const bool all12 = !report.cond12.empty() &&
                       std::all_of(report.cond12.begin(), report.cond12.end(),
                                   [](const Verdict& v) { return v.diverges(); });
    report.bounded_exists_fires = report.c3.diverges() && report.cond5.converges() && monotone;
    report.no_bounded_radial_fires = report.cond5b.diverges();
    report.all_solutions_large_fires =
        problem.is_radial() && report.c3.diverges() && all12 && monotone;

    if (report.all_solutions_large_fires && report.cond13.converges())
        report.notes.emplace_back(
            "cond13 converges although every solution is predicted large; check the tail sampling");

    if (report.degenerate_coefficients || report.hypotheses_violated) {
        report.prediction = Prediction::Inconclusive;
        report.details = report.degenerate_coefficients ? "degenerate coefficients"
                                                        : "nonlinearity hypotheses violated";
    } else if (report.bounded_exists_fires &&
               (report.no_bounded_radial_fires || report.all_solutions_large_fires)) {
        report.prediction = Prediction::Conflict;
        report.details = "bounded existence fires together with";
        if (report.no_bounded_radial_fires) report.details += " non-existence of bounded radial solutions";
        if (report.no_bounded_radial_fires && report.all_solutions_large_fires) report.details += " and";
        if (report.all_solutions_large_fires) report.details += " largeness of all solutions";
    } else if (report.all_solutions_large_fires) {
        report.prediction = Prediction::AllSolutionsLarge;
        if (report.no_bounded_radial_fires)
            report.details = "cond5b also diverges: no bounded radial solution either";
    } else if (report.no_bounded_radial_fires) {
        report.prediction = Prediction::NoBoundedRadial;
    } else if (report.bounded_exists_fires) {
        report.prediction = Prediction::BoundedExists;
    } else {
        report.prediction = Prediction::Inconclusive;
        report.details = "no decision branch fires";
    }
    return report;
}

}  // namespace plap::criteria
