#include "plap/problem_file.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace plap::io {

namespace {

const Json& require_key(const Json& object, const std::string& key, const std::string& path) {
    const auto it = object.find(key);
    if (it == object.end()) throw SchemaError(path + "/" + key, "required key is missing");
    return *it;
}

void reject_unknown(const Json& object, const std::set<std::string>& known, const std::string& path) {
    for (const auto& [key, value] : object.items())
        if (!known.count(key)) throw SchemaError(path + "/" + key, "unknown key");
}

double number(const Json& v, const std::string& path) {
    if (!v.is_number()) throw SchemaError(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw SchemaError(path, "expected a finite number");
    return x;
}

long long integer(const Json& v, const std::string& path) {
    if (!v.is_number_integer()) throw SchemaError(path, "expected an integer");
    return v.get<long long>();
}

std::vector<expr::Expression> expressions(const Json& v, const std::string& path, std::size_t m,
                                          const std::vector<std::string>& variables) {
    if (!v.is_array()) throw SchemaError(path, "expected an array of strings");
    if (v.size() != m)
        throw SchemaError(path, "expected " + std::to_string(m) + " entries, got " +
                                    std::to_string(v.size()));
    std::vector<expr::Expression> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string at = path + "/" + std::to_string(i);
        if (!v[i].is_string()) throw SchemaError(at, "expected a string");
        const std::string source = v[i].get<std::string>();
        try {
            out.push_back(expr::parse(source, variables));
        } catch (const SyntaxError& e) {
            throw ExpressionError(at, e.offset(), e.what());
        } catch (const UnknownIdentifier& e) {
            throw ExpressionError(at, e.offset(), e.what());
        } catch (const ArityError& e) {
            throw ExpressionError(at, e.offset(), e.what());
        }
    }
    return out;
}

GridSpec parse_grid(const Json& v) {
    if (!v.is_object()) throw SchemaError("/grid", "expected an object");
    reject_unknown(v, {"r_max", "points", "grading"}, "/grid");
    GridSpec g;
    g.r_max = number(require_key(v, "r_max", "/grid"), "/grid/r_max");
    const long long points = integer(require_key(v, "points", "/grid"), "/grid/points");
    if (points < static_cast<long long>(grid::kMinPoints))
        throw SchemaError("/grid/points", "at least 17 points are required");
    g.points = static_cast<std::size_t>(points);
    if (!(g.r_max > 0.0)) throw SchemaError("/grid/r_max", "must be positive");
    if (const auto it = v.find("grading"); it != v.end()) {
        if (it->is_string() && it->get<std::string>() == "uniform") {
            g.grading = grid::Uniform{};
        } else if (it->is_object()) {
            reject_unknown(*it, {"geometric"}, "/grid/grading");
            const double ratio = number(require_key(*it, "geometric", "/grid/grading"),
                                        "/grid/grading/geometric");
            if (!(ratio > 1.0)) throw SchemaError("/grid/grading/geometric", "ratio must exceed 1");
            g.grading = grid::Geometric{ratio};
        } else {
            throw SchemaError("/grid/grading", "expected \"uniform\" or {\"geometric\": ratio}");
        }
    }
    return g;
}

solver::IterationConfig parse_iteration(const Json* v) {
    solver::IterationConfig c;
    if (!v) return c;
    if (!v->is_object()) throw SchemaError("/iteration", "expected an object");
    reject_unknown(*v, {"max_iterations", "abs_tol", "rel_tol", "value_cap"}, "/iteration");
    if (auto it = v->find("max_iterations"); it != v->end()) {
        const long long n = integer(*it, "/iteration/max_iterations");
        if (n < 1 || n > 1'000'000) throw SchemaError("/iteration/max_iterations", "out of range");
        c.max_iterations = static_cast<int>(n);
    }
    if (auto it = v->find("abs_tol"); it != v->end()) c.abs_tol = number(*it, "/iteration/abs_tol");
    if (auto it = v->find("rel_tol"); it != v->end()) c.rel_tol = number(*it, "/iteration/rel_tol");
    if (auto it = v->find("value_cap"); it != v->end())
        c.value_cap = number(*it, "/iteration/value_cap");
    if (!(c.abs_tol > 0.0)) throw SchemaError("/iteration/abs_tol", "must be positive");
    if (!(c.rel_tol > 0.0)) throw SchemaError("/iteration/rel_tol", "must be positive");
    return c;
}

void collect_warnings(LoadedProblem& loaded) {
    try {
        const auto report = expr::validate_nonlinearity(loaded.spec.nonlinearities, loaded.spec.m,
                                                        10.0, 9);
        for (std::size_t j = 0; j < report.origin_values.size(); ++j)
            if (std::abs(report.origin_values[j]) > expr::kOriginTolerance)
                loaded.warnings.push_back("f" + std::to_string(j + 1) + "(0,...,0) = " +
                                          std::to_string(report.origin_values[j]) +
                                          " != 0 (C1 violated)");
        if (!report.positivity_violations.empty()) {
            const auto& v = report.positivity_violations.front();
            loaded.warnings.push_back("f" + std::to_string(v.function + 1) +
                                      " is negative at sampled points (" +
                                      std::to_string(report.positivity_violations.size()) +
                                      " reported; C1 violated)");
        }
        if (!report.monotonicity_violations.empty()) {
            const auto& v = report.monotonicity_violations.front();
            loaded.warnings.push_back("f" + std::to_string(v.function + 1) +
                                      " decreases in u" + std::to_string(v.coordinate + 1) +
                                      " at sampled points (C2 violated)");
        }
    } catch (const DomainError& e) {
        loaded.warnings.push_back(std::string("nonlinearity not evaluable on [0,10]^m: ") +
                                  e.what());
    }
}

Json grading_json(const grid::Grading& g) {
    if (const auto* geo = std::get_if<grid::Geometric>(&g)) return Json{{"geometric", geo->ratio}};
    return "uniform";
}

}  // namespace

grid::RadialGrid GridSpec::make() const { return grid::make_grid(r_max, points, grading); }

LoadedProblem load_problem(const Json& doc, const Overrides& overrides) {
    if (!doc.is_object()) throw SchemaError("", "problem file must be a JSON object");
    reject_unknown(doc,
                   {"m", "p", "N", "beta", "coefficients", "coefficients_lower", "nonlinearities",
                    "grid", "epsilon", "iteration"},
                   "");

    LoadedProblem loaded;
    auto& spec = loaded.spec;
    const long long m = integer(require_key(doc, "m", ""), "/m");
    if (m < 1 || m > 64) throw SchemaError("/m", "must be between 1 and 64");
    spec.m = static_cast<std::size_t>(m);
    spec.p = number(require_key(doc, "p", ""), "/p");
    if (!(spec.p > 1.0)) throw SchemaError("/p", "p > 1 is required");
    const long long N = integer(require_key(doc, "N", ""), "/N");
    if (N < 2 || N > 1000) throw SchemaError("/N", "out of range");
    spec.N = static_cast<int>(N);
    if (static_cast<double>(spec.N) - 1.0 < spec.p) throw SchemaError("/N", "N - 1 >= p is required");

    spec.beta = 1.0 / static_cast<double>(spec.m);
    if (const auto it = doc.find("beta"); it != doc.end()) {
        spec.beta = number(*it, "/beta");
        if (!(spec.beta > 0.0)) throw SchemaError("/beta", "must be positive");
    }

    spec.coefficients = expressions(require_key(doc, "coefficients", ""), "/coefficients", spec.m, {"r"});
    if (const auto it = doc.find("coefficients_lower"); it != doc.end())
        spec.coefficients_lower = expressions(*it, "/coefficients_lower", spec.m, {"r"});
    spec.nonlinearities = expressions(require_key(doc, "nonlinearities", ""), "/nonlinearities",
                                      spec.m, expr::state_variables(spec.m));

    loaded.grid = parse_grid(require_key(doc, "grid", ""));
    if (const auto it = doc.find("epsilon"); it != doc.end()) {
        loaded.epsilon = number(*it, "/epsilon");
        if (!(loaded.epsilon > 0.0)) throw SchemaError("/epsilon", "must be positive");
    }
    loaded.iteration = parse_iteration(doc.contains("iteration") ? &doc["iteration"] : nullptr);

    if (overrides.grid_points) {
        if (*overrides.grid_points < grid::kMinPoints)
            throw SchemaError("--grid-points", "at least 17 points are required");
        loaded.grid.points = *overrides.grid_points;
    }
    if (overrides.r_max) {
        if (!(*overrides.r_max > 0.0)) throw SchemaError("--r-max", "must be positive");
        loaded.grid.r_max = *overrides.r_max;
    }
    if (overrides.epsilon) {
        if (!(*overrides.epsilon > 0.0)) throw SchemaError("--epsilon", "must be positive");
        loaded.epsilon = *overrides.epsilon;
    }
    if (overrides.max_iterations) {
        if (*overrides.max_iterations < 1) throw SchemaError("--max-iter", "must be positive");
        loaded.iteration.max_iterations = *overrides.max_iterations;
    }
    if (overrides.abs_tol) {
        if (!(*overrides.abs_tol > 0.0)) throw SchemaError("--tol", "must be positive");
        loaded.iteration.abs_tol = *overrides.abs_tol;
    }
    if (!(loaded.iteration.value_cap > spec.beta))
        throw SchemaError("/iteration/value_cap", "must exceed beta");

    spec.validate();
    collect_warnings(loaded);
    return loaded;
}

LoadedProblem load_problem(const std::filesystem::path& path, const Overrides& overrides) {
    std::ifstream in(path);
    if (!in) throw SchemaError("", "cannot open problem file '" + path.string() + "'");
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw SchemaError("", std::string("not valid JSON: ") + e.what());
    }
    return load_problem(doc, overrides);
}

Json LoadedProblem::echo() const {
    auto sources = [](const std::vector<expr::Expression>& es) {
        Json a = Json::array();
        for (const auto& e : es) a.push_back(e.source());
        return a;
    };
    Json j;
    j["m"] = spec.m;
    j["p"] = spec.p;
    j["N"] = spec.N;
    j["beta"] = spec.beta;
    j["coefficients"] = sources(spec.coefficients);
    if (spec.coefficients_lower) j["coefficients_lower"] = sources(*spec.coefficients_lower);
    j["nonlinearities"] = sources(spec.nonlinearities);
    j["grid"] = {{"r_max", grid.r_max}, {"points", grid.points}, {"grading", grading_json(grid.grading)}};
    j["epsilon"] = epsilon;
    j["iteration"] = {{"max_iterations", iteration.max_iterations},
                      {"abs_tol", iteration.abs_tol},
                      {"rel_tol", iteration.rel_tol},
                      {"value_cap", iteration.value_cap}};
    return j;
}

}  // namespace plap::io
