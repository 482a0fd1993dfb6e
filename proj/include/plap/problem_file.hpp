#pragma once

// JSON problem files:
//
// {
//   "m": 1, "p": 2, "N": 3, "beta": 1.0,
//   "coefficients": ["1"], "coefficients_lower": ["0.5"],
//   "nonlinearities": ["u1"],
//   "grid": {"r_max": 10, "points": 4001, "grading": "uniform" | {"geometric": 1.01}},
//   "epsilon": 0.5,
//   "iteration": {"max_iterations": 500, "abs_tol": 1e-10, "rel_tol": 1e-8, "value_cap": 1e12}
// }
//
// "beta", "coefficients_lower", "epsilon" and every "iteration" key are
// optional. Unknown keys are rejected.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "plap/error.hpp"
#include "plap/expr.hpp"
#include "plap/solver.hpp"

namespace plap::io {

using Json = nlohmann::ordered_json;

/// Schema violation; `path` is a JSON pointer to the offending key.
class SchemaError : public Error {
public:
    SchemaError(std::string path, const std::string& message)
        : Error(path + ": " + message), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

/// Expression that failed to parse, located by key path and byte offset.
class ExpressionError : public Error {
public:
    ExpressionError(std::string path, std::size_t offset, const std::string& message)
        : Error(path + ": " + message), path_(std::move(path)), offset_(offset) {}
    const std::string& path() const noexcept { return path_; }
    std::size_t offset() const noexcept { return offset_; }

private:
    std::string path_;
    std::size_t offset_;
};

struct GridSpec {
    double r_max = 10.0;
    std::size_t points = 4001;
    grid::Grading grading = grid::Uniform{};

    grid::RadialGrid make() const;
};

struct LoadedProblem {
    solver::ProblemSpec spec;
    GridSpec grid;
    solver::IterationConfig iteration;
    double epsilon = 0.5;
    std::vector<std::string> warnings;

    /// Normalized problem with every default filled in.
    Json echo() const;
};

/// Overrides applied on top of the file contents (command-line flags).
struct Overrides {
    std::optional<std::size_t> grid_points;
    std::optional<double> r_max;
    std::optional<double> epsilon;
    std::optional<int> max_iterations;
    std::optional<double> abs_tol;
};

LoadedProblem load_problem(const Json& document, const Overrides& overrides = {});
/// Throws SchemaError ("/" path) when the file is missing or not JSON.
LoadedProblem load_problem(const std::filesystem::path& path, const Overrides& overrides = {});

}  // namespace plap::io
