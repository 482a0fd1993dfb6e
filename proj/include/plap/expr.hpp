#pragma once

// Mini expression language for coefficients a_j(r) and nonlinearities
// f_j(u1, ..., um).
//
// Grammar (whitespace is insignificant):
//
//   expr    := term (('+' | '-') term)*
//   term    := factor (('*' | '/') factor)*
//   factor  := unary ('^' factor)?          right-associative
//   unary   := '-' unary | primary
//   primary := number | name | name '(' expr {',' expr} ')' | '(' expr ')'
//
// Functions: exp, log, sqrt, abs (one argument), min, max (two arguments).

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace plap::expr {

enum class BinaryOp { Add, Sub, Mul, Div, Pow };
enum class Function { Exp, Log, Sqrt, Abs, Min, Max };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Number {
    double value;
};
struct Variable {
    std::size_t index;
};
struct Negate {
    NodePtr operand;
};
struct Binary {
    BinaryOp op;
    NodePtr lhs;
    NodePtr rhs;
};
struct Call {
    Function function;
    std::vector<NodePtr> args;
};

struct Node {
    std::variant<Number, Variable, Negate, Binary, Call> data;
};

std::string_view function_name(Function f) noexcept;

/// Immutable parsed expression. Copies share the tree; safe to evaluate from
/// many threads at once.
class Expression {
public:
    Expression(NodePtr root, std::vector<std::string> variables, std::string source);

    const Node& root() const noexcept { return *root_; }
    const std::vector<std::string>& variables() const noexcept { return *variables_; }
    const std::string& source() const noexcept { return source_; }

    /// Evaluates with variable values given positionally, in declaration order.
    double operator()(std::span<const double> values) const;
    double operator()(double x) const { return (*this)(std::span<const double>(&x, 1)); }

    /// Evaluates with named bindings; every declared variable must be bound.
    double evaluate(const std::map<std::string, double>& bindings) const;

    /// Fully parenthesized form that reparses to the same tree.
    std::string to_string() const;

    /// True when the expression is the literal constant zero.
    bool is_literal_zero() const noexcept;

private:
    NodePtr root_;
    std::shared_ptr<const std::vector<std::string>> variables_;
    std::string source_;
};

/// Throws SyntaxError, UnknownIdentifier, ArityError or InvalidArgument.
Expression parse(std::string_view source, std::vector<std::string> variables);

/// Same as `expression.evaluate(bindings)`; throws DomainError.
double eval(const Expression& expression, const std::map<std::string, double>& bindings);

bool structurally_equal(const Node& a, const Node& b) noexcept;

/// Names u1, ..., um.
std::vector<std::string> state_variables(std::size_t m);

// ---------------------------------------------------------------------------
// Sampled checks of f_j(0,...,0) = 0, f_j >= 0 and coordinatewise
// monotonicity on [0, cap]^m.

struct PositivityViolation {
    std::size_t function;
    std::vector<double> point;
    double value;
};

struct MonotonicityViolation {
    std::size_t function;
    std::size_t coordinate;
    std::vector<double> lower_point;
    std::vector<double> upper_point;
    double lower_value;
    double upper_value;
};

struct ValidationReport {
    bool f_zero_at_origin = true;
    std::vector<double> origin_values;
    std::vector<PositivityViolation> positivity_violations;
    std::vector<MonotonicityViolation> monotonicity_violations;
    std::size_t samples_used = 0;

    bool passed() const noexcept {
        return f_zero_at_origin && positivity_violations.empty() &&
               monotonicity_violations.empty();
    }
};

inline constexpr double kOriginTolerance = 1e-12;
/// Each violation list keeps at most this many entries.
inline constexpr std::size_t kMaxReportedViolations = 64;

ValidationReport validate_nonlinearity(std::span<const Expression> nonlinearities, std::size_t m,
                                       double domain_cap, std::size_t samples_per_axis);

}  // namespace plap::expr
