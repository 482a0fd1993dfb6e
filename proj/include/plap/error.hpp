#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace plap {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Malformed expression source. `offset` is the byte offset of the problem.
class SyntaxError : public Error {
public:
    SyntaxError(const std::string& message, std::size_t offset)
        : Error(message + " at offset " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class UnknownIdentifier : public Error {
public:
    UnknownIdentifier(const std::string& name, std::size_t offset)
        : Error("unknown identifier '" + name + "' at offset " + std::to_string(offset)),
          name_(name), offset_(offset) {}
    const std::string& name() const noexcept { return name_; }
    std::size_t offset() const noexcept { return offset_; }

private:
    std::string name_;
    std::size_t offset_;
};

class ArityError : public Error {
public:
    ArityError(const std::string& function, std::size_t expected, std::size_t got, std::size_t offset)
        : Error(function + "() expects " + std::to_string(expected) + " argument(s), got " +
                std::to_string(got) + " at offset " + std::to_string(offset)),
          offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Real-arithmetic domain violation during evaluation (log of nonpositive,
/// sqrt of negative, 0^negative, division by zero, ...).
class DomainError : public Error {
public:
    DomainError(const std::string& reason, std::string subtree,
                std::optional<int> iteration = std::nullopt)
        : Error(compose(reason, subtree, iteration)), reason_(reason),
          subtree_(std::move(subtree)), iteration_(iteration) {}

    const std::string& reason() const noexcept { return reason_; }
    /// Printed form of the offending subexpression.
    const std::string& subtree() const noexcept { return subtree_; }
    std::optional<int> iteration() const noexcept { return iteration_; }

    DomainError at_iteration(int k) const { return DomainError(reason_, subtree_, k); }

private:
    static std::string compose(const std::string& reason, const std::string& subtree,
                               std::optional<int> iteration) {
        std::string s = reason + " in '" + subtree + "'";
        if (iteration) s += " (iteration " + std::to_string(*iteration) + ")";
        return s;
    }

    std::string reason_;
    std::string subtree_;
    std::optional<int> iteration_;
};

/// A profile value overflowed or became NaN.
class NonFiniteValue : public Error {
public:
    NonFiniteValue(int iteration, std::size_t component, std::size_t node)
        : Error("non-finite value in component " + std::to_string(component + 1) + " at node " +
                std::to_string(node) + " (iteration " + std::to_string(iteration) + ")"),
          iteration_(iteration), component_(component), node_(node) {}
    int iteration() const noexcept { return iteration_; }
    std::size_t component() const noexcept { return component_; }
    std::size_t node() const noexcept { return node_; }

private:
    int iteration_;
    std::size_t component_;
    std::size_t node_;
};

class InvalidProblem : public Error {
public:
    using Error::Error;
};

class SandwichFailed : public Error {
public:
    using Error::Error;
};

class NonPositiveIntegrand : public Error {
public:
    NonPositiveIntegrand(double t, double value)
        : Error("integrand is negative (" + std::to_string(value) + ") at t = " + std::to_string(t)),
          t_(t), value_(value) {}
    double t() const noexcept { return t_; }
    double value() const noexcept { return value_; }

private:
    double t_;
    double value_;
};

}  // namespace plap
