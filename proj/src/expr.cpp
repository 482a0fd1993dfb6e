#include "plap/expr.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>

#include "plap/error.hpp"

namespace plap::expr {

namespace {

struct FunctionInfo {
    std::string_view name;
    Function function;
    std::size_t arity;
};

constexpr std::array<FunctionInfo, 6> kFunctions{{
    {"exp", Function::Exp, 1},
    {"log", Function::Log, 1},
    {"sqrt", Function::Sqrt, 1},
    {"abs", Function::Abs, 1},
    {"min", Function::Min, 2},
    {"max", Function::Max, 2},
}};

const FunctionInfo* find_function(std::string_view name) {
    for (const auto& info : kFunctions)
        if (info.name == name) return &info;
    return nullptr;
}

NodePtr make(auto&& payload) {
    return std::make_shared<const Node>(Node{std::forward<decltype(payload)>(payload)});
}

class Parser {
public:
    Parser(std::string_view src, const std::vector<std::string>& vars) : src_(src), vars_(vars) {}

    NodePtr parse_all() {
        NodePtr e = expression();
        skip_ws();
        if (pos_ != src_.size()) {
            if (src_[pos_] == ')') throw SyntaxError("unbalanced ')'", pos_);
            throw SyntaxError(std::string("unexpected '") + src_[pos_] + "'", pos_);
        }
        return e;
    }

private:
    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expression() {
        NodePtr lhs = term();
        for (;;) {
            if (accept('+'))
                lhs = make(Binary{BinaryOp::Add, lhs, term()});
            else if (accept('-'))
                lhs = make(Binary{BinaryOp::Sub, lhs, term()});
            else
                return lhs;
        }
    }

    NodePtr term() {
        NodePtr lhs = factor();
        for (;;) {
            if (accept('*'))
                lhs = make(Binary{BinaryOp::Mul, lhs, factor()});
            else if (accept('/'))
                lhs = make(Binary{BinaryOp::Div, lhs, factor()});
            else
                return lhs;
        }
    }

    NodePtr factor() {
        NodePtr base = unary();
        if (accept('^')) return make(Binary{BinaryOp::Pow, base, factor()});
        return base;
    }

    NodePtr unary() {
        if (accept('-')) return make(Negate{unary()});
        return primary();
    }

    NodePtr primary() {
        skip_ws();
        if (pos_ >= src_.size()) throw SyntaxError("unexpected end of input", pos_);
        const char c = src_[pos_];
        if (c == '(') {
            const std::size_t open = pos_++;
            NodePtr inner = expression();
            if (!accept(')')) {
                skip_ws();
                throw SyntaxError(pos_ >= src_.size() ? "unbalanced '(' opened at offset " +
                                                            std::to_string(open)
                                                      : "expected ')'",
                                  pos_);
            }
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return name();
        throw SyntaxError(std::string("unexpected '") + c + "'", pos_);
    }

    NodePtr number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            std::size_t n = 0;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                ++pos_;
                ++n;
            }
            return n;
        };
        std::size_t mantissa = digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            mantissa += digits();
        }
        if (mantissa == 0) throw SyntaxError("malformed number", start);
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            const std::size_t save = pos_++;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (digits() == 0) throw SyntaxError("malformed exponent", save);
        }
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, value);
        if (ec != std::errc() || ptr != src_.data() + pos_)
            throw SyntaxError("malformed number", start);
        return make(Number{value});
    }

    NodePtr name() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        const std::string id(src_.substr(start, pos_ - start));

        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == '(') {
            const FunctionInfo* info = find_function(id);
            if (!info) throw UnknownIdentifier(id, start);
            ++pos_;
            std::vector<NodePtr> args;
            args.push_back(expression());
            while (accept(',')) args.push_back(expression());
            if (!accept(')')) {
                skip_ws();
                throw SyntaxError("expected ')' closing call to " + id, pos_);
            }
            if (args.size() != info->arity)
                throw ArityError(id, info->arity, args.size(), start);
            return make(Call{info->function, std::move(args)});
        }

        const auto it = std::find(vars_.begin(), vars_.end(), id);
        if (it == vars_.end()) throw UnknownIdentifier(id, start);
        return make(Variable{static_cast<std::size_t>(it - vars_.begin())});
    }

    std::string_view src_;
    const std::vector<std::string>& vars_;
    std::size_t pos_ = 0;
};

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

char op_symbol(BinaryOp op) {
    switch (op) {
        case BinaryOp::Add: return '+';
        case BinaryOp::Sub: return '-';
        case BinaryOp::Mul: return '*';
        case BinaryOp::Div: return '/';
        case BinaryOp::Pow: return '^';
    }
    return '?';
}

std::string print(const Node& node, const std::vector<std::string>& vars) {
    return std::visit(
        [&](const auto& n) -> std::string {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Number>) {
                return format_number(n.value);
            } else if constexpr (std::is_same_v<T, Variable>) {
                return vars[n.index];
            } else if constexpr (std::is_same_v<T, Negate>) {
                return "(-" + print(*n.operand, vars) + ")";
            } else if constexpr (std::is_same_v<T, Binary>) {
                return "(" + print(*n.lhs, vars) + op_symbol(n.op) + print(*n.rhs, vars) + ")";
            } else {
                std::string s(function_name(n.function));
                s += '(';
                for (std::size_t i = 0; i < n.args.size(); ++i) {
                    if (i) s += ',';
                    s += print(*n.args[i], vars);
                }
                return s + ')';
            }
        },
        node.data);
}

class Evaluator {
public:
    Evaluator(std::span<const double> values, const std::vector<std::string>& vars)
        : values_(values), vars_(vars) {}

    double operator()(const Node& node) const {
        return std::visit([&](const auto& n) { return eval(n, node); }, node.data);
    }

private:
    [[noreturn]] void fail(const char* reason, const Node& node) const {
        throw DomainError(reason, print(node, vars_));
    }

    double eval(const Number& n, const Node&) const { return n.value; }
    double eval(const Variable& v, const Node&) const { return values_[v.index]; }
    double eval(const Negate& n, const Node&) const { return -(*this)(*n.operand); }

    double eval(const Binary& b, const Node& node) const {
        const double x = (*this)(*b.lhs);
        const double y = (*this)(*b.rhs);
        switch (b.op) {
            case BinaryOp::Add: return x + y;
            case BinaryOp::Sub: return x - y;
            case BinaryOp::Mul: return x * y;
            case BinaryOp::Div:
                if (y == 0.0) fail("division by zero", node);
                return x / y;
            case BinaryOp::Pow:
                if (x == 0.0 && y < 0.0) fail("zero raised to a negative power", node);
                if (x < 0.0 && y != std::trunc(y))
                    fail("negative base raised to a non-integer power", node);
                return std::pow(x, y);
        }
        return 0.0;
    }

    double eval(const Call& c, const Node& node) const {
        const double x = (*this)(*c.args[0]);
        switch (c.function) {
            case Function::Exp: return std::exp(x);
            case Function::Log:
                if (x <= 0.0) fail("logarithm of a nonpositive number", node);
                return std::log(x);
            case Function::Sqrt:
                if (x < 0.0) fail("square root of a negative number", node);
                return std::sqrt(x);
            case Function::Abs: return std::abs(x);
            case Function::Min: return std::min(x, (*this)(*c.args[1]));
            case Function::Max: return std::max(x, (*this)(*c.args[1]));
        }
        return 0.0;
    }

    std::span<const double> values_;
    const std::vector<std::string>& vars_;
};

}  // namespace

std::string_view function_name(Function f) noexcept {
    for (const auto& info : kFunctions)
        if (info.function == f) return info.name;
    return "?";
}

Expression::Expression(NodePtr root, std::vector<std::string> variables, std::string source)
    : root_(std::move(root)),
      variables_(std::make_shared<const std::vector<std::string>>(std::move(variables))),
      source_(std::move(source)) {}

double Expression::operator()(std::span<const double> values) const {
    if (values.size() < variables_->size())
        throw InvalidArgument("expression needs " + std::to_string(variables_->size()) +
                              " values, got " + std::to_string(values.size()));
    return Evaluator(values, *variables_)(*root_);
}

double Expression::evaluate(const std::map<std::string, double>& bindings) const {
    std::vector<double> values;
    values.reserve(variables_->size());
    for (const auto& name : *variables_) {
        const auto it = bindings.find(name);
        if (it == bindings.end()) throw InvalidArgument("no binding for variable '" + name + "'");
        values.push_back(it->second);
    }
    return (*this)(values);
}

std::string Expression::to_string() const { return print(*root_, *variables_); }

bool Expression::is_literal_zero() const noexcept {
    const auto* n = std::get_if<Number>(&root_->data);
    return n && n->value == 0.0;
}

Expression parse(std::string_view source, std::vector<std::string> variables) {
    std::set<std::string> seen;
    for (const auto& v : variables)
        if (!seen.insert(v).second) throw InvalidArgument("duplicate variable name '" + v + "'");
    if (source.find_first_not_of(" \t\r\n") == std::string_view::npos)
        throw SyntaxError("empty expression", 0);
    NodePtr root = Parser(source, variables).parse_all();
    return Expression(std::move(root), std::move(variables), std::string(source));
}

double eval(const Expression& expression, const std::map<std::string, double>& bindings) {
    return expression.evaluate(bindings);
}

bool structurally_equal(const Node& a, const Node& b) noexcept {
    if (a.data.index() != b.data.index()) return false;
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const T& y = std::get<T>(b.data);
            if constexpr (std::is_same_v<T, Number>) {
                return x.value == y.value;
            } else if constexpr (std::is_same_v<T, Variable>) {
                return x.index == y.index;
            } else if constexpr (std::is_same_v<T, Negate>) {
                return structurally_equal(*x.operand, *y.operand);
            } else if constexpr (std::is_same_v<T, Binary>) {
                return x.op == y.op && structurally_equal(*x.lhs, *y.lhs) &&
                       structurally_equal(*x.rhs, *y.rhs);
            } else {
                if (x.function != y.function || x.args.size() != y.args.size()) return false;
                for (std::size_t i = 0; i < x.args.size(); ++i)
                    if (!structurally_equal(*x.args[i], *y.args[i])) return false;
                return true;
            }
        },
        a.data);
}

std::vector<std::string> state_variables(std::size_t m) {
    std::vector<std::string> names;
    names.reserve(m);
    for (std::size_t i = 1; i <= m; ++i) names.push_back("u" + std::to_string(i));
    return names;
}

// ---------------------------------------------------------------------------

namespace {

class ValidationRun {
public:
    ValidationRun(std::span<const Expression> fs, ValidationReport& report)
        : fs_(fs), report_(report) {}

    double value(std::size_t j, const std::vector<double>& point) {
        const double v = fs_[j](point);
        if (v < -kOriginTolerance &&
            report_.positivity_violations.size() < kMaxReportedViolations)
            report_.positivity_violations.push_back({j, point, v});
        return v;
    }

    void compare(std::size_t j, std::size_t coordinate, const std::vector<double>& lo, double flo,
                 const std::vector<double>& hi, double fhi) {
        if (fhi < flo - 1e-12 * (1.0 + std::abs(flo)) &&
            report_.monotonicity_violations.size() < kMaxReportedViolations)
            report_.monotonicity_violations.push_back({j, coordinate, lo, hi, flo, fhi});
    }

private:
    std::span<const Expression> fs_;
    ValidationReport& report_;
};

}  // namespace

ValidationReport validate_nonlinearity(std::span<const Expression> nonlinearities, std::size_t m,
                                       double domain_cap, std::size_t samples_per_axis) {
    if (m == 0) throw InvalidArgument("m must be positive");
    if (!(domain_cap > 0.0)) throw InvalidArgument("domain_cap must be positive");
    if (samples_per_axis < 2) throw InvalidArgument("samples_per_axis must be at least 2");
    for (const auto& f : nonlinearities)
        if (f.variables().size() > m)
            throw InvalidArgument("nonlinearity '" + f.source() + "' uses more than m variables");

    ValidationReport report;
    ValidationRun run(nonlinearities, report);

    const std::vector<double> origin(m, 0.0);
    for (const auto& f : nonlinearities) {
        const double v = f(origin);
        report.origin_values.push_back(v);
        if (!(std::abs(v) <= kOriginTolerance)) report.f_zero_at_origin = false;
    }

    const std::size_t n = samples_per_axis;
    auto axis = [&](std::size_t i) { return domain_cap * static_cast<double>(i) / (n - 1); };

    if (m <= 3) {
        std::size_t total = 1;
        for (std::size_t d = 0; d < m; ++d) total *= n;
        report.samples_used = total;

        auto decode = [&](std::size_t flat) {
            std::vector<double> point(m);
            for (std::size_t d = 0; d < m; ++d) {
                point[d] = axis(flat % n);
                flat /= n;
            }
            return point;
        };
        for (std::size_t j = 0; j < nonlinearities.size(); ++j) {
            std::vector<double> values(total);
            for (std::size_t flat = 0; flat < total; ++flat) values[flat] = run.value(j, decode(flat));
            std::size_t stride = 1;
            for (std::size_t d = 0; d < m; ++d) {
                for (std::size_t flat = 0; flat < total; ++flat) {
                    if ((flat / stride) % n == n - 1) continue;
                    run.compare(j, d, decode(flat), values[flat], decode(flat + stride),
                                values[flat + stride]);
                }
                stride *= n;
            }
        }
    } else {
        const std::size_t pairs = n * n * n;
        report.samples_used = pairs;
        std::mt19937_64 rng(0x5eedULL);
        std::uniform_real_distribution<double> coord(0.0, domain_cap);
        std::uniform_int_distribution<std::size_t> pick(0, m - 1);
        for (std::size_t s = 0; s < pairs; ++s) {
            std::vector<double> lo(m);
            for (auto& x : lo) x = coord(rng);
            const std::size_t d = pick(rng);
            std::vector<double> hi = lo;
            hi[d] = coord(rng);
            if (hi[d] < lo[d]) std::swap(hi[d], lo[d]);
            for (std::size_t j = 0; j < nonlinearities.size(); ++j) {
                const double flo = run.value(j, lo);
                const double fhi = run.value(j, hi);
                run.compare(j, d, lo, flo, hi, fhi);
            }
        }
    }
    return report;
}

}  // namespace plap::expr
