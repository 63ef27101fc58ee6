#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace geoconvex {

/// Syntax error produced by Expression::parse; offset() is the byte offset
/// into the input where parsing failed.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t offset);
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Evaluation failure: unbound variable, domain error (log/sqrt of a
/// negative, division by zero, fractional power of a negative base) or
/// overflow to a non-finite value.
class EvalError : public std::runtime_error {
public:
    explicit EvalError(const std::string& what);
};

/// Variable name -> value map. Every declared variable of the target
/// expression must be present; extra entries are ignored.
using Binding = std::map<std::string, double, std::less<>>;

struct ExprParser;

/// Immutable arithmetic expression over named real variables.
///
/// Grammar: literals, variables, binary + - * / ^ (^ right-associative and
/// binding tighter than unary minus), unary minus, and calls to
/// sin, cos, tan, exp, log, sqrt, abs, min, max, pow.
///
/// Instances are immutable after parse; evaluation is reentrant and safe to
/// call concurrently.
class Expression {
public:
    static Expression parse(std::string_view text);

    /// Fast path: values indexed like variables().
    double eval(std::span<const double> values) const;
    /// Slow path: validates that the binding covers every variable.
    double eval(const Binding& binding) const;

    /// Declared variables, sorted, unique.
    const std::vector<std::string>& variables() const noexcept { return vars_; }

    /// Canonical form: fully parenthesized infix, '.' decimals, lowercase
    /// function names. parse(print()) reproduces the same tree.
    std::string print() const;

    bool same_tree(const Expression& other) const;

    /// Replaces variables by whole subexpressions (used to synthesize
    /// compositions like g(f(x)) without a separate evaluator type).
    Expression substitute(const std::map<std::string, Expression>& repl) const;

private:
    friend struct ExprParser;

    enum class Fn : std::uint8_t { sin, cos, tan, exp, log, sqrt, abs, min, max, pow };

    struct Node {
        enum class Kind : std::uint8_t { literal, variable, neg, add, sub, mul, div, pow, call };
        Kind kind = Kind::literal;
        double value = 0.0;  // literal payload
        int var = -1;        // index into vars_
        int a = -1, b = -1;  // child node ids
        Fn fn = Fn::sin;
    };

    Expression() = default;

    double eval_node(int id, std::span<const double> values) const;
    void print_node(int id, std::string& out) const;
    bool same_node(int id, const Expression& other, int other_id) const;
    int clone_into(std::vector<Node>& nodes, std::vector<std::string>& names,
                   std::map<std::string, int, std::less<>>& ids,
                   const std::map<std::string, Expression>* repl, int id) const;

    std::vector<Node> nodes_;
    std::vector<std::string> vars_;
    int root_ = -1;
};

/// Central difference (e(x+h) - e(x-h)) / (2h) along `var`.
double derivative_fd(const Expression& e, std::string_view var, const Binding& at,
                     double step = 1e-5);

}  // namespace geoconvex
