#include "geoconvex/expr.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <limits>

#include "geoconvex/util.hpp"

namespace geoconvex {

ParseError::ParseError(const std::string& what, std::size_t offset)
    : std::runtime_error(what + " (offset " + std::to_string(offset) + ")"), offset_(offset) {}

EvalError::EvalError(const std::string& what) : std::runtime_error(what) {}

namespace {

double checked(double v, const char* what) {
    if (!std::isfinite(v)) throw EvalError(std::string("overflow to non-finite value in ") + what);
    return v;
}

// x^n by repeated (binary) multiplication; n may be negative.
double int_pow(double base, long long n) {
    if (n < 0) {
        if (base == 0.0) throw EvalError("division by zero: 0 raised to a negative power");
        return 1.0 / int_pow(base, -n);
    }
    double result = 1.0;
    double acc = base;
    while (n > 0) {
        if (n & 1) result *= acc;
        n >>= 1;
        if (n) acc *= acc;
    }
    return result;
}

double pow_checked(double base, double expo) {
    if (std::floor(expo) == expo && std::abs(expo) <= 1e15) {
        return checked(int_pow(base, static_cast<long long>(expo)), "power");
    }
    if (base < 0.0)
        throw EvalError("domain error: negative base with non-integer exponent");
    if (base == 0.0 && expo < 0.0) throw EvalError("division by zero: 0 raised to a negative power");
    return checked(std::pow(base, expo), "power");
}

}  // namespace

struct ExprParser {
    using Node = Expression::Node;
    using Fn = Expression::Fn;

    std::string_view text;
    std::size_t pos = 0;
    std::vector<Node> nodes;
    std::vector<std::string> names;  // first-seen order
    std::map<std::string, int, std::less<>> name_ids;

    static constexpr std::array<std::pair<std::string_view, std::pair<Fn, int>>, 10> kFunctions = {{
        {"sin", {Fn::sin, 1}},
        {"cos", {Fn::cos, 1}},
        {"tan", {Fn::tan, 1}},
        {"exp", {Fn::exp, 1}},
        {"log", {Fn::log, 1}},
        {"sqrt", {Fn::sqrt, 1}},
        {"abs", {Fn::abs, 1}},
        {"min", {Fn::min, 2}},
        {"max", {Fn::max, 2}},
        {"pow", {Fn::pow, 2}},
    }};

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    bool eof() {
        skip_ws();
        return pos >= text.size();
    }
    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }
    bool accept(char c) {
        if (peek() == c) {
            ++pos;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& what) { throw ParseError(what, pos); }

    int add(Node n) {
        nodes.push_back(n);
        return static_cast<int>(nodes.size()) - 1;
    }

    int parse_expression() {
        int lhs = parse_term();
        for (;;) {
            char c = peek();
            if (c != '+' && c != '-') return lhs;
            ++pos;
            int rhs = parse_term();
            Node n;
            n.kind = c == '+' ? Node::Kind::add : Node::Kind::sub;
            n.a = lhs;
            n.b = rhs;
            lhs = add(n);
        }
    }

    int parse_term() {
        int lhs = parse_unary();
        for (;;) {
            char c = peek();
            if (c != '*' && c != '/') return lhs;
            ++pos;
            int rhs = parse_unary();
            Node n;
            n.kind = c == '*' ? Node::Kind::mul : Node::Kind::div;
            n.a = lhs;
            n.b = rhs;
            lhs = add(n);
        }
    }

    int parse_unary() {
        if (peek() == '-') {
            ++pos;
            int inner = parse_unary();
            Node n;
            n.kind = Node::Kind::neg;
            n.a = inner;
            return add(n);
        }
        return parse_power();
    }

    int parse_power() {
        int base = parse_primary();
        if (peek() == '^') {
            ++pos;
            // exponent may carry its own unary minus: 2^-3
            int expo = parse_unary();
            Node n;
            n.kind = Node::Kind::pow;
            n.a = base;
            n.b = expo;
            return add(n);
        }
        return base;
    }

    int parse_primary() {
        char c = peek();
        if (c == '\0') fail("expected an operand");
        if (c == '(') {
            ++pos;
            int inner = parse_expression();
            if (!accept(')')) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
        fail(std::string("unexpected character '") + c + "'");
    }

    int parse_number() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos < text.size() && text[pos] == '.') {
            ++pos;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        }
        if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
            std::size_t mark = pos;
            ++pos;
            if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) ++pos;
            if (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
                while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
            } else {
                pos = mark;  // "2e" -> literal 2 followed by identifier; re-lex below
            }
        }
        double value = 0.0;
        auto res = std::from_chars(text.data() + start, text.data() + pos, value);
        if (res.ec != std::errc() || res.ptr != text.data() + pos) {
            pos = start;
            fail("malformed number");
        }
        Node n;
        n.kind = Node::Kind::literal;
        n.value = value;
        return add(n);
    }

    int parse_ident() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            ++pos;
        std::string_view name = text.substr(start, pos - start);
        if (peek() == '(') {
            const std::pair<Fn, int>* entry = nullptr;
            for (const auto& [fname, val] : kFunctions)
                if (fname == name) entry = &val;
            if (!entry) {
                pos = start;
                fail("unknown function name '" + std::string(name) + "'");
            }
            ++pos;  // '('
            int a = parse_expression();
            int b = -1;
            if (entry->second == 2) {
                if (!accept(',')) fail("expected ',' in two-argument call");
                b = parse_expression();
            }
            if (!accept(')')) fail("expected ')'");
            Node n;
            n.kind = Node::Kind::call;
            n.fn = entry->first;
            n.a = a;
            n.b = b;
            return add(n);
        }
        auto [it, inserted] = name_ids.try_emplace(std::string(name), static_cast<int>(names.size()));
        if (inserted) names.emplace_back(name);
        Node n;
        n.kind = Node::Kind::variable;
        n.var = it->second;
        return add(n);
    }

    Expression finish(int root) {
        Expression e;
        e.nodes_ = std::move(nodes);
        e.root_ = root;
        // declared variable list is sorted; remap indices
        std::vector<std::string> sorted = names;
        std::sort(sorted.begin(), sorted.end());
        std::vector<int> remap(names.size());
        for (std::size_t i = 0; i < names.size(); ++i) {
            remap[i] = static_cast<int>(
                std::lower_bound(sorted.begin(), sorted.end(), names[i]) - sorted.begin());
        }
        for (auto& n : e.nodes_)
            if (n.kind == Node::Kind::variable) n.var = remap[n.var];
        e.vars_ = std::move(sorted);
        return e;
    }
};

Expression Expression::parse(std::string_view text) {
    ExprParser p;
    p.text = text;
    if (p.eof()) throw ParseError("empty expression", 0);
    int root = p.parse_expression();
    if (!p.eof()) p.fail("unexpected trailing input");
    return p.finish(root);
}

double Expression::eval_node(int id, std::span<const double> values) const {
    const Node& n = nodes_[id];
    switch (n.kind) {
        case Node::Kind::literal:
            return n.value;
        case Node::Kind::variable:
            return values[n.var];
        case Node::Kind::neg:
            return -eval_node(n.a, values);
        case Node::Kind::add:
            return checked(eval_node(n.a, values) + eval_node(n.b, values), "addition");
        case Node::Kind::sub:
            return checked(eval_node(n.a, values) - eval_node(n.b, values), "subtraction");
        case Node::Kind::mul:
            return checked(eval_node(n.a, values) * eval_node(n.b, values), "multiplication");
        case Node::Kind::div: {
            double num = eval_node(n.a, values);
            double den = eval_node(n.b, values);
            if (den == 0.0) throw EvalError("division by zero");
            return checked(num / den, "division");
        }
        case Node::Kind::pow:
            return pow_checked(eval_node(n.a, values), eval_node(n.b, values));
        case Node::Kind::call: {
            double a = eval_node(n.a, values);
            switch (n.fn) {
                case Fn::sin: return checked(std::sin(a), "sin");
                case Fn::cos: return checked(std::cos(a), "cos");
                case Fn::tan: return checked(std::tan(a), "tan");
                case Fn::exp: return checked(std::exp(a), "exp");
                case Fn::log:
                    if (a <= 0.0) throw EvalError("domain error: log of a non-positive value");
                    return checked(std::log(a), "log");
                case Fn::sqrt:
                    if (a < 0.0) throw EvalError("domain error: sqrt of a negative value");
                    return std::sqrt(a);
                case Fn::abs: return std::abs(a);
                case Fn::min: return std::min(a, eval_node(n.b, values));
                case Fn::max: return std::max(a, eval_node(n.b, values));
                case Fn::pow: return pow_checked(a, eval_node(n.b, values));
            }
            throw EvalError("corrupt expression node");
        }
    }
    throw EvalError("corrupt expression node");
}

double Expression::eval(std::span<const double> values) const {
    if (values.size() != vars_.size())
        throw EvalError("expected " + std::to_string(vars_.size()) + " values, got " +
                        std::to_string(values.size()));
    return eval_node(root_, values);
}

double Expression::eval(const Binding& binding) const {
    std::vector<double> values(vars_.size());
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        auto it = binding.find(vars_[i]);
        if (it == binding.end()) throw EvalError("unbound variable '" + vars_[i] + "'");
        values[i] = it->second;
    }
    return eval_node(root_, values);
}

void Expression::print_node(int id, std::string& out) const {
    const Node& n = nodes_[id];
    switch (n.kind) {
        case Node::Kind::literal:
            if (std::signbit(n.value)) {
                // negative literals only arise from synthesized trees; keep the
                // printed form reparsable to a print-stable tree
                out += "(-(";
                out += format_double(-n.value);
                out += "))";
            } else {
                out += format_double(n.value);
            }
            return;
        case Node::Kind::variable:
            out += vars_[n.var];
            return;
        case Node::Kind::neg:
            out += "(-";
            print_node(n.a, out);
            out += ')';
            return;
        case Node::Kind::add:
        case Node::Kind::sub:
        case Node::Kind::mul:
        case Node::Kind::div:
        case Node::Kind::pow: {
            char op = n.kind == Node::Kind::add   ? '+'
                      : n.kind == Node::Kind::sub ? '-'
                      : n.kind == Node::Kind::mul ? '*'
                      : n.kind == Node::Kind::div ? '/'
                                                  : '^';
            out += '(';
            print_node(n.a, out);
            out += op;
            print_node(n.b, out);
            out += ')';
            return;
        }
        case Node::Kind::call: {
            static constexpr std::array<const char*, 10> kNames = {
                "sin", "cos", "tan", "exp", "log", "sqrt", "abs", "min", "max", "pow"};
            out += kNames[static_cast<int>(n.fn)];
            out += '(';
            print_node(n.a, out);
            if (n.b >= 0) {
                out += ',';
                print_node(n.b, out);
            }
            out += ')';
            return;
        }
    }
}

std::string Expression::print() const {
    std::string out;
    print_node(root_, out);
    return out;
}

bool Expression::same_node(int id, const Expression& other, int other_id) const {
    const Node& a = nodes_[id];
    const Node& b = other.nodes_[other_id];
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case Node::Kind::literal: {
            std::uint64_t ba, bb;
            std::memcpy(&ba, &a.value, sizeof ba);
            std::memcpy(&bb, &b.value, sizeof bb);
            return ba == bb;
        }
        case Node::Kind::variable:
            return vars_[a.var] == other.vars_[b.var];
        case Node::Kind::neg:
            return same_node(a.a, other, b.a);
        case Node::Kind::call:
            if (a.fn != b.fn) return false;
            if (!same_node(a.a, other, b.a)) return false;
            if ((a.b >= 0) != (b.b >= 0)) return false;
            return a.b < 0 || same_node(a.b, other, b.b);
        default:
            return same_node(a.a, other, b.a) && same_node(a.b, other, b.b);
    }
}

bool Expression::same_tree(const Expression& other) const {
    return same_node(root_, other, other.root_);
}

int Expression::clone_into(std::vector<Node>& nodes, std::vector<std::string>& names,
                           std::map<std::string, int, std::less<>>& ids,
                           const std::map<std::string, Expression>* repl, int id) const {
    const Node& n = nodes_[id];
    if (n.kind == Node::Kind::variable) {
        const std::string& name = vars_[n.var];
        if (repl) {
            auto it = repl->find(name);
            if (it != repl->end())
                return it->second.clone_into(nodes, names, ids, nullptr, it->second.root_);
        }
        auto [it, inserted] = ids.try_emplace(name, static_cast<int>(names.size()));
        if (inserted) names.push_back(name);
        Node v;
        v.kind = Node::Kind::variable;
        v.var = it->second;
        nodes.push_back(v);
        return static_cast<int>(nodes.size()) - 1;
    }
    Node copy = n;
    if (n.a >= 0) copy.a = clone_into(nodes, names, ids, repl, n.a);
    if (n.b >= 0) copy.b = clone_into(nodes, names, ids, repl, n.b);
    nodes.push_back(copy);
    return static_cast<int>(nodes.size()) - 1;
}

Expression Expression::substitute(const std::map<std::string, Expression>& repl) const {
    ExprParser builder;
    int root = clone_into(builder.nodes, builder.names, builder.name_ids, &repl, root_);
    return builder.finish(root);
}

double derivative_fd(const Expression& e, std::string_view var, const Binding& at, double step) {
    auto it = at.find(var);
    if (it == at.end()) throw EvalError("binding does not cover variable '" + std::string(var) + "'");
    Binding shifted = at;
    auto slot = shifted.find(var);
    slot->second = it->second + step;
    double hi = e.eval(shifted);
    slot->second = it->second - step;
    double lo = e.eval(shifted);
    return (hi - lo) / (2.0 * step);
}

}  // namespace geoconvex
