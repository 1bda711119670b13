#pragma once

// A small expression language for scalar fields: coordinates x1..xn,
// named parameters, + - * / ^ with the usual precedence (unary minus
// binds tighter than ^, ^ is right-associative), and the functions
// sin, cos, exp, log, sqrt, pow. Evaluation is templated over the
// scalar type so the same AST runs on plain reals and on jets.

#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "jet.hpp"

namespace nj {

// Parameter bindings (e.g. the Riccati coefficients a0, a1, a2, b1 at a
// frozen instant).
using ParamEnv = std::map<std::string, double>;

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    enum class Kind { Number, Var, Param, Neg, Binary, Call };

    Kind kind;
    double number = 0.0;        // Number
    std::size_t var_index = 0;  // Var (0-based)
    std::string name;           // Param / Call
    char op = 0;                // Binary: + - * / ^
    std::vector<ExprPtr> args;

    static ExprPtr make_number(double v) {
        auto e = std::make_shared<Expr>();
        e->kind = Kind::Number;
        e->number = v;
        return e;
    }
    static ExprPtr make_var(std::size_t i) {
        auto e = std::make_shared<Expr>();
        e->kind = Kind::Var;
        e->var_index = i;
        return e;
    }
    static ExprPtr make_param(std::string n) {
        auto e = std::make_shared<Expr>();
        e->kind = Kind::Param;
        e->name = std::move(n);
        return e;
    }
    static ExprPtr make_neg(ExprPtr a) {
        auto e = std::make_shared<Expr>();
        e->kind = Kind::Neg;
        e->args = {std::move(a)};
        return e;
    }
    static ExprPtr make_binary(char op, ExprPtr a, ExprPtr b) {
        auto e = std::make_shared<Expr>();
        e->kind = Kind::Binary;
        e->op = op;
        e->args = {std::move(a), std::move(b)};
        return e;
    }
    static ExprPtr make_call(std::string fn, std::vector<ExprPtr> as) {
        auto e = std::make_shared<Expr>();
        e->kind = Kind::Call;
        e->name = std::move(fn);
        e->args = std::move(as);
        return e;
    }
};

namespace detail {

class Parser {
public:
    Parser(std::string_view text, std::size_t n, const std::set<std::string>& params)
        : s_(text), n_(n), params_(params) {}

    ExprPtr parse() {
        if (s_.empty()) throw parse_error("empty expression", 0);
        ExprPtr e = sum();
        skip_ws();
        if (pos_ != s_.size())
            throw parse_error("unexpected trailing input", pos_);
        return e;
    }

private:
    ExprPtr sum() {
        ExprPtr e = term();
        for (;;) {
            skip_ws();
            if (accept('+')) e = Expr::make_binary('+', e, term());
            else if (accept('-')) e = Expr::make_binary('-', e, term());
            else return e;
        }
    }

    ExprPtr term() {
        ExprPtr e = power();
        for (;;) {
            skip_ws();
            if (accept('*')) e = Expr::make_binary('*', e, power());
            else if (accept('/')) e = Expr::make_binary('/', e, power());
            else return e;
        }
    }

    // right-associative
    ExprPtr power() {
        ExprPtr base = factor();
        skip_ws();
        if (accept('^')) return Expr::make_binary('^', base, power());
        return base;
    }

    ExprPtr factor() {
        skip_ws();
        if (accept('-')) return Expr::make_neg(factor());
        return primary();
    }

    ExprPtr primary() {
        skip_ws();
        if (pos_ >= s_.size()) throw parse_error("unexpected end of input", pos_);
        char c = s_[pos_];
        if (c == '(') {
            std::size_t open = pos_;
            ++pos_;
            ExprPtr e = sum();
            skip_ws();
            if (!accept(')'))
                throw parse_error("unbalanced parenthesis", open + 1 > s_.size() ? open : pos_);
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        throw parse_error(std::string("unexpected character '") + c + "'", pos_);
    }

    ExprPtr number() {
        const char* begin = s_.data() + pos_;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) throw parse_error("malformed number", pos_);
        pos_ += static_cast<std::size_t>(end - begin);
        return Expr::make_number(v);
    }

    ExprPtr identifier() {
        std::size_t start = pos_;
        while (pos_ < s_.size() &&
               (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
            ++pos_;
        std::string name(s_.substr(start, pos_ - start));
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == '(') {
            static const std::map<std::string, std::size_t> arity = {
                {"sin", 1}, {"cos", 1}, {"exp", 1}, {"log", 1}, {"sqrt", 1}, {"pow", 2}};
            auto it = arity.find(name);
            if (it == arity.end())
                throw parse_error("unknown function '" + name + "'", start);
            ++pos_; // '('
            std::vector<ExprPtr> args;
            args.push_back(sum());
            skip_ws();
            while (accept(',')) {
                args.push_back(sum());
                skip_ws();
            }
            if (!accept(')')) throw parse_error("unbalanced parenthesis", pos_);
            if (args.size() != it->second)
                throw parse_error("function '" + name + "' expects " +
                                      std::to_string(it->second) + " argument(s)",
                                  start);
            return Expr::make_call(name, std::move(args));
        }
        // coordinate x1..xn
        if (name.size() >= 2 && name[0] == 'x') {
            bool digits = true;
            for (std::size_t i = 1; i < name.size(); ++i)
                if (!std::isdigit(static_cast<unsigned char>(name[i]))) digits = false;
            if (digits) {
                std::size_t k = std::stoul(name.substr(1));
                if (k < 1 || k > n_)
                    throw parse_error("coordinate '" + name + "' out of range for n = " +
                                          std::to_string(n_),
                                      start);
                return Expr::make_var(k - 1);
            }
        }
        if (params_.count(name)) return Expr::make_param(name);
        throw parse_error("unknown identifier '" + name + "'", start);
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool accept(char c) {
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    std::string_view s_;
    std::size_t pos_ = 0;
    std::size_t n_;
    const std::set<std::string>& params_;
};

inline bool integral_exponent(const Expr& e, long& k) {
    if (e.kind != Expr::Kind::Number) return false;
    double v = e.number;
    if (v != std::floor(v) || std::abs(v) > 1e9) return false;
    k = static_cast<long>(v);
    return true;
}

} // namespace detail

inline ExprPtr parse(std::string_view text, std::size_t n,
                     const std::set<std::string>& params = {}) {
    return detail::Parser(text, n, params).parse();
}

template <class T>
T eval(const Expr& e, std::span<const T> point, const ParamEnv& env) {
    switch (e.kind) {
    case Expr::Kind::Number:
        return make_scalar_like(e.number, point[0]);
    case Expr::Kind::Var:
        return point[e.var_index];
    case Expr::Kind::Param: {
        auto it = env.find(e.name);
        if (it == env.end()) throw invalid_input("unbound parameter '" + e.name + "'");
        return make_scalar_like(it->second, point[0]);
    }
    case Expr::Kind::Neg:
        return -eval(*e.args[0], point, env);
    case Expr::Kind::Binary: {
        if (e.op == '^') {
            using std::exp;
            using std::log;
            long k;
            if (detail::integral_exponent(*e.args[1], k))
                return pow_int(eval(*e.args[0], point, env), k);
            // real exponent: route through exp/log
            T base = eval(*e.args[0], point, env);
            if (scalar_value(base) <= 0.0)
                throw domain_error("^: non-integral exponent needs a positive base");
            return exp(eval(*e.args[1], point, env) * log(base));
        }
        T a = eval(*e.args[0], point, env);
        T b = eval(*e.args[1], point, env);
        switch (e.op) {
        case '+': return a + b;
        case '-': return a - b;
        case '*': return a * b;
        case '/': {
            if (std::abs(scalar_value(b)) < 1e-300)
                throw domain_error("div: denominator magnitude below 1e-300");
            return a / b;
        }
        default: throw error("corrupt AST");
        }
    }
    case Expr::Kind::Call: {
        using std::cos;
        using std::exp;
        using std::log;
        using std::sin;
        using std::sqrt;
        if (e.name == "pow") {
            long k;
            if (detail::integral_exponent(*e.args[1], k))
                return pow_int(eval(*e.args[0], point, env), k);
            T base = eval(*e.args[0], point, env);
            if (scalar_value(base) <= 0.0)
                throw domain_error("pow: non-integral exponent needs a positive base");
            return exp(eval(*e.args[1], point, env) * log(base));
        }
        T a = eval(*e.args[0], point, env);
        if ((e.name == "log" && scalar_value(a) <= 0.0) ||
            (e.name == "sqrt" && scalar_value(a) < 0.0))
            throw domain_error(e.name + ": argument outside the real domain");
        if (e.name == "sin") return sin(a);
        if (e.name == "cos") return cos(a);
        if (e.name == "exp") return exp(a);
        if (e.name == "log") return log(a);
        if (e.name == "sqrt") return sqrt(a);
        throw error("corrupt AST");
    }
    }
    throw error("corrupt AST");
}

inline double eval_real(const ExprPtr& e, std::span<const double> point,
                        const ParamEnv& env = {}) {
    return eval<double>(*e, point, env);
}

namespace detail {

inline int precedence(const Expr& e) {
    switch (e.kind) {
    case Expr::Kind::Binary:
        if (e.op == '+' || e.op == '-') return 1;
        if (e.op == '*' || e.op == '/') return 2;
        return 3; // ^
    case Expr::Kind::Neg: return 4;
    default: return 5;
    }
}

inline void print(const Expr& e, std::string& out, int parent_prec, bool right_side) {
    const int prec = precedence(e);
    const bool need_parens =
        prec < parent_prec ||
        (prec == parent_prec && right_side && prec != 3) || // left-assoc: parenthesize rhs
        (prec == parent_prec && !right_side && prec == 3);  // ^ is right-assoc
    if (need_parens) out += '(';
    switch (e.kind) {
    case Expr::Kind::Number: {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", e.number);
        out += buf;
        break;
    }
    case Expr::Kind::Var:
        out += 'x';
        out += std::to_string(e.var_index + 1);
        break;
    case Expr::Kind::Param:
        out += e.name;
        break;
    case Expr::Kind::Neg:
        out += '-';
        print(*e.args[0], out, prec, false);
        break;
    case Expr::Kind::Binary:
        print(*e.args[0], out, prec, false);
        out += e.op;
        print(*e.args[1], out, prec, true);
        break;
    case Expr::Kind::Call:
        out += e.name;
        out += '(';
        for (std::size_t i = 0; i < e.args.size(); ++i) {
            if (i) out += ", ";
            print(*e.args[i], out, 0, false);
        }
        out += ')';
        break;
    }
    if (need_parens) out += ')';
}

} // namespace detail

inline std::string to_string(const ExprPtr& e) {
    std::string out;
    detail::print(*e, out, 0, false);
    return out;
}

} // namespace nj
