#include "oscbound/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "oscbound/errors.hpp"

namespace oscbound {

namespace {

bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

bool jet_is_constant(const Jet& j) {
    for (int m = 1; m <= j.order(); ++m)
        if (j.coeff(m) != 0.0) return false;
    return true;
}

}  // namespace

class ExprParser {
public:
    explicit ExprParser(std::string_view text) : text_(text) {}

    Expr run() {
        if (text_.empty()) throw ParseError("empty expression", 0);
        Expr e;
        skip_ws();
        e.root_ = parse_sum(e);
        skip_ws();
        if (pos_ != text_.size())
            throw ParseError("unexpected trailing input", pos_);
        int arity = 0;
        for (const auto& n : e.nodes_)
            if (n.op == ExprOp::Var) arity = std::max(arity, n.var + 1);
        e.arity_ = arity;
        return e;
    }

private:
    int add(Expr& e, ExprNode n) {
        e.nodes_.push_back(n);
        return static_cast<int>(e.nodes_.size()) - 1;
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    int parse_sum(Expr& e) {
        int lhs = parse_unary(e);
        for (;;) {
            if (eat('+'))
                lhs = add(e, {ExprOp::Add, lhs, parse_unary(e)});
            else if (eat('-'))
                lhs = add(e, {ExprOp::Sub, lhs, parse_unary(e)});
            else
                return lhs;
        }
    }

    // unary minus sits between the additive and multiplicative levels, so
    // -1/x means -(1/x) while -x^2 still means -(x^2)
    int parse_unary(Expr& e) {
        if (eat('-')) return add(e, {ExprOp::Neg, parse_unary(e)});
        return parse_product(e);
    }

    int parse_product(Expr& e) {
        int lhs = parse_power(e);
        for (;;) {
            if (eat('*'))
                lhs = add(e, {ExprOp::Mul, lhs, parse_power(e)});
            else if (eat('/'))
                lhs = add(e, {ExprOp::Div, lhs, parse_power(e)});
            else
                return lhs;
        }
    }

    int parse_power(Expr& e) {
        int base = parse_atom(e);
        if (eat('^')) {
            // right-associative, and the exponent may carry a sign: x^-2
            int exponent = parse_exponent(e);
            return add(e, {ExprOp::Pow, base, exponent});
        }
        return base;
    }

    int parse_exponent(Expr& e) {
        if (eat('-')) return add(e, {ExprOp::Neg, parse_exponent(e)});
        return parse_power(e);
    }

    int parse_atom(Expr& e) {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
        char c = text_[pos_];

        if (c == '(') {
            ++pos_;
            int inner = parse_sum(e);
            if (!eat(')')) throw ParseError("expected ')'", pos_);
            return inner;
        }

        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number(e);

        if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident(e);

        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    int parse_number(Expr& e) {
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t mark = pos_;
            ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            } else {
                pos_ = mark;  // "2e" is the literal 2 followed by junk
            }
        }
        if (pos_ == start || (pos_ == start + 1 && text_[start] == '.'))
            throw ParseError("malformed number", start);
        double v = std::strtod(std::string(text_.substr(start, pos_ - start)).c_str(), nullptr);
        ExprNode n{ExprOp::Literal};
        n.value = v;
        return add(e, n);
    }

    int parse_ident(Expr& e) {
        std::size_t start = pos_;
        while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
        std::string_view name = text_.substr(start, pos_ - start);

        if (name == "x" || name == "x1" || name == "x2" || name == "x3") {
            ExprNode n{ExprOp::Var};
            n.var = (name == "x" || name == "x1") ? 0 : (name == "x2" ? 1 : 2);
            if (peek() == '(')
                throw ParseError("arity mismatch: variable used as function", start);
            return add(e, n);
        }

        ExprOp op;
        if (name == "exp")
            op = ExprOp::Exp;
        else if (name == "log")
            op = ExprOp::Log;
        else if (name == "sin")
            op = ExprOp::Sin;
        else if (name == "cos")
            op = ExprOp::Cos;
        else if (name == "sqrt")
            op = ExprOp::Sqrt;
        else if (name == "abs")
            op = ExprOp::Abs;
        else
            throw ParseError("unknown identifier '" + std::string(name) + "'", start);

        if (!eat('(')) throw ParseError("arity mismatch: '" + std::string(name) + "' expects one argument", pos_);
        if (peek() == ')') throw ParseError("arity mismatch: '" + std::string(name) + "' expects one argument", pos_);
        int arg = parse_sum(e);
        if (eat(',')) throw ParseError("arity mismatch: '" + std::string(name) + "' expects one argument", pos_);
        if (!eat(')')) throw ParseError("expected ')'", pos_);
        return add(e, {op, arg});
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

Expr Expr::parse(std::string_view text) { return ExprParser(text).run(); }

namespace {

int precedence(ExprOp op) {
    switch (op) {
        case ExprOp::Add:
        case ExprOp::Sub: return 1;
        case ExprOp::Neg: return 2;
        case ExprOp::Mul:
        case ExprOp::Div: return 3;
        case ExprOp::Pow: return 4;
        default: return 5;  // atoms and function calls never need parens
    }
}

const char* func_name(ExprOp op) {
    switch (op) {
        case ExprOp::Exp: return "exp";
        case ExprOp::Log: return "log";
        case ExprOp::Sin: return "sin";
        case ExprOp::Cos: return "cos";
        case ExprOp::Sqrt: return "sqrt";
        case ExprOp::Abs: return "abs";
        default: return "?";
    }
}

void format_double(std::ostream& os, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
}

void print_node(std::ostream& os, const std::vector<ExprNode>& nodes, int idx, int parent_prec,
                bool is_right_child) {
    const ExprNode& n = nodes[idx];
    int prec = precedence(n.op);

    // A literal that carries a negative sign prints as a Neg would.
    bool negative_literal = (n.op == ExprOp::Literal && std::signbit(n.value) && n.value != 0.0);
    int effective_prec = negative_literal ? precedence(ExprOp::Neg) : prec;

    bool need_parens = false;
    if (effective_prec < parent_prec)
        need_parens = true;
    else if (effective_prec == parent_prec && is_right_child &&
             (parent_prec == 1 || parent_prec == 3))
        need_parens = true;  // a-(b-c), a/(b/c) keep the tree shape
    else if (effective_prec == parent_prec && !is_right_child && parent_prec == 4)
        need_parens = true;  // (a^b)^c: ^ is right-associative

    if (need_parens) os << '(';
    switch (n.op) {
        case ExprOp::Literal: format_double(os, n.value); break;
        case ExprOp::Var: os << "x" << (n.var + 1); break;
        case ExprOp::Add:
            print_node(os, nodes, n.lhs, prec, false);
            os << " + ";
            print_node(os, nodes, n.rhs, prec, true);
            break;
        case ExprOp::Sub:
            print_node(os, nodes, n.lhs, prec, false);
            os << " - ";
            print_node(os, nodes, n.rhs, prec, true);
            break;
        case ExprOp::Mul:
            print_node(os, nodes, n.lhs, prec, false);
            os << "*";
            print_node(os, nodes, n.rhs, prec, true);
            break;
        case ExprOp::Div:
            print_node(os, nodes, n.lhs, prec, false);
            os << "/";
            print_node(os, nodes, n.rhs, prec, true);
            break;
        case ExprOp::Pow:
            print_node(os, nodes, n.lhs, prec, false);
            os << "^";
            print_node(os, nodes, n.rhs, prec, true);
            break;
        case ExprOp::Neg:
            os << "-";
            print_node(os, nodes, n.lhs, prec, true);
            break;
        default:
            os << func_name(n.op) << "(";
            print_node(os, nodes, n.lhs, 0, false);
            os << ")";
            break;
    }
    if (need_parens) os << ')';
}

bool same_subtree(const std::vector<ExprNode>& a, int ia, const std::vector<ExprNode>& b, int ib) {
    const ExprNode& na = a[ia];
    const ExprNode& nb = b[ib];
    if (na.op != nb.op) return false;
    switch (na.op) {
        case ExprOp::Literal: return na.value == nb.value;
        case ExprOp::Var: return na.var == nb.var;
        default: break;
    }
    if ((na.lhs < 0) != (nb.lhs < 0) || (na.rhs < 0) != (nb.rhs < 0)) return false;
    if (na.lhs >= 0 && !same_subtree(a, na.lhs, b, nb.lhs)) return false;
    if (na.rhs >= 0 && !same_subtree(a, na.rhs, b, nb.rhs)) return false;
    return true;
}

}  // namespace

std::string Expr::to_string() const {
    std::ostringstream os;
    print_node(os, nodes_, root_, 0, false);
    return os.str();
}

bool Expr::same_structure(const Expr& other) const {
    return same_subtree(nodes_, root_, other.nodes_, other.root_);
}

double Expr::value_at(std::span<const double> point) const {
    if (static_cast<int>(point.size()) < arity_)
        throw EvalError("point is missing a coordinate");
    thread_local std::vector<double> vals;
    vals.resize(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const ExprNode& n = nodes_[i];
        switch (n.op) {
            case ExprOp::Literal: vals[i] = n.value; break;
            case ExprOp::Var: vals[i] = point[n.var]; break;
            case ExprOp::Add: vals[i] = vals[n.lhs] + vals[n.rhs]; break;
            case ExprOp::Sub: vals[i] = vals[n.lhs] - vals[n.rhs]; break;
            case ExprOp::Mul: vals[i] = vals[n.lhs] * vals[n.rhs]; break;
            case ExprOp::Div: {
                if (std::abs(vals[n.rhs]) < 1e-300)
                    throw DomainError("division by zero (|denominator| < 1e-300)");
                vals[i] = vals[n.lhs] / vals[n.rhs];
                break;
            }
            case ExprOp::Pow: {
                double b = vals[n.lhs], q = vals[n.rhs];
                double rq = std::round(q);
                if (std::abs(q - rq) <= 1e-12 && std::abs(rq) < 1e9) {
                    if (rq < 0.0 && std::abs(b) < 1e-300)
                        throw DomainError("division by zero (|denominator| < 1e-300)");
                    vals[i] = std::pow(b, rq);
                } else {
                    if (!(b > 0.0)) throw DomainError("real power of non-positive base");
                    vals[i] = std::pow(b, q);
                }
                break;
            }
            case ExprOp::Neg: vals[i] = -vals[n.lhs]; break;
            case ExprOp::Exp: vals[i] = std::exp(vals[n.lhs]); break;
            case ExprOp::Log:
                if (!(vals[n.lhs] > 0.0)) throw DomainError("log of non-positive value");
                vals[i] = std::log(vals[n.lhs]);
                break;
            case ExprOp::Sin: vals[i] = std::sin(vals[n.lhs]); break;
            case ExprOp::Cos: vals[i] = std::cos(vals[n.lhs]); break;
            case ExprOp::Sqrt:
                if (vals[n.lhs] < 0.0) throw DomainError("sqrt of negative value");
                vals[i] = std::sqrt(vals[n.lhs]);
                break;
            case ExprOp::Abs: vals[i] = std::abs(vals[n.lhs]); break;
        }
    }
    return vals[root_];
}

Jet Expr::jet_at(std::span<const double> point, int active, int order) const {
    if (order < 0 || order > Jet::kMaxOrder)
        throw EvalError("derivative order out of range [0, 16]");
    if (static_cast<int>(point.size()) < arity_)
        throw EvalError("point is missing a coordinate");
    thread_local std::vector<Jet> vals;
    vals.assign(nodes_.size(), Jet(order));
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const ExprNode& n = nodes_[i];
        switch (n.op) {
            case ExprOp::Literal: vals[i] = Jet::constant(n.value, order); break;
            case ExprOp::Var:
                vals[i] = (n.var == active) ? Jet::variable(point[n.var], order)
                                            : Jet::constant(point[n.var], order);
                break;
            case ExprOp::Add: vals[i] = vals[n.lhs] + vals[n.rhs]; break;
            case ExprOp::Sub: vals[i] = vals[n.lhs] - vals[n.rhs]; break;
            case ExprOp::Mul: vals[i] = vals[n.lhs] * vals[n.rhs]; break;
            case ExprOp::Div: vals[i] = vals[n.lhs] / vals[n.rhs]; break;
            case ExprOp::Pow: {
                const Jet& q = vals[n.rhs];
                if (jet_is_constant(q)) {
                    vals[i] = pow(vals[n.lhs], q.value());
                } else {
                    if (!(vals[n.lhs].value() > 0.0))
                        throw DomainError("real power of non-positive base");
                    vals[i] = exp(q * log(vals[n.lhs]));
                }
                break;
            }
            case ExprOp::Neg: vals[i] = -vals[n.lhs]; break;
            case ExprOp::Exp: vals[i] = exp(vals[n.lhs]); break;
            case ExprOp::Log: vals[i] = log(vals[n.lhs]); break;
            case ExprOp::Sin: vals[i] = sin(vals[n.lhs]); break;
            case ExprOp::Cos: vals[i] = cos(vals[n.lhs]); break;
            case ExprOp::Sqrt: vals[i] = sqrt(vals[n.lhs]); break;
            case ExprOp::Abs: vals[i] = abs(vals[n.lhs]); break;
        }
    }
    return vals[root_];
}

JetFn section(const Expr& e, std::vector<double> point, int active) {
    if (point.empty()) point.assign(1, 0.0);
    return [e, point = std::move(point), active](double x, int order) mutable {
        point[static_cast<std::size_t>(active)] = x;
        return e.jet_at(point, active, order);
    };
}

std::function<double(double)> as_fn(const Expr& e) {
    return [e](double x) { return e.value_at(std::span(&x, 1)); };
}

}  // namespace oscbound
