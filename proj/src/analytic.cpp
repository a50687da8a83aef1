#include "dpw/analytic.hpp"

#include <cctype>
#include <set>
#include <cmath>
#include <sstream>
#include <vector>

namespace dpw {

namespace {

enum class Kind { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Call };

enum class Func { Sin, Cos, Tan, Sinh, Cosh, Exp, Sqrt };

const char* func_name(Func f) {
    switch (f) {
        case Func::Sin: return "sin";
        case Func::Cos: return "cos";
        case Func::Tan: return "tan";
        case Func::Sinh: return "sinh";
        case Func::Cosh: return "cosh";
        case Func::Exp: return "exp";
        case Func::Sqrt: return "sqrt";
    }
    return "?";
}

}  // namespace

struct AnalyticFn::Node {
    Kind kind;
    Complex value{};                       // Const
    Func func = Func::Sin;                 // Call
    std::shared_ptr<const Node> a, b;      // children

    explicit Node(Kind k) : kind(k) {}
};

namespace {

using NodePtr = std::shared_ptr<const AnalyticFn::Node>;
using Node = AnalyticFn::Node;

NodePtr make_const(Complex c) {
    auto n = std::make_shared<Node>(Kind::Const);
    n->value = c;
    return n;
}

NodePtr make_var() { return std::make_shared<Node>(Kind::Var); }

bool is_const(const NodePtr& n, Complex c) {
    return n->kind == Kind::Const && n->value == c;
}
bool is_const(const NodePtr& n) { return n->kind == Kind::Const; }

NodePtr make_bin(Kind k, NodePtr a, NodePtr b) {
    // light constant folding / identity pruning, keeps derivative trees small
    if (is_const(a) && is_const(b)) {
        switch (k) {
            case Kind::Add: return make_const(a->value + b->value);
            case Kind::Sub: return make_const(a->value - b->value);
            case Kind::Mul: return make_const(a->value * b->value);
            default: break;  // Div/Pow folded lazily at eval to keep errors located
        }
    }
    switch (k) {
        case Kind::Add:
            if (is_const(a, 0.0)) return b;
            if (is_const(b, 0.0)) return a;
            break;
        case Kind::Sub:
            if (is_const(b, 0.0)) return a;
            break;
        case Kind::Mul:
            if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
            if (is_const(a, 1.0)) return b;
            if (is_const(b, 1.0)) return a;
            break;
        case Kind::Div:
            if (is_const(a, 0.0) && !is_const(b, 0.0)) return make_const(0.0);
            if (is_const(b, 1.0)) return a;
            break;
        case Kind::Pow:
            if (is_const(b, 1.0)) return a;
            if (is_const(b, 0.0)) return make_const(1.0);
            break;
        default: break;
    }
    auto n = std::make_shared<Node>(k);
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

NodePtr make_neg(NodePtr a) {
    if (is_const(a)) return make_const(-a->value);
    if (a->kind == Kind::Neg) return a->a;
    auto n = std::make_shared<Node>(Kind::Neg);
    n->a = std::move(a);
    return n;
}

NodePtr make_call(Func f, NodePtr a) {
    auto n = std::make_shared<Node>(Kind::Call);
    n->func = f;
    n->a = std::move(a);
    return n;
}

// integer exponent detection for the pow fast path
bool integer_exponent(const NodePtr& e, long& out) {
    if (e->kind != Kind::Const) return false;
    if (e->value.imag() != 0.0) return false;
    const double r = e->value.real();
    if (r != std::floor(r) || std::abs(r) > 64) return false;
    out = static_cast<long>(r);
    return true;
}

Complex ipow(Complex z, long n) {
    if (n < 0) return Complex(1.0, 0.0) / ipow(z, -n);
    Complex acc(1.0, 0.0), base = z;
    while (n > 0) {
        if (n & 1) acc *= base;
        base *= base;
        n >>= 1;
    }
    return acc;
}

Complex eval_node(const Node* n, Complex z) {
    switch (n->kind) {
        case Kind::Const: return n->value;
        case Kind::Var: return z;
        case Kind::Add: return eval_node(n->a.get(), z) + eval_node(n->b.get(), z);
        case Kind::Sub: return eval_node(n->a.get(), z) - eval_node(n->b.get(), z);
        case Kind::Mul: return eval_node(n->a.get(), z) * eval_node(n->b.get(), z);
        case Kind::Div: {
            const Complex den = eval_node(n->b.get(), z);
            if (den == Complex(0.0, 0.0))
                throw EvalError("division by zero at z = (" + std::to_string(z.real()) + ", " +
                                std::to_string(z.imag()) + ")");
            return eval_node(n->a.get(), z) / den;
        }
        case Kind::Neg: return -eval_node(n->a.get(), z);
        case Kind::Pow: {
            const Complex base = eval_node(n->a.get(), z);
            long k;
            if (integer_exponent(n->b, k)) {
                if (k < 0 && base == Complex(0.0, 0.0))
                    throw EvalError("zero raised to a negative power");
                return ipow(base, k);
            }
            const Complex e = eval_node(n->b.get(), z);
            if (base == Complex(0.0, 0.0)) {
                if (e.real() > 0.0) return Complex(0.0, 0.0);
                throw EvalError("zero base with non-positive exponent");
            }
            return std::exp(e * std::log(base));  // principal branch
        }
        case Kind::Call: {
            const Complex v = eval_node(n->a.get(), z);
            switch (n->func) {
                case Func::Sin: return std::sin(v);
                case Func::Cos: return std::cos(v);
                case Func::Tan: {
                    const Complex c = std::cos(v);
                    if (c == Complex(0.0, 0.0)) throw EvalError("tan pole");
                    return std::sin(v) / c;
                }
                case Func::Sinh: return std::sinh(v);
                case Func::Cosh: return std::cosh(v);
                case Func::Exp: return std::exp(v);
                case Func::Sqrt:
                    if (v == Complex(0.0, 0.0)) return Complex(0.0, 0.0);
                    return std::sqrt(v);  // principal branch
            }
        }
    }
    throw EvalError("corrupt expression tree");
}

NodePtr deriv_node(const NodePtr& n);

NodePtr deriv_call(const NodePtr& n) {
    const NodePtr& u = n->a;
    const NodePtr du = deriv_node(u);
    switch (n->func) {
        case Func::Sin: return make_bin(Kind::Mul, make_call(Func::Cos, u), du);
        case Func::Cos: return make_neg(make_bin(Kind::Mul, make_call(Func::Sin, u), du));
        case Func::Tan: {
            // sec^2 = 1/cos^2
            NodePtr c = make_call(Func::Cos, u);
            NodePtr c2 = make_bin(Kind::Mul, c, c);
            return make_bin(Kind::Div, du, c2);
        }
        case Func::Sinh: return make_bin(Kind::Mul, make_call(Func::Cosh, u), du);
        case Func::Cosh: return make_bin(Kind::Mul, make_call(Func::Sinh, u), du);
        case Func::Exp: return make_bin(Kind::Mul, make_call(Func::Exp, u), du);
        case Func::Sqrt: {
            NodePtr two_sqrt = make_bin(Kind::Mul, make_const(2.0), make_call(Func::Sqrt, u));
            return make_bin(Kind::Div, du, two_sqrt);
        }
    }
    throw EvalError("corrupt expression tree");
}

NodePtr deriv_node(const NodePtr& n) {
    switch (n->kind) {
        case Kind::Const: return make_const(0.0);
        case Kind::Var: return make_const(1.0);
        case Kind::Add: return make_bin(Kind::Add, deriv_node(n->a), deriv_node(n->b));
        case Kind::Sub: return make_bin(Kind::Sub, deriv_node(n->a), deriv_node(n->b));
        case Kind::Mul:
            return make_bin(Kind::Add, make_bin(Kind::Mul, deriv_node(n->a), n->b),
                            make_bin(Kind::Mul, n->a, deriv_node(n->b)));
        case Kind::Div: {
            NodePtr num = make_bin(Kind::Sub, make_bin(Kind::Mul, deriv_node(n->a), n->b),
                                   make_bin(Kind::Mul, n->a, deriv_node(n->b)));
            NodePtr den = make_bin(Kind::Mul, n->b, n->b);
            return make_bin(Kind::Div, num, den);
        }
        case Kind::Neg: return make_neg(deriv_node(n->a));
        case Kind::Pow: {
            long k;
            if (integer_exponent(n->b, k)) {
                // d(f^k) = k f^(k-1) f'
                NodePtr fk1 = make_bin(Kind::Pow, n->a, make_const(Complex(k - 1, 0)));
                return make_bin(Kind::Mul, make_const(Complex(k, 0)),
                                make_bin(Kind::Mul, fk1, deriv_node(n->a)));
            }
            if (is_const(n->b)) {
                NodePtr fp1 = make_bin(Kind::Pow, n->a, make_const(n->b->value - 1.0));
                return make_bin(Kind::Mul, make_const(n->b->value),
                                make_bin(Kind::Mul, fp1, deriv_node(n->a)));
            }
            // f^g = exp(g log f): (f^g)' = f^g (g' log f + g f'/f).
            // No log primitive in the language; expand via exp/log is not
            // representable, so reject (the input grammar cannot produce a
            // variable exponent except via ^ with expression rhs).
            throw EvalError("derivative of f^g with non-constant exponent is unsupported");
        }
        case Kind::Call: return deriv_call(n);
    }
    throw EvalError("corrupt expression tree");
}

int precedence(Kind k) {
    switch (k) {
        case Kind::Add:
        case Kind::Sub: return 1;
        case Kind::Mul:
        case Kind::Div: return 2;
        case Kind::Neg: return 3;
        case Kind::Pow: return 4;
        default: return 5;
    }
}

void print_node(const Node* n, std::ostream& os, int parent_prec) {
    const int prec = precedence(n->kind);
    const bool parens = prec < parent_prec;
    if (parens) os << '(';
    switch (n->kind) {
        case Kind::Const: {
            const Complex v = n->value;
            if (v.imag() == 0.0) {
                if (v.real() < 0) {
                    os << '(' << v.real() << ')';
                } else {
                    os << v.real();
                }
            } else {
                os << "(" << v.real() << (v.imag() < 0 ? "-" : "+") << std::abs(v.imag())
                   << "i)";  // not produced by the parser; for debugging only
            }
            break;
        }
        case Kind::Var: os << 's'; break;
        case Kind::Add:
            print_node(n->a.get(), os, prec);
            os << " + ";
            print_node(n->b.get(), os, prec);
            break;
        case Kind::Sub:
            print_node(n->a.get(), os, prec);
            os << " - ";
            print_node(n->b.get(), os, prec + 1);
            break;
        case Kind::Mul:
            print_node(n->a.get(), os, prec);
            os << "*";
            print_node(n->b.get(), os, prec);
            break;
        case Kind::Div:
            print_node(n->a.get(), os, prec);
            os << "/";
            print_node(n->b.get(), os, prec + 1);
            break;
        case Kind::Neg:
            os << "-";
            print_node(n->a.get(), os, prec + 1);
            break;
        case Kind::Pow:
            print_node(n->a.get(), os, prec + 1);
            os << "^";
            print_node(n->b.get(), os, prec);
            break;
        case Kind::Call:
            os << func_name(n->func) << '(';
            print_node(n->a.get(), os, 0);
            os << ')';
            break;
    }
    if (parens) os << ')';
}

// ---------------------------------------------------------------------------
// Parser: conventional infix grammar, implicit multiplication by
// juxtaposition, ^ right-associative. Identifier resolution happens after the
// structural parse so that bracket errors are reported first.

struct Token {
    enum Type { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End } type;
    std::size_t offset;
    double number = 0.0;
    std::string ident;
};

class Lexer {
  public:
    explicit Lexer(std::string_view src) : src_(src) { advance(); }
    const Token& peek() const { return tok_; }
    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

  private:
    void advance() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        tok_.offset = pos_;
        if (pos_ >= src_.size()) {
            tok_.type = Token::End;
            return;
        }
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t end = pos_;
            const std::string s(src_);
            try {
                tok_.number = std::stod(s.substr(pos_), &end);
            } catch (const std::exception&) {
                throw ParseError("malformed number", pos_);
            }
            tok_.type = Token::Number;
            pos_ += end;
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t e = pos_;
            while (e < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[e])) || src_[e] == '_'))
                ++e;
            tok_.type = Token::Ident;
            tok_.ident = std::string(src_.substr(pos_, e - pos_));
            pos_ = e;
            return;
        }
        switch (c) {
            case '+': tok_.type = Token::Plus; break;
            case '-': tok_.type = Token::Minus; break;
            case '*': tok_.type = Token::Star; break;
            case '/': tok_.type = Token::Slash; break;
            case '^': tok_.type = Token::Caret; break;
            case '(': tok_.type = Token::LParen; break;
            case ')': tok_.type = Token::RParen; break;
            default:
                throw ParseError(std::string("unexpected character '") + c + "'", pos_);
        }
        ++pos_;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    Token tok_;
};

// Raw tree carrying unresolved identifiers.
struct Raw {
    Kind kind;
    double number = 0.0;
    std::string ident;       // Var slot before resolution
    std::size_t offset = 0;  // for unknown-identifier reporting
    bool is_call = false;
    std::shared_ptr<Raw> a, b;
};
using RawPtr = std::shared_ptr<Raw>;

class Parser {
  public:
    explicit Parser(std::string_view src) : lex_(src) {}

    RawPtr parse() {
        RawPtr e = expr();
        if (lex_.peek().type != Token::End)
            throw ParseError("expected operator or end of input", lex_.peek().offset);
        return e;
    }

  private:
    static bool starts_atom(Token::Type t) {
        return t == Token::Number || t == Token::Ident || t == Token::LParen;
    }

    RawPtr expr() {
        RawPtr lhs = term();
        while (lex_.peek().type == Token::Plus || lex_.peek().type == Token::Minus) {
            const Token op = lex_.take();
            RawPtr rhs = term();
            auto n = std::make_shared<Raw>();
            n->kind = (op.type == Token::Plus) ? Kind::Add : Kind::Sub;
            n->a = lhs;
            n->b = rhs;
            lhs = n;
        }
        return lhs;
    }

    RawPtr term() {
        RawPtr lhs = factor();
        for (;;) {
            const Token::Type t = lex_.peek().type;
            if (t == Token::Star || t == Token::Slash) {
                const Token op = lex_.take();
                RawPtr rhs = factor();
                auto n = std::make_shared<Raw>();
                n->kind = (op.type == Token::Star) ? Kind::Mul : Kind::Div;
                n->a = lhs;
                n->b = rhs;
                lhs = n;
            } else if (starts_atom(t)) {
                // juxtaposition is multiplication: "2 s", "s cos(s)"
                RawPtr rhs = factor();
                auto n = std::make_shared<Raw>();
                n->kind = Kind::Mul;
                n->a = lhs;
                n->b = rhs;
                lhs = n;
            } else {
                return lhs;
            }
        }
    }

    RawPtr factor() {
        if (lex_.peek().type == Token::Minus) {
            const Token t = lex_.take();
            auto n = std::make_shared<Raw>();
            n->kind = Kind::Neg;
            n->offset = t.offset;
            n->a = factor();
            return n;
        }
        if (lex_.peek().type == Token::Plus) {
            lex_.take();
            return factor();
        }
        return power();
    }

    RawPtr power() {
        RawPtr base = atom();
        if (lex_.peek().type == Token::Caret) {
            lex_.take();
            RawPtr e = factor();  // right-associative, unary minus allowed in exponent
            auto n = std::make_shared<Raw>();
            n->kind = Kind::Pow;
            n->a = base;
            n->b = e;
            return n;
        }
        return base;
    }

    RawPtr atom() {
        const Token t = lex_.peek();
        switch (t.type) {
            case Token::Number: {
                lex_.take();
                auto n = std::make_shared<Raw>();
                n->kind = Kind::Const;
                n->number = t.number;
                return n;
            }
            case Token::Ident: {
                lex_.take();
                auto n = std::make_shared<Raw>();
                n->ident = t.ident;
                n->offset = t.offset;
                static const std::set<std::string> funcs = {"sin",  "cos", "tan", "sinh",
                                                            "cosh", "exp", "sqrt"};
                if (funcs.count(t.ident) && lex_.peek().type == Token::LParen) {
                    const std::size_t open = lex_.peek().offset;
                    lex_.take();
                    n->kind = Kind::Call;
                    n->is_call = true;
                    n->a = expr();
                    if (lex_.peek().type != Token::RParen)
                        throw ParseError("expected ')' closing '(' at offset " +
                                             std::to_string(open),
                                         lex_.peek().offset);
                    lex_.take();
                } else {
                    n->kind = Kind::Var;
                }
                return n;
            }
            case Token::LParen: {
                const std::size_t open = t.offset;
                lex_.take();
                RawPtr e = expr();
                if (lex_.peek().type != Token::RParen)
                    throw ParseError("expected ')' closing '(' at offset " + std::to_string(open),
                                     lex_.peek().offset);
                lex_.take();
                return e;
            }
            default:
                throw ParseError("expected number, identifier or '('", t.offset);
        }
    }

    Lexer lex_;
};

NodePtr resolve(const RawPtr& r) {
    switch (r->kind) {
        case Kind::Const: return make_const(Complex(r->number, 0.0));
        case Kind::Var: {
            if (r->ident == "s") return make_var();
            if (r->ident == "pi") return make_const(Complex(M_PI, 0.0));
            throw ParseError("unknown identifier '" + r->ident + "'", r->offset);
        }
        case Kind::Call: {
            static const std::pair<const char*, Func> table[] = {
                {"sin", Func::Sin},   {"cos", Func::Cos}, {"tan", Func::Tan},
                {"sinh", Func::Sinh}, {"cosh", Func::Cosh}, {"exp", Func::Exp},
                {"sqrt", Func::Sqrt}};
            for (const auto& [name, f] : table)
                if (r->ident == name) return make_call(f, resolve(r->a));
            throw ParseError("unknown function '" + r->ident + "'", r->offset);
        }
        case Kind::Neg: return make_neg(resolve(r->a));
        default: return make_bin(r->kind, resolve(r->a), resolve(r->b));
    }
}

}  // namespace

AnalyticFn::AnalyticFn() : root_(make_const(0.0)), cache_mutex_(std::make_shared<std::mutex>()) {}

AnalyticFn::AnalyticFn(std::shared_ptr<const Node> root)
    : root_(std::move(root)), cache_mutex_(std::make_shared<std::mutex>()) {}

AnalyticFn AnalyticFn::parse(std::string_view src) {
    Parser p(src);
    return AnalyticFn(resolve(p.parse()));
}

AnalyticFn AnalyticFn::constant(Complex c) { return AnalyticFn(make_const(c)); }

AnalyticFn AnalyticFn::variable() { return AnalyticFn(make_var()); }

Complex AnalyticFn::eval(Complex z) const { return eval_node(root_.get(), z); }

AnalyticFn AnalyticFn::derivative() const {
    std::lock_guard<std::mutex> lock(*cache_mutex_);
    if (!deriv_cache_) deriv_cache_ = deriv_node(root_);
    return AnalyticFn(deriv_cache_);
}

std::string AnalyticFn::to_string() const {
    std::ostringstream os;
    os.precision(17);
    print_node(root_.get(), os, 0);
    return os.str();
}

bool AnalyticFn::is_zero() const { return is_const(root_, 0.0); }

AnalyticFn operator+(const AnalyticFn& a, const AnalyticFn& b) {
    return AnalyticFn(make_bin(Kind::Add, a.root_, b.root_));
}
AnalyticFn operator-(const AnalyticFn& a, const AnalyticFn& b) {
    return AnalyticFn(make_bin(Kind::Sub, a.root_, b.root_));
}
AnalyticFn operator*(const AnalyticFn& a, const AnalyticFn& b) {
    return AnalyticFn(make_bin(Kind::Mul, a.root_, b.root_));
}
AnalyticFn operator/(const AnalyticFn& a, const AnalyticFn& b) {
    return AnalyticFn(make_bin(Kind::Div, a.root_, b.root_));
}
AnalyticFn operator-(const AnalyticFn& a) { return AnalyticFn(make_neg(a.root_)); }

AnalyticFn AnalyticFn::apply(const std::string& fn, const AnalyticFn& arg) {
    static const std::pair<const char*, Func> table[] = {
        {"sin", Func::Sin},   {"cos", Func::Cos},   {"tan", Func::Tan}, {"sinh", Func::Sinh},
        {"cosh", Func::Cosh}, {"exp", Func::Exp},   {"sqrt", Func::Sqrt}};
    for (const auto& [name, f] : table)
        if (fn == name) return AnalyticFn(make_call(f, arg.root_));
    throw EvalError("unknown function '" + fn + "'");
}

AnalyticFn AnalyticFn::pow(const AnalyticFn& base, const AnalyticFn& exp) {
    return AnalyticFn(make_bin(Kind::Pow, base.root_, exp.root_));
}

AnalyticFn dot(const AnalyticVec3& a, const AnalyticVec3& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

AnalyticVec3 cross(const AnalyticVec3& a, const AnalyticVec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

AnalyticVec3 derivative(const AnalyticVec3& a) {
    return {a[0].derivative(), a[1].derivative(), a[2].derivative()};
}

Vector3 eval_real(const AnalyticVec3& a, double s) {
    return Vector3(a[0].eval_real(s), a[1].eval_real(s), a[2].eval_real(s));
}

}  // namespace dpw
