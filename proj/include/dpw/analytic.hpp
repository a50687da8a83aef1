#pragma once

#include <array>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include "dpw/types.hpp"

namespace dpw {

// One-variable real-analytic expression, evaluable at complex arguments.
// The free variable is spelled `s`. Supported: + - * / ^, unary minus,
// implicit multiplication by juxtaposition, and sin cos tan sinh cosh exp
// sqrt; `pi` is a built-in constant. `^` is right-associative; non-integer
// exponents use the principal branch (real-on-real only guaranteed for
// integer exponents or positive bases).
class AnalyticFn {
  public:
    struct Node;

    AnalyticFn();  // the zero function

    static AnalyticFn parse(std::string_view src);
    static AnalyticFn constant(Complex c);
    static AnalyticFn variable();

    Complex eval(Complex z) const;
    double eval_real(double s) const { return eval(Complex(s, 0.0)).real(); }

    // Exact symbolic derivative; memoized per instance.
    AnalyticFn derivative() const;

    std::string to_string() const;

    bool is_zero() const;  // structurally the constant 0

    // Combinators (build trees programmatically, with light simplification).
    friend AnalyticFn operator+(const AnalyticFn&, const AnalyticFn&);
    friend AnalyticFn operator-(const AnalyticFn&, const AnalyticFn&);
    friend AnalyticFn operator*(const AnalyticFn&, const AnalyticFn&);
    friend AnalyticFn operator/(const AnalyticFn&, const AnalyticFn&);
    friend AnalyticFn operator-(const AnalyticFn&);
    static AnalyticFn apply(const std::string& fn, const AnalyticFn& arg);
    static AnalyticFn pow(const AnalyticFn& base, const AnalyticFn& exp);

  private:
    explicit AnalyticFn(std::shared_ptr<const Node> root);
    std::shared_ptr<const Node> root_;
    mutable std::shared_ptr<const Node> deriv_cache_;
    mutable std::shared_ptr<std::mutex> cache_mutex_;
};

// Component tuple for space curves / normal fields given as expressions.
using AnalyticVec3 = std::array<AnalyticFn, 3>;

AnalyticFn dot(const AnalyticVec3& a, const AnalyticVec3& b);
AnalyticVec3 cross(const AnalyticVec3& a, const AnalyticVec3& b);
AnalyticVec3 derivative(const AnalyticVec3& a);
Vector3 eval_real(const AnalyticVec3& a, double s);

}  // namespace dpw
