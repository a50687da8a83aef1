#include "dpw/laurent.hpp"

#include <algorithm>
#include <cmath>

namespace dpw {

LaurentMatrix LaurentMatrix::identity() {
    LaurentMatrix r(0, 0);
    r.ref(0) = Matrix2c::Identity();
    r.twisted = true;
    return r;
}

LaurentMatrix LaurentMatrix::zero() {
    LaurentMatrix r(0, 0);
    r.twisted = true;
    return r;
}

LaurentMatrix LaurentMatrix::monomial(int n, const Matrix2c& m) {
    LaurentMatrix r(n, n);
    r.ref(n) = m;
    return r;
}

Matrix2c eval(const LaurentMatrix& a, Complex lambda) {
    if (lambda == Complex(0.0, 0.0))
        throw EvalError("LaurentMatrix eval: lambda = 0 is not in the loop domain");
    // Horner over the shifted polynomial sum coeff[lo+k] lambda^k, then one
    // power of lambda^lo.
    Matrix2c acc = Matrix2c::Zero();
    for (int n = a.hi; n >= a.lo; --n) acc = acc * lambda + a.at(n);
    return acc * std::pow(lambda, Complex(a.lo, 0.0));
}

LaurentMatrix multiply_full(const LaurentMatrix& a, const LaurentMatrix& b) {
    LaurentMatrix r(a.lo + b.lo, a.hi + b.hi);
    for (int n = a.lo; n <= a.hi; ++n) {
        if (a.at(n).isZero(0.0)) continue;
        for (int m = b.lo; m <= b.hi; ++m) r.ref(n + m) += a.at(n) * b.at(m);
    }
    r.twisted = a.twisted && b.twisted;
    return r;
}

LaurentMatrix multiply(const LaurentMatrix& a, const LaurentMatrix& b, int n_trunc,
                       double* tail_mass) {
    const int flo = a.lo + b.lo, fhi = a.hi + b.hi;
    const int rlo = std::max(flo, -n_trunc), rhi = std::min(fhi, n_trunc);
    if (rlo > rhi) {
        // Entire product lies outside the truncation window.
        LaurentMatrix z = LaurentMatrix::zero();
        z.twisted = a.twisted && b.twisted;
        if (tail_mass) {
            LaurentMatrix full = multiply_full(a, b);
            for (int n = full.lo; n <= full.hi; ++n) *tail_mass += full.at(n).norm();
        }
        return z;
    }
    LaurentMatrix r(rlo, rhi);
    double tail = 0.0;
    for (int n = a.lo; n <= a.hi; ++n) {
        if (a.at(n).isZero(0.0)) continue;
        for (int m = b.lo; m <= b.hi; ++m) {
            const int k = n + m;
            if (k >= rlo && k <= rhi) {
                r.ref(k) += a.at(n) * b.at(m);
            } else if (tail_mass) {
                tail += (a.at(n) * b.at(m)).norm();
            }
        }
    }
    if (tail_mass) *tail_mass += tail;
    r.twisted = a.twisted && b.twisted;
    return r;
}

Matrix2c product_coeff(const LaurentMatrix& a, const LaurentMatrix& b, int n) {
    Matrix2c acc = Matrix2c::Zero();
    const int klo = std::max(a.lo, n - b.hi), khi = std::min(a.hi, n - b.lo);
    for (int k = klo; k <= khi; ++k) acc += a.at(k) * b.at(n - k);
    return acc;
}

LaurentMatrix add(const LaurentMatrix& a, const LaurentMatrix& b) {
    LaurentMatrix r(std::min(a.lo, b.lo), std::max(a.hi, b.hi));
    for (int n = r.lo; n <= r.hi; ++n) r.ref(n) = a.at(n) + b.at(n);
    r.twisted = a.twisted && b.twisted;
    return r;
}

LaurentMatrix scale(const LaurentMatrix& a, Complex s) {
    LaurentMatrix r = a;
    for (auto& c : r.coeff) c *= s;
    return r;
}

LaurentMatrix circle_adjoint(const LaurentMatrix& a) {
    LaurentMatrix r(-a.hi, -a.lo);
    for (int n = a.lo; n <= a.hi; ++n) r.ref(-n) = a.at(n).adjoint();
    r.twisted = a.twisted;
    return r;
}

LaurentMatrix lambda_derivative(const LaurentMatrix& a) {
    LaurentMatrix r = a;
    for (int n = a.lo; n <= a.hi; ++n) r.ref(n) *= static_cast<double>(n);
    return r;
}

TwistReport check_twisted(const LaurentMatrix& a, double twist_tol) {
    TwistReport rep;
    for (int n = a.lo; n <= a.hi; ++n) {
        const Matrix2c& m = a.at(n);
        // even exponent: off-diagonal must vanish; odd: diagonal must vanish
        const bool even = ((n % 2) == 0);
        const double bad = even ? std::max(std::abs(m(0, 1)), std::abs(m(1, 0)))
                                : std::max(std::abs(m(0, 0)), std::abs(m(1, 1)));
        if (bad > rep.defect) {
            rep.defect = bad;
            rep.worst_exponent = n;
        }
    }
    rep.twisted = rep.defect <= twist_tol;
    return rep;
}

double sup_coeff_norm(const LaurentMatrix& a) {
    double m = 0.0;
    for (const auto& c : a.coeff) m = std::max(m, c.norm());
    return m;
}

LaurentMatrix trim(const LaurentMatrix& a, double rel_eps) {
    const double floor = rel_eps * sup_coeff_norm(a);
    int lo = a.lo, hi = a.hi;
    while (lo < hi && a.at(lo).norm() <= floor) ++lo;
    while (hi > lo && a.at(hi).norm() <= floor) --hi;
    LaurentMatrix r(lo, hi);
    for (int n = lo; n <= hi; ++n) r.ref(n) = a.at(n);
    r.twisted = a.twisted;
    return r;
}

double max_coeff_distance(const LaurentMatrix& a, const LaurentMatrix& b) {
    double m = 0.0;
    for (int n = std::min(a.lo, b.lo); n <= std::max(a.hi, b.hi); ++n)
        m = std::max(m, (a.at(n) - b.at(n)).norm());
    return m;
}

LaurentMatrix det_series(const LaurentMatrix& a) {
    LaurentMatrix d(2 * a.lo, 2 * a.hi);
    for (int n = a.lo; n <= a.hi; ++n)
        for (int m = a.lo; m <= a.hi; ++m) {
            const Matrix2c &A = a.at(n), &B = a.at(m);
            const Complex v = A(0, 0) * B(1, 1) - A(0, 1) * B(1, 0);
            d.ref(n + m).diagonal().array() += v;
        }
    return d;
}

LaurentMatrix unimodular_project(const LaurentMatrix& a, int n_trunc) {
    // det(a) = 1 + delta; multiply by (1 + delta)^{-1/2} ~ 1 - delta/2 + 3 delta^2/8
    LaurentMatrix delta = det_series(a);
    delta.ref(0) -= Matrix2c::Identity();
    delta = trim(delta, 0.0);
    if (sup_coeff_norm(delta) == 0.0) return a;
    LaurentMatrix corr(delta.lo < 0 ? 2 * delta.lo : 0, delta.hi > 0 ? 2 * delta.hi : 0);
    corr.ref(0) = Matrix2c::Identity();
    for (int n = delta.lo; n <= delta.hi; ++n) corr.ref(n) -= 0.5 * delta.at(n);
    for (int n = delta.lo; n <= delta.hi; ++n)
        for (int m = delta.lo; m <= delta.hi; ++m)
            corr.ref(n + m) += 0.375 * delta.at(n)(0, 0) * delta.at(m);
    corr.twisted = true;  // scalar even series times the identity
    LaurentMatrix out = multiply(a, corr, n_trunc);
    out.twisted = a.twisted;
    return out;
}

}  // namespace dpw
