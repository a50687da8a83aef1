#pragma once

#include <vector>

#include "dpw/types.hpp"

namespace dpw {

// Truncated matrix Laurent polynomial sum_{n=lo..hi} coeff[n] lambda^n with
// 2x2 complex coefficients. Coefficients outside [lo,hi] are implicitly zero.
// The twisted flag records membership in the twisted loop group (even
// exponents diagonal, odd exponents off-diagonal); constructors validate,
// arithmetic propagates.
struct LaurentMatrix {
    int lo = 0;
    int hi = 0;
    std::vector<Matrix2c> coeff;  // coeff[n - lo]
    bool twisted = false;

    LaurentMatrix() : coeff(1, Matrix2c::Zero()) {}
    LaurentMatrix(int lo_, int hi_)
        : lo(lo_), hi(hi_), coeff(static_cast<std::size_t>(hi_ - lo_ + 1), Matrix2c::Zero()) {
        if (lo > hi) throw ValidationError("LaurentMatrix: lo > hi");
    }

    static LaurentMatrix identity();
    static LaurentMatrix zero();
    static LaurentMatrix monomial(int n, const Matrix2c& m);

    bool has(int n) const { return n >= lo && n <= hi; }
    const Matrix2c& at(int n) const {
        static const Matrix2c z = Matrix2c::Zero();
        return has(n) ? coeff[static_cast<std::size_t>(n - lo)] : z;
    }
    Matrix2c& ref(int n) { return coeff[static_cast<std::size_t>(n - lo)]; }
};

// Evaluation at a spectral value; lambda = 0 is outside the loop's domain.
Matrix2c eval(const LaurentMatrix& a, Complex lambda);

// Coefficientwise convolution truncated to [-n_trunc, n_trunc]; the Frobenius
// mass of discarded coefficients is accumulated into *tail_mass when given.
LaurentMatrix multiply(const LaurentMatrix& a, const LaurentMatrix& b, int n_trunc,
                       double* tail_mass = nullptr);

// Untruncated product on the full exponent range (internal/oracle use).
LaurentMatrix multiply_full(const LaurentMatrix& a, const LaurentMatrix& b);

// Single coefficient of the product a*b, without forming the product.
Matrix2c product_coeff(const LaurentMatrix& a, const LaurentMatrix& b, int n);

LaurentMatrix add(const LaurentMatrix& a, const LaurentMatrix& b);
LaurentMatrix scale(const LaurentMatrix& a, Complex s);

// A* with coeff*[n] = coeff[-n]^H; on |lambda| = 1 this is the pointwise
// conjugate transpose. For unitary loops it is the inverse.
LaurentMatrix circle_adjoint(const LaurentMatrix& a);

// lambda d/dlambda: coeff[n] -> n coeff[n]. Exact on truncated series.
LaurentMatrix lambda_derivative(const LaurentMatrix& a);

struct TwistReport {
    bool twisted = true;
    double defect = 0.0;   // largest off-pattern entry magnitude
    int worst_exponent = 0;
};
TwistReport check_twisted(const LaurentMatrix& a, double twist_tol = 1e-8);

// max_n ||coeff[n]||_F
double sup_coeff_norm(const LaurentMatrix& a);

// Drop leading/trailing coefficients with norm below rel_eps * sup norm.
LaurentMatrix trim(const LaurentMatrix& a, double rel_eps = 1e-15);

double max_coeff_distance(const LaurentMatrix& a, const LaurentMatrix& b);

// Determinant of the loop as a scalar Laurent polynomial (coefficients on the
// diagonal of 2x2 blocks).
LaurentMatrix det_series(const LaurentMatrix& a);

// Rescale a near-unimodular loop so that det = 1 up to O(defect^3); used by
// the frame integrator to keep the SL(2,C) constraint pinned.
LaurentMatrix unimodular_project(const LaurentMatrix& a, int n_trunc);

}  // namespace dpw
