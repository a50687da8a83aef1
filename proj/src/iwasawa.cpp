#include "dpw/iwasawa.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

namespace dpw {

namespace {

// Lower-triangular Cholesky factor of a Hermitian positive definite 2x2
// block, positive real diagonal. Returns false on pivot loss.
bool chol2(const Matrix2c& S, Matrix2c& L) {
    const double s11 = S(0, 0).real();
    if (!(s11 > 0.0)) return false;
    const double a = std::sqrt(s11);
    const Complex b = S(1, 0) / a;
    const double c2 = S(1, 1).real() - std::norm(b);
    if (!(c2 > 0.0)) return false;
    L << Complex(a, 0.0), Complex(0.0, 0.0), b, Complex(std::sqrt(c2), 0.0);
    return true;
}

// X with X * L^H = S, L lower triangular with nonzero diagonal.
Matrix2c solve_right_adjoint(const Matrix2c& S, const Matrix2c& L) {
    // L = [[a,0],[b,c]] => L^H = [[a, conj(b)],[0, c]], a, c real > 0
    const double a = L(0, 0).real();
    const Complex b = L(1, 0);
    const double c = L(1, 1).real();
    Matrix2c X;
    X(0, 0) = S(0, 0) / a;
    X(1, 0) = S(1, 0) / a;
    X(0, 1) = (S(0, 1) - X(0, 0) * std::conj(b)) / c;
    X(1, 1) = (S(1, 1) - X(1, 0) * std::conj(b)) / c;
    return X;
}

double circle_min_eig(const LaurentMatrix& P, int samples) {
    double mn = std::numeric_limits<double>::infinity();
    for (int j = 0; j < samples; ++j) {
        const double t = 2.0 * M_PI * j / samples;
        const Matrix2c M = eval(P, Complex(std::cos(t), std::sin(t)));
        Eigen::SelfAdjointEigenSolver<Matrix2c> es(0.5 * (M + M.adjoint()));
        mn = std::min(mn, es.eigenvalues().minCoeff());
    }
    return mn;
}

}  // namespace

LaurentMatrix spectral_factor_positive(const LaurentMatrix& P_in, const IwasawaOptions& opt) {
    const LaurentMatrix P = trim(P_in, 1e-15);
    const int samples = opt.circle_samples > 0 ? opt.circle_samples : 4 * opt.n_trunc;

    if (opt.validate_input) {
        const double herm = max_coeff_distance(P, circle_adjoint(P));
        if (herm > 1e-8 * std::max(1.0, sup_coeff_norm(P)))
            throw ValidationError("spectral_factor_positive: P is not circle-Hermitian, defect = " +
                                      std::to_string(herm),
                                  herm);
        const double mn = circle_min_eig(P, samples);
        if (mn < opt.cond_floor)
            throw FactorizationError(
                "spectral_factor_positive: loop not positive definite on the circle "
                "(min eigenvalue " +
                std::to_string(mn) + " below cond_floor)");
    }

    // Block Toeplitz section T(i,j) = P_{j-i}; T = L L^H, L lower banded.
    // The rows of L converge to the coefficients C_n of the analytic factor
    // with C(lambda) C(lambda)^H = P(1/lambda) on the circle; B_n = C_n^H then
    // satisfies circle_adjoint(B) * B = P. The last row is the converged one.
    const int w = std::max(std::abs(P.lo), std::abs(P.hi));
    const int M = std::max(opt.section_factor * opt.n_trunc, w + opt.n_trunc + 4);

    // L stored banded: band[i][d] = L(i, i-d), d = 0..w.
    std::vector<Matrix2c> band(static_cast<std::size_t>(M) * (w + 1), Matrix2c::Zero());
    auto L = [&](int i, int d) -> Matrix2c& {
        return band[static_cast<std::size_t>(i) * (w + 1) + d];
    };

    for (int i = 0; i < M; ++i) {
        const int jmin = std::max(0, i - w);
        for (int j = jmin; j <= i; ++j) {
            Matrix2c S = P.at(j - i);
            const int kmin = std::max(jmin, j - w);
            for (int k = kmin; k < j; ++k) S -= L(i, i - k) * L(j, j - k).adjoint();
            if (j < i) {
                L(i, i - j) = solve_right_adjoint(S, L(j, 0));
            } else {
                if (!chol2(S, L(i, 0)))
                    throw FactorizationError(
                        "spectral_factor_positive: loss of positive definiteness at section " +
                        std::to_string(i));
            }
        }
    }

    const int deg = std::min(opt.n_trunc, std::min(w, M - 1));
    LaurentMatrix B(0, deg);
    for (int n = 0; n <= deg; ++n) B.ref(n) = L(M - 1, n).adjoint();
    B.twisted = check_twisted(B, opt.twist_tol).twisted;
    return trim(B, 1e-16);
}

LaurentMatrix plus_inverse(const LaurentMatrix& B, int n_trunc) {
    if (B.lo < 0) throw ValidationError("plus_inverse: loop has negative exponents");
    const Matrix2c B0 = B.at(0);
    const Complex det0 = B0.determinant();
    if (std::abs(det0) < 1e-300)
        throw FactorizationError("plus_inverse: constant term singular");
    const Matrix2c B0inv = B0.inverse();
    LaurentMatrix Y(0, n_trunc);
    Y.ref(0) = B0inv;
    for (int n = 1; n <= n_trunc; ++n) {
        Matrix2c acc = Matrix2c::Zero();
        const int kmax = std::min(n, B.hi);
        for (int k = 1; k <= kmax; ++k) acc += B.at(k) * Y.at(n - k);
        Y.ref(n) = -B0inv * acc;
    }
    Y.twisted = B.twisted;
    return trim(Y, 1e-16);
}

IwasawaResult iwasawa(const LaurentMatrix& phi_in, const IwasawaOptions& opt) {
    const LaurentMatrix phi = trim(phi_in, 1e-15);
    const int samples = opt.circle_samples > 0 ? opt.circle_samples : 4 * opt.n_trunc;

    if (opt.validate_input) {
        const TwistReport tw = check_twisted(phi, opt.twist_tol);
        if (!tw.twisted)
            throw ValidationError("iwasawa: input loop is not twisted (defect " +
                                      std::to_string(tw.defect) + " at exponent " +
                                      std::to_string(tw.worst_exponent) + ")",
                                  tw.defect);
        double det_defect = 0.0;
        for (int j = 0; j < samples; ++j) {
            const double t = 2.0 * M_PI * j / samples;
            const Matrix2c M = eval(phi, Complex(std::cos(t), std::sin(t)));
            det_defect = std::max(det_defect, std::abs(M.determinant() - Complex(1.0, 0.0)));
        }
        if (det_defect > opt.det_tol)
            throw ValidationError(
                "iwasawa: det(phi) deviates from 1 on the circle by " + std::to_string(det_defect),
                det_defect);
    }

    const LaurentMatrix P = multiply_full(circle_adjoint(phi), phi);
    LaurentMatrix B = spectral_factor_positive(P, opt);
    const LaurentMatrix Binv = plus_inverse(B, opt.n_trunc);

    LaurentMatrix F = multiply_full(phi, Binv);
    // restrict to the truncation window
    {
        const int lo = std::max(F.lo, -opt.n_trunc), hi = std::min(F.hi, opt.n_trunc);
        LaurentMatrix Ft(lo, hi);
        for (int n = lo; n <= hi; ++n) Ft.ref(n) = F.at(n);
        Ft.twisted = phi.twisted;
        F = trim(Ft, 1e-16);
    }

    IwasawaResult res;
    res.rho = B.at(0)(0, 0).real();
    res.unitary_part = F;
    res.plus_part = B;

    double defect = 0.0;
    const LaurentMatrix recon = multiply_full(F, B);
    for (int j = 0; j < samples; ++j) {
        const double t = 2.0 * M_PI * j / samples;
        const Complex lam(std::cos(t), std::sin(t));
        const Matrix2c Fv = eval(F, lam);
        defect = std::max(defect, (Fv.adjoint() * Fv - Matrix2c::Identity()).norm());
        defect = std::max(defect, (eval(recon, lam) - eval(phi, lam)).norm());
        defect = std::max(defect, std::abs(Fv.determinant() - Complex(1.0, 0.0)));
        defect = std::max(defect, std::abs(eval(B, lam).determinant() - Complex(1.0, 0.0)));
    }
    res.residual = defect;
    return res;
}

}  // namespace dpw
