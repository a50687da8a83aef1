#pragma once

#include "dpw/laurent.hpp"

namespace dpw {

struct IwasawaOptions {
    int n_trunc = 16;
    double iwasawa_tol = 1e-8;
    double det_tol = 1e-10;
    double cond_floor = 1e-10;
    double twist_tol = 1e-8;
    int section_factor = 4;   // Toeplitz section size = section_factor * n_trunc blocks
    int circle_samples = 0;   // 0 -> 4 * n_trunc
    bool validate_input = true;
};

// Phi = F B+ with F unitary on |lambda| = 1 and B+ holomorphic in the disc,
// constant term diag(rho, 1/rho), rho > 0.
struct IwasawaResult {
    LaurentMatrix unitary_part;  // F, exponents within [-n_trunc, n_trunc]
    LaurentMatrix plus_part;     // B+, exponents within [0, n_trunc]
    double residual = 0.0;       // max of reconstruction/unitarity/det defects
    double rho = 1.0;
};

// Canonical spectral factor of a loop that is Hermitian positive definite on
// the circle: returns B in Lambda+ with circle_adjoint(B) * B = P, constant
// term upper triangular with positive real diagonal. Finite-section
// block-Toeplitz Cholesky (Bauer's method), section size
// section_factor * n_trunc blocks (grown if the band is wider).
LaurentMatrix spectral_factor_positive(const LaurentMatrix& P, const IwasawaOptions& opt);

IwasawaResult iwasawa(const LaurentMatrix& phi, const IwasawaOptions& opt);

// Inverse of a Lambda+ loop with invertible constant term, by coefficientwise
// back-substitution, exponents [0, n_trunc].
LaurentMatrix plus_inverse(const LaurentMatrix& B, int n_trunc);

}  // namespace dpw
