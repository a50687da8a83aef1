#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dpw {

using Complex  = std::complex<double>;
using Matrix2c = Eigen::Matrix2cd;
using Vector3  = Eigen::Vector3d;
using Vector2  = Eigen::Vector2d;

inline constexpr Complex kImag{0.0, 1.0};

// Error hierarchy. The CLI maps these onto exit codes: input/validation
// problems exit 2, numerical failures exit 3.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ValidationError : Error {
    double defect = 0.0;
    explicit ValidationError(const std::string& msg, double d = 0.0)
        : Error(msg), defect(d) {}
};
struct EvalError : Error {
    using Error::Error;
};
struct ParseError : Error {
    std::size_t offset = 0;
    ParseError(const std::string& msg, std::size_t at) : Error(msg), offset(at) {}
};
struct FactorizationError : Error {
    using Error::Error;
};
struct NumericalError : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};

// Orthonormal basis of su(2) identified with R^3, inner product
// <X,Y> = -2 tr(XY), so that the commutator realizes the cross product.
const Matrix2c& su2_e1();
const Matrix2c& su2_e2();
const Matrix2c& su2_e3();
const Matrix2c& su2_e(int k);  // k = 1,2,3

// How far X is from being traceless anti-Hermitian.
double su2_defect(const Matrix2c& X);

// Coordinates of X in the basis e1,e2,e3; throws ValidationError (carrying
// the defect) if X is not su(2) within hermiticity_tol.
Vector3 su2_to_r3(const Matrix2c& X, double hermiticity_tol = 1e-8);

Matrix2c r3_to_su2(const Vector3& v);

}  // namespace dpw
