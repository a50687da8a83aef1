#include "dpw/types.hpp"

namespace dpw {

const Matrix2c& su2_e1() {
    static const Matrix2c m = (Matrix2c() << Complex(0, 0), Complex(0, -0.5),
                               Complex(0, -0.5), Complex(0, 0))
                                  .finished();
    return m;
}

const Matrix2c& su2_e2() {
    static const Matrix2c m = (Matrix2c() << Complex(0, 0), Complex(0.5, 0),
                               Complex(-0.5, 0), Complex(0, 0))
                                  .finished();
    return m;
}

const Matrix2c& su2_e3() {
    static const Matrix2c m = (Matrix2c() << Complex(0, 0.5), Complex(0, 0),
                               Complex(0, 0), Complex(0, -0.5))
                                  .finished();
    return m;
}

const Matrix2c& su2_e(int k) {
    switch (k) {
        case 1: return su2_e1();
        case 2: return su2_e2();
        default: return su2_e3();
    }
}

double su2_defect(const Matrix2c& X) {
    return (X + X.adjoint()).norm() + std::abs(X.trace());
}

Vector3 su2_to_r3(const Matrix2c& X, double hermiticity_tol) {
    const double defect = su2_defect(X);
    if (defect > hermiticity_tol)
        throw ValidationError("su2_to_r3: input is not traceless anti-Hermitian, defect = " +
                                  std::to_string(defect),
                              defect);
    Vector3 v;
    for (int k = 1; k <= 3; ++k) v[k - 1] = -2.0 * (X * su2_e(k)).trace().real();
    return v;
}

Matrix2c r3_to_su2(const Vector3& v) {
    return v[0] * su2_e1() + v[1] * su2_e2() + v[2] * su2_e3();
}

}  // namespace dpw
