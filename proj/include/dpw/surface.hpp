#pragma once

#include "dpw/frame.hpp"

namespace dpw {

enum class SurfaceKind { Spherical, Cmc, Other };

std::string to_string(SurfaceKind k);

// Grid of positions and unit normals with the degeneracy scalar
// mu = <f_x x f_y, N> and the frame regularity margin. Masked points carry
// no trustworthy geometry (failed factorization upstream).
struct Frontal {
    GridSpec spec;
    SurfaceKind kind = SurfaceKind::Spherical;
    std::vector<Vector3> f, N;
    std::vector<double> mu;       // degeneracy field (central differences; edges one-sided)
    std::vector<double> margin;   // | |u12|-|u21| | (interior; edges copied)
    std::vector<uint8_t> mask;    // 1 = valid
    double max_sym_defect = 0.0;  // su(2) defect of the Sym values

    bool valid(int i, int j) const { return mask[spec.index(i, j)] != 0; }
    bool interior(int i, int j) const {
        return i > 0 && i < spec.nx - 1 && j > 0 && j < spec.ny - 1;
    }
};

// Sym formula i (lambda dF/dlambda F^{-1}) at lambda = 1.
Vector3 sym_point(const LaurentMatrix& F, double* su2_defect_out = nullptr);

// Ad_F e3 at lambda = 1.
Vector3 normal_of(const LaurentMatrix& F);

// Sym-Bobenko: sym_point - normal (parallel CMC surface).
Vector3 sym_bobenko_point(const LaurentMatrix& F, double* su2_defect_out = nullptr);

Frontal build_frontal(const FrameField& field, SurfaceKind kind);

// Max over interior valid points of |f_z - i N x N_z| (central differences);
// the defining equation of the spherical frontal.
double defining_equation_residual(const Frontal& fr);

// Max over interior valid points of |<f_x, N>|, |<f_y, N>| (frontal property).
double frontal_orthogonality_defect(const Frontal& fr);

struct FormCoefficients {
    double E = 0, F = 0, G = 0;   // first form
    double L = 0, M = 0, N = 0;   // second form
};
struct FundamentalForms {
    FormCoefficients from_normal;  // N-based formulas of the harmonic-map picture
    FormCoefficients from_mesh;    // f-based central differences
};

// Interior regular point required (margin above reg_floor); throws
// NumericalError carrying the margin otherwise.
FundamentalForms fundamental_forms(const Frontal& fr, int i, int j, double reg_floor = 1e-3);

struct Curvatures {
    double K = 0, H = 0;
};
// From the mesh-based forms. Throws on near-singular metric.
Curvatures gauss_mean_curvature(const Frontal& fr, int i, int j, double reg_floor = 1e-3);

// Positions shifted by offset * N, normals kept; kind retagged by sampling
// the curvature oracle.
Frontal parallel_surface(const Frontal& fr, double offset);

struct FrenetCurve {
    std::vector<double> s;
    std::vector<Vector3> f, T, Nvec, B;
};
// Unit-speed curve with prescribed curvature and torsion, canonically placed:
// f(s0) = 0, T = e_x, N = e_y, B = e_z.
FrenetCurve frenet_reconstruct(const AnalyticFn& kappa, const AnalyticFn& tau, double s0,
                               double s1, int n);

struct ProcrustesResult {
    Eigen::Matrix3d R;
    Vector3 t;
    double rms = 0.0;
};
// Rigid motion (proper rotation + translation) minimizing RMS distance of
// R a_i + t to b_i.
ProcrustesResult procrustes(const std::vector<Vector3>& a, const std::vector<Vector3>& b);

struct SphereFit {
    Vector3 center;
    double radius = 0.0;
    double rms = 0.0;  // RMS of |p - c| - r
};
SphereFit fit_sphere(const std::vector<Vector3>& pts);

}  // namespace dpw
