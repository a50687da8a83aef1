#pragma once

#include <functional>
#include <optional>

#include "dpw/iwasawa.hpp"
#include "dpw/potential.hpp"

namespace dpw {

// Rectangular coordinate grid z = x + iy. The basepoint is snapped to the
// nearest grid node; by default it is (0,0) when that lies in the rectangle,
// else the corner (x0, y closest to 0).
struct GridSpec {
    double x0 = -1.0, x1 = 1.0;
    double y0 = -1.0, y1 = 1.0;
    int nx = 201, ny = 201;
    std::optional<Complex> basepoint;

    void validate() const;
    double hx() const { return (x1 - x0) / (nx - 1); }
    double hy() const { return (y1 - y0) / (ny - 1); }
    double x(int i) const { return x0 + i * hx(); }
    double y(int j) const { return y0 + j * hy(); }
    Complex z(int i, int j) const { return Complex(x(i), y(j)); }
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) +
               static_cast<std::size_t>(i);
    }
};

struct FrameOptions {
    IwasawaOptions iw;
    int substeps = 1;      // integrator substeps per grid cell
    double tail_tol = 1e-8;
    int threads = 0;       // 0 -> hardware_concurrency
};

struct FramePoint {
    LaurentMatrix Phi;
    LaurentMatrix F;      // unitary factor
    LaurentMatrix Bplus;
    double rho = 1.0;
    double residual = 0.0;
    bool ok = true;
};

struct FrameField {
    GridSpec spec;
    int ibase = 0, jbase = 0;  // grid indices of the snapped basepoint
    std::vector<FramePoint> pts;
    double max_tail_mass = 0.0;   // discarded convolution mass during integration
    double max_residual = 0.0;
    int failed_points = 0;

    const FramePoint& at(int i, int j) const { return pts[spec.index(i, j)]; }
    FramePoint& at(int i, int j) { return pts[spec.index(i, j)]; }
};

// Integrate Phi^{-1} dPhi = eta from the basepoint along the fixed path
// (horizontal along the basepoint row, then vertical), classical 4th-order
// one-step method on the truncated loop algebra; then pointwise Iwasawa.
// Iwasawa failure at a point flags it and continues.
FrameField integrate_frame(const Potential& eta, const GridSpec& spec, const FrameOptions& opt);

// Same integration without the factorization (diagnostics / flatness checks).
FrameField integrate_frame_only(const Potential& eta, const GridSpec& spec,
                                const FrameOptions& opt);

// Re-integrate to `probes` random interior nodes along the alternate
// (vertical-then-horizontal) path; returns the largest coefficient-norm
// discrepancy against the stored field.
double path_independence_check(const Potential& eta, const FrameField& field,
                               const FrameOptions& opt, int probes, unsigned seed = 12345);

struct UpResult {
    Matrix2c Up;            // lambda^{+1} coefficient of the dz-part of F^{-1} dF
    Matrix2c Uk;            // lambda^0 coefficient
    double margin = 0.0;    // | |u12| - |u21| |, the immersion margin
};

// Central finite differences of the unitary frame at an interior grid point.
UpResult extract_Up(const FrameField& field, int i, int j);

// Apply fn(j) for j in [0, n) on a small thread pool; fn must be thread-safe.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

}  // namespace dpw
