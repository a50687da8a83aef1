#include <doctest.h>

#include "dpw/frame.hpp"

using namespace dpw;

namespace {

FrameOptions small_opts() {
    FrameOptions o;
    o.iw.n_trunc = 12;
    return o;
}

GridSpec grid(double x0, double x1, double y0, double y1, int nx, int ny) {
    GridSpec g;
    g.x0 = x0;
    g.x1 = x1;
    g.y0 = y0;
    g.y1 = y1;
    g.nx = nx;
    g.ny = ny;
    return g;
}

const AnalyticFn kOne = AnalyticFn::constant(1.0);
const AnalyticFn kZero = AnalyticFn::constant(0.0);

}  // namespace

TEST_CASE("zero potential integrates to the identity everywhere") {
    const Potential eta = normalized(kZero, kZero);
    const FrameField f = integrate_frame(eta, grid(-1, 1, -1, 1, 9, 9), small_opts());
    for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 9; ++j) {
            CHECK(max_coeff_distance(f.at(i, j).Phi, LaurentMatrix::identity()) < 1e-15);
            CHECK(max_coeff_distance(f.at(i, j).F, LaurentMatrix::identity()) < 1e-14);
        }
    CHECK(f.max_tail_mass == 0.0);
    CHECK(f.failed_points == 0);
}

TEST_CASE("nilpotent constant potential integrates exactly") {
    // eta = off-diag(1, 0) lambda^-1 dz: Phi = I + (w - w0) A lambda^-1 in the
    // frame parameter w (the conjugate of the stored grid coordinate)
    const Potential eta = normalized(kOne, kZero);
    const GridSpec g = grid(-1, 1, -0.5, 0.5, 9, 5);
    const FrameField f = integrate_frame_only(eta, g, small_opts());
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
            const Complex w = std::conj(g.z(i, j));  // basepoint is 0
            const LaurentMatrix& phi = f.at(i, j).Phi;
            CHECK(std::abs(phi.at(-1)(0, 1) - w) < 1e-13);
            CHECK(std::abs(phi.at(0)(0, 0) - Complex(1, 0)) < 1e-13);
            CHECK(std::abs(phi.at(0)(1, 1) - Complex(1, 0)) < 1e-13);
            CHECK(std::abs(phi.at(-1)(1, 0)) < 1e-15);
        }
}

TEST_CASE("basepoint snapping") {
    GridSpec g = grid(1.0, 3.0, -1, 1, 5, 5);  // 0 not in x range
    const Potential eta = normalized(kZero, kZero);
    const FrameField f = integrate_frame_only(eta, g, small_opts());
    CHECK(f.ibase == 0);
    CHECK(f.jbase == 2);

    GridSpec g2 = grid(-1, 1, -1, 1, 5, 5);
    g2.basepoint = Complex(0.5, -0.5);
    const FrameField f2 = integrate_frame_only(eta, g2, small_opts());
    CHECK(f2.ibase == 3);
    CHECK(f2.jbase == 1);
}

TEST_CASE("flatness: path independence") {
    FrameOptions o = small_opts();

    const Potential zero = normalized(kZero, kZero);
    const FrameField fz = integrate_frame_only(zero, grid(-1, 1, -1, 1, 17, 17), o);
    CHECK(path_independence_check(zero, fz, o, 5) == 0.0);

    // constant potential: the two legs commute, so the defect sits at the
    // roundoff floor regardless of step size
    const Potential eta = geodesic_gcp(AnalyticFn::constant(2.0), kZero);
    const FrameField f1 = integrate_frame_only(eta, grid(-1.5, 1.5, -1, 1, 51, 51), o);
    CHECK(path_independence_check(eta, f1, o, 6) < 1e-12);

    // z-dependent data: integrator-level defect, ~16x shrink per step halving
    const Potential s4 = geodesic_gcp(AnalyticFn::parse("1 - s^4"), kZero);
    FrameOptions o16;
    o16.iw.n_trunc = 16;
    const FrameField f2 = integrate_frame_only(s4, grid(-1.3, 1.3, -1, 1, 101, 101), o16);
    const FrameField f3 = integrate_frame_only(s4, grid(-1.3, 1.3, -1, 1, 201, 201), o16);
    const double d2 = path_independence_check(s4, f2, o16, 8);
    const double d3 = path_independence_check(s4, f3, o16, 8);
    CHECK(d3 <= 1e-8);
    CHECK(d3 < d2 / 8.0);
}

TEST_CASE("step-halving convergence of the frame integral") {
    // global error at the far corner against a much finer reference
    const Potential eta = geodesic_gcp(AnalyticFn::constant(2.0), kZero);
    FrameOptions o = small_opts();

    auto corner = [&](int n, int sub) {
        FrameOptions oo = o;
        oo.substeps = sub;
        const FrameField f = integrate_frame_only(eta, grid(0, 1, 0, 1, n, n), oo);
        return f.at(n - 1, n - 1).Phi;
    };
    const LaurentMatrix ref = corner(9, 64);
    const double e1 = max_coeff_distance(corner(9, 1), ref);  // h = 0.125
    const double e2 = max_coeff_distance(corner(9, 2), ref);
    const double ratio = e1 / e2;
    CHECK(e1 < 1e-5);
    CHECK(ratio > 10.0);
    CHECK(ratio < 24.0);
}

TEST_CASE("GCP potentials have trivial Iwasawa along the curve") {
    FrameOptions o;
    o.iw.n_trunc = 16;
    const GridSpec g = grid(-1, 1, -0.4, 0.4, 41, 9);
    const std::vector<Potential> pots = {
        geodesic_gcp(AnalyticFn::parse("1 - s^4"), kZero),
        geodesic_gcp(kOne, kOne),
        singular_gcp(kOne, kOne, {-1, 1}),
        singular_gcp_general(AnalyticFn::parse("s"), kOne, {-1, 1}),
        general_gcp(AnalyticFn::parse("2 + sin(s)"), AnalyticFn::parse("cos(s)"),
                    AnalyticFn::constant(0.5), {-1, 1}),
        cmc_gcp(AnalyticFn::parse("s"), kZero, kZero),
    };
    for (const Potential& eta : pots) {
        const FrameField f = integrate_frame(eta, g, o);
        REQUIRE(f.failed_points == 0);
        double worst = 0.0;
        for (int i = 0; i < g.nx; ++i)
            worst = std::max(worst, max_coeff_distance(f.at(i, f.jbase).Bplus,
                                                       LaurentMatrix::identity()));
        CHECK(worst < 1e-6);
    }
}

TEST_CASE("per-point unitarity and determinants") {
    FrameOptions o;
    o.iw.n_trunc = 16;
    const Potential eta = geodesic_gcp(AnalyticFn::constant(2.0), kZero);
    const FrameField f = integrate_frame(eta, grid(-1.5, 1.5, -1, 1, 31, 21), o);
    CHECK(f.failed_points == 0);
    CHECK(f.max_residual < 1e-8);
    for (int i = 0; i < f.spec.nx; i += 7)
        for (int j = 0; j < f.spec.ny; j += 5) {
            CHECK(check_twisted(f.at(i, j).F, 1e-7).twisted);
            CHECK(f.at(i, j).rho > 0.0);
        }
}

TEST_CASE("extract_Up recovers the boundary data") {
    FrameOptions o;
    o.iw.n_trunc = 16;

    // geodesic along y = 0: U_p = ((tau - i)/2) e1 - (kappa/2) e2
    {
        const AnalyticFn kappa = AnalyticFn::parse("1 - s^4");
        const Potential eta = geodesic_gcp(kappa, kOne);
        const GridSpec g = grid(-1, 1, -0.2, 0.2, 81, 17);
        const FrameField f = integrate_frame(eta, g, o);
        for (int i : {20, 40, 55}) {
            const UpResult u = extract_Up(f, i, f.jbase);
            const double x = g.x(i);
            const Matrix2c want =
                0.5 * (Complex(1, 0) - kImag) * su2_e1() - 0.5 * kappa.eval_real(x) * su2_e2();
            CHECK((u.Up - want).norm() < 5e-4);  // central differences, O(h^2)
        }
    }

    // singular GCP along y = 0: U_p = ((tau - i)/2) e1, e2 component zero
    {
        const Potential eta = singular_gcp(kOne, AnalyticFn::parse("s"), {-1, 1});
        const GridSpec g = grid(-1, 1, -0.2, 0.2, 81, 17);
        const FrameField f = integrate_frame(eta, g, o);
        for (int i : {20, 40, 55}) {
            const UpResult u = extract_Up(f, i, f.jbase);
            const double x = g.x(i);
            const Matrix2c want = 0.5 * (Complex(x, 0) - kImag) * su2_e1();
            CHECK((u.Up - want).norm() < 5e-4);
            // margin vanishes on a singular curve: |u12| = |u21|
            CHECK(u.margin < 5e-4);
        }
    }

    // zero potential: U_p = 0; boundary points are rejected
    {
        const Potential eta = normalized(kZero, kZero);
        const FrameField f = integrate_frame(eta, grid(-1, 1, -1, 1, 9, 9), o);
        CHECK(extract_Up(f, 4, 4).Up.norm() < 1e-14);
        CHECK_THROWS_AS(extract_Up(f, 0, 4), ValidationError);
    }
}

TEST_CASE("evaluation failure inside the rectangle surfaces as an error") {
    const Potential eta = geodesic_gcp(AnalyticFn::parse("1/s"), kZero);
    GridSpec g = grid(-1, 1, -1, 1, 9, 9);  // basepoint 0 hits the pole
    CHECK_THROWS_AS(integrate_frame_only(eta, g, small_opts()), EvalError);
}
