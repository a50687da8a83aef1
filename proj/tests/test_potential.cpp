#include <doctest.h>

#include <random>
#include <sstream>

#include "dpw/potential.hpp"

using namespace dpw;

namespace {

// Independent route: assemble the defining formulas directly from the basis
// matrices at a sample point and compare against the expanded entry trees.
Matrix2c span_ref(Complex p, Complex q, Complex r) {
    return p * su2_e1() + q * su2_e2() + r * su2_e3();
}

const CauchyInterval kIv{-1.0, 1.0};
const Complex kI(0, 1);

std::vector<Complex> sample_points() {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<Complex> zs;
    for (int k = 0; k < 10; ++k) zs.emplace_back(u(rng), 0.4 * u(rng));
    return zs;
}

}  // namespace

TEST_CASE("geodesic potential: frozen entries for (kappa,tau) = (2,0)") {
    // hand expansion of ((tau - i)/2) e1 - (kappa/2) e2 with kappa=2, tau=0:
    // lambda^{+1} coefficient [[0, -3/4],[1/4, 0]]
    const Potential p = geodesic_gcp(AnalyticFn::constant(2.0), AnalyticFn::constant(0.0));
    const Matrix2c a1 = p.coeff(+1, Complex(0.3, 0.1));
    CHECK(std::abs(a1(0, 1) - Complex(-0.75, 0)) < 1e-15);
    CHECK(std::abs(a1(1, 0) - Complex(0.25, 0)) < 1e-15);
    CHECK(std::abs(a1(0, 0)) < 1e-15);
    CHECK(std::abs(p.coeff(0, Complex(0.3, 0.1)).norm()) < 1e-15);
    // lambda^{-1}: ((tau + i)/2) e1 - (kappa/2) e2 -> [[0, (1-k)/4... ]]
    const Matrix2c am = p.coeff(-1, Complex(0., 0.));
    CHECK(std::abs(am(0, 1) - Complex(-0.25, 0)) < 1e-15);
    CHECK(std::abs(am(1, 0) - Complex(0.75, 0)) < 1e-15);
}

TEST_CASE("all GCP constructors match the basis-matrix route") {
    const AnalyticFn kappa = AnalyticFn::parse("1 - s^4");
    const AnalyticFn tau = AnalyticFn::parse("cos(s)");
    const AnalyticFn kg = AnalyticFn::parse("s/2");
    const AnalyticFn b = AnalyticFn::parse("sin(s)");
    const AnalyticFn c = AnalyticFn::parse("1 + s^2");

    for (const Complex z : sample_points()) {
        const Complex kv = kappa.eval(z), tv = tau.eval(z), gv = kg.eval(z);
        const Complex bv = b.eval(z), cv = c.eval(z);

        {
            const Potential p = geodesic_gcp(kappa, tau);
            CHECK((p.coeff(+1, z) - span_ref(0.5 * (tv - kI), -0.5 * kv, 0)).norm() < 1e-14);
            CHECK((p.coeff(-1, z) - span_ref(0.5 * (tv + kI), -0.5 * kv, 0)).norm() < 1e-14);
            CHECK(p.coeff(0, z).norm() < 1e-14);
        }
        {
            const Potential p = general_gcp(kappa, kg, tau, kIv);
            CHECK((p.coeff(+1, z) - span_ref(0.5 * (tv - kI), -0.5 * kv, 0)).norm() < 1e-14);
            CHECK((p.coeff(0, z) - span_ref(0, 0, gv)).norm() < 1e-14);
            CHECK((p.coeff(-1, z) - span_ref(0.5 * (tv + kI), -0.5 * kv, 0)).norm() < 1e-14);
        }
        {
            const Potential p = singular_gcp(kappa, tau, kIv);
            CHECK((p.coeff(+1, z) - span_ref(0.5 * (tv - kI), 0, 0)).norm() < 1e-14);
            CHECK((p.coeff(0, z) - span_ref(0, 0, kv)).norm() < 1e-14);
            CHECK((p.coeff(-1, z) - span_ref(0.5 * (tv + kI), 0, 0)).norm() < 1e-14);
        }
        {
            const Potential p = singular_gcp_general(b, c, kIv);
            CHECK((p.coeff(+1, z) - span_ref(0, 0.5 * (-1.0 + kI * bv), 0)).norm() < 1e-14);
            CHECK((p.coeff(0, z) - span_ref(0, 0, cv)).norm() < 1e-14);
            CHECK((p.coeff(-1, z) - span_ref(0, 0.5 * (-1.0 - kI * bv), 0)).norm() < 1e-14);
        }
        {
            const Potential p = cmc_gcp(kappa, kg, tau);  // (kappa_n, kappa_g, mu)
            const Complex knv = kv, muv = tv;
            CHECK((p.coeff(+1, z) -
                   span_ref(0.5 * (muv - (knv - 1.0) * kI), 0.5 * (-knv - muv * kI), 0))
                      .norm() < 1e-14);
            CHECK((p.coeff(0, z) - span_ref(0, 0, gv)).norm() < 1e-14);
            CHECK((p.coeff(-1, z) -
                   span_ref(0.5 * (muv + (knv - 1.0) * kI), 0.5 * (-knv + muv * kI), 0))
                      .norm() < 1e-14);
        }
    }
}

TEST_CASE("normalized potential") {
    const Potential p = normalized(AnalyticFn::parse("1 + s^2"), AnalyticFn::constant(1.0));
    const Matrix2c am = p.coeff(-1, Complex(0, 0));
    CHECK(std::abs(am(0, 1) - Complex(1, 0)) < 1e-15);
    CHECK(std::abs(am(1, 0) - Complex(1, 0)) < 1e-15);
    CHECK(p.coeff(0, Complex(0.5, 0.2)).norm() < 1e-15);
    CHECK(p.coeff(1, Complex(0.5, 0.2)).norm() < 1e-15);

    // zero potential is legal (frame stays I, surface degenerates to a point)
    const Potential z = normalized(AnalyticFn::constant(0.0), AnalyticFn::constant(0.0));
    CHECK(z.coeff(-1, Complex(1, 1)).norm() == 0.0);
}

TEST_CASE("general_gcp with (mu,kappa_n,kappa_g) = (tau,kappa,0) equals geodesic_gcp") {
    const AnalyticFn kappa = AnalyticFn::parse("2 + sin(s)");
    const AnalyticFn tau = AnalyticFn::parse("s^2");
    const Potential a = geodesic_gcp(kappa, tau);
    const Potential g = general_gcp(kappa, AnalyticFn::constant(0.0), tau, kIv);
    for (const Complex z : sample_points())
        for (int n = -1; n <= 1; ++n) CHECK((a.coeff(n, z) - g.coeff(n, z)).norm() < 1e-14);
}

TEST_CASE("twisting pattern holds at random sample points") {
    const std::vector<Complex> zs = sample_points();
    CHECK(geodesic_gcp(AnalyticFn::parse("1 - s^4"), AnalyticFn::parse("s")).twist_defect(zs) ==
          0.0);
    CHECK(singular_gcp(AnalyticFn::constant(1.0), AnalyticFn::constant(1.0), kIv)
              .twist_defect(zs) == 0.0);
    CHECK(normalized(AnalyticFn::parse("s"), AnalyticFn::parse("10 s")).twist_defect(zs) == 0.0);
    CHECK(cmc_gcp(AnalyticFn::parse("s"), AnalyticFn::constant(0.0), AnalyticFn::constant(0.0))
              .twist_defect(zs) == 0.0);
}

TEST_CASE("admissibility checks") {
    // singular_gcp rejects kappa identically zero
    CHECK_THROWS_AS(
        singular_gcp(AnalyticFn::constant(0.0), AnalyticFn::constant(1.0), kIv),
        ValidationError);

    // kappa_n vanishing somewhere only warns
    const Potential p =
        general_gcp(AnalyticFn::parse("sin(s)"), AnalyticFn::constant(0.0),
                    AnalyticFn::constant(0.5), CauchyInterval{-0.5, 0.5});
    CHECK(p.warnings.size() == 1);

    // c with a zero in the interval warns but still constructs (deliberately
    // degenerate data (b,c) = (s,s) is allowed)
    const Potential q =
        singular_gcp_general(AnalyticFn::parse("s"), AnalyticFn::parse("s"), kIv);
    CHECK(q.warnings.size() == 1);
}

TEST_CASE("gcp_data_from_curve reproduces the closed-form cylinder data") {
    // f0 = (cos s, sin s, 0), N0 = cos(s/2)(0,0,1) + sin(s/2) f0
    const AnalyticVec3 f0 = {AnalyticFn::parse("cos(s)"), AnalyticFn::parse("sin(s)"),
                             AnalyticFn::constant(0.0)};
    const AnalyticVec3 N0 = {AnalyticFn::parse("sin(s/2) cos(s)"),
                             AnalyticFn::parse("sin(s/2) sin(s)"), AnalyticFn::parse("cos(s/2)")};
    const CurveData d = gcp_data_from_curve(f0, N0, CauchyInterval{0.0, 4 * M_PI});
    for (double s : {0.3, 1.1, 2.9, 5.0, 9.7}) {
        CHECK(d.kappa_n.eval_real(s) == doctest::Approx(-std::sin(s / 2)).epsilon(1e-12));
        CHECK(d.kappa_g.eval_real(s) == doctest::Approx(std::cos(s / 2)).epsilon(1e-12));
        CHECK(d.mu.eval_real(s) == doctest::Approx(0.5).epsilon(1e-12));
    }
}

TEST_CASE("gcp_data_from_curve: planar curve with its own normal is geodesic data") {
    // unit circle with in-plane normal: kappa_n = kappa = 1, kappa_g = 0, mu = 0
    const AnalyticVec3 f0 = {AnalyticFn::parse("cos(s)"), AnalyticFn::parse("sin(s)"),
                             AnalyticFn::constant(0.0)};
    const AnalyticVec3 N0 = {AnalyticFn::parse("-cos(s)"), AnalyticFn::parse("-sin(s)"),
                             AnalyticFn::constant(0.0)};
    const CurveData d = gcp_data_from_curve(f0, N0, CauchyInterval{0.0, 2 * M_PI});
    for (double s : {0.2, 1.5, 4.4}) {
        CHECK(d.kappa_n.eval_real(s) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(d.kappa_g.eval_real(s)) < 1e-12);
        CHECK(std::abs(d.mu.eval_real(s)) < 1e-12);
    }
}

TEST_CASE("gcp_data_from_curve: symbolic equals finite differences on random data") {
    // arc-length helix with its principal normal
    const AnalyticVec3 f0 = {AnalyticFn::parse("0.6 cos(s)"), AnalyticFn::parse("0.6 sin(s)"),
                             AnalyticFn::parse("0.8 s")};
    const AnalyticVec3 N0 = {AnalyticFn::parse("-cos(s)"), AnalyticFn::parse("-sin(s)"),
                             AnalyticFn::constant(0.0)};
    const CurveData d = gcp_data_from_curve(f0, N0, CauchyInterval{-2, 2});

    const AnalyticVec3 t = derivative(f0);
    for (double s : {-1.7, -0.4, 0.9, 1.8}) {
        const double h = 1e-5;
        // finite-difference versions of the defining inner products
        auto vec_at = [&](const AnalyticVec3& v, double x) { return eval_real(v, x); };
        const Vector3 tpp =
            (vec_at(t, s + h) - vec_at(t, s - h)) / (2 * h);  // f0'' by differences of f0'
        const Vector3 n0 = vec_at(N0, s);
        const Vector3 t0 = vec_at(t, s);
        const Vector3 npfd = (vec_at(N0, s + h) - vec_at(N0, s - h)) / (2 * h);
        CHECK(d.kappa_n.eval_real(s) == doctest::Approx(tpp.dot(n0)).epsilon(1e-7));
        CHECK(d.kappa_g.eval_real(s) == doctest::Approx(tpp.dot(n0.cross(t0))).epsilon(1e-7));
        CHECK(d.mu.eval_real(s) == doctest::Approx(t0.cross(n0).dot(npfd)).epsilon(1e-7));
    }

    // violated preconditions are rejected with the worst defect
    const AnalyticVec3 bad = {AnalyticFn::parse("2 cos(s)"), AnalyticFn::parse("2 sin(s)"),
                              AnalyticFn::constant(0.0)};
    CHECK_THROWS_AS(gcp_data_from_curve(bad, N0, CauchyInterval{-1, 1}), ValidationError);
}

TEST_CASE("symmetry order patterns") {
    // reference pairs at their stated orders
    CHECK(check_symmetry_order(AnalyticFn::parse("cos(s^2)"), AnalyticFn::parse("sin(s^2)"), 4).ok);
    CHECK(check_symmetry_order(AnalyticFn::parse("1 + s^3"), AnalyticFn::parse("s"), 3).ok);
    CHECK_FALSE(
        check_symmetry_order(AnalyticFn::parse("1 + s^3"), AnalyticFn::parse("s"), 4).ok);

    const SymmetryReport r =
        check_symmetry_order(AnalyticFn::parse("1 + s^2"), AnalyticFn::constant(1.0), 2);
    CHECK(r.ok);

    // mirrored pattern: swap the roles of a and b
    const SymmetryReport m =
        check_symmetry_order(AnalyticFn::parse("s"), AnalyticFn::parse("1 + s^3"), 3);
    CHECK(m.ok);
    CHECK(m.pattern == 'B');
}

TEST_CASE("normal curve geodesic curvature and cone potential") {
    // circle of radius R on the sphere: c = sqrt(1 - R^2) / R
    for (double R : {0.5, 1.0 / std::sqrt(2.0), 0.9}) {
        std::ostringstream sx, sy;
        sx.precision(17);
        sy.precision(17);
        sx << R << " cos(s/" << R << ")";
        sy << R << " sin(s/" << R << ")";
        const AnalyticVec3 N = {AnalyticFn::parse(sx.str()), AnalyticFn::parse(sy.str()),
                                AnalyticFn::constant(std::sqrt(1 - R * R))};
        const AnalyticFn c = normal_curve_geodesic_curvature(N);
        const double expected = std::sqrt(1 - R * R) / R;
        for (double s : {0.0, 0.4, 1.3})
            CHECK(c.eval_real(s) == doctest::Approx(expected).epsilon(1e-12));
    }

    // c = 1: N(s) = (1/sqrt2)(cos(sqrt2 s), sin(sqrt2 s), 1) closes at 2 pi / sqrt 2
    ConeReport rep;
    const Potential p = cone_potential_from_normal_curve(
        AnalyticFn::constant(1.0), 2 * M_PI / std::sqrt(2.0), CauchyInterval{0, 2 * M_PI}, &rep);
    CHECK(rep.convex);
    CHECK(rep.closure_checked);
    CHECK(rep.closed);
    CHECK(rep.closure_defect < 1e-6);
    CHECK(p.kind == PotentialKind::SingularGeneral);

    // reconstruction against the closed form
    const auto N = reconstruct_normal_curve(AnalyticFn::constant(1.0), 0.0, 1.0, 9);
    for (std::size_t k = 0; k < N.size(); ++k) CHECK(std::abs(N[k].norm() - 1.0) < 1e-9);

    // wrong period: not closed
    ConeReport rep2;
    cone_potential_from_normal_curve(AnalyticFn::constant(1.0), 2 * M_PI,
                                     CauchyInterval{0, 2 * M_PI}, &rep2);
    CHECK_FALSE(rep2.closed);

    // sign change in c: convexity failure reported, potential still returned
    ConeReport rep3;
    const Potential q = cone_potential_from_normal_curve(
        AnalyticFn::parse("s"), std::nullopt, CauchyInterval{-1, 1}, &rep3);
    CHECK_FALSE(rep3.convex);
    CHECK(!q.warnings.empty());
}
