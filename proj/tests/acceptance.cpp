// Acceptance suite: one line per criterion, PASS/FAIL with the measured
// values. Exit status is the number of failed criteria.

#include <cstdio>
#include <random>
#include <sstream>
#include <vector>

#include "dpw/meshio.hpp"
#include "dpw/runner.hpp"

using namespace dpw;

namespace {

int g_failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
    std::printf("%s criterion %2d: %-28s %s\n", pass ? "PASS" : "FAIL", id, name,
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.3g", v);
    return b;
}

Matrix2c m2(Complex a, Complex b, Complex c, Complex d) {
    Matrix2c m;
    m << a, b, c, d;
    return m;
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

FrameOptions opts(int n_trunc, int substeps = 1) {
    FrameOptions o;
    o.iw.n_trunc = n_trunc;
    o.substeps = substeps;
    return o;
}

const AnalyticFn kOne = AnalyticFn::constant(1.0);
const AnalyticFn kZero = AnalyticFn::constant(0.0);

LaurentMatrix random_unimodular_twisted(std::mt19937& rng, int n_trunc) {
    std::uniform_real_distribution<double> u(-0.4, 0.4);
    auto elem = [&](bool upper) {
        LaurentMatrix L = LaurentMatrix::identity();
        for (int n : {-1, 1}) {
            Matrix2c m = Matrix2c::Zero();
            if (upper)
                m(0, 1) = Complex(u(rng), u(rng));
            else
                m(1, 0) = Complex(u(rng), u(rng));
            L = add(L, LaurentMatrix::monomial(n, m));
        }
        L.twisted = true;
        return L;
    };
    const double d = std::exp(u(rng));
    LaurentMatrix D = LaurentMatrix::monomial(0, m2(d, 0, 0, 1.0 / d));
    D.twisted = true;
    LaurentMatrix out = multiply(elem(true), elem(false), n_trunc);
    out = multiply(out, D, n_trunc);
    out = multiply(out, elem(true), n_trunc);
    return multiply(out, elem(false), n_trunc);  // degree <= 3, det exactly 1
}

// ---------------------------------------------------------------------------

void criterion1_iwasawa_roundtrip() {
    const IwasawaOptions opt{};  // n_trunc 16
    std::mt19937 rng(20240801);
    double worst = 0.0;
    bool ok = true;
    for (int t = 0; t < 100; ++t) {
        const LaurentMatrix phi = random_unimodular_twisted(rng, opt.n_trunc);
        const IwasawaResult r = iwasawa(phi, opt);
        const double tw = std::max(check_twisted(r.unitary_part, 1e300).defect,
                                   check_twisted(r.plus_part, 1e300).defect);
        worst = std::max(worst, std::max(r.residual, tw));
    }
    ok = worst <= 1e-8;

    // closed-form sphere frame at z = 1
    LaurentMatrix phi = add(LaurentMatrix::identity(), LaurentMatrix::monomial(-1, m2(0, 1, 0, 0)));
    phi.twisted = true;
    const IwasawaResult r = iwasawa(phi, opt);
    const double s = 1.0 / std::sqrt(2.0);
    LaurentMatrix Fexp(-1, 1);
    Fexp.ref(0) = m2(s, 0, 0, s);
    Fexp.ref(-1) = m2(0, s, 0, 0);
    Fexp.ref(1) = m2(0, 0, -s, 0);
    LaurentMatrix Bexp(0, 1);
    Bexp.ref(0) = m2(s, 0, 0, 2 * s);
    Bexp.ref(1) = m2(0, 0, s, 0);
    const double closed = std::max(max_coeff_distance(r.unitary_part, Fexp),
                                   max_coeff_distance(r.plus_part, Bexp));
    ok = ok && closed <= 1e-10;

    report(1, "iwasawa round-trip", ok,
           "max residual " + fmt(worst) + " (<= 1e-8), closed form " + fmt(closed) +
               " (<= 1e-10)");
}

void criterion2_flatness() {
    const Potential eta = geodesic_gcp(AnalyticFn::parse("1 - s^4"), kZero);
    const FrameOptions o = opts(16);
    const FrameField coarse = integrate_frame_only(eta, grid(-1.3, 1.3, -1, 1, 101, 101), o);
    const FrameField fine = integrate_frame_only(eta, grid(-1.3, 1.3, -1, 1, 201, 201), o);
    const double dc = path_independence_check(eta, coarse, o, 8);
    const double df = path_independence_check(eta, fine, o, 8);
    const double ratio = dc / df;
    const bool ok = df <= 1e-8 && ratio >= 8.0;
    report(2, "flatness", ok,
           "defect " + fmt(df) + " (<= 1e-8), halving ratio " + fmt(ratio) + " (~16)");
}

struct KStats {
    double worst = 0.0;
    int count = 0;
};

KStats k_deviation(const Frontal& fr, double reg_floor) {
    KStats st;
    for (int i = 1; i < fr.spec.nx - 1; ++i)
        for (int j = 1; j < fr.spec.ny - 1; ++j) {
            if (!fr.valid(i, j) || fr.margin[fr.spec.index(i, j)] <= reg_floor) continue;
            try {
                st.worst = std::max(st.worst,
                                    std::abs(gauss_mean_curvature(fr, i, j, reg_floor).K - 1.0));
                ++st.count;
            } catch (const Error&) {
            }
        }
    return st;
}

void criterion3_gauss_curvature() {
    bool ok = true;
    std::ostringstream detail;
    struct Job {
        const char* name;
        Potential eta;
        GridSpec coarse, fine;
    };
    std::vector<Job> jobs;
    jobs.push_back({"geodesic(2,0)", geodesic_gcp(AnalyticFn::constant(2.0), kZero),
                    grid(-1.5, 1.5, -0.75, 0.75, 101, 101),
                    grid(-1.5, 1.5, -0.75, 0.75, 201, 201)});
    jobs.push_back({"normalized(1,10)",
                    normalized(kOne, AnalyticFn::constant(10.0)),
                    grid(-0.08, 0.08, -0.08, 0.08, 101, 101),
                    grid(-0.08, 0.08, -0.08, 0.08, 201, 201)});
    for (const Job& job : jobs) {
        const FrameOptions o = opts(16);
        const KStats c =
            k_deviation(build_frontal(integrate_frame(job.eta, job.coarse, o),
                                      SurfaceKind::Spherical),
                        1e-3);
        const KStats f = k_deviation(
            build_frontal(integrate_frame(job.eta, job.fine, o), SurfaceKind::Spherical), 1e-3);
        const double order = std::log2(c.worst / f.worst);
        ok = ok && f.worst <= 1e-3 && order >= 1.8;
        detail << job.name << " |K-1| " << fmt(f.worst) << " order " << fmt(order) << "; ";
    }
    report(3, "K = 1 with refinement order", ok, detail.str() + "(<= 1e-3, order >= 1.8)");
}

void criterion4_geodesic_curve_match() {
    struct Case {
        const char* name;
        AnalyticFn kappa, tau;
        double x0, x1;
    };
    const std::vector<Case> cases = {
        {"(2,0)", AnalyticFn::constant(2.0), kZero, -1.5, 1.5},
        {"(1,1)", kOne, kOne, -1.5, 1.5},
        {"(1-s^4,0)", AnalyticFn::parse("1 - s^4"), kZero, -1.3, 1.3},
    };
    bool ok = true;
    std::ostringstream detail;
    for (const Case& c : cases) {
        const Potential eta = geodesic_gcp(c.kappa, c.tau);
        const GridSpec g = grid(c.x0, c.x1, -0.1, 0.1, 201, 5);
        const FrameField field = integrate_frame(eta, g, opts(16, 2));
        const Frontal fr = build_frontal(field, SurfaceKind::Spherical);
        std::vector<Vector3> have;
        for (int i = 0; i < g.nx; ++i) have.push_back(fr.f[g.index(i, field.jbase)]);
        const FrenetCurve want = frenet_reconstruct(c.kappa, c.tau, c.x0, c.x1, g.nx);
        const double rms = procrustes(want.f, have).rms;
        ok = ok && rms <= 1e-5;
        detail << c.name << " rms " << fmt(rms) << "; ";
    }
    report(4, "geodesic curve match", ok, detail.str() + "(<= 1e-5)");
}

void criterion5_sphere_fit() {
    const Potential eta = geodesic_gcp(kOne, kZero);
    const FrameField field = integrate_frame(eta, grid(-1.6, 1.6, -1, 1, 101, 101), opts(16));
    const Frontal fr = build_frontal(field, SurfaceKind::Spherical);
    std::vector<Vector3> pts;
    for (std::size_t k = 0; k < fr.f.size(); ++k)
        if (fr.mask[k]) pts.push_back(fr.f[k]);
    const SphereFit fit = fit_sphere(pts);
    const bool ok = fit.rms <= 1e-5 && std::abs(fit.radius - 1.0) <= 1e-5;
    report(5, "unit sphere fit", ok,
           "rms " + fmt(fit.rms) + ", |r-1| " + fmt(std::abs(fit.radius - 1.0)) + " (<= 1e-5)");
}

void criterion6_singular_gcp() {
    const Potential eta = singular_gcp(kOne, kOne, {-1, 1});
    const GridSpec g = grid(-1, 1, -0.5, 0.5, 201, 101);
    const FrameField field = integrate_frame(eta, g, opts(16));
    const Frontal fr = build_frontal(field, SurfaceKind::Spherical);
    const int j0 = field.jbase;

    double mu_max = 0.0, dmu_worst = 0.0, align_worst = 0.0;
    for (int i = 2; i < g.nx - 2; ++i) {
        mu_max = std::max(mu_max, std::abs(fr.mu[g.index(i, j0)]));
        const double dmu = (fr.mu[g.index(i, j0 + 1)] - fr.mu[g.index(i, j0 - 1)]) / (2 * g.hy());
        dmu_worst = std::max(dmu_worst, std::abs(dmu - (-1.0 * (1 + 1.0))));  // -kappa(1+tau^2)

        Eigen::Matrix<double, 3, 2> J;
        J.col(0) = (fr.f[g.index(i + 1, j0)] - fr.f[g.index(i - 1, j0)]) / (2 * g.hx());
        J.col(1) = (fr.f[g.index(i, j0 + 1)] - fr.f[g.index(i, j0 - 1)]) / (2 * g.hy());
        Eigen::JacobiSVD<Eigen::Matrix<double, 3, 2>> svd(J, Eigen::ComputeFullV);
        const Vector2 v = svd.matrixV().col(1).normalized();
        const Vector2 expected = Vector2(1.0, 1.0).normalized();  // tau d_x + d_y
        const double align = std::abs(v.dot(expected));
        align_worst = std::max(align_worst, std::sqrt(std::max(0.0, 1.0 - align * align)));
    }
    const double h = std::max(g.hx(), g.hy());
    const bool ok = mu_max <= 1e-5 && dmu_worst <= 1e-3 && align_worst <= 10 * h;
    report(6, "singular GCP invariants", ok,
           "max|mu| " + fmt(mu_max) + " (<= 1e-5), d(mu)/dy defect " + fmt(dmu_worst) +
               " (<= 1e-3), null-dir sin " + fmt(align_worst) + " (<= " + fmt(10 * h) + ")");
}

void criterion7_classifier_fixtures() {
    const AnalyticFn s = AnalyticFn::parse("s");
    bool ok = true;
    std::ostringstream detail;

    auto expect = [&](const Classification& c, SingularityLabel want, const char* name) {
        if (c.label != want) {
            ok = false;
            detail << name << " got " << to_string(c.label) << "; ";
        }
    };
    expect(classify_regular_curve_point(s, kOne, 0.0), SingularityLabel::CuspidalBeaks,
           "(s,1)");
    expect(classify_general_curve_point(s, kOne, 0.0), SingularityLabel::Swallowtail, "(x,1)");
    expect(classify_general_curve_point(AnalyticFn::parse("s^2"), kOne, 0.0),
           SingularityLabel::CuspidalButterfly, "(x^2,1)");
    expect(classify_general_curve_point(kZero, AnalyticFn::parse("1 + 0.5 cos(s)"), 0.7),
           SingularityLabel::ConePoint, "(0,1+.5cos)");
    expect(classify_general_curve_point(s, s, 0.0), SingularityLabel::DegenerateUnclassified,
           "(x,x)");

    // cone image diameter
    const Potential eta =
        singular_gcp_general(kZero, AnalyticFn::parse("1 + 0.5 cos(s)"), {0, 2 * M_PI});
    const GridSpec g = grid(0, 2 * M_PI, -0.2, 0.2, 201, 5);
    const FrameField field = integrate_frame(eta, g, opts(16, 8));
    const Frontal fr = build_frontal(field, SurfaceKind::Spherical);
    double diam = 0.0;
    for (int i = 0; i < g.nx; ++i)
        for (int k = i + 1; k < g.nx; ++k)
            diam = std::max(
                diam, (fr.f[g.index(i, field.jbase)] - fr.f[g.index(k, field.jbase)]).norm());
    ok = ok && diam <= 1e-6;
    detail << "cone diameter " << fmt(diam) << " (<= 1e-6)";
    report(7, "classifier fixtures", ok, detail.str());
}

void criterion8_cone_curvature_identity() {
    double worst = 0.0;
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
        for (double sv : {0.0, 0.37, 1.1, 2.4})
            worst = std::max(worst, std::abs(c.eval_real(sv) - expected));
    }
    report(8, "cone curvature identity", worst <= 1e-12,
           "max defect " + fmt(worst) + " (<= 1e-12)");
}

void criterion9_parallel_cmc() {
    const Potential eta = cmc_gcp(AnalyticFn::parse("s"), kZero, kZero);
    const GridSpec g = grid(-2, 2, -1, 1, 201, 101);
    const FrameField field = integrate_frame(eta, g, opts(16));
    const Frontal sph = build_frontal(field, SurfaceKind::Spherical);
    const Frontal cmc = build_frontal(field, SurfaceKind::Cmc);

    double sb = 0.0;
    for (std::size_t k = 0; k < sph.f.size(); ++k)
        if (sph.mask[k]) sb = std::max(sb, (cmc.f[k] - (sph.f[k] - sph.N[k])).norm());

    const Frontal round = parallel_surface(parallel_surface(sph, -1.0), 1.0);
    double rt = 0.0;
    for (std::size_t k = 0; k < sph.f.size(); ++k)
        if (sph.mask[k]) rt = std::max(rt, (round.f[k] - sph.f[k]).norm());

    // discrete H where the CMC frontal is resolved by the mesh. The parallel
    // surface is conformally parameterized, so its degeneracy shows as a
    // vanishing conformal factor, not as metric anisotropy; the second-
    // difference error scales like h^2 / E, so E >= 0.4 keeps the estimate
    // inside the 1e-3 budget at this resolution.
    double hworst = 0.0;
    int cnt = 0;
    for (int i = 1; i < g.nx - 1; ++i)
        for (int j = 1; j < g.ny - 1; ++j) {
            if (cmc.margin[g.index(i, j)] <= 1e-3) continue;
            try {
                const FormCoefficients m = fundamental_forms(cmc, i, j).from_mesh;
                if (0.5 * (m.E + m.G) < 0.4) continue;
                hworst = std::max(hworst,
                                  std::abs(gauss_mean_curvature(cmc, i, j).H - 0.5));
                ++cnt;
            } catch (const Error&) {
            }
        }

    const bool ok = sb <= 1e-12 && rt <= 1e-14 && hworst <= 1e-3 && cnt > 1000;
    report(9, "parallel / CMC consistency", ok,
           "SB defect " + fmt(sb) + " (<= 1e-12), roundtrip " + fmt(rt) +
               " (<= 1e-14), |H-1/2| " + fmt(hworst) + " over " + std::to_string(cnt) +
               " pts (<= 1e-3)");
}

void criterion10_nonorientable() {
    const Potential eta =
        general_gcp(AnalyticFn::parse("-sin(s/2)"), AnalyticFn::parse("cos(s/2)"),
                    AnalyticFn::constant(0.5), {0, 4 * M_PI});
    const GridSpec g = grid(0, 4 * M_PI, -0.15, 0.15, 401, 5);
    const FrameField field = integrate_frame(eta, g, opts(32, 2));
    const Frontal fr = build_frontal(field, SurfaceKind::Spherical);

    const int shift = (g.nx - 1) / 2;  // x + 2 pi
    double fdef = 0.0, ndef = 0.0;
    for (int i = 0; i + shift < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
            if (!fr.valid(i, j) || !fr.valid(i + shift, j)) continue;
            fdef = std::max(fdef, (fr.f[g.index(i + shift, j)] - fr.f[g.index(i, j)]).norm());
            ndef = std::max(ndef, (fr.N[g.index(i + shift, j)] + fr.N[g.index(i, j)]).norm());
        }
    const bool ok = fdef <= 1e-4 && ndef <= 1e-4;
    report(10, "non-orientable cylinder", ok,
           "f period defect " + fmt(fdef) + ", N antiperiod defect " + fmt(ndef) +
               " (<= 1e-4; N_trunc 32)");
}

void criterion11_branch_points() {
    const Rect rect{-1.2, 1.2, -1.2, 1.2};
    const AnalyticFn s = AnalyticFn::parse("s");
    bool ok = true;
    std::ostringstream detail;

    const BranchPointReport r1 = branch_points(s, AnalyticFn::parse("10 s"), rect, {0, 0});
    if (r1.points.size() != 1 || std::abs(r1.points[0]) > 1e-8) {
        ok = false;
        detail << "(z,10z): got " << r1.points.size() << " points; ";
    } else {
        detail << "(z,10z) at |z| = " << fmt(std::abs(r1.points[0])) << "; ";
    }

    const BranchPointReport r2 =
        branch_points(kOne, AnalyticFn::constant(10.0), rect, {0, 0});
    if (!r2.points.empty()) {
        ok = false;
        detail << "(1,10): spurious points; ";
    }

    const BranchPointReport r3 = branch_points(AnalyticFn::parse("1 + s^2"), kOne, rect, {0, 0});
    if (!r3.points.empty() || !r3.basepoint_rank1) {
        ok = false;
        detail << "(1+z^2,1): rank-1 flag " << r3.basepoint_rank1 << "; ";
    } else {
        detail << "(1+z^2,1) basepoint rank-1; ";
    }
    report(11, "branch points", ok, detail.str());
}

void criterion12_symmetry_patterns() {
    struct Case {
        const char* a;
        const char* b;
        int order;
    };
    const std::vector<Case> accepts = {
        {"1 + s^2", "1", 2},      {"1 + s^3", "s", 3},        {"1 + s^4", "s^2", 4},
        {"1 + s^5", "s^3", 5},    {"s^4", "s^2", 4},          {"1", "s^3", 5},
        {"1 + s^5", "s^3 + s^8", 5}, {"cos(s^2)", "sin(s^2)", 4},
    };
    bool ok = true;
    std::ostringstream detail;
    for (const Case& c : accepts) {
        const SymmetryReport r =
            check_symmetry_order(AnalyticFn::parse(c.a), AnalyticFn::parse(c.b), c.order);
        if (!r.ok) {
            ok = false;
            detail << "(" << c.a << "," << c.b << ")@" << c.order << " rejected; ";
        }
    }
    const SymmetryReport rej =
        check_symmetry_order(AnalyticFn::parse("1 + s^3"), AnalyticFn::parse("s"), 4);
    if (rej.ok) {
        ok = false;
        detail << "(1+z^3,z)@4 accepted; ";
    }
    report(12, "rotational symmetry patterns", ok,
           detail.str() + "8 accepts + 1 reject as stated");
}

}  // namespace

int main() {
    criterion1_iwasawa_roundtrip();
    criterion2_flatness();
    criterion3_gauss_curvature();
    criterion4_geodesic_curve_match();
    criterion5_sphere_fit();
    criterion6_singular_gcp();
    criterion7_classifier_fixtures();
    criterion8_cone_curvature_identity();
    criterion9_parallel_cmc();
    criterion10_nonorientable();
    criterion11_branch_points();
    criterion12_symmetry_patterns();
    std::printf("%d of 12 criteria failed\n", g_failures);
    return g_failures;
}
