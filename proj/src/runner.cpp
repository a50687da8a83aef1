#include "dpw/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "dpw/meshio.hpp"

namespace dpw {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

bool kind_is_gcp(const std::string& k) { return k != "normalized"; }

std::vector<std::string> default_oracles(const JobSpec& job) {
    std::vector<std::string> o = {"iwasawa_residual", "normal_unit", "frontal_orthogonality"};
    if (kind_is_gcp(job.kind)) o.push_back("boundary_bplus");
    if (surface_kind_for(job) == SurfaceKind::Spherical) o.push_back("defining_equation");
    return o;
}

struct Pipeline {
    Potential eta;
    ConeReport cone;
    FrameField field;
    Frontal frontal;
};

// Oracles over a finished pipeline. Each returns value + pinned threshold.
class OracleRunner {
  public:
    OracleRunner(const JobSpec& job, Pipeline& p) : job_(job), p_(p) {}

    OracleResult run(const std::string& name) {
        OracleResult r;
        r.name = name;
        if (name == "iwasawa_residual") {
            r.value = p_.field.max_residual;
            r.threshold = 10 * job_.frame.iw.iwasawa_tol;
        } else if (name == "flatness") {
            r.value = path_independence_check(p_.eta, p_.field, job_.frame, job_.flatness_probes);
            r.threshold = job_.flatness_tol;
        } else if (name == "boundary_bplus") {
            r.value = boundary_bplus();
            r.threshold = 1e-6;
        } else if (name == "normal_unit") {
            r.value = normal_unit();
            r.threshold = 1e-10;
        } else if (name == "frontal_orthogonality") {
            r.value = frontal_orthogonality_defect(p_.frontal);
            r.threshold = job_.frontal_tol;
        } else if (name == "defining_equation") {
            // residual of f_z = i N x N_z is O(h^2) times the cube of the
            // normal's derivative scale
            r.value = defining_equation_residual(p_.frontal);
            const double h2 = hx() * hx() + hy() * hy();
            const double scale = normal_derivative_scale();
            r.threshold = 100 * h2 * std::max(1.0, scale * scale * scale);
        } else if (name == "k_constant") {
            r.value = curvature_deviation(true);
            r.threshold = 1e-3;
        } else if (name == "h_constant") {
            r.value = curvature_deviation(false);
            r.threshold = 1e-3;
        } else if (name == "sphere_fit") {
            const SphereFit fit = fit_sphere(valid_points());
            r.value = std::max(fit.rms, std::abs(fit.radius - job_.sphere_radius));
            r.threshold = 1e-5;
            r.detail = "r = " + fmt(fit.radius);
        } else if (name == "curve_match") {
            r.value = curve_match();
            r.threshold = 1e-5;
        } else if (name == "unit_speed") {
            r.value = unit_speed();
            r.threshold = 1e-6;
        } else if (name == "speed_matches_b") {
            r.value = speed_matches_b();
            r.threshold = 1e-5;
        } else if (name == "singular_set") {
            // exact-zero quantity measured by central differences
            r.value = singular_set();
            r.threshold = std::max(1e-5, 2 * (hx() * hx() + hy() * hy()));
        } else if (name == "dmu_dy") {
            r.value = dmu_dy();
            r.threshold = 1e-3;
        } else if (name == "null_direction") {
            r.value = null_direction();
            r.threshold = 10 * std::max(hx(), hy());
        } else if (name == "cone_diameter") {
            r.value = cone_diameter();
            r.threshold = 1e-6;
        } else if (name == "nonorientable_period") {
            r.value = nonorientable_period();
            r.threshold = 1e-4;
        } else if (name == "parallel_consistency") {
            r.value = parallel_consistency();
            r.threshold = 1e-12;
        } else {
            throw ConfigError("unknown oracle '" + name + "'");
        }
        r.pass = r.value <= r.threshold;
        return r;
    }

  private:
    double hx() const { return p_.field.spec.hx(); }
    double hy() const { return p_.field.spec.hy(); }

    AnalyticFn expr(const char* key) const { return AnalyticFn::parse(job_.exprs.at(key)); }

    std::vector<Vector3> valid_points() const {
        std::vector<Vector3> pts;
        for (std::size_t k = 0; k < p_.frontal.f.size(); ++k)
            if (p_.frontal.mask[k]) pts.push_back(p_.frontal.f[k]);
        return pts;
    }

    double boundary_bplus() const {
        const GridSpec& g = p_.field.spec;
        const int j = p_.field.jbase;
        double worst = 0.0;
        for (int i = 0; i < g.nx; ++i) {
            if (!p_.field.at(i, j).ok) continue;
            worst = std::max(worst, max_coeff_distance(p_.field.at(i, j).Bplus,
                                                       LaurentMatrix::identity()));
        }
        return worst;
    }

    double normal_derivative_scale() const {
        const GridSpec& g = p_.field.spec;
        double worst = 0.0;
        for (int i = 1; i < g.nx - 1; ++i)
            for (int j = 1; j < g.ny - 1; ++j) {
                if (!p_.frontal.valid(i, j)) continue;
                const Vector3 nx = (p_.frontal.N[g.index(i + 1, j)] -
                                    p_.frontal.N[g.index(i - 1, j)]) /
                                   (2 * hx());
                const Vector3 ny = (p_.frontal.N[g.index(i, j + 1)] -
                                    p_.frontal.N[g.index(i, j - 1)]) /
                                   (2 * hy());
                worst = std::max({worst, nx.norm(), ny.norm()});
            }
        return worst;
    }

    double normal_unit() const {
        double worst = 0.0;
        for (std::size_t k = 0; k < p_.frontal.N.size(); ++k)
            if (p_.frontal.mask[k])
                worst = std::max(worst, std::abs(p_.frontal.N[k].norm() - 1.0));
        return worst;
    }

    double curvature_deviation(bool gauss) const {
        const GridSpec& g = p_.field.spec;
        double worst = 0.0;
        for (int i = 1; i < g.nx - 1; ++i) {
            for (int j = 1; j < g.ny - 1; ++j) {
                if (p_.frontal.margin[g.index(i, j)] <= job_.reg_floor) continue;
                try {
                    if (!gauss) {
                        // conformally parameterized surface: degeneracy shows as
                        // a vanishing conformal factor; mask unresolved cells
                        const FormCoefficients m =
                            fundamental_forms(p_.frontal, i, j, job_.reg_floor).from_mesh;
                        if (0.5 * (m.E + m.G) < 0.4) continue;
                    }
                    const Curvatures c = gauss_mean_curvature(p_.frontal, i, j, job_.reg_floor);
                    worst = std::max(worst, gauss ? std::abs(c.K - 1.0)
                                                  : std::abs(c.H - job_.h_expected));
                } catch (const Error&) {
                }
            }
        }
        return worst;
    }

    // f(x,0) against the Frenet reconstruction of the prescribed data
    double curve_match() const {
        const GridSpec& g = p_.field.spec;
        const int j = p_.field.jbase;
        std::vector<Vector3> have;
        for (int i = 0; i < g.nx; ++i) have.push_back(p_.frontal.f[g.index(i, j)]);
        const FrenetCurve fc = frenet_reconstruct(expr("kappa"), expr("tau"), g.x0, g.x1, g.nx);
        return procrustes(fc.f, have).rms;
    }

    // 4th-order five-point tangent along the curve row; the 3-point stencil's
    // O(h^2) bias is larger than the 1e-6 unit-speed tolerance at desk grids
    Vector3 curve_tangent(int i) const {
        const GridSpec& g = p_.field.spec;
        const int j = p_.field.jbase;
        auto f = [&](int k) { return p_.frontal.f[g.index(k, j)]; };
        return (f(i - 2) - 8 * f(i - 1) + 8 * f(i + 1) - f(i + 2)) / (12 * hx());
    }

    double unit_speed() const {
        const GridSpec& g = p_.field.spec;
        double worst = 0.0;
        for (int i = 2; i < g.nx - 2; ++i)
            worst = std::max(worst, std::abs(curve_tangent(i).norm() - 1.0));
        return worst;
    }

    double speed_matches_b() const {
        const GridSpec& g = p_.field.spec;
        const AnalyticFn b = expr("b");
        double worst = 0.0;
        for (int i = 2; i < g.nx - 2; ++i)
            worst = std::max(worst,
                             std::abs(curve_tangent(i).norm() - std::abs(b.eval_real(g.x(i)))));
        return worst;
    }

    double singular_set() const {
        const GridSpec& g = p_.field.spec;
        const int j = p_.field.jbase;
        double worst = 0.0;
        for (int i = 1; i < g.nx - 1; ++i)
            worst = std::max(worst, std::abs(p_.frontal.mu[g.index(i, j)]));
        return worst;
    }

    double dmu_dy() const {
        const GridSpec& g = p_.field.spec;
        const int j = p_.field.jbase;
        if (j <= 0 || j >= g.ny - 1) throw NumericalError("dmu_dy: curve row not interior");
        const AnalyticFn kappa = expr("kappa"), tau = expr("tau");
        double worst = 0.0;
        for (int i = 2; i < g.nx - 2; ++i) {
            const double dmu =
                (p_.frontal.mu[g.index(i, j + 1)] - p_.frontal.mu[g.index(i, j - 1)]) / (2 * hy());
            const double k = kappa.eval_real(g.x(i)), t = tau.eval_real(g.x(i));
            worst = std::max(worst, std::abs(dmu + k * (1 + t * t)));
        }
        return worst;
    }

    double null_direction() const {
        const GridSpec& g = p_.field.spec;
        const int j = p_.field.jbase;
        // kernel direction of df along the singular curve: tau d_x + d_y for
        // the unit-speed data, d_x + b d_y for the general data
        const bool general =
            job_.kind == "singular_gcp_general" || job_.kind == "cone_from_normal_curve";
        const AnalyticFn dir_fn = general
                                      ? (job_.kind == "cone_from_normal_curve"
                                             ? AnalyticFn::constant(0.0)
                                             : expr("b"))
                                      : expr("tau");
        double worst = 0.0;
        for (int i = 2; i < g.nx - 2; ++i) {
            Eigen::Matrix<double, 3, 2> J;
            J.col(0) =
                (p_.frontal.f[g.index(i + 1, j)] - p_.frontal.f[g.index(i - 1, j)]) / (2 * hx());
            J.col(1) =
                (p_.frontal.f[g.index(i, j + 1)] - p_.frontal.f[g.index(i, j - 1)]) / (2 * hy());
            Eigen::JacobiSVD<Eigen::Matrix<double, 3, 2>> svd(J, Eigen::ComputeFullV);
            const Vector2 v = svd.matrixV().col(1);
            const double fv = dir_fn.eval_real(g.x(i));
            const Vector2 expected =
                general ? Vector2(1.0, fv).normalized() : Vector2(fv, 1.0).normalized();
            const double align = std::abs(v.normalized().dot(expected));
            worst = std::max(worst, std::sqrt(std::max(0.0, 1.0 - align * align)));
        }
        return worst;
    }

    double cone_diameter() const {
        const GridSpec& g = p_.field.spec;
        const int j = p_.field.jbase;
        double d = 0.0;
        for (int i = 0; i < g.nx; ++i)
            for (int k = i + 1; k < g.nx; k += std::max(1, g.nx / 64))
                d = std::max(d, (p_.frontal.f[g.index(i, j)] - p_.frontal.f[g.index(k, j)]).norm());
        return d;
    }

    double nonorientable_period() const {
        if (!job_.period_check)
            throw ConfigError("nonorientable_period oracle requires output.period_check");
        const GridSpec& g = p_.field.spec;
        const double P = *job_.period_check;
        const int shift = static_cast<int>(std::lround(P / hx()));
        if (shift <= 0 || std::abs(shift * hx() - P) > 1e-9 * std::max(1.0, P))
            throw ConfigError("period_check must be a multiple of the x grid step");
        double worst = 0.0;
        for (int i = 0; i + shift < g.nx; ++i) {
            for (int j = 0; j < g.ny; ++j) {
                if (!p_.frontal.valid(i, j) || !p_.frontal.valid(i + shift, j)) continue;
                worst = std::max(worst, (p_.frontal.f[g.index(i + shift, j)] -
                                         p_.frontal.f[g.index(i, j)])
                                            .norm());
                worst = std::max(worst, (p_.frontal.N[g.index(i + shift, j)] +
                                         p_.frontal.N[g.index(i, j)])
                                            .norm());
            }
        }
        return worst;
    }

    double parallel_consistency() const {
        const Frontal sph = build_frontal(p_.field, SurfaceKind::Spherical);
        const Frontal cmc = build_frontal(p_.field, SurfaceKind::Cmc);
        double worst = 0.0;
        for (std::size_t k = 0; k < sph.f.size(); ++k) {
            if (!sph.mask[k] || !cmc.mask[k]) continue;
            worst = std::max(worst, (cmc.f[k] - (sph.f[k] - sph.N[k])).norm());
        }
        // round trip is held to 1e-14; scaled into the shared 1e-12 threshold
        const Frontal round = parallel_surface(parallel_surface(sph, -1.0), +1.0);
        for (std::size_t k = 0; k < sph.f.size(); ++k)
            if (sph.mask[k]) worst = std::max(worst, (round.f[k] - sph.f[k]).norm() * 1e2);
        return worst;
    }

    const JobSpec& job_;
    Pipeline& p_;
};

void classify_into(const JobSpec& job, RunReport& rep) {
    auto expr = [&](const char* key) { return AnalyticFn::parse(job.exprs.at(key)); };
    const double x0 = job.grid.x0, x1 = job.grid.x1;

    auto add = [&](double x, const Classification& c) {
        SingularityEntry e;
        e.location = "x=" + fmt(x) + " y=0";
        e.label = c.label;
        e.criterion = c.criterion;
        e.margins = c.margins;
        rep.singularities.push_back(std::move(e));
    };

    if (job.kind == "singular_gcp") {
        const AnalyticFn kappa = expr("kappa"), tau = expr("tau");
        const auto zeros = real_zeros(kappa, x0, x1);
        if (zeros.empty()) {
            SingularityEntry e;
            e.location = "curve y=0";
            e.label = SingularityLabel::CuspidalEdge;
            e.criterion = "kappa != 0 on the whole interval";
            rep.singularities.push_back(std::move(e));
        }
        for (double z : zeros) add(z, classify_regular_curve_point(kappa, tau, z, job.class_tol));
    } else if (job.kind == "singular_gcp_general" || job.kind == "cone_from_normal_curve") {
        const AnalyticFn b = job.kind == "cone_from_normal_curve" ? AnalyticFn::constant(0.0)
                                                                  : expr("b");
        const AnalyticFn c = expr("c");
        const double mid = 0.5 * (x0 + x1);
        const Classification probe = classify_general_curve_point(b, c, mid, job.class_tol);
        if (probe.label == SingularityLabel::ConePoint) {
            add(mid, probe);
        } else {
            const auto zeros = real_zeros(b, x0, x1);
            if (zeros.empty()) {
                SingularityEntry e;
                e.location = "curve y=0";
                e.label = SingularityLabel::CuspidalEdge;
                e.criterion = "b != 0 on the whole interval";
                rep.singularities.push_back(std::move(e));
            }
            for (double z : zeros)
                add(z, classify_general_curve_point(b, c, z, job.class_tol));
        }
    } else if (job.kind == "geodesic_gcp") {
        const AnalyticFn kappa = expr("kappa");
        for (double z : real_zeros(kappa, x0, x1)) {
            SingularityEntry e;
            e.location = "x=" + fmt(z) + " y=0";
            e.label = SingularityLabel::DegenerateUnclassified;
            e.criterion = "kappa = 0 on a geodesic: singular point expected, type not "
                          "classified by the curve data";
            e.margins = {{"kappa", kappa.eval_real(z)}};
            rep.singularities.push_back(std::move(e));
        }
    } else if (job.kind == "general_gcp" || job.kind == "general_gcp_curve") {
        AnalyticFn kn = job.kind == "general_gcp"
                            ? expr("kappa_n")
                            : gcp_data_from_curve({expr("f0x"), expr("f0y"), expr("f0z")},
                                                  {expr("n0x"), expr("n0y"), expr("n0z")},
                                                  {x0, x1}, job.data_tol, job.adm_samples)
                                  .kappa_n;
        for (double z : real_zeros(kn, x0, x1)) {
            SingularityEntry e;
            e.location = "x=" + fmt(z) + " y=0";
            e.label = SingularityLabel::DegenerateUnclassified;
            e.criterion = "kappa_n = 0: admissibility fails, singularity expected";
            e.margins = {{"kappa_n", kn.eval_real(z)}};
            rep.singularities.push_back(std::move(e));
        }
    } else if (job.kind == "normalized") {
        const AnalyticFn a = expr("a"), b = expr("b");
        const Rect rect{job.grid.x0, job.grid.x1, job.grid.y0, job.grid.y1};
        Complex bp(0, 0);
        if (job.grid.basepoint) bp = *job.grid.basepoint;
        const BranchPointReport br = branch_points(a, b, rect, bp);
        for (const Complex& z : br.points) {
            SingularityEntry e;
            e.location = "z=(" + fmt(z.real()) + "," + fmt(z.imag()) + ")";
            e.label = SingularityLabel::BranchPoint;
            e.criterion = "a(z) = b(z) = 0";
            e.margins = {{"abs_a", std::abs(a.eval(z))}, {"abs_b", std::abs(b.eval(z))}};
            rep.singularities.push_back(std::move(e));
        }
        if (br.basepoint_rank1) {
            SingularityEntry e;
            e.location = "z=(" + fmt(bp.real()) + "," + fmt(bp.imag()) + ") (basepoint)";
            e.label = SingularityLabel::DegenerateUnclassified;
            e.criterion = "|a| = |b| != 0 at the basepoint: rank-1 singular point";
            e.margins = {{"abs_a", br.basepoint_abs_a}, {"abs_b", br.basepoint_abs_b}};
            rep.singularities.push_back(std::move(e));
        }
        if (br.identically_degenerate) rep.warnings.push_back("a and b vanish identically");
    }
    // cmc kinds: CMC surfaces carry no non-degenerate singularities
}

}  // namespace

void write_report(const RunReport& rep, std::ostream& os) {
    os << "report_version = " << rep.version << '\n';
    os << "[job]\n";
    for (const auto& [k, v] : rep.job_echo) os << k << " = " << v << '\n';
    if (!rep.warnings.empty()) {
        os << "[warnings]\n";
        for (const auto& w : rep.warnings) os << w << '\n';
    }
    if (rep.have_field_stats) {
        os << "[iwasawa]\n";
        os << "max_residual = " << fmt(rep.iw_max_residual) << '\n';
        os << "mean_residual = " << fmt(rep.iw_mean_residual) << '\n';
        os << "max_tail_mass = " << fmt(rep.max_tail_mass) << '\n';
        os << "failed_points = " << rep.failed_points << '\n';
        if (rep.locus_polylines >= 0) os << "singular_locus_polylines = " << rep.locus_polylines << '\n';
    }
    if (!rep.oracles.empty()) {
        os << "[oracles]\n";
        for (const auto& o : rep.oracles) {
            os << o.name << " = " << (o.pass ? "PASS" : "FAIL") << " value=" << fmt(o.value)
               << " threshold=" << fmt(o.threshold);
            if (!o.detail.empty()) os << ' ' << o.detail;
            os << '\n';
        }
    }
    if (!rep.singularities.empty()) {
        os << "[singularities]\n";
        for (const auto& s : rep.singularities) {
            os << s.location << " label=" << to_string(s.label) << " criterion=\"" << s.criterion
               << '"';
            for (const auto& [k, v] : s.margins) os << ' ' << k << '=' << fmt(v);
            os << '\n';
        }
    }
    os << "[timing]\n";
    os << "elapsed_seconds = " << rep.elapsed_seconds << '\n';
}

void write_report(const RunReport& rep, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot open report path '" + path + "'");
    write_report(rep, f);
}

RunOutcome run_job(const JobSpec& job, bool with_mesh) {
    const auto t0 = std::chrono::steady_clock::now();
    RunOutcome out;
    out.report.job_echo = job.echo;

    Pipeline p{build_potential(job, nullptr), {}, {}, {}};
    if (job.kind == "cone_from_normal_curve") {
        ConeReport cone;
        p.eta = build_potential(job, &cone);
        p.cone = cone;
        if (cone.closure_checked)
            out.report.warnings.push_back(std::string("normal curve closure: ") +
                                          (cone.closed ? "closed" : "NOT closed") +
                                          " (defect " + fmt(cone.closure_defect) + ")");
    }
    for (const auto& w : p.eta.warnings) out.report.warnings.push_back(w);

    p.field = integrate_frame(p.eta, job.grid, job.frame);
    out.report.have_field_stats = true;
    out.report.max_tail_mass = p.field.max_tail_mass;
    if (p.field.max_tail_mass > job.frame.tail_tol)
        out.report.warnings.push_back(
            "truncation tail mass " + fmt(p.field.max_tail_mass) + " exceeds tail_tol " +
            fmt(job.frame.tail_tol) + "; consider raising n_trunc");
    out.report.iw_max_residual = p.field.max_residual;
    out.report.failed_points = p.field.failed_points;
    {
        double sum = 0.0;
        int cnt = 0;
        for (const auto& pt : p.field.pts)
            if (pt.ok) {
                sum += pt.residual;
                ++cnt;
            }
        out.report.iw_mean_residual = cnt ? sum / cnt : 0.0;
    }

    p.frontal = build_frontal(p.field, surface_kind_for(job));
    out.report.locus_polylines = static_cast<int>(trace_singular_locus(p.frontal).size());

    OracleRunner oracles(job, p);
    const std::vector<std::string> names =
        job.oracles.empty() ? default_oracles(job) : job.oracles;
    for (const auto& name : names) out.report.oracles.push_back(oracles.run(name));

    if (with_mesh && !job.mesh_path.empty())
        export_mesh(p.frontal, job.mesh_path, job.sidecar_path, job.color_field, job.reg_floor);

    out.report.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!job.report_path.empty()) write_report(out.report, job.report_path);
    out.exit_code = out.report.all_pass() ? 0 : 1;
    return out;
}

RunOutcome classify_job(const JobSpec& job) {
    const auto t0 = std::chrono::steady_clock::now();
    RunOutcome out;
    out.report.job_echo = job.echo;

    // potential construction validates admissibility and collects warnings
    ConeReport cone;
    Potential eta = build_potential(job, &cone);
    for (const auto& w : eta.warnings) out.report.warnings.push_back(w);

    classify_into(job, out.report);

    out.report.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!job.report_path.empty()) write_report(out.report, job.report_path);
    out.exit_code = 0;
    return out;
}

}  // namespace dpw
