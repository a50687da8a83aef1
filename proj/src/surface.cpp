#include "dpw/surface.hpp"

#include <cmath>

#include <Eigen/SVD>

namespace dpw {

std::string to_string(SurfaceKind k) {
    switch (k) {
        case SurfaceKind::Spherical: return "spherical";
        case SurfaceKind::Cmc: return "cmc";
        case SurfaceKind::Other: return "other";
    }
    return "?";
}

Vector3 sym_point(const LaurentMatrix& F, double* su2_defect_out) {
    const Matrix2c A = eval(lambda_derivative(F), Complex(1.0, 0.0));
    const Matrix2c F1 = eval(F, Complex(1.0, 0.0));
    const Matrix2c X = kImag * (A * F1.inverse());
    const double defect = su2_defect(X);
    if (su2_defect_out) *su2_defect_out = defect;
    return su2_to_r3(X, 1e-8);
}

Vector3 normal_of(const LaurentMatrix& F) {
    const Matrix2c F1 = eval(F, Complex(1.0, 0.0));
    const Matrix2c X = F1 * su2_e3() * F1.inverse();
    return su2_to_r3(X, 1e-8);
}

Vector3 sym_bobenko_point(const LaurentMatrix& F, double* su2_defect_out) {
    return sym_point(F, su2_defect_out) - normal_of(F);
}

namespace {

struct Diff {
    Vector3 fx, fy, Nx, Ny;
};

Diff central_diffs(const Frontal& fr, int i, int j) {
    const GridSpec& g = fr.spec;
    Diff d;
    d.fx = (fr.f[g.index(i + 1, j)] - fr.f[g.index(i - 1, j)]) / (2 * g.hx());
    d.fy = (fr.f[g.index(i, j + 1)] - fr.f[g.index(i, j - 1)]) / (2 * g.hy());
    d.Nx = (fr.N[g.index(i + 1, j)] - fr.N[g.index(i - 1, j)]) / (2 * g.hx());
    d.Ny = (fr.N[g.index(i, j + 1)] - fr.N[g.index(i, j - 1)]) / (2 * g.hy());
    return d;
}

bool neighbors_valid(const Frontal& fr, int i, int j) {
    return fr.valid(i, j) && fr.valid(i + 1, j) && fr.valid(i - 1, j) && fr.valid(i, j + 1) &&
           fr.valid(i, j - 1);
}

}  // namespace

Frontal build_frontal(const FrameField& field, SurfaceKind kind) {
    const GridSpec& g = field.spec;
    Frontal fr;
    fr.spec = g;
    fr.kind = kind;
    const std::size_t n = g.index(g.nx - 1, g.ny - 1) + 1;
    fr.f.resize(n, Vector3::Zero());
    fr.N.resize(n, Vector3::Zero());
    fr.mu.assign(n, 0.0);
    fr.margin.assign(n, 0.0);
    fr.mask.assign(n, 0);

    std::vector<double> col_defect(static_cast<std::size_t>(g.nx), 0.0);
    parallel_for(g.nx, 0, [&](int i) {
        double worst = 0.0;
        for (int j = 0; j < g.ny; ++j) {
            const FramePoint& p = field.at(i, j);
            if (!p.ok) continue;
            const std::size_t k = g.index(i, j);
            try {
                double defect = 0.0;
                fr.f[k] = (kind == SurfaceKind::Cmc) ? sym_bobenko_point(p.F, &defect)
                                                     : sym_point(p.F, &defect);
                fr.N[k] = normal_of(p.F);
                fr.mask[k] = 1;
                worst = std::max(worst, defect);
            } catch (const Error&) {
                fr.mask[k] = 0;
            }
        }
        col_defect[static_cast<std::size_t>(i)] = worst;
    });
    for (double d : col_defect) fr.max_sym_defect = std::max(fr.max_sym_defect, d);

    // degeneracy field and margin; boundary values copied from the nearest
    // interior point so that mesh coloring is total (oracles use interior only)
    for (int i = 0; i < g.nx; ++i) {
        for (int j = 0; j < g.ny; ++j) {
            const int ii = std::clamp(i, 1, g.nx - 2);
            const int jj = std::clamp(j, 1, g.ny - 2);
            if (!neighbors_valid(fr, ii, jj)) continue;
            const std::size_t k = g.index(i, j);
            const Diff d = central_diffs(fr, ii, jj);
            fr.mu[k] = d.fx.cross(d.fy).dot(fr.N[g.index(ii, jj)]);
            fr.margin[k] = extract_Up(field, ii, jj).margin;
        }
    }
    return fr;
}

double defining_equation_residual(const Frontal& fr) {
    const GridSpec& g = fr.spec;
    double worst = 0.0;
    for (int i = 1; i < g.nx - 1; ++i) {
        for (int j = 1; j < g.ny - 1; ++j) {
            if (!neighbors_valid(fr, i, j)) continue;
            const Diff d = central_diffs(fr, i, j);
            // f_z = (f_x - i f_y)/2, N_z likewise; residual of f_z = i N x N_z
            const Vector3 N = fr.N[g.index(i, j)];
            double r2 = 0.0;
            for (int c = 0; c < 3; ++c) {
                const int a = (c + 1) % 3, b = (c + 2) % 3;
                const Complex Nza(d.Nx[a], -d.Ny[a]);
                const Complex Nzb(d.Nx[b], -d.Ny[b]);
                const Complex cross_c = 0.5 * (Complex(N[a]) * Nzb - Complex(N[b]) * Nza);
                const Complex fz_c = 0.5 * Complex(d.fx[c], -d.fy[c]);
                r2 += std::norm(fz_c - kImag * cross_c);
            }
            worst = std::max(worst, std::sqrt(r2));
        }
    }
    return worst;
}

double frontal_orthogonality_defect(const Frontal& fr) {
    const GridSpec& g = fr.spec;
    double worst = 0.0;
    for (int i = 1; i < g.nx - 1; ++i) {
        for (int j = 1; j < g.ny - 1; ++j) {
            if (!neighbors_valid(fr, i, j)) continue;
            const Diff d = central_diffs(fr, i, j);
            const Vector3& N = fr.N[g.index(i, j)];
            worst = std::max(worst, std::max(std::abs(d.fx.dot(N)), std::abs(d.fy.dot(N))));
        }
    }
    return worst;
}

FundamentalForms fundamental_forms(const Frontal& fr, int i, int j, double reg_floor) {
    const GridSpec& g = fr.spec;
    if (!fr.interior(i, j) || !neighbors_valid(fr, i, j))
        throw NumericalError("fundamental_forms: interior valid point required");
    const double m = fr.margin[g.index(i, j)];
    if (m <= reg_floor)
        throw NumericalError("fundamental_forms: point is singular (margin " +
                             std::to_string(m) + ")");

    const Diff d = central_diffs(fr, i, j);
    const Vector3& N = fr.N[g.index(i, j)];

    FundamentalForms out;
    const Vector3 NxNy = N.cross(d.Ny), NxNx = N.cross(d.Nx);
    out.from_normal.E = NxNy.squaredNorm();
    out.from_normal.F = -NxNy.dot(NxNx);
    out.from_normal.G = NxNx.squaredNorm();
    const double ell = N.dot(d.Nx.cross(d.Ny));
    out.from_normal.L = ell;
    out.from_normal.M = 0.0;
    out.from_normal.N = ell;

    const double hx = g.hx(), hy = g.hy();
    const Vector3 fxx = (fr.f[g.index(i + 1, j)] - 2 * fr.f[g.index(i, j)] +
                         fr.f[g.index(i - 1, j)]) /
                        (hx * hx);
    const Vector3 fyy = (fr.f[g.index(i, j + 1)] - 2 * fr.f[g.index(i, j)] +
                         fr.f[g.index(i, j - 1)]) /
                        (hy * hy);
    const Vector3 fxy = (fr.f[g.index(i + 1, j + 1)] - fr.f[g.index(i + 1, j - 1)] -
                         fr.f[g.index(i - 1, j + 1)] + fr.f[g.index(i - 1, j - 1)]) /
                        (4 * hx * hy);
    out.from_mesh.E = d.fx.squaredNorm();
    out.from_mesh.F = d.fx.dot(d.fy);
    out.from_mesh.G = d.fy.squaredNorm();
    out.from_mesh.L = fxx.dot(N);
    out.from_mesh.M = fxy.dot(N);
    out.from_mesh.N = fyy.dot(N);
    return out;
}

Curvatures gauss_mean_curvature(const Frontal& fr, int i, int j, double reg_floor) {
    const FormCoefficients c = fundamental_forms(fr, i, j, reg_floor).from_mesh;
    const double det1 = c.E * c.G - c.F * c.F;
    const double scale = 0.25 * (c.E + c.G) * (c.E + c.G);
    if (!(det1 > 1e-10 * scale))
        throw NumericalError("gauss_mean_curvature: first fundamental form near-singular");
    Curvatures k;
    k.K = (c.L * c.N - c.M * c.M) / det1;
    k.H = (c.E * c.N + c.G * c.L - 2.0 * c.F * c.M) / (2.0 * det1);
    return k;
}

Frontal parallel_surface(const Frontal& fr, double offset) {
    Frontal out = fr;
    const GridSpec& g = fr.spec;
    for (std::size_t k = 0; k < fr.f.size(); ++k)
        if (fr.mask[k]) out.f[k] = fr.f[k] + offset * fr.N[k];

    // recompute the degeneracy field of the shifted positions
    for (int i = 0; i < g.nx; ++i) {
        for (int j = 0; j < g.ny; ++j) {
            const int ii = std::clamp(i, 1, g.nx - 2);
            const int jj = std::clamp(j, 1, g.ny - 2);
            if (!neighbors_valid(out, ii, jj)) continue;
            const Diff d = central_diffs(out, ii, jj);
            out.mu[g.index(i, j)] = d.fx.cross(d.fy).dot(out.N[g.index(ii, jj)]);
        }
    }

    // retag the kind from sampled curvatures
    double sk = 0.0, sh = 0.0;
    int cnt = 0;
    for (int i = 1; i < g.nx - 1; i += std::max(1, g.nx / 16)) {
        for (int j = 1; j < g.ny - 1; j += std::max(1, g.ny / 16)) {
            try {
                const Curvatures c = gauss_mean_curvature(out, i, j);
                sk += c.K;
                sh += c.H;
                ++cnt;
            } catch (const Error&) {
            }
        }
    }
    if (cnt > 0) {
        const double K = sk / cnt, H = sh / cnt;
        if (std::abs(K - 1.0) < 0.05)
            out.kind = SurfaceKind::Spherical;
        else if (std::abs(std::abs(H) - 0.5) < 0.05)
            out.kind = SurfaceKind::Cmc;
        else
            out.kind = SurfaceKind::Other;
    } else {
        out.kind = SurfaceKind::Other;
    }
    return out;
}

FrenetCurve frenet_reconstruct(const AnalyticFn& kappa, const AnalyticFn& tau, double s0,
                               double s1, int n) {
    struct State {
        Vector3 f, T, N, B;
    };
    auto rhs = [&](double s, const State& st) {
        const double k = kappa.eval_real(s), t = tau.eval_real(s);
        State d;
        d.f = st.T;
        d.T = k * st.N;
        d.N = -k * st.T + t * st.B;
        d.B = -t * st.N;
        return d;
    };
    auto axpy = [](const State& a, double h, const State& b) {
        return State{a.f + h * b.f, a.T + h * b.T, a.N + h * b.N, a.B + h * b.B};
    };

    FrenetCurve out;
    out.s.resize(static_cast<std::size_t>(n));
    out.f.resize(static_cast<std::size_t>(n));
    out.T.resize(static_cast<std::size_t>(n));
    out.Nvec.resize(static_cast<std::size_t>(n));
    out.B.resize(static_cast<std::size_t>(n));

    State st{Vector3::Zero(), Vector3(1, 0, 0), Vector3(0, 1, 0), Vector3(0, 0, 1)};
    const double hgrid = (s1 - s0) / (n - 1);
    const int sub = std::max(1, static_cast<int>(std::ceil(std::abs(hgrid) / 5e-4)));
    const double h = hgrid / sub;

    double s = s0;
    for (int i = 0; i < n; ++i) {
        out.s[static_cast<std::size_t>(i)] = s0 + i * hgrid;
        out.f[static_cast<std::size_t>(i)] = st.f;
        out.T[static_cast<std::size_t>(i)] = st.T;
        out.Nvec[static_cast<std::size_t>(i)] = st.N;
        out.B[static_cast<std::size_t>(i)] = st.B;
        if (i == n - 1) break;
        for (int k = 0; k < sub; ++k) {
            const State k1 = rhs(s, st);
            const State k2 = rhs(s + h / 2, axpy(st, h / 2, k1));
            const State k3 = rhs(s + h / 2, axpy(st, h / 2, k2));
            const State k4 = rhs(s + h, axpy(st, h, k3));
            st.f += (h / 6) * (k1.f + 2 * k2.f + 2 * k3.f + k4.f);
            st.T += (h / 6) * (k1.T + 2 * k2.T + 2 * k3.T + k4.T);
            st.N += (h / 6) * (k1.N + 2 * k2.N + 2 * k3.N + k4.N);
            st.B += (h / 6) * (k1.B + 2 * k2.B + 2 * k3.B + k4.B);
            s += h;
        }
    }
    return out;
}

ProcrustesResult procrustes(const std::vector<Vector3>& a, const std::vector<Vector3>& b) {
    if (a.size() != b.size() || a.empty())
        throw ValidationError("procrustes: point sets must match and be non-empty");
    const double n = static_cast<double>(a.size());
    Vector3 ca = Vector3::Zero(), cb = Vector3::Zero();
    for (const auto& p : a) ca += p;
    for (const auto& p : b) cb += p;
    ca /= n;
    cb /= n;

    Eigen::Matrix3d H = Eigen::Matrix3d::Zero();
    for (std::size_t k = 0; k < a.size(); ++k) H += (a[k] - ca) * (b[k] - cb).transpose();
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(H, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d D = Eigen::Matrix3d::Identity();
    D(2, 2) = (svd.matrixV() * svd.matrixU().transpose()).determinant() > 0 ? 1.0 : -1.0;

    ProcrustesResult r;
    r.R = svd.matrixV() * D * svd.matrixU().transpose();
    r.t = cb - r.R * ca;
    double ss = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) ss += (r.R * a[k] + r.t - b[k]).squaredNorm();
    r.rms = std::sqrt(ss / n);
    return r;
}

SphereFit fit_sphere(const std::vector<Vector3>& pts) {
    if (pts.size() < 4) throw ValidationError("fit_sphere: need at least 4 points");
    // algebraic seed: |p|^2 = 2 c.p + (r^2 - |c|^2)
    Eigen::MatrixXd A(static_cast<Eigen::Index>(pts.size()), 4);
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(pts.size()));
    for (std::size_t k = 0; k < pts.size(); ++k) {
        A(static_cast<Eigen::Index>(k), 0) = 2 * pts[k].x();
        A(static_cast<Eigen::Index>(k), 1) = 2 * pts[k].y();
        A(static_cast<Eigen::Index>(k), 2) = 2 * pts[k].z();
        A(static_cast<Eigen::Index>(k), 3) = 1.0;
        rhs(static_cast<Eigen::Index>(k)) = pts[k].squaredNorm();
    }
    Eigen::Vector4d sol = (A.transpose() * A).ldlt().solve(A.transpose() * rhs);
    Vector3 c(sol[0], sol[1], sol[2]);
    double r = std::sqrt(std::max(0.0, sol[3] + c.squaredNorm()));

    // a few Gauss-Newton steps on sum (|p-c| - r)^2
    for (int it = 0; it < 8; ++it) {
        Eigen::Matrix4d JtJ = Eigen::Matrix4d::Zero();
        Eigen::Vector4d Jtr = Eigen::Vector4d::Zero();
        for (const auto& p : pts) {
            const Vector3 d = p - c;
            const double dist = d.norm();
            if (dist < 1e-14) continue;
            Eigen::Vector4d Jrow;
            Jrow << -d.x() / dist, -d.y() / dist, -d.z() / dist, -1.0;
            const double res = dist - r;
            JtJ += Jrow * Jrow.transpose();
            Jtr += Jrow * res;
        }
        const Eigen::Vector4d step = JtJ.ldlt().solve(-Jtr);
        c += step.head<3>();
        r += step[3];
        if (step.norm() < 1e-14) break;
    }

    SphereFit out;
    out.center = c;
    out.radius = r;
    double ss = 0.0;
    for (const auto& p : pts) {
        const double e = (p - c).norm() - r;
        ss += e * e;
    }
    out.rms = std::sqrt(ss / static_cast<double>(pts.size()));
    return out;
}

}  // namespace dpw
