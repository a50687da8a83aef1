#include "dpw/potential.hpp"

#include <cmath>

namespace dpw {

namespace {

const AnalyticFn kZero = AnalyticFn::constant(0.0);
const AnalyticFn kHalf = AnalyticFn::constant(0.5);
const AnalyticFn kI = AnalyticFn::constant(Complex(0.0, 1.0));

// entries of p e1 + q e2 + r e3 as expression trees
std::array<std::array<AnalyticFn, 2>, 2> span_su2(const AnalyticFn& p, const AnalyticFn& q,
                                                  const AnalyticFn& r) {
    const AnalyticFn mih = AnalyticFn::constant(Complex(0.0, -0.5));  // -i/2
    const AnalyticFn pih = AnalyticFn::constant(Complex(0.0, 0.5));   //  i/2
    std::array<std::array<AnalyticFn, 2>, 2> m;
    m[0][0] = pih * r;
    m[1][1] = mih * r;
    m[0][1] = mih * p + kHalf * q;
    m[1][0] = mih * p - kHalf * q;
    return m;
}

std::array<std::array<AnalyticFn, 2>, 2> zero_matrix() {
    std::array<std::array<AnalyticFn, 2>, 2> m;
    m[0][0] = m[0][1] = m[1][0] = m[1][1] = kZero;
    return m;
}

std::vector<double> interval_samples(const CauchyInterval& iv, int n) {
    std::vector<double> xs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        xs[static_cast<std::size_t>(i)] = iv.s0 + (iv.s1 - iv.s0) * (i + 0.5) / n;
    return xs;
}

// zero at a sample or a sign change between consecutive samples
bool has_interval_zero(const AnalyticFn& f, const CauchyInterval& iv,
                       const AdmissibilityOptions& adm, double* where) {
    double prev = 0.0;
    bool first = true;
    for (double s : interval_samples(iv, adm.samples)) {
        const double v = f.eval_real(s);
        if (std::abs(v) <= adm.tol || (!first && (prev < 0) != (v < 0))) {
            if (where) *where = s;
            return true;
        }
        prev = v;
        first = false;
    }
    return false;
}

}  // namespace

std::string to_string(PotentialKind k) {
    switch (k) {
        case PotentialKind::Normalized: return "normalized";
        case PotentialKind::GeodesicGcp: return "geodesic_gcp";
        case PotentialKind::GeneralGcp: return "general_gcp";
        case PotentialKind::SingularGcp: return "singular_gcp";
        case PotentialKind::SingularGeneral: return "singular_gcp_general";
        case PotentialKind::CmcGcp: return "cmc_gcp";
    }
    return "?";
}

Matrix2c Potential::coeff(int n, Complex z) const {
    const auto& e = entries[static_cast<std::size_t>(n + 1)];
    Matrix2c m;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) m(r, c) = e[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].eval(z);
    return m;
}

LaurentMatrix Potential::eval(Complex z) const {
    LaurentMatrix a(-1, 1);
    for (int n = -1; n <= 1; ++n) a.ref(n) = coeff(n, z);
    a.twisted = true;
    return a;
}

double Potential::twist_defect(const std::vector<Complex>& samples) const {
    double d = 0.0;
    for (const Complex& z : samples) {
        const Matrix2c a0 = coeff(0, z);
        d = std::max(d, std::max(std::abs(a0(0, 1)), std::abs(a0(1, 0))));
        for (int n : {-1, 1}) {
            const Matrix2c an = coeff(n, z);
            d = std::max(d, std::max(std::abs(an(0, 0)), std::abs(an(1, 1))));
        }
    }
    return d;
}

Potential normalized(const AnalyticFn& a, const AnalyticFn& b) {
    Potential p;
    p.kind = PotentialKind::Normalized;
    p.entries[0] = zero_matrix();
    p.entries[0][0][1] = a;
    p.entries[0][1][0] = b;
    p.entries[1] = zero_matrix();
    p.entries[2] = zero_matrix();
    return p;
}

Potential geodesic_gcp(const AnalyticFn& kappa, const AnalyticFn& tau) {
    Potential p;
    p.kind = PotentialKind::GeodesicGcp;
    const AnalyticFn mk2 = -(kHalf * kappa);                  // -kappa/2
    p.entries[2] = span_su2(kHalf * (tau - kI), mk2, kZero);  // lambda^{+1}
    p.entries[1] = zero_matrix();
    p.entries[0] = span_su2(kHalf * (tau + kI), mk2, kZero);  // lambda^{-1}
    return p;
}

Potential general_gcp(const AnalyticFn& kappa_n, const AnalyticFn& kappa_g, const AnalyticFn& mu,
                      const CauchyInterval& iv, const AdmissibilityOptions& adm) {
    Potential p;
    p.kind = PotentialKind::GeneralGcp;
    const AnalyticFn mk2 = -(kHalf * kappa_n);
    p.entries[2] = span_su2(kHalf * (mu - kI), mk2, kZero);
    p.entries[1] = span_su2(kZero, kZero, kappa_g);
    p.entries[0] = span_su2(kHalf * (mu + kI), mk2, kZero);

    double where = 0.0;
    if (has_interval_zero(kappa_n, iv, adm, &where))
        p.warnings.push_back("kappa_n vanishes near s = " + std::to_string(where) +
                             "; singularity expected there");
    return p;
}

Potential singular_gcp(const AnalyticFn& kappa, const AnalyticFn& tau, const CauchyInterval& iv,
                       const AdmissibilityOptions& adm) {
    double max_abs = 0.0;
    for (double s : interval_samples(iv, adm.samples))
        max_abs = std::max(max_abs, std::abs(kappa.eval_real(s)));
    if (max_abs <= adm.tol)
        throw ValidationError(
            "singular_gcp: kappa vanishes identically on the interval (degenerate everywhere)",
            max_abs);

    Potential p;
    p.kind = PotentialKind::SingularGcp;
    p.entries[2] = span_su2(kHalf * (tau - kI), kZero, kZero);
    p.entries[1] = span_su2(kZero, kZero, kappa);
    p.entries[0] = span_su2(kHalf * (tau + kI), kZero, kZero);
    return p;
}

Potential singular_gcp_general(const AnalyticFn& b, const AnalyticFn& c, const CauchyInterval& iv,
                               const AdmissibilityOptions& adm) {
    Potential p;
    p.kind = PotentialKind::SingularGeneral;
    const AnalyticFn mone = AnalyticFn::constant(-1.0);
    p.entries[2] = span_su2(kZero, kHalf * (mone + kI * b), kZero);
    p.entries[1] = span_su2(kZero, kZero, c);
    p.entries[0] = span_su2(kZero, kHalf * (mone - kI * b), kZero);

    double where = 0.0;
    if (has_interval_zero(c, iv, adm, &where))
        p.warnings.push_back("c vanishes near s = " + std::to_string(where) +
                             "; non-degeneracy of the singular curve fails there");
    return p;
}

Potential cmc_gcp(const AnalyticFn& kappa_n, const AnalyticFn& kappa_g, const AnalyticFn& mu) {
    Potential p;
    p.kind = PotentialKind::CmcGcp;
    const AnalyticFn one = AnalyticFn::constant(1.0);
    // lambda^{+1}: ((mu - (kappa_n - 1) i) e1 + (-kappa_n - mu i) e2) / 2
    p.entries[2] = span_su2(kHalf * (mu - kI * (kappa_n - one)), kHalf * (-kappa_n - kI * mu),
                            kZero);
    p.entries[1] = span_su2(kZero, kZero, kappa_g);
    // lambda^{-1}: ((mu + (kappa_n - 1) i) e1 + (-kappa_n + mu i) e2) / 2
    p.entries[0] = span_su2(kHalf * (mu + kI * (kappa_n - one)), kHalf * (-kappa_n + kI * mu),
                            kZero);
    return p;
}

CurveData gcp_data_from_curve(const AnalyticVec3& f0, const AnalyticVec3& N0,
                              const CauchyInterval& iv, double data_tol, int samples) {
    const AnalyticVec3 t = derivative(f0);     // f0'
    const AnalyticVec3 tt = derivative(t);     // f0''
    const AnalyticVec3 Np = derivative(N0);

    double worst = 0.0;
    std::string what;
    for (double s : interval_samples(iv, samples)) {
        const double speed = std::abs(eval_real(t, s).norm() - 1.0);
        const double orth = std::abs(dot(t, N0).eval_real(s));
        const double unit = std::abs(eval_real(N0, s).norm() - 1.0);
        if (speed > worst) { worst = speed; what = "|f0'| deviates from 1"; }
        if (orth > worst) { worst = orth; what = "<f0', N0> deviates from 0"; }
        if (unit > worst) { worst = unit; what = "|N0| deviates from 1"; }
    }
    if (worst > data_tol)
        throw ValidationError("gcp_data_from_curve: " + what + " by " + std::to_string(worst),
                              worst);

    CurveData d;
    d.kappa_n = dot(tt, N0);
    d.kappa_g = dot(tt, cross(N0, t));
    d.mu = dot(cross(t, N0), Np);
    return d;
}

SymmetryReport check_symmetry_order(const AnalyticFn& a, const AnalyticFn& b, int order,
                                    double r_taylor, double taylor_tol, int n_coeffs) {
    if (order < 2) throw ValidationError("check_symmetry_order: order must be >= 2");
    const int m = std::max(4 * n_coeffs, 128);  // quadrature nodes
    std::vector<Complex> av(static_cast<std::size_t>(n_coeffs), Complex(0.0));
    std::vector<Complex> bv(static_cast<std::size_t>(n_coeffs), Complex(0.0));
    for (int j = 0; j < m; ++j) {
        const double t = 2.0 * M_PI * j / m;
        const Complex z = r_taylor * Complex(std::cos(t), std::sin(t));
        const Complex fa = a.eval(z), fb = b.eval(z);
        for (int k = 0; k < n_coeffs; ++k) {
            const Complex w = std::polar(1.0, -t * k) / (std::pow(r_taylor, k) * m);
            av[static_cast<std::size_t>(k)] += fa * w;
            bv[static_cast<std::size_t>(k)] += fb * w;
        }
    }
    double amax = 0.0, bmax = 0.0;
    for (int k = 0; k < n_coeffs; ++k) {
        amax = std::max(amax, std::abs(av[static_cast<std::size_t>(k)]));
        bmax = std::max(bmax, std::abs(bv[static_cast<std::size_t>(k)]));
    }

    // pattern test: exponents of f must be congruent to res (mod order)
    auto off_pattern = [&](const std::vector<Complex>& cs, double cmax, int res) {
        double worst = 0.0;
        if (cmax == 0.0) return worst;  // zero function fits any pattern
        for (int k = 0; k < n_coeffs; ++k) {
            const int r = ((k - res) % order + order) % order;
            if (r != 0) worst = std::max(worst, std::abs(cs[static_cast<std::size_t>(k)]) / cmax);
        }
        return worst;
    };

    SymmetryReport rep;
    const double wa = std::max(off_pattern(av, amax, 0), off_pattern(bv, bmax, -2));
    const double wb = std::max(off_pattern(av, amax, -2), off_pattern(bv, bmax, 0));
    if (wa <= taylor_tol) {
        rep.ok = true;
        rep.pattern = 'A';
        rep.worst = wa;
    } else if (wb <= taylor_tol) {
        rep.ok = true;
        rep.pattern = 'B';
        rep.worst = wb;
    } else {
        rep.worst = std::min(wa, wb);
    }
    return rep;
}

AnalyticFn normal_curve_geodesic_curvature(const AnalyticVec3& N) {
    const AnalyticVec3 Np = derivative(N);
    const AnalyticVec3 Npp = derivative(Np);
    return dot(Npp, cross(N, Np));
}

namespace {

struct SphereCurveState {
    Vector3 N, T;
};

// N'' = -N + c N x N' as a first-order system in (N, N'), RK4.
std::vector<SphereCurveState> integrate_normal_curve(const AnalyticFn& c, double s0, double s1,
                                                     int n_samples) {
    using State = SphereCurveState;
    auto rhs = [&](double s, const State& st) {
        State d;
        d.N = st.T;
        d.T = -st.N + c.eval_real(s) * st.N.cross(st.T);
        return d;
    };
    auto axpy = [](const State& a, double h, const State& b) {
        return State{a.N + h * b.N, a.T + h * b.T};
    };

    std::vector<State> out;
    out.reserve(static_cast<std::size_t>(n_samples));
    State st{Vector3(1, 0, 0), Vector3(0, 1, 0)};
    out.push_back(st);
    const int sub = 16;
    const double h = (s1 - s0) / ((n_samples - 1) * sub);
    double s = s0;
    for (int i = 1; i < n_samples; ++i) {
        for (int k = 0; k < sub; ++k) {
            const State k1 = rhs(s, st);
            const State k2 = rhs(s + h / 2, axpy(st, h / 2, k1));
            const State k3 = rhs(s + h / 2, axpy(st, h / 2, k2));
            const State k4 = rhs(s + h, axpy(st, h, k3));
            st.N += (h / 6) * (k1.N + 2 * k2.N + 2 * k3.N + k4.N);
            st.T += (h / 6) * (k1.T + 2 * k2.T + 2 * k3.T + k4.T);
            s += h;
        }
        out.push_back(st);
    }
    return out;
}

}  // namespace

std::vector<Vector3> reconstruct_normal_curve(const AnalyticFn& c, double s0, double s1,
                                              int n_samples) {
    std::vector<Vector3> out;
    out.reserve(static_cast<std::size_t>(n_samples));
    for (const auto& st : integrate_normal_curve(c, s0, s1, n_samples)) out.push_back(st.N);
    return out;
}

Potential cone_potential_from_normal_curve(const AnalyticFn& c, std::optional<double> period,
                                           const CauchyInterval& iv, ConeReport* report,
                                           double close_tol, const AdmissibilityOptions& adm) {
    ConeReport rep;
    double mn = std::numeric_limits<double>::infinity();
    bool pos = false, neg = false;
    for (double s : interval_samples(iv, adm.samples)) {
        const double v = c.eval_real(s);
        mn = std::min(mn, std::abs(v));
        pos = pos || v > 0.0;
        neg = neg || v < 0.0;
    }
    rep.min_abs_c = mn;
    rep.convex = (mn > adm.tol) && !(pos && neg);

    if (period) {
        // closure needs both position and tangent to return
        const auto states = integrate_normal_curve(c, 0.0, *period, 257);
        const double pos_defect = (states.back().N - states.front().N).norm();
        const double tan_defect = (states.back().T - states.front().T).norm();
        rep.closure_checked = true;
        rep.closure_defect = std::max(pos_defect, tan_defect);
        rep.closed = rep.closure_defect < close_tol;
    }
    if (report) *report = rep;

    Potential p = singular_gcp_general(AnalyticFn::constant(0.0), c, iv, adm);
    if (!rep.convex)
        p.warnings.push_back("normal curve is not strictly convex (c changes sign or vanishes)");
    return p;
}

}  // namespace dpw
