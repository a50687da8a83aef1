#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dpw/analytic.hpp"
#include "dpw/laurent.hpp"

namespace dpw {

enum class PotentialKind {
    Normalized,
    GeodesicGcp,
    GeneralGcp,
    SingularGcp,
    SingularGeneral,
    CmcGcp,
};

std::string to_string(PotentialKind k);

// lambda-Laurent matrix 1-form  eta = (A_{-1} lambda^{-1} + A_0 + A_{+1} lambda) dz
// with AnalyticFn-valued 2x2 coefficients. Twisting holds by construction for
// every constructor here: A_{+-1} off-diagonal in the su(2) sense (e1/e2
// span), A_0 diagonal (e3 span).
struct Potential {
    PotentialKind kind = PotentialKind::Normalized;
    // entry [n+1][r][c], n in {-1,0,+1}
    std::array<std::array<std::array<AnalyticFn, 2>, 2>, 3> entries;
    std::vector<std::string> warnings;

    Matrix2c coeff(int n, Complex z) const;   // n in {-1,0,1}
    LaurentMatrix eval(Complex z) const;      // exponents [-1,1], twisted

    // max off-pattern entry magnitude over the given sample points
    double twist_defect(const std::vector<Complex>& samples) const;
};

struct CauchyInterval {
    double s0 = -1.0;
    double s1 = 1.0;
};

// Admissibility sampling shared by the constructors.
struct AdmissibilityOptions {
    int samples = 64;
    double tol = 1e-9;
};

// Normalized potential off-diag(a, b) lambda^{-1} dz.
Potential normalized(const AnalyticFn& a, const AnalyticFn& b);

// Geodesic geometric Cauchy problem: curve with curvature kappa, torsion tau
// sits in the solution as a geodesic.
Potential geodesic_gcp(const AnalyticFn& kappa, const AnalyticFn& tau);

// General GCP: prescribed surface normal along the curve, data
// (kappa_n, kappa_g, mu). Warns when kappa_n vanishes at a sample.
Potential general_gcp(const AnalyticFn& kappa_n, const AnalyticFn& kappa_g, const AnalyticFn& mu,
                      const CauchyInterval& iv, const AdmissibilityOptions& adm = {});

// Singular GCP: the curve (kappa, tau) becomes the singular set y = 0.
// Rejects kappa identically zero on the interval.
Potential singular_gcp(const AnalyticFn& kappa, const AnalyticFn& tau, const CauchyInterval& iv,
                       const AdmissibilityOptions& adm = {});

// Singular GCP for non-regular singular curves, data (b, c); warns when c
// vanishes at a sample.
Potential singular_gcp_general(const AnalyticFn& b, const AnalyticFn& c, const CauchyInterval& iv,
                               const AdmissibilityOptions& adm = {});

// CMC geometric Cauchy problem (Sym-Bobenko downstream).
Potential cmc_gcp(const AnalyticFn& kappa_n, const AnalyticFn& kappa_g, const AnalyticFn& mu);

// Derive (kappa_n, kappa_g, mu) symbolically from a unit-speed curve and unit
// normal field; validates arc-length/orthogonality within data_tol at samples.
struct CurveData {
    AnalyticFn kappa_n, kappa_g, mu;
};
CurveData gcp_data_from_curve(const AnalyticVec3& f0, const AnalyticVec3& N0,
                              const CauchyInterval& iv, double data_tol = 1e-8,
                              int samples = 64);

// Taylor-pattern test for fixed-point rotational symmetry of order n: either
// (sum a_{nj} z^{nj}, sum b_{nj-2} z^{nj-2}) or the mirrored pattern.
struct SymmetryReport {
    bool ok = false;
    char pattern = '-';  // 'A', 'B' or '-'
    double worst = 0.0;  // largest off-pattern coefficient (relative)
};
SymmetryReport check_symmetry_order(const AnalyticFn& a, const AnalyticFn& b, int order,
                                    double r_taylor = 0.5, double taylor_tol = 1e-8,
                                    int n_coeffs = 24);

// Geodesic curvature of a unit-speed curve on S^2, built symbolically as
// <N'', N x N'>.
AnalyticFn normal_curve_geodesic_curvature(const AnalyticVec3& N);

// Potential for a cone point prescribed through the normal curve's geodesic
// curvature c; the report covers convexity (one-signedness of c) and, when a
// period is given, numerical closure of the reconstructed normal curve.
struct ConeReport {
    bool convex = false;        // c strictly one-signed on samples
    double min_abs_c = 0.0;
    bool closure_checked = false;
    bool closed = false;
    double closure_defect = 0.0;
};
Potential cone_potential_from_normal_curve(const AnalyticFn& c, std::optional<double> period,
                                           const CauchyInterval& iv, ConeReport* report,
                                           double close_tol = 1e-6,
                                           const AdmissibilityOptions& adm = {});

// Reconstruct the unit-speed S^2 curve with geodesic curvature c by
// integrating N'' = -N + c N x N' from N(0) = (1,0,0), N'(0) = (0,1,0).
std::vector<Vector3> reconstruct_normal_curve(const AnalyticFn& c, double s0, double s1,
                                              int n_samples);

}  // namespace dpw
