#pragma once

#include <map>

#include "dpw/potential.hpp"
#include "dpw/surface.hpp"

namespace dpw {

enum class SingularityLabel {
    Regular,
    BranchPoint,
    CuspidalEdge,
    Swallowtail,
    CuspidalButterfly,
    CuspidalBeaks,
    ConePoint,
    DegenerateUnclassified,
    // external labels, never produced by the classifiers here; kept so the
    // admissibility filter can reject them explicitly
    CuspidalLips,
    D4Plus,
    D4Minus,
};

std::string to_string(SingularityLabel l);

struct Classification {
    SingularityLabel label = SingularityLabel::DegenerateUnclassified;
    std::string criterion;                  // which test fired
    std::map<std::string, double> margins;  // every quantity entering the test
};

// Singular-GCP curve point (kappa, tau prescribe the cuspidal-edge curve):
// kappa(x0) != 0 -> cuspidal edge; kappa = 0, kappa' != 0, tau != 0 ->
// cuspidal beaks; otherwise degenerate/unclassified.
Classification classify_regular_curve_point(const AnalyticFn& kappa, const AnalyticFn& tau,
                                            double x0, double class_tol = 1e-9);

// General singular-GCP point with data (b, c): cone (b identically 0),
// cuspidal edge (b != 0), swallowtail (b = 0, b' != 0), cuspidal butterfly
// (b = b' = 0, b'' != 0). Requires c(x0) != 0 for non-degeneracy.
Classification classify_general_curve_point(const AnalyticFn& b, const AnalyticFn& c, double x0,
                                            double class_tol = 1e-9);

struct Rect {
    double x0 = -1, x1 = 1, y0 = -1, y1 = 1;
};

struct BranchPointReport {
    std::vector<Complex> points;             // polished common zeros of (a, b)
    std::vector<Complex> unpolished;         // candidates where Newton failed
    bool basepoint_rank1 = false;            // |a(z0)| = |b(z0)| != 0 (exact criterion)
    double basepoint_abs_a = 0, basepoint_abs_b = 0;
    bool identically_degenerate = false;     // a and b both vanish identically
    // zero contour of |a| - |b| on the rectangle; away from the basepoint the
    // rank-1 interpretation is heuristic
    std::vector<std::vector<Complex>> rank1_locus;
};

BranchPointReport branch_points(const AnalyticFn& a, const AnalyticFn& b, const Rect& rect,
                                Complex basepoint = Complex(0, 0), int scan = 41,
                                double zero_tol = 1e-9);

// Degeneracy scalar mu = <f_x x f_y, N> over the grid (the field the frontal
// already carries; exposed for direct use).
std::vector<double> degeneracy_field(const Frontal& fr);

using Polyline = std::vector<Vector2>;

// Marching-squares zero contour of the degeneracy field over interior cells.
std::vector<Polyline> trace_singular_locus(const Frontal& fr);

// True for labels that can occur on the surfaces built here; the front
// bifurcations cuspidal lips and D4 +- cannot.
bool admissible_bifurcation_filter(SingularityLabel l);

// Real zeros of an analytic function on [x0, x1]: sign-change bracketing on a
// dense sample followed by Newton polishing.
std::vector<double> real_zeros(const AnalyticFn& f, double x0, double x1, int samples = 512,
                               double tol = 1e-12);

}  // namespace dpw
