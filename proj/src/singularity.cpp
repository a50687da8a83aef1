#include "dpw/singularity.hpp"

#include <algorithm>
#include <cmath>

namespace dpw {

std::string to_string(SingularityLabel l) {
    switch (l) {
        case SingularityLabel::Regular: return "regular";
        case SingularityLabel::BranchPoint: return "branch_point";
        case SingularityLabel::CuspidalEdge: return "cuspidal_edge";
        case SingularityLabel::Swallowtail: return "swallowtail";
        case SingularityLabel::CuspidalButterfly: return "cuspidal_butterfly";
        case SingularityLabel::CuspidalBeaks: return "cuspidal_beaks";
        case SingularityLabel::ConePoint: return "cone_point";
        case SingularityLabel::DegenerateUnclassified: return "degenerate_unclassified";
        case SingularityLabel::CuspidalLips: return "cuspidal_lips";
        case SingularityLabel::D4Plus: return "D4_plus";
        case SingularityLabel::D4Minus: return "D4_minus";
    }
    return "?";
}

Classification classify_regular_curve_point(const AnalyticFn& kappa, const AnalyticFn& tau,
                                            double x0, double class_tol) {
    Classification c;
    const double k = kappa.eval_real(x0);
    const double kp = kappa.derivative().eval_real(x0);
    const double t = tau.eval_real(x0);
    c.margins = {{"kappa", k}, {"kappa_prime", kp}, {"tau", t}};
    if (std::abs(k) > class_tol) {
        c.label = SingularityLabel::CuspidalEdge;
        c.criterion = "kappa(x0) != 0";
    } else if (std::abs(kp) > class_tol && std::abs(t) > class_tol) {
        c.label = SingularityLabel::CuspidalBeaks;
        c.criterion = "kappa(x0) = 0, kappa'(x0) != 0, tau(x0) != 0";
    } else {
        c.label = SingularityLabel::DegenerateUnclassified;
        c.criterion = std::abs(t) <= class_tol
                          ? "kappa(x0) = 0 with tau(x0) = 0 (cone-like for kappa = s, "
                            "crossing edges for kappa = s^2 observed)"
                          : "kappa vanishes to higher order";
    }
    return c;
}

namespace {

// Taylor coefficients by circle quadrature around x0.
std::vector<double> taylor_magnitudes(const AnalyticFn& f, double x0, int count, double radius) {
    const int m = 128;
    std::vector<Complex> cs(static_cast<std::size_t>(count), Complex(0.0));
    for (int j = 0; j < m; ++j) {
        const double t = 2.0 * M_PI * j / m;
        const Complex z = Complex(x0, 0.0) + radius * Complex(std::cos(t), std::sin(t));
        const Complex v = f.eval(z);
        for (int k = 0; k < count; ++k)
            cs[static_cast<std::size_t>(k)] += v * std::polar(1.0, -t * k) / (std::pow(radius, k) * m);
    }
    std::vector<double> mags(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) mags[static_cast<std::size_t>(k)] = std::abs(cs[static_cast<std::size_t>(k)]);
    return mags;
}

// Semi-decision of b == 0: first 8 Taylor coefficients at x0 plus samples on
// a unit interval around x0, all below tol.
bool identically_zero_near(const AnalyticFn& f, double x0, double tol) {
    for (int i = 0; i <= 32; ++i) {
        const double s = x0 - 0.5 + i / 32.0;
        if (std::abs(f.eval_real(s)) > tol) return false;
    }
    for (double m : taylor_magnitudes(f, x0, 8, 0.25))
        if (m > tol) return false;
    return true;
}

}  // namespace

Classification classify_general_curve_point(const AnalyticFn& b, const AnalyticFn& c, double x0,
                                            double class_tol) {
    Classification out;
    const double cv = c.eval_real(x0);
    const double bv = b.eval_real(x0);
    const double bp = b.derivative().eval_real(x0);
    const double bpp = b.derivative().derivative().eval_real(x0);
    out.margins = {{"b", bv}, {"b_prime", bp}, {"b_second", bpp}, {"c", cv}};

    if (std::abs(cv) <= class_tol) {
        out.label = SingularityLabel::DegenerateUnclassified;
        out.criterion = "c(x0) = 0: non-degeneracy fails";
        return out;
    }
    if (identically_zero_near(b, x0, class_tol)) {
        out.label = SingularityLabel::ConePoint;
        out.criterion = "b identically 0 (8 Taylor coefficients + interval samples)";
        return out;
    }
    if (std::abs(bv) > class_tol) {
        out.label = SingularityLabel::CuspidalEdge;
        out.criterion = "b(x0) != 0";
    } else if (std::abs(bp) > class_tol) {
        out.label = SingularityLabel::Swallowtail;
        out.criterion = "b(x0) = 0, b'(x0) != 0";
    } else if (std::abs(bpp) > class_tol) {
        out.label = SingularityLabel::CuspidalButterfly;
        out.criterion = "b(x0) = b'(x0) = 0, b''(x0) != 0";
    } else {
        out.label = SingularityLabel::DegenerateUnclassified;
        out.criterion = "b vanishes to order >= 3";
    }
    return out;
}

namespace {

// Newton polish of a root of a holomorphic function.
bool polish_root(const AnalyticFn& f, Complex& z, double tol) {
    const AnalyticFn fp = f.derivative();
    for (int it = 0; it < 50; ++it) {
        Complex fv, dv;
        try {
            fv = f.eval(z);
            dv = fp.eval(z);
        } catch (const EvalError&) {
            return false;
        }
        if (std::abs(dv) < 1e-300) return false;
        const Complex step = fv / dv;
        z -= step;
        if (std::abs(step) < tol) return true;
    }
    return false;
}

bool near_any(const std::vector<Complex>& pts, Complex z, double eps) {
    for (const Complex& p : pts)
        if (std::abs(p - z) < eps) return true;
    return false;
}

}  // namespace

BranchPointReport branch_points(const AnalyticFn& a, const AnalyticFn& b, const Rect& rect,
                                Complex basepoint, int scan, double zero_tol) {
    BranchPointReport rep;

    // scale references for the zero tests
    double amax = 0.0, bmax = 0.0;
    std::vector<double> aval(static_cast<std::size_t>(scan) * static_cast<std::size_t>(scan));
    std::vector<double> bval(aval.size());
    auto zat = [&](int i, int j) {
        return Complex(rect.x0 + (rect.x1 - rect.x0) * i / (scan - 1),
                       rect.y0 + (rect.y1 - rect.y0) * j / (scan - 1));
    };
    for (int j = 0; j < scan; ++j)
        for (int i = 0; i < scan; ++i) {
            const std::size_t k = static_cast<std::size_t>(j) * static_cast<std::size_t>(scan) +
                                  static_cast<std::size_t>(i);
            aval[k] = std::abs(a.eval(zat(i, j)));
            bval[k] = std::abs(b.eval(zat(i, j)));
            amax = std::max(amax, aval[k]);
            bmax = std::max(bmax, bval[k]);
        }

    const bool a_zero = amax <= zero_tol, b_zero = bmax <= zero_tol;
    if (a_zero && b_zero) {
        rep.identically_degenerate = true;
        return rep;
    }

    // Common zeros: find zeros of whichever of a, b is nontrivial, then
    // filter by the other. Seeds at local minima of |.|.
    const AnalyticFn& primary = a_zero ? b : a;
    const AnalyticFn& secondary = a_zero ? a : b;
    const std::vector<double>& pval = a_zero ? bval : aval;
    const double pmax = a_zero ? bmax : amax;
    const double smax = a_zero ? amax : bmax;
    const double cell = std::max(rect.x1 - rect.x0, rect.y1 - rect.y0) / (scan - 1);

    for (int j = 0; j < scan; ++j) {
        for (int i = 0; i < scan; ++i) {
            const std::size_t k = static_cast<std::size_t>(j) * static_cast<std::size_t>(scan) +
                                  static_cast<std::size_t>(i);
            if (pval[k] > 0.5 * cell * pmax) continue;  // not near a zero
            Complex z = zat(i, j);
            if (polish_root(primary, z, 1e-13)) {
                if (z.real() < rect.x0 - 1e-9 || z.real() > rect.x1 + 1e-9 ||
                    z.imag() < rect.y0 - 1e-9 || z.imag() > rect.y1 + 1e-9)
                    continue;
                if (near_any(rep.points, z, 1e-7)) continue;
                const double other =
                    a_zero ? 0.0 : std::abs(secondary.eval(z)) / std::max(smax, 1e-300);
                const double self = std::abs(primary.eval(z)) / std::max(pmax, 1e-300);
                if (self < zero_tol && (a_zero || other < zero_tol)) rep.points.push_back(z);
            } else if (pval[k] < zero_tol * std::max(pmax, 1.0) &&
                       !near_any(rep.unpolished, zat(i, j), cell)) {
                rep.unpolished.push_back(zat(i, j));
            }
        }
    }

    rep.basepoint_abs_a = std::abs(a.eval(basepoint));
    rep.basepoint_abs_b = std::abs(b.eval(basepoint));
    const double scale = std::max({rep.basepoint_abs_a, rep.basepoint_abs_b, 1e-300});
    rep.basepoint_rank1 = rep.basepoint_abs_a > zero_tol * scale &&
                          std::abs(rep.basepoint_abs_a - rep.basepoint_abs_b) <= 1e-9 * scale;

    // heuristic rank-1 locus: zero contour of |a| - |b| on the scan grid
    {
        std::vector<double> gv(aval.size());
        for (std::size_t k = 0; k < gv.size(); ++k) gv[k] = aval[k] - bval[k];
        auto g = [&](int i, int j) {
            return gv[static_cast<std::size_t>(j) * static_cast<std::size_t>(scan) +
                      static_cast<std::size_t>(i)];
        };
        for (int j = 0; j < scan - 1; ++j) {
            for (int i = 0; i < scan - 1; ++i) {
                std::vector<Complex> crossings;
                auto edge = [&](double v0, double v1, Complex z0, Complex z1) {
                    if ((v0 < 0) == (v1 < 0)) return;
                    const double t = v0 / (v0 - v1);
                    crossings.push_back(z0 + t * (z1 - z0));
                };
                edge(g(i, j), g(i + 1, j), zat(i, j), zat(i + 1, j));
                edge(g(i + 1, j), g(i + 1, j + 1), zat(i + 1, j), zat(i + 1, j + 1));
                edge(g(i, j + 1), g(i + 1, j + 1), zat(i, j + 1), zat(i + 1, j + 1));
                edge(g(i, j), g(i, j + 1), zat(i, j), zat(i, j + 1));
                if (crossings.size() >= 2)
                    rep.rank1_locus.push_back({crossings[0], crossings[1]});
            }
        }
    }
    return rep;
}

std::vector<double> degeneracy_field(const Frontal& fr) { return fr.mu; }

std::vector<Polyline> trace_singular_locus(const Frontal& fr) {
    const GridSpec& g = fr.spec;

    // crossing points keyed by (cell edge); edges identified by their low
    // node and orientation: 0 horizontal, 1 vertical
    struct Seg {
        std::pair<long, long> e0, e1;
    };
    auto hkey = [&](int i, int j) { return std::make_pair(static_cast<long>(g.index(i, j)), 0L); };
    auto vkey = [&](int i, int j) { return std::make_pair(static_cast<long>(g.index(i, j)), 1L); };

    std::map<std::pair<long, long>, Vector2> cross_pt;
    std::vector<Seg> segs;

    auto mu_at = [&](int i, int j) { return fr.mu[g.index(i, j)]; };
    auto crossing = [&](double v0, double v1, Vector2 p0, Vector2 p1) {
        const double t = v0 / (v0 - v1);
        return Vector2(p0 + t * (p1 - p0));
    };

    for (int j = 1; j < g.ny - 2; ++j) {
        for (int i = 1; i < g.nx - 2; ++i) {
            if (!fr.valid(i, j) || !fr.valid(i + 1, j) || !fr.valid(i, j + 1) ||
                !fr.valid(i + 1, j + 1))
                continue;
            const double v00 = mu_at(i, j), v10 = mu_at(i + 1, j);
            const double v01 = mu_at(i, j + 1), v11 = mu_at(i + 1, j + 1);
            std::vector<std::pair<std::pair<long, long>, Vector2>> pts;
            auto consider = [&](double a, double b, std::pair<long, long> key, Vector2 pa,
                               Vector2 pb) {
                if ((a < 0) != (b < 0)) {
                    if (!cross_pt.count(key)) cross_pt[key] = crossing(a, b, pa, pb);
                    pts.push_back({key, cross_pt[key]});
                }
            };
            const Vector2 p00(g.x(i), g.y(j)), p10(g.x(i + 1), g.y(j));
            const Vector2 p01(g.x(i), g.y(j + 1)), p11(g.x(i + 1), g.y(j + 1));
            consider(v00, v10, hkey(i, j), p00, p10);
            consider(v01, v11, hkey(i, j + 1), p01, p11);
            consider(v00, v01, vkey(i, j), p00, p01);
            consider(v10, v11, vkey(i + 1, j), p10, p11);
            if (pts.size() == 2) {
                segs.push_back({pts[0].first, pts[1].first});
            } else if (pts.size() == 4) {
                // ambiguous saddle: resolve by the cell-center sign
                const double vc = 0.25 * (v00 + v10 + v01 + v11);
                const bool pair_left = (vc < 0) == (v00 < 0);
                // edges in `pts` order: bottom, top, left, right
                if (pair_left) {
                    segs.push_back({pts[0].first, pts[3].first});
                    segs.push_back({pts[1].first, pts[2].first});
                } else {
                    segs.push_back({pts[0].first, pts[2].first});
                    segs.push_back({pts[1].first, pts[3].first});
                }
            }
        }
    }

    // link segments into polylines by shared edge keys
    std::multimap<std::pair<long, long>, std::size_t> by_edge;
    for (std::size_t k = 0; k < segs.size(); ++k) {
        by_edge.insert({segs[k].e0, k});
        by_edge.insert({segs[k].e1, k});
    }
    std::vector<bool> used(segs.size(), false);
    std::vector<Polyline> out;
    for (std::size_t k = 0; k < segs.size(); ++k) {
        if (used[k]) continue;
        std::vector<std::pair<long, long>> chain{segs[k].e0, segs[k].e1};
        used[k] = true;
        // grow at both ends
        for (int end = 0; end < 2; ++end) {
            for (;;) {
                const auto tip = end == 0 ? chain.back() : chain.front();
                std::size_t next = segs.size();
                auto range = by_edge.equal_range(tip);
                for (auto it = range.first; it != range.second; ++it)
                    if (!used[it->second]) next = it->second;
                if (next == segs.size()) break;
                used[next] = true;
                const auto& s = segs[next];
                const auto other = (s.e0 == tip) ? s.e1 : s.e0;
                if (end == 0)
                    chain.push_back(other);
                else
                    chain.insert(chain.begin(), other);
            }
        }
        Polyline pl;
        pl.reserve(chain.size());
        for (const auto& key : chain) pl.push_back(cross_pt.at(key));
        out.push_back(std::move(pl));
    }
    return out;
}

bool admissible_bifurcation_filter(SingularityLabel l) {
    switch (l) {
        case SingularityLabel::CuspidalLips:
        case SingularityLabel::D4Plus:
        case SingularityLabel::D4Minus: return false;
        default: return true;
    }
}

std::vector<double> real_zeros(const AnalyticFn& f, double x0, double x1, int samples,
                               double tol) {
    std::vector<double> zeros;
    const AnalyticFn fp = f.derivative();
    double prev = f.eval_real(x0);
    double xprev = x0;
    for (int i = 1; i <= samples; ++i) {
        const double x = x0 + (x1 - x0) * i / samples;
        const double v = f.eval_real(x);
        if ((prev < 0) != (v < 0) || v == 0.0) {
            double lo = xprev, hi = x;
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = f.eval_real(mid);
                if ((fm < 0) == (f.eval_real(lo) < 0))
                    lo = mid;
                else
                    hi = mid;
                if (hi - lo < tol) break;
            }
            double z = 0.5 * (lo + hi);
            const double d = fp.eval_real(z);
            if (std::abs(d) > 1e-14) {
                for (int it = 0; it < 8; ++it) z -= f.eval_real(z) / fp.eval_real(z);
            }
            if (zeros.empty() || std::abs(z - zeros.back()) > 10 * tol) zeros.push_back(z);
        }
        prev = v;
        xprev = x;
    }
    return zeros;
}

}  // namespace dpw
