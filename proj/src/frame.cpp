#include "dpw/frame.hpp"

#include <atomic>
#include <mutex>
#include <cmath>
#include <random>
#include <thread>

namespace dpw {

void GridSpec::validate() const {
    if (nx < 2 || ny < 2) throw ValidationError("GridSpec: nx, ny must be >= 2");
    if (!(x1 > x0) || !(y1 > y0)) throw ValidationError("GridSpec: degenerate range");
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    int nt = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    nt = std::max(1, std::min(nt, n));
    if (nt == 1) {
        for (int j = 0; j < n; ++j) fn(j);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nt));
    for (int t = 0; t < nt; ++t)
        pool.emplace_back([&] {
            for (;;) {
                const int j = next.fetch_add(1);
                if (j >= n) return;
                try {
                    fn(j);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

namespace {

// One RK4 step of dPhi/dt = Phi * A(z(t)) * dz/dt over the loop algebra.
// `coeff_at` evaluates the potential at a path parameter.
void rk4_step(LaurentMatrix& phi, const std::function<LaurentMatrix(double)>& coeff_at, double t,
              double h, int n_trunc, double* tail) {
    const LaurentMatrix A1 = coeff_at(t);
    const LaurentMatrix A2 = coeff_at(t + h / 2);
    const LaurentMatrix A3 = coeff_at(t + h);

    const LaurentMatrix k1 = multiply(phi, A1, n_trunc, tail);
    const LaurentMatrix k2 = multiply(add(phi, scale(k1, h / 2)), A2, n_trunc, tail);
    const LaurentMatrix k3 = multiply(add(phi, scale(k2, h / 2)), A2, n_trunc, tail);
    const LaurentMatrix k4 = multiply(add(phi, scale(k3, h)), A3, n_trunc, tail);

    LaurentMatrix incr = add(add(k1, k4), scale(add(k2, k3), 2.0));
    phi = add(phi, scale(incr, h / 6.0));
    // the exact flow is unimodular; pin det = 1 so the per-point invariants
    // are not limited by step-size drift
    phi = unimodular_project(phi, n_trunc);
}

// Integrate along a horizontal or vertical grid segment. The stored grid
// coordinate (x, y) corresponds to the complex parameter x - i y: the
// disc-normalized Iwasawa pairs the potential's lambda^{+1} coefficient with
// the anti-holomorphic direction, so running the vertical legs conjugate to
// the stored y axis realizes the frame equations in the orientation the
// surface formulas assume (U_p lambda with dz, null direction tau d_x + d_y).
LaurentMatrix integrate_segment(const Potential& eta, LaurentMatrix phi, Complex z_from,
                                Complex z_to, int steps, int n_trunc, double* tail) {
    const Complex dz = z_to - z_from;
    const bool vertical = std::abs(dz.real()) < std::abs(dz.imag());
    const Complex dir = vertical ? Complex(0.0, -1.0) : Complex(1.0, 0.0);
    const double len = vertical ? dz.imag() : dz.real();
    const double h = len / steps;
    const Complex from = std::conj(z_from);
    auto coeff_at = [&](double t) {
        LaurentMatrix A = eta.eval(from + dir * t);
        return scale(A, dir);
    };
    for (int k = 0; k < steps; ++k) rk4_step(phi, coeff_at, k * h, h, n_trunc, tail);
    return phi;
}

std::pair<int, int> snap_basepoint(const GridSpec& g) {
    Complex bp;
    if (g.basepoint) {
        bp = *g.basepoint;
    } else {
        const double bx = (g.x0 <= 0.0 && 0.0 <= g.x1) ? 0.0 : g.x0;
        const double by = (g.y0 <= 0.0 && 0.0 <= g.y1) ? 0.0 : g.y0;
        bp = Complex(bx, by);
    }
    const int ib = std::clamp(static_cast<int>(std::lround((bp.real() - g.x0) / g.hx())), 0,
                              g.nx - 1);
    const int jb = std::clamp(static_cast<int>(std::lround((bp.imag() - g.y0) / g.hy())), 0,
                              g.ny - 1);
    return {ib, jb};
}

FrameField integrate_phi(const Potential& eta, const GridSpec& spec, const FrameOptions& opt) {
    spec.validate();
    FrameField field;
    field.spec = spec;
    auto [ib, jb] = snap_basepoint(spec);
    field.ibase = ib;
    field.jbase = jb;
    field.pts.resize(static_cast<std::size_t>(spec.nx) * static_cast<std::size_t>(spec.ny));

    const int N = opt.iw.n_trunc;
    const int sub = std::max(1, opt.substeps);
    std::vector<double> col_tails(static_cast<std::size_t>(spec.nx), 0.0);

    // basepoint row, marching left and right
    double row_tail = 0.0;
    field.at(ib, jb).Phi = LaurentMatrix::identity();
    for (int dir : {+1, -1}) {
        LaurentMatrix phi = LaurentMatrix::identity();
        for (int i = ib + dir; i >= 0 && i < spec.nx; i += dir) {
            phi = integrate_segment(eta, phi, spec.z(i - dir, jb), spec.z(i, jb), sub, N,
                                    &row_tail);
            field.at(i, jb).Phi = phi;
        }
    }

    // columns are independent after the basepoint row
    parallel_for(spec.nx, opt.threads, [&](int i) {
        double tail = 0.0;
        for (int dir : {+1, -1}) {
            LaurentMatrix phi = field.at(i, jb).Phi;
            for (int j = jb + dir; j >= 0 && j < spec.ny; j += dir) {
                phi = integrate_segment(eta, phi, spec.z(i, j - dir), spec.z(i, j), sub, N,
                                        &tail);
                field.at(i, j).Phi = phi;
            }
        }
        col_tails[static_cast<std::size_t>(i)] = tail;
    });

    double mx = row_tail;
    for (double t : col_tails) mx = std::max(mx, t);
    field.max_tail_mass = mx;
    return field;
}

}  // namespace

FrameField integrate_frame_only(const Potential& eta, const GridSpec& spec,
                                const FrameOptions& opt) {
    return integrate_phi(eta, spec, opt);
}

FrameField integrate_frame(const Potential& eta, const GridSpec& spec, const FrameOptions& opt) {
    FrameField field = integrate_phi(eta, spec, opt);

    IwasawaOptions iw = opt.iw;
    iw.validate_input = false;  // the integrated frame is twisted/unimodular by construction
    std::atomic<int> failed{0};
    std::vector<double> col_resid(static_cast<std::size_t>(field.spec.nx), 0.0);

    parallel_for(field.spec.nx, opt.threads, [&](int i) {
        double resid = 0.0;
        for (int j = 0; j < field.spec.ny; ++j) {
            FramePoint& p = field.at(i, j);
            try {
                IwasawaResult r = iwasawa(p.Phi, iw);
                p.F = std::move(r.unitary_part);
                p.Bplus = std::move(r.plus_part);
                p.rho = r.rho;
                p.residual = r.residual;
                resid = std::max(resid, r.residual);
            } catch (const Error& e) {
                p.ok = false;
                p.residual = std::numeric_limits<double>::infinity();
                failed.fetch_add(1);
            }
        }
        col_resid[static_cast<std::size_t>(i)] = resid;
    });

    field.failed_points = failed.load();
    for (double r : col_resid) field.max_residual = std::max(field.max_residual, r);
    return field;
}

double path_independence_check(const Potential& eta, const FrameField& field,
                               const FrameOptions& opt, int probes, unsigned seed) {
    const GridSpec& g = field.spec;
    const int N = opt.iw.n_trunc;
    const int sub = std::max(1, opt.substeps);
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> di(1, g.nx - 2), dj(1, g.ny - 2);

    double worst = 0.0;
    for (int p = 0; p < probes; ++p) {
        const int i = di(rng), j = dj(rng);
        double tail = 0.0;
        // vertical first, then horizontal
        LaurentMatrix phi = LaurentMatrix::identity();
        const Complex zb = g.z(field.ibase, field.jbase);
        const Complex zv(zb.real(), g.y(j));
        const Complex zt = g.z(i, j);
        if (std::abs(zv - zb) > 0) {
            const int steps = std::max(1, std::abs(j - field.jbase) * sub);
            phi = integrate_segment(eta, phi, zb, zv, steps, N, &tail);
        }
        if (std::abs(zt - zv) > 0) {
            const int steps = std::max(1, std::abs(i - field.ibase) * sub);
            phi = integrate_segment(eta, phi, zv, zt, steps, N, &tail);
        }
        worst = std::max(worst, max_coeff_distance(phi, field.at(i, j).Phi));
    }
    return worst;
}

UpResult extract_Up(const FrameField& field, int i, int j) {
    const GridSpec& g = field.spec;
    if (i <= 0 || i >= g.nx - 1 || j <= 0 || j >= g.ny - 1)
        throw ValidationError("extract_Up: interior grid point required");
    const LaurentMatrix& F = field.at(i, j).F;
    const LaurentMatrix Finv = circle_adjoint(F);  // unitary within residual

    const LaurentMatrix dFx =
        scale(add(field.at(i + 1, j).F, scale(field.at(i - 1, j).F, -1.0)), 0.5 / g.hx());
    const LaurentMatrix dFy =
        scale(add(field.at(i, j + 1).F, scale(field.at(i, j - 1).F, -1.0)), 0.5 / g.hy());
    // dz-component: (d/dx - i d/dy)/2
    const LaurentMatrix dFz = scale(add(dFx, scale(dFy, Complex(0.0, -1.0))), 0.5);

    UpResult r;
    r.Up = product_coeff(Finv, dFz, +1);
    r.Uk = product_coeff(Finv, dFz, 0);
    r.margin = std::abs(std::abs(r.Up(0, 1)) - std::abs(r.Up(1, 0)));
    return r;
}

}  // namespace dpw
