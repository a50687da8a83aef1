#include "dpw/meshio.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace dpw {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Rgb {
    double r, g, b;
};

}  // namespace

void export_mesh(const Frontal& fr, const std::string& mesh_path, const std::string& sidecar_path,
                 const std::string& color_field, double reg_floor) {
    const GridSpec& g = fr.spec;

    // normalization for the grayscale fields
    double lo = 0.0, hi = 1.0;
    std::vector<double> kest;
    if (color_field == "gauss" || !sidecar_path.empty()) {
        kest.assign(fr.f.size(), std::numeric_limits<double>::quiet_NaN());
        for (int i = 1; i < g.nx - 1; ++i)
            for (int j = 1; j < g.ny - 1; ++j) {
                try {
                    kest[g.index(i, j)] = gauss_mean_curvature(fr, i, j, reg_floor).K;
                } catch (const Error&) {
                }
            }
    }
    if (color_field == "margin" || color_field == "gauss") {
        const std::vector<double>& src = color_field == "margin" ? fr.margin : kest;
        lo = std::numeric_limits<double>::infinity();
        hi = -lo;
        for (std::size_t k = 0; k < src.size(); ++k) {
            if (!fr.mask[k] || std::isnan(src[k])) continue;
            lo = std::min(lo, src[k]);
            hi = std::max(hi, src[k]);
        }
        if (!(hi > lo)) {
            lo = 0.0;
            hi = 1.0;
        }
    }

    auto color_at = [&](std::size_t k) -> Rgb {
        if (color_field == "margin" || color_field == "gauss") {
            const double v = color_field == "margin" ? fr.margin[k] : kest[k];
            const double t =
                std::isnan(v) ? 0.0 : std::clamp((v - lo) / (hi - lo), 0.0, 1.0);
            return {t, t, t};
        }
        // binary map by the sign of the degeneracy field
        return fr.mu[k] >= 0.0 ? Rgb{0.85, 0.35, 0.25} : Rgb{0.25, 0.45, 0.85};
    };

    std::ofstream ms(mesh_path);
    if (!ms) throw ConfigError("export_mesh: cannot open '" + mesh_path + "' for writing");

    std::vector<long> vid(fr.f.size(), -1);
    long next = 1;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const std::size_t k = g.index(i, j);
            if (!fr.mask[k]) continue;
            vid[k] = next++;
            const Rgb c = color_at(k);
            ms << "v " << fmt(fr.f[k].x()) << ' ' << fmt(fr.f[k].y()) << ' ' << fmt(fr.f[k].z())
               << ' ' << fmt(c.r) << ' ' << fmt(c.g) << ' ' << fmt(c.b) << '\n';
        }
    }

    for (int j = 0; j < g.ny - 1; ++j) {
        for (int i = 0; i < g.nx - 1; ++i) {
            const std::size_t k00 = g.index(i, j), k10 = g.index(i + 1, j);
            const std::size_t k01 = g.index(i, j + 1), k11 = g.index(i + 1, j + 1);
            if (vid[k00] < 0 || vid[k10] < 0 || vid[k01] < 0 || vid[k11] < 0) continue;
            const double d0 = (fr.f[k00] - fr.f[k11]).norm();
            const double d1 = (fr.f[k10] - fr.f[k01]).norm();
            if (d0 <= d1) {
                ms << "f " << vid[k00] << ' ' << vid[k10] << ' ' << vid[k11] << '\n';
                ms << "f " << vid[k00] << ' ' << vid[k11] << ' ' << vid[k01] << '\n';
            } else {
                ms << "f " << vid[k00] << ' ' << vid[k10] << ' ' << vid[k01] << '\n';
                ms << "f " << vid[k10] << ' ' << vid[k11] << ' ' << vid[k01] << '\n';
            }
        }
    }
    ms.close();

    if (sidecar_path.empty()) return;
    std::ofstream sc(sidecar_path);
    if (!sc) throw ConfigError("export_mesh: cannot open '" + sidecar_path + "' for writing");
    sc << "vertex,i,j,x,y,mu,reg_margin,gauss_k\n";
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const std::size_t k = g.index(i, j);
            if (vid[k] < 0) continue;
            sc << vid[k] << ',' << i << ',' << j << ',' << fmt(g.x(i)) << ',' << fmt(g.y(j))
               << ',' << fmt(fr.mu[k]) << ',' << fmt(fr.margin[k]) << ','
               << (std::isnan(kest[k]) ? std::string("nan") : fmt(kest[k])) << '\n';
        }
    }
}

LaurentMatrix read_loop_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("read_loop_file: cannot open '" + path + "'");
    struct Entry {
        int n;
        Matrix2c m;
    };
    std::vector<Entry> entries;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        int n;
        if (!(ls >> n))
            throw ConfigError("loop file '" + path + "' line " + std::to_string(lineno) +
                              ": expected integer exponent");
        double v[8];
        for (int k = 0; k < 8; ++k)
            if (!(ls >> v[k]))
                throw ConfigError("loop file '" + path + "' line " + std::to_string(lineno) +
                             ": expected 8 real numbers after the exponent");
        std::string extra;
        if (ls >> extra)
            throw ConfigError("loop file '" + path + "' line " + std::to_string(lineno) +
                              ": trailing tokens");
        Entry e;
        e.n = n;
        e.m << Complex(v[0], v[1]), Complex(v[2], v[3]), Complex(v[4], v[5]), Complex(v[6], v[7]);
        entries.push_back(e);
    }
    if (entries.empty()) throw ConfigError("loop file '" + path + "' contains no coefficients");
    int lo = entries.front().n, hi = lo;
    for (const auto& e : entries) {
        lo = std::min(lo, e.n);
        hi = std::max(hi, e.n);
    }
    LaurentMatrix loop(lo, hi);
    for (const auto& e : entries) loop.ref(e.n) += e.m;
    loop.twisted = check_twisted(loop).twisted;
    return loop;
}

void write_loop_file(const LaurentMatrix& loop, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("write_loop_file: cannot open '" + path + "'");
    for (int n = loop.lo; n <= loop.hi; ++n) {
        const Matrix2c& m = loop.at(n);
        out << n;
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c)
                out << ' ' << fmt(m(r, c).real()) << ' ' << fmt(m(r, c).imag());
        out << '\n';
    }
}

}  // namespace dpw
