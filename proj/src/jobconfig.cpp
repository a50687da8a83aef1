#include "dpw/jobconfig.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace dpw {

namespace {

struct RawConfig {
    // section -> ordered key/value with line numbers
    struct Item {
        std::string value;
        int line;
        bool quoted;
    };
    std::map<std::string, std::map<std::string, Item>> sections;
    std::vector<std::pair<std::string, std::string>> order;  // "section.key" -> value
};

RawConfig tokenize(const std::string& text, const std::string& origin) {
    RawConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        // strip comment (not inside quotes)
        bool quoted = false;
        for (std::size_t k = 0; k < line.size(); ++k) {
            if (line[k] == '"') quoted = !quoted;
            if (line[k] == '#' && !quoted) {
                line.erase(k);
                break;
            }
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos) return std::string();
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(origin + ":" + std::to_string(lineno) +
                                  ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (!cfg.sections.count(section)) cfg.sections[section] = {};
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
        if (section.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno) +
                              ": key outside of a [section]");
        const std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        bool is_quoted = false;
        if (!val.empty() && val.front() == '"') {
            if (val.size() < 2 || val.back() != '"')
                throw ConfigError(origin + ":" + std::to_string(lineno) +
                                  ": unterminated quoted value");
            val = val.substr(1, val.size() - 2);
            is_quoted = true;
        }
        if (key.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        if (cfg.sections[section].count(key))
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" +
                              section + "." + key + "'");
        cfg.sections[section][key] = {val, lineno, is_quoted};
        cfg.order.emplace_back(section + "." + key, val);
    }
    return cfg;
}

class SectionReader {
  public:
    SectionReader(RawConfig& cfg, const std::string& name, const std::string& origin)
        : cfg_(cfg), name_(name), origin_(origin) {}

    bool has(const std::string& key) const {
        auto s = cfg_.sections.find(name_);
        return s != cfg_.sections.end() && s->second.count(key);
    }

    std::string str(const std::string& key, bool must_quote = false) {
        const auto& item = item_at(key);
        if (must_quote && !item.quoted)
            throw ConfigError(origin_ + ":" + std::to_string(item.line) + ": value of '" + name_ +
                              "." + key + "' must be a quoted expression");
        used_.insert(key);
        return item.value;
    }

    double num(const std::string& key) {
        const auto& item = item_at(key);
        used_.insert(key);
        try {
            std::size_t pos = 0;
            const double v = std::stod(item.value, &pos);
            if (pos != item.value.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            throw ConfigError(origin_ + ":" + std::to_string(item.line) + ": '" + name_ + "." +
                              key + "' is not a number: '" + item.value + "'");
        }
    }

    int integer(const std::string& key) {
        const double v = num(key);
        if (v != std::floor(v))
            throw ConfigError(origin_ + ": '" + name_ + "." + key + "' must be an integer");
        return static_cast<int>(v);
    }

    void finish() {
        auto s = cfg_.sections.find(name_);
        if (s == cfg_.sections.end()) return;
        for (const auto& [key, item] : s->second)
            if (!used_.count(key))
                throw ConfigError(origin_ + ":" + std::to_string(item.line) + ": unknown key '" +
                                  name_ + "." + key + "'");
    }

  private:
    const RawConfig::Item& item_at(const std::string& key) const {
        auto s = cfg_.sections.find(name_);
        if (s == cfg_.sections.end() || !s->second.count(key))
            throw ConfigError(origin_ + ": missing required key '" + name_ + "." + key + "'");
        return s->second.at(key);
    }

    RawConfig& cfg_;
    std::string name_, origin_;
    std::set<std::string> used_;
};

const std::map<std::string, std::vector<std::string>>& kind_expr_keys() {
    static const std::map<std::string, std::vector<std::string>> k = {
        {"normalized", {"a", "b"}},
        {"geodesic_gcp", {"kappa", "tau"}},
        {"general_gcp", {"kappa_n", "kappa_g", "mu"}},
        {"general_gcp_curve", {"f0x", "f0y", "f0z", "n0x", "n0y", "n0z"}},
        {"singular_gcp", {"kappa", "tau"}},
        {"singular_gcp_general", {"b", "c"}},
        {"cone_from_normal_curve", {"c"}},
        {"cmc_gcp", {"kappa_n", "kappa_g", "mu"}},
        {"cmc_gcp_curve", {"f0x", "f0y", "f0z", "n0x", "n0y", "n0z"}},
    };
    return k;
}

}  // namespace

JobSpec parse_config_text(const std::string& text, const std::string& origin) {
    RawConfig cfg = tokenize(text, origin);
    for (const auto& [sec, _] : cfg.sections)
        if (sec != "potential" && sec != "grid" && sec != "numerics" && sec != "output")
            throw ConfigError(origin + ": unknown section [" + sec + "]");

    JobSpec job;

    SectionReader pot(cfg, "potential", origin);
    job.kind = pot.str("kind");
    const auto keys = kind_expr_keys();
    if (!keys.count(job.kind))
        throw ConfigError(origin + ": unknown potential kind '" + job.kind + "'");
    for (const std::string& key : keys.at(job.kind)) job.exprs[key] = pot.str(key, true);
    if (job.kind == "cone_from_normal_curve" && pot.has("period"))
        job.period = pot.num("period");
    pot.finish();

    SectionReader grid(cfg, "grid", origin);
    job.grid.x0 = grid.num("x0");
    job.grid.x1 = grid.num("x1");
    job.grid.y0 = grid.num("y0");
    job.grid.y1 = grid.num("y1");
    job.grid.nx = grid.integer("nx");
    job.grid.ny = grid.integer("ny");
    if (grid.has("basepoint_x") || grid.has("basepoint_y")) {
        const double bx = grid.has("basepoint_x") ? grid.num("basepoint_x") : 0.0;
        const double by = grid.has("basepoint_y") ? grid.num("basepoint_y") : 0.0;
        job.grid.basepoint = Complex(bx, by);
    }
    grid.finish();
    job.grid.validate();

    SectionReader num(cfg, "numerics", origin);
    auto opt_num = [&](const char* key, double& slot) {
        if (num.has(key)) slot = num.num(key);
    };
    if (num.has("n_trunc")) job.frame.iw.n_trunc = num.integer("n_trunc");
    if (num.has("substeps")) job.frame.substeps = num.integer("substeps");
    if (num.has("threads")) job.frame.threads = num.integer("threads");
    if (num.has("section_factor")) job.frame.iw.section_factor = num.integer("section_factor");
    if (num.has("adm_samples")) job.adm_samples = num.integer("adm_samples");
    if (num.has("flatness_probes")) job.flatness_probes = num.integer("flatness_probes");
    opt_num("iwasawa_tol", job.frame.iw.iwasawa_tol);
    opt_num("det_tol", job.frame.iw.det_tol);
    opt_num("cond_floor", job.frame.iw.cond_floor);
    opt_num("twist_tol", job.frame.iw.twist_tol);
    opt_num("tail_tol", job.frame.tail_tol);
    opt_num("flatness_tol", job.flatness_tol);
    opt_num("reg_floor", job.reg_floor);
    opt_num("class_tol", job.class_tol);
    opt_num("data_tol", job.data_tol);
    opt_num("close_tol", job.close_tol);
    opt_num("frontal_tol", job.frontal_tol);
    opt_num("taylor_tol", job.taylor_tol);
    num.finish();
    if (job.frame.iw.n_trunc < 2)
        throw ConfigError(origin + ": numerics.n_trunc must be >= 2");

    SectionReader out(cfg, "output", origin);
    if (out.has("mesh")) job.mesh_path = out.str("mesh");
    if (out.has("sidecar")) job.sidecar_path = out.str("sidecar");
    if (out.has("report")) job.report_path = out.str("report");
    if (out.has("color")) {
        job.color_field = out.str("color");
        if (job.color_field != "mu" && job.color_field != "margin" && job.color_field != "gauss")
            throw ConfigError(origin + ": output.color must be mu, margin or gauss");
    }
    if (out.has("surface")) {
        job.surface = out.str("surface");
        if (job.surface != "auto" && job.surface != "spherical" && job.surface != "cmc")
            throw ConfigError(origin + ": output.surface must be auto, spherical or cmc");
    }
    if (out.has("oracles")) {
        std::istringstream os(out.str("oracles"));
        std::string tok;
        while (std::getline(os, tok, ',')) {
            const auto b = tok.find_first_not_of(" \t");
            const auto e = tok.find_last_not_of(" \t");
            if (b != std::string::npos) job.oracles.push_back(tok.substr(b, e - b + 1));
        }
    }
    if (out.has("period_check")) job.period_check = out.num("period_check");
    if (out.has("sphere_radius")) job.sphere_radius = out.num("sphere_radius");
    if (out.has("h_expected")) job.h_expected = out.num("h_expected");
    out.finish();

    job.echo = cfg.order;
    return job;
}

JobSpec load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path);
}

Potential build_potential(const JobSpec& job, ConeReport* cone_report) {
    auto fn = [&](const char* key) {
        try {
            return AnalyticFn::parse(job.exprs.at(key));
        } catch (const ParseError& e) {
            throw ConfigError("potential." + std::string(key) + ": " + e.what() + " (offset " +
                              std::to_string(e.offset) + ")");
        }
    };
    const CauchyInterval iv{job.grid.x0, job.grid.x1};
    const AdmissibilityOptions adm{job.adm_samples, job.class_tol};

    if (job.kind == "normalized") return normalized(fn("a"), fn("b"));
    if (job.kind == "geodesic_gcp") return geodesic_gcp(fn("kappa"), fn("tau"));
    if (job.kind == "general_gcp")
        return general_gcp(fn("kappa_n"), fn("kappa_g"), fn("mu"), iv, adm);
    if (job.kind == "singular_gcp") return singular_gcp(fn("kappa"), fn("tau"), iv, adm);
    if (job.kind == "singular_gcp_general")
        return singular_gcp_general(fn("b"), fn("c"), iv, adm);
    if (job.kind == "cone_from_normal_curve")
        return cone_potential_from_normal_curve(fn("c"), job.period, iv, cone_report,
                                                job.close_tol, adm);
    if (job.kind == "cmc_gcp") return cmc_gcp(fn("kappa_n"), fn("kappa_g"), fn("mu"));
    if (job.kind == "general_gcp_curve" || job.kind == "cmc_gcp_curve") {
        const AnalyticVec3 f0{fn("f0x"), fn("f0y"), fn("f0z")};
        const AnalyticVec3 N0{fn("n0x"), fn("n0y"), fn("n0z")};
        const CurveData d = gcp_data_from_curve(f0, N0, iv, job.data_tol, job.adm_samples);
        return job.kind == "cmc_gcp_curve" ? cmc_gcp(d.kappa_n, d.kappa_g, d.mu)
                                           : general_gcp(d.kappa_n, d.kappa_g, d.mu, iv, adm);
    }
    throw ConfigError("unknown potential kind '" + job.kind + "'");
}

SurfaceKind surface_kind_for(const JobSpec& job) {
    if (job.surface == "spherical") return SurfaceKind::Spherical;
    if (job.surface == "cmc") return SurfaceKind::Cmc;
    return (job.kind == "cmc_gcp" || job.kind == "cmc_gcp_curve") ? SurfaceKind::Cmc
                                                                  : SurfaceKind::Spherical;
}

}  // namespace dpw
