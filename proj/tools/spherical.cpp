// Command-line front end: solve / classify / verify a job config, or
// factorize a loop coefficient file. Exit codes: 0 pass, 1 oracle failure,
// 2 input error, 3 numerical failure.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "dpw/meshio.hpp"
#include "dpw/runner.hpp"

namespace {

int guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const dpw::ConfigError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const dpw::ParseError& e) {
        std::cerr << "input error: " << e.what() << " (offset " << e.offset << ")\n";
        return 2;
    } catch (const dpw::ValidationError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const dpw::Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}

int run_config(const std::string& path, bool with_mesh) {
    return guarded([&] {
        const dpw::JobSpec job = dpw::load_config(path);
        const dpw::RunOutcome out = dpw::run_job(job, with_mesh);
        dpw::write_report(out.report, std::cout);
        return out.exit_code;
    });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"constant positive Gauss curvature surfaces from loop group data"};
    app.require_subcommand(1);

    std::string config_path, loop_path, out_prefix;

    CLI::App* solve = app.add_subcommand("solve", "run a job and export mesh + report");
    solve->add_option("config", config_path, "job config file")->required();

    CLI::App* verify = app.add_subcommand("verify", "run a job's oracles only, no mesh");
    verify->add_option("config", config_path, "job config file")->required();

    CLI::App* classify = app.add_subcommand("classify", "classify singularities from the data");
    classify->add_option("config", config_path, "job config file")->required();

    CLI::App* factorize = app.add_subcommand("factorize", "Iwasawa-factor a loop file");
    factorize->add_option("loopfile", loop_path, "loop coefficient file")->required();
    factorize->add_option("-o,--output", out_prefix,
                          "output prefix for factor files (default: loopfile)");
    int n_trunc = 16;
    factorize->add_option("--n-trunc", n_trunc, "truncation degree (default 16)");

    CLI11_PARSE(app, argc, argv);

    if (solve->parsed()) return run_config(config_path, true);
    if (verify->parsed()) return run_config(config_path, false);

    if (classify->parsed()) {
        return guarded([&] {
            const dpw::JobSpec job = dpw::load_config(config_path);
            const dpw::RunOutcome out = dpw::classify_job(job);
            dpw::write_report(out.report, std::cout);
            return out.exit_code;
        });
    }

    // factorize
    return guarded([&] {
        const dpw::LaurentMatrix loop = dpw::read_loop_file(loop_path);
        dpw::IwasawaOptions opt;
        opt.n_trunc = n_trunc;
        const dpw::IwasawaResult res = dpw::iwasawa(loop, opt);
        std::printf("rho = %.17g\n", res.rho);
        std::printf("residual = %.6g\n", res.residual);
        const std::string prefix = out_prefix.empty() ? loop_path : out_prefix;
        dpw::write_loop_file(res.unitary_part, prefix + ".unitary");
        dpw::write_loop_file(res.plus_part, prefix + ".plus");
        std::printf("factors written to %s.unitary and %s.plus\n", prefix.c_str(),
                    prefix.c_str());
        return res.residual <= 10 * opt.iwasawa_tol ? 0 : 3;
    });
}
