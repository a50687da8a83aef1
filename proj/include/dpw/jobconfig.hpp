#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dpw/frame.hpp"
#include "dpw/potential.hpp"
#include "dpw/surface.hpp"

namespace dpw {

// Sectioned key=value job description ([potential], [grid], [numerics],
// [output]); expression values are quoted, numbers bare, '#' comments.
// Unknown keys and sections are rejected.
struct JobSpec {
    // potential
    std::string kind;                              // config token, e.g. "geodesic_gcp"
    std::map<std::string, std::string> exprs;      // expression strings by key
    std::optional<double> period;                  // cone closure check

    GridSpec grid;

    // numerics
    FrameOptions frame;        // n_trunc, tolerances, substeps
    double flatness_tol = 1e-8;
    double reg_floor = 1e-3;
    double class_tol = 1e-9;
    double data_tol = 1e-8;
    double close_tol = 1e-6;
    double frontal_tol = 1e-3;
    double taylor_tol = 1e-8;
    int adm_samples = 64;
    int flatness_probes = 8;

    // output
    std::string mesh_path, sidecar_path, report_path;
    std::string color_field = "mu";
    std::string surface = "auto";                  // spherical | cmc | auto
    std::vector<std::string> oracles;              // empty -> per-kind defaults
    std::optional<double> period_check;            // periodicity oracle period
    double sphere_radius = 1.0;                    // sphere_fit expectation
    double h_expected = 0.5;                       // h_constant expectation

    // resolved key=value pairs for the report echo, insertion-ordered
    std::vector<std::pair<std::string, std::string>> echo;
};

JobSpec load_config(const std::string& path);
JobSpec parse_config_text(const std::string& text, const std::string& origin = "<string>");

// Instantiate the potential described by the job (parses expressions, runs
// admissibility checks). cone_report is filled for kind cone_from_normal_curve.
Potential build_potential(const JobSpec& job, ConeReport* cone_report = nullptr);

SurfaceKind surface_kind_for(const JobSpec& job);

}  // namespace dpw
