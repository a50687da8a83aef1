#pragma once

#include "dpw/jobconfig.hpp"
#include "dpw/singularity.hpp"

namespace dpw {

struct OracleResult {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double threshold = 0.0;
    std::string detail;
};

struct SingularityEntry {
    std::string location;  // "x=... y=0" or a description
    SingularityLabel label = SingularityLabel::DegenerateUnclassified;
    std::string criterion;
    std::map<std::string, double> margins;
};

struct RunReport {
    int version = 1;
    std::vector<std::pair<std::string, std::string>> job_echo;
    std::vector<std::string> warnings;

    bool have_field_stats = false;
    double iw_max_residual = 0.0, iw_mean_residual = 0.0, max_tail_mass = 0.0;
    int failed_points = 0;
    int locus_polylines = -1;

    std::vector<OracleResult> oracles;
    std::vector<SingularityEntry> singularities;
    double elapsed_seconds = 0.0;

    bool all_pass() const {
        for (const auto& o : oracles)
            if (!o.pass) return false;
        return true;
    }
};

void write_report(const RunReport& rep, std::ostream& os);
void write_report(const RunReport& rep, const std::string& path);

struct RunOutcome {
    RunReport report;
    int exit_code = 0;  // 0 pass, 1 oracle failure, 2 input error, 3 numerical failure
};

// Full pipeline: potential -> frame -> frontal -> oracles -> mesh + report.
// with_mesh = false implements the `verify` verb.
RunOutcome run_job(const JobSpec& job, bool with_mesh);

// Analytic classification from the Cauchy data (the `classify` verb).
RunOutcome classify_job(const JobSpec& job);

}  // namespace dpw
