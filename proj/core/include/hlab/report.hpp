#ifndef HLAB_REPORT_HPP
#define HLAB_REPORT_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace hlab {

/// One reproducible experiment run. Zero / empty fields mean "use the
/// experiment's default scale"; every value actually used is echoed into the
/// outputs.
struct ExperimentConfig {
    std::string experiment;  // lp-norms, products, quartic, bilinear, smoothing,
                             // tails, chaos, nonsmoothing, solve, scatter, localization
    int dimension = 0;
    long cutoff = 0;
    std::uint64_t seed = 1;
    long sample_count = 0;
    std::string output_dir = "out";
    unsigned threads = 0;  // 0: hardware concurrency; never affects results

    // experiment-specific knobs
    std::vector<long> n_values;        // scan list (mode indices or dyadic blocks)
    std::vector<double> lambda_grid;   // tail thresholds
    double s = -1;                     // Sobolev index; -1 = experiment default
    double eps = 0.1;
    double delta = 0.1;
    int p = 3;
    int kappa = 1;
    double T = 0.7;
    double c = 1.5;  // localization radius factor
};

struct Verdict {
    std::string name;
    bool pass = false;
    double value = 0;
    double lo = 0;  // inclusive bounds the value was checked against
    double hi = 0;
};

struct ExperimentReport {
    ExperimentConfig config;  // fully resolved (defaults filled in)
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<Verdict> verdicts;
    double wall_seconds = 0;
    bool diverged = false;  // Picard blow-up and the like

    bool passed() const;
};

const std::vector<std::string>& experiment_names();

/// Validates, fills defaults, dispatches and computes verdicts. Throws
/// std::invalid_argument for an unknown experiment or inconsistent
/// parameters; numerical divergence is reported in the result instead.
ExperimentReport run_experiment(const ExperimentConfig& config);

/// FNV-1a over the canonical JSON of the config, excluding output_dir and
/// threads (neither may influence the numbers).
std::string config_hash(const ExperimentConfig& config);

/// data.csv (RFC 4180 rows, '#' comment header with the config hash) and
/// report.json under dir; creates the directory.
void write_report(const ExperimentReport& report, const std::string& dir);

std::string report_json(const ExperimentReport& report);
std::string report_csv(const ExperimentReport& report);

/// Runs every experiment at reduced (quick) or acceptance (full) scale under
/// out_dir/<experiment>, printing a verdict table. Returns the process exit
/// code: 0 pass, 1 verdict failure, 3 divergence.
int run_suite(const std::string& name, const std::string& out_dir, unsigned threads,
              std::uint64_t seed, std::ostream& log);

}  // namespace hlab

#endif
