#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hlab/report.hpp"
#include "hlab/solver.hpp"
#include "json.hpp"

namespace {

std::string default_out_dir() {
    const char* env = std::getenv("HLAB_OUT");
    return env && *env ? env : "out";
}

void apply_json_config(const std::string& path, hlab::ExperimentConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    if (j.contains("experiment")) cfg.experiment = j["experiment"].get<std::string>();
    if (j.contains("dimension")) cfg.dimension = j["dimension"].get<int>();
    if (j.contains("cutoff")) cfg.cutoff = j["cutoff"].get<long>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("sample_count")) cfg.sample_count = j["sample_count"].get<long>();
    if (j.contains("n_values")) cfg.n_values = j["n_values"].get<std::vector<long>>();
    if (j.contains("lambda_grid"))
        cfg.lambda_grid = j["lambda_grid"].get<std::vector<double>>();
    if (j.contains("s")) cfg.s = j["s"].get<double>();
    if (j.contains("eps")) cfg.eps = j["eps"].get<double>();
    if (j.contains("delta")) cfg.delta = j["delta"].get<double>();
    if (j.contains("p")) cfg.p = j["p"].get<int>();
    if (j.contains("kappa")) cfg.kappa = j["kappa"].get<int>();
    if (j.contains("T")) cfg.T = j["T"].get<double>();
    if (j.contains("c")) cfg.c = j["c"].get<double>();
    if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("threads")) cfg.threads = j["threads"].get<unsigned>();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hermitelab: spectral experiments for the harmonic oscillator"};
    app.require_subcommand(0, 1);

    hlab::ExperimentConfig cfg;
    cfg.output_dir = default_out_dir();
    std::string config_path;
    std::string suite_name;
    std::string suite_out = default_out_dir();
    unsigned suite_threads = 0;
    std::uint64_t suite_seed = 1;

    auto* run = app.add_subcommand("run", "run one experiment and write data.csv/report.json");
    std::string experiments;
    for (const auto& name : hlab::experiment_names())
        experiments += (experiments.empty() ? "" : ", ") + name;
    run->add_option("--config", config_path, "JSON config file; flags override its fields");
    std::vector<std::pair<CLI::Option*, std::function<void(hlab::ExperimentConfig&)>>> overrides;
    auto opt = [&](const std::string& flags, auto hlab::ExperimentConfig::* field,
                   const std::string& help) {
        CLI::Option* o = run->add_option(flags, cfg.*field, help);
        overrides.push_back({o, [&cfg, field](hlab::ExperimentConfig& dst) {
                                 dst.*field = cfg.*field;
                             }});
        return o;
    };
    opt("-e,--experiment", &hlab::ExperimentConfig::experiment, "one of: " + experiments);
    opt("-d,--dim", &hlab::ExperimentConfig::dimension,
        "spatial dimension (0: experiment default)");
    opt("-c,--cutoff", &hlab::ExperimentConfig::cutoff, "eigenvalue cutoff lambda^2");
    opt("--seed", &hlab::ExperimentConfig::seed, "randomization seed");
    opt("--samples", &hlab::ExperimentConfig::sample_count, "Monte Carlo sample count");
    opt("--n-values", &hlab::ExperimentConfig::n_values,
        "scan list (modes or dyadic blocks)");
    opt("-s", &hlab::ExperimentConfig::s, "Sobolev index");
    opt("--eps", &hlab::ExperimentConfig::eps, "smoothing loss epsilon");
    opt("--delta", &hlab::ExperimentConfig::delta, "bilinear envelope delta");
    opt("-p", &hlab::ExperimentConfig::p, "nonlinearity power (odd)");
    opt("--kappa", &hlab::ExperimentConfig::kappa, "nonlinearity sign/strength");
    opt("-T", &hlab::ExperimentConfig::T, "solver half-window (< pi/4)");
    opt("--out", &hlab::ExperimentConfig::output_dir,
        "output directory (default $HLAB_OUT or ./out)");
    opt("--threads", &hlab::ExperimentConfig::threads, "worker threads (0: all cores)");

    auto* suite = app.add_subcommand("suite", "run every experiment at a preset scale");
    suite->add_option("name", suite_name, "quick (minutes) or full (acceptance scale)")
        ->required()
        ->check(CLI::IsMember({"quick", "full"}));
    suite->add_option("--out", suite_out, "output root (default $HLAB_OUT or ./out)");
    suite->add_option("--threads", suite_threads, "worker threads (0: all cores)");
    suite->add_option("--seed", suite_seed, "randomization seed");

    auto* list = app.add_subcommand("list", "list experiment names");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (list->parsed()) {
            for (const auto& name : hlab::experiment_names()) std::cout << name << "\n";
            return 0;
        }
        if (suite->parsed()) return hlab::run_suite(suite_name, suite_out, suite_threads,
                                                    suite_seed, std::cout);
        if (run->parsed()) {
            if (!config_path.empty()) {
                hlab::ExperimentConfig merged;
                merged.output_dir = default_out_dir();
                apply_json_config(config_path, merged);
                for (const auto& [option, apply] : overrides)
                    if (option->count()) apply(merged);
                cfg = merged;
            }
            if (cfg.experiment.empty()) {
                std::cerr << "error: no experiment given (use -e or --config)\n";
                return 2;
            }
            hlab::ExperimentReport report = hlab::run_experiment(cfg);
            hlab::write_report(report, report.config.output_dir);
            for (const auto& v : report.verdicts)
                std::cout << (v.pass ? "pass " : "FAIL ") << v.name << " = " << v.value
                          << " in [" << v.lo << ", " << v.hi << "]\n";
            std::cout << report.config.experiment << (report.passed() ? ": pass" : ": FAIL")
                      << " (" << report.wall_seconds << "s)\n";
            if (report.diverged) return 3;
            return report.passed() ? 0 : 1;
        }
        std::cerr << app.help();
        return 2;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
