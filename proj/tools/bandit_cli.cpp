#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ebids/harness.hpp"
#include "ebids/validate.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitValidationFailure = 2;
constexpr int kExitRuntimeError = 3;

void report_failures(const ebids::ExperimentResult& result) {
    for (const auto& cell : result.cells)
        if (cell.result.failed)
            std::cerr << "error: policy " << cell.policy_id << " replication "
                      << cell.replication << ": " << cell.result.error << "\n";
}

void print_final_means(const ebids::ExperimentConfig& cfg, const ebids::ExperimentResult& result) {
    for (const auto& row : result.summary)
        if (row.t == cfg.horizon)
            std::cout << "  " << row.policy_id << ": mean cum regret " << row.mean_cum_regret
                      << "  [" << row.ci_low << ", " << row.ci_high << "]  (n=" << row.n << ")\n";
}

int cmd_run(const std::string& config_path, int workers) {
    ebids::ExperimentConfig cfg = ebids::ExperimentConfig::from_file(config_path);
    const ebids::ExperimentResult result = ebids::run_experiment(cfg, workers);
    ebids::write_experiment_outputs(cfg, result);
    std::cout << "wrote " << cfg.output.trace_csv << " and " << cfg.output.summary_csv << "\n";
    print_final_means(cfg, result);
    if (result.any_failed) {
        report_failures(result);
        return kExitRuntimeError;
    }
    return kExitOk;
}

ebids::SweepParam parse_sweep_param(const std::string& arg) {
    const auto eq = arg.find('=');
    if (eq == std::string::npos)
        throw std::invalid_argument("sweep: --param expects name=v1,v2,... got '" + arg + "'");
    ebids::SweepParam p;
    p.name = arg.substr(0, eq);
    std::string rest = arg.substr(eq + 1);
    std::size_t pos = 0;
    while (pos <= rest.size()) {
        const auto comma = rest.find(',', pos);
        const std::string tok =
            rest.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (tok.empty()) throw std::invalid_argument("sweep: empty value in '" + arg + "'");
        p.values.push_back(std::stod(tok));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (p.values.empty()) throw std::invalid_argument("sweep: no values in '" + arg + "'");
    return p;
}

int cmd_sweep(const std::string& config_path, const std::vector<std::string>& param_args,
              int workers) {
    ebids::ExperimentConfig base = ebids::ExperimentConfig::from_file(config_path);
    std::vector<ebids::SweepParam> params;
    for (const auto& a : param_args) params.push_back(parse_sweep_param(a));
    const auto grid = ebids::expand_sweep(base, params);
    bool any_failed = false;
    for (const auto& [label, cfg] : grid) {
        const ebids::ExperimentResult result = ebids::run_experiment(cfg, workers);
        ebids::write_experiment_outputs(cfg, result);
        std::cout << "cell" << label << " -> " << cfg.output.summary_csv << "\n";
        print_final_means(cfg, result);
        if (result.any_failed) {
            report_failures(result);
            any_failed = true;
        }
    }
    return any_failed ? kExitRuntimeError : kExitOk;
}

int cmd_validate(std::uint64_t seed, int cases) {
    const auto checks = ebids::run_validation_suite(seed, cases);
    bool all_pass = true;
    for (const auto& c : checks) {
        std::cout << (c.pass ? "PASS" : "FAIL") << "  " << c.name << ": " << c.detail << "\n";
        all_pass = all_pass && c.pass;
    }
    return all_pass ? kExitOk : kExitValidationFailure;
}

int cmd_presets(const std::string& name, const std::string& write_dir) {
    const auto presets = ebids::builtin_presets();
    if (!name.empty()) {
        for (const auto& p : presets) {
            if (p.name == name) {
                std::cout << p.config.to_json().dump(2) << "\n";
                return kExitOk;
            }
        }
        std::cerr << "error: unknown preset '" << name << "'\n";
        return kExitConfigError;
    }
    if (!write_dir.empty()) {
        std::filesystem::create_directories(write_dir);
        for (const auto& p : presets) {
            const std::string path = write_dir + "/" + p.name + ".json";
            std::ofstream os(path);
            if (!os) {
                std::cerr << "error: cannot write " << path << "\n";
                return kExitRuntimeError;
            }
            os << p.config.to_json().dump(2) << "\n";
            std::cout << "wrote " << path << "\n";
        }
        return kExitOk;
    }
    for (const auto& p : presets)
        std::cout << p.name << "  -  " << p.description << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Linear bandit benchmark harness: EBIDS, EB-UCB, IDS-UCB and UCB"};
    app.require_subcommand(1);

    std::string config_path;
    int workers = 0;
    std::vector<std::string> param_args;
    std::uint64_t seed = 20250810;
    int cases = 200;
    std::string preset_name, write_dir;

    auto* run = app.add_subcommand("run", "run an experiment config and write trace/summary CSVs");
    run->add_option("--config", config_path, "path to an experiment config JSON")->required();
    run->add_option("--workers", workers, "worker threads (default: BANDIT_WORKERS or all cores)");

    auto* sweep = app.add_subcommand("sweep", "run every combination of swept EBIDS parameters");
    sweep->add_option("--config", config_path, "path to an experiment config JSON")->required();
    sweep->add_option("--param", param_args, "grid axis, e.g. alpha=0.1,0.3,0.5,0.7")->required();
    sweep->add_option("--workers", workers, "worker threads");

    auto* validate = app.add_subcommand("validate", "run the numerical property suites");
    validate->add_option("--seed", seed, "master seed for the property suites");
    validate->add_option("--cases", cases, "replication budget per suite (default 200)");

    auto* presets = app.add_subcommand("presets", "list or emit the built-in experiment configs");
    presets->add_option("--name", preset_name, "print one preset config as JSON");
    presets->add_option("--write-dir", write_dir, "write every preset config into a directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, workers);
        if (sweep->parsed()) return cmd_sweep(config_path, param_args, workers);
        if (validate->parsed()) return cmd_validate(seed, cases);
        if (presets->parsed()) return cmd_presets(preset_name, write_dir);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return kExitRuntimeError;
    }
    return kExitOk;
}
