#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ulam/config_io.hpp"
#include "ulam/experiments.hpp"

namespace fs = std::filesystem;
using ulam::ExperimentConfig;
using ulam::ExperimentKind;
using ulam::ExperimentReport;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerdictFailed = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitHypothesisViolated = 3;
constexpr int kExitDivergence = 4;

struct CommonOptions {
    std::string config_path;
    std::string out_dir = "ulam-out";
    std::optional<std::uint64_t> seed;
    std::optional<int> grid_shells;
    std::optional<int> depth;
    std::string format = "json";
    bool quiet = false;
};

void add_common(CLI::App* cmd, CommonOptions& opts, bool config_required) {
    auto* c = cmd->add_option("--config", opts.config_path, "experiment config file (JSON)");
    if (config_required) c->required();
    cmd->add_option("--out", opts.out_dir, "output directory for report/curves/manifest");
    cmd->add_option("--seed", opts.seed, "global seed override");
    cmd->add_option("--grid-shells", opts.grid_shells, "override the number of grid shells");
    cmd->add_option("--depth", opts.depth, "override the extraction depth N");
    cmd->add_option("--format", opts.format, "report format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_flag("--quiet", opts.quiet, "suppress per-verdict output");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ulam::ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

void apply_overrides(ExperimentConfig& cfg, const CommonOptions& opts) {
    if (opts.seed) {
        ulam::apply_seed_override(cfg, *opts.seed);
    } else if (const char* env = std::getenv("ULAM_LAB_SEED")) {
        ulam::apply_seed_override(cfg, std::strtoull(env, nullptr, 10));
    }
    if (opts.grid_shells) cfg.grid.shells = *opts.grid_shells;
    if (opts.depth) cfg.depth = *opts.depth;
}

void print_verdicts(const ExperimentReport& report, bool quiet) {
    if (quiet) return;
    for (const auto& v : report.verdicts) {
        const char* tag = v.informational ? "info" : (v.passed ? "PASS" : "FAIL");
        std::cout << "[" << tag << "] " << v.name << " (measured=" << v.measured
                  << ", allowed=" << v.allowed << ")\n";
    }
    std::cout << report.overall << "\n";
}

// Writes report (+ curves when present) and the manifest, manifest last.
void emit_artifacts(const ExperimentReport& report, const CommonOptions& opts,
                    const std::string& config_path) {
    fs::create_directories(opts.out_dir);
    std::vector<std::string> artifacts;

    if (opts.format == "csv") {
        write_file(fs::path(opts.out_dir) / "report.csv", ulam::report_to_csv(report));
        artifacts.push_back("report.csv");
    } else {
        write_file(fs::path(opts.out_dir) / "report.json",
                   ulam::report_to_json(report).dump(2) + "\n");
        artifacts.push_back("report.json");
    }
    if (!report.curve.empty()) {
        write_file(fs::path(opts.out_dir) / "curves.csv", ulam::curve_to_csv(report.curve));
        artifacts.push_back("curves.csv");
    }

    ulam::json manifest{{"config_path", config_path},
                        {"out_dir", opts.out_dir},
                        {"artifacts", artifacts},
                        {"exit_status", report.exit_code}};
    write_file(fs::path(opts.out_dir) / "manifest.json", manifest.dump(2) + "\n");
}

ExperimentConfig load_config(const CommonOptions& opts) {
    ExperimentConfig cfg = ulam::parse_experiment_config(read_file(opts.config_path));
    apply_overrides(cfg, opts);
    return cfg;
}

void require_kind(const ExperimentConfig& cfg, std::initializer_list<ExperimentKind> kinds,
                  const std::string& subcommand) {
    for (auto k : kinds)
        if (cfg.kind == k) return;
    throw ulam::ConfigError("config kind '" + to_string(cfg.kind) + "' does not match the '" +
                            subcommand + "' subcommand");
}

int run_and_emit(const ExperimentConfig& cfg, const CommonOptions& opts,
                 const std::string& config_path, bool extract_only = false) {
    ExperimentReport report =
        extract_only ? ulam::run_extract(cfg) : ulam::run_experiment(cfg);
    emit_artifacts(report, opts, config_path);
    print_verdicts(report, opts.quiet);
    return report.exit_code;
}

ExperimentConfig default_funceq_config() {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::funceq_check;
    cfg.algebra.dim = 1;
    cfg.algebra.rule = ulam::ProductRule::derived;
    cfg.grid.shells = 10;
    cfg.grid.directions = 4;
    cfg.grid.seed = 11;
    cfg.seed = 42;
    return cfg;
}

ExperimentConfig default_axioms_config() {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::axioms;
    cfg.algebra.dim = 2;
    cfg.algebra.rule = ulam::ProductRule::derived;
    cfg.axiom_samples = 100;
    cfg.seed = 42;
    return cfg;
}

// Severity order for batch summaries: config errors dominate, then verdict
// failures, divergence, then the informative hypothesis-violation status.
int worse_exit(int a, int b) {
    auto rank = [](int code) {
        switch (code) {
            case kExitConfigError: return 4;
            case kExitVerdictFailed: return 3;
            case kExitDivergence: return 2;
            case kExitHypothesisViolated: return 1;
            default: return 0;
        }
    };
    return rank(a) >= rank(b) ? a : b;
}

int run_batch(const CommonOptions& opts, int jobs) {
    std::vector<fs::path> configs;
    if (!fs::is_directory(opts.config_path))
        throw ulam::ConfigError("batch expects --config to name a directory of JSON configs");
    for (const auto& entry : fs::directory_iterator(opts.config_path))
        if (entry.is_regular_file() && entry.path().extension() == ".json")
            configs.push_back(entry.path());
    std::sort(configs.begin(), configs.end());
    if (configs.empty()) throw ulam::ConfigError("batch: no .json configs found");

    struct RunRow {
        std::string name;
        int exit_code = kExitConfigError;
        std::string error;
    };
    std::vector<RunRow> rows(configs.size());
    std::atomic<size_t> next{0};

    auto worker = [&]() {
        while (true) {
            size_t i = next.fetch_add(1);
            if (i >= configs.size()) return;
            RunRow& row = rows[i];
            row.name = configs[i].stem().string();
            CommonOptions run_opts = opts;
            run_opts.out_dir = (fs::path(opts.out_dir) / row.name).string();
            run_opts.quiet = true;
            try {
                ExperimentConfig cfg =
                    ulam::parse_experiment_config(read_file(configs[i].string()));
                apply_overrides(cfg, run_opts);
                row.exit_code = run_and_emit(cfg, run_opts, configs[i].string());
            } catch (const std::exception& e) {
                row.exit_code = kExitConfigError;
                row.error = e.what();
            }
        }
    };

    jobs = std::max(1, jobs);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    int exit_code = kExitOk;
    ulam::json runs = ulam::json::array();
    for (const auto& row : rows) {
        ulam::json r{{"name", row.name}, {"exit_status", row.exit_code}};
        if (!row.error.empty()) r["error"] = row.error;
        runs.push_back(r);
        exit_code = worse_exit(exit_code, row.exit_code);
        if (!opts.quiet)
            std::cout << row.name << ": exit " << row.exit_code
                      << (row.error.empty() ? "" : " (" + row.error + ")") << "\n";
    }
    fs::create_directories(opts.out_dir);
    ulam::json manifest{{"config_dir", opts.config_path},
                        {"out_dir", opts.out_dir},
                        {"runs", runs},
                        {"exit_status", exit_code}};
    write_file(fs::path(opts.out_dir) / "batch_manifest.json", manifest.dump(2) + "\n");
    return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for a unified additive/quadratic/cubic/quartic "
                 "functional equation on small ternary algebras"};
    app.require_subcommand(1);

    CommonOptions funceq_opts, axioms_opts, extract_opts, stability_opts, super_opts, batch_opts;
    int jobs = 1;

    auto* funceq = app.add_subcommand("check-funceq",
                                      "verify monomial solutions and classical specializations");
    add_common(funceq, funceq_opts, false);

    auto* axioms = app.add_subcommand("axioms", "algebra/module axiom reports");
    add_common(axioms, axioms_opts, false);

    auto* extract = app.add_subcommand("extract", "single extraction with diagnostics");
    add_common(extract, extract_opts, true);

    auto* stability =
        app.add_subcommand("stability", "derivation or sigma-homomorphism stability pipeline");
    add_common(stability, stability_opts, true);

    auto* super = app.add_subcommand("superstability", "superstability audit");
    add_common(super, super_opts, true);

    auto* batch = app.add_subcommand("batch", "run a directory of experiment configs");
    add_common(batch, batch_opts, true);
    batch->add_option("--jobs", jobs, "max concurrent experiments");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfigError;
    }

    try {
        if (funceq->parsed()) {
            ExperimentConfig cfg = funceq_opts.config_path.empty()
                                       ? default_funceq_config()
                                       : load_config(funceq_opts);
            if (!funceq_opts.config_path.empty())
                require_kind(cfg, {ExperimentKind::funceq_check}, "check-funceq");
            apply_overrides(cfg, funceq_opts);
            return run_and_emit(cfg, funceq_opts, funceq_opts.config_path);
        }
        if (axioms->parsed()) {
            ExperimentConfig cfg = axioms_opts.config_path.empty() ? default_axioms_config()
                                                                   : load_config(axioms_opts);
            if (!axioms_opts.config_path.empty())
                require_kind(cfg, {ExperimentKind::axioms}, "axioms");
            apply_overrides(cfg, axioms_opts);
            return run_and_emit(cfg, axioms_opts, axioms_opts.config_path);
        }
        if (extract->parsed()) {
            ExperimentConfig cfg = load_config(extract_opts);
            require_kind(cfg,
                         {ExperimentKind::derivation_stability,
                          ExperimentKind::sigma_hom_stability},
                         "extract");
            return run_and_emit(cfg, extract_opts, extract_opts.config_path,
                                /*extract_only=*/true);
        }
        if (stability->parsed()) {
            ExperimentConfig cfg = load_config(stability_opts);
            require_kind(cfg,
                         {ExperimentKind::derivation_stability,
                          ExperimentKind::sigma_hom_stability},
                         "stability");
            return run_and_emit(cfg, stability_opts, stability_opts.config_path);
        }
        if (super->parsed()) {
            ExperimentConfig cfg = load_config(super_opts);
            require_kind(cfg, {ExperimentKind::superstability}, "superstability");
            return run_and_emit(cfg, super_opts, super_opts.config_path);
        }
        if (batch->parsed()) return run_batch(batch_opts, jobs);
    } catch (const ulam::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const ulam::StructuralError& e) {
        std::cerr << "structural error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
    return kExitConfigError;
}
