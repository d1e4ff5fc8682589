// fairrag command line: ingest a corpus, run ranking experiments, analyze
// significance across runs, and emit report charts.

#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fairrag/corpus.hpp"
#include "fairrag/experiment.hpp"
#include "fairrag/report.hpp"

namespace fs = std::filesystem;
using namespace fairrag;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

std::vector<TrialRecord> load_runs(const std::vector<std::string>& run_dirs) {
    std::vector<TrialRecord> all;
    for (const auto& dir : run_dirs) {
        const auto path = fs::path(dir) / "trials.jsonl";
        if (!fs::exists(path)) {
            throw ConfigError("run directory has no trials.jsonl: " + dir);
        }
        auto records = read_trials_jsonl(path);
        all.insert(all.end(), std::make_move_iterator(records.begin()),
                   std::make_move_iterator(records.end()));
    }
    return all;
}

int cmd_ingest(const std::string& corpus_path, const std::string& overrides,
               std::size_t truncate, const std::string& out_path) {
    std::optional<fs::path> overrides_dir;
    if (!overrides.empty()) {
        overrides_dir = fs::path(overrides);
    }
    Corpus corpus;
    try {
        corpus = load_corpus(corpus_path, truncate, overrides_dir);
    } catch (const CorpusError& e) {
        std::cerr << "ingest: " << e.what() << "\n";
        return kExitUsage;
    }
    write_corpus_csv(corpus, out_path);
    const auto protected_n = corpus.global_pool(GroupLabel::Protected).size();
    const auto nonprotected_n = corpus.global_pool(GroupLabel::NonProtected).size();
    std::cout << corpus.documents().size() << " documents, " << protected_n << " protected, "
              << nonprotected_n << " non-protected\n"
              << corpus.topic_ids().size() << " topics -> " << out_path << "\n";
    return kExitOk;
}

int cmd_run(const std::string& config_path, const std::string& ranker_override,
            std::optional<std::uint64_t> seed_override, const std::string& out_dir) {
    ExperimentConfig config;
    try {
        config = parse_config(config_path);
        if (!ranker_override.empty()) {
            config.ranker_name = ranker_override;
        }
        if (seed_override) {
            config.base_seed = *seed_override;
        }
        // The API key is only ever taken from the environment, never a flag.
        if (const char* key = std::getenv("FAIRRAG_API_KEY")) {
            config.endpoint.api_key = key;
        }
        validate_config(config);
    } catch (const ConfigError& e) {
        std::cerr << "run: " << e.what() << "\n";
        return kExitUsage;
    }

    Corpus corpus;
    try {
        std::optional<fs::path> overrides_dir;
        if (!config.overrides_dir.empty()) {
            overrides_dir = fs::path(config.overrides_dir);
        }
        corpus = load_corpus(config.corpus_path, config.truncation_limit, overrides_dir);
    } catch (const CorpusError& e) {
        std::cerr << "run: " << e.what() << "\n";
        return kExitUsage;
    }

    const auto records = run_experiment(config, corpus);
    fs::create_directories(out_dir);
    write_trials_jsonl(fs::path(out_dir) / "trials.jsonl", records);
    const auto aggregates = aggregate(records);
    write_aggregate_csv(fs::path(out_dir) / "aggregate.csv", aggregates);

    std::cout << std::fixed << std::setprecision(4);
    for (const auto& [ranker, metrics] : aggregates) {
        std::cout << ranker << ": n=" << metrics.at("exposure_share").stats.n
                  << " exposure_share=" << metrics.at("exposure_share").stats.mean
                  << " disparity=" << metrics.at("exposure_disparity").stats.mean
                  << " parity=" << metrics.at("generation_parity").stats.mean
                  << " utility=" << metrics.at("utility").stats.mean << "\n";
    }
    return kExitOk;
}

int cmd_analyze(const std::vector<std::string>& run_dirs, const std::string& metric,
                double alpha, const std::string& out_path) {
    if (run_dirs.size() < 2) {
        std::cerr << "analyze: need at least 2 run directories\n";
        return kExitUsage;
    }
    Aggregates aggregates;
    std::vector<PairwiseResult> results;
    try {
        aggregates = aggregate(load_runs(run_dirs));
        results = compare(aggregates, metric, alpha);
    } catch (const ConfigError& e) {
        std::cerr << "analyze: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ExperimentError& e) {
        std::cerr << "analyze: " << e.what() << "\n";
        return kExitUsage;
    }
    write_ttests_csv(out_path, metric, results);
    std::cout << std::fixed << std::setprecision(4);
    for (const auto& result : results) {
        std::cout << metric << " " << result.ranker_a << " vs " << result.ranker_b
                  << ": t=" << result.test.t_value << " df=" << result.test.df
                  << " critical_t=" << result.test.critical_t
                  << (result.test.significant ? " significant" : " not significant") << "\n";
    }
    std::cout << "wrote " << out_path << "\n";
    return kExitOk;
}

int cmd_report(const std::vector<std::string>& run_dirs, const std::string& out_path) {
    Aggregates aggregates;
    try {
        const auto records = load_runs(run_dirs);
        if (records.empty()) {
            std::cerr << "report: runs contain no trials\n";
            return kExitUsage;
        }
        aggregates = aggregate(records);
        write_report(out_path, aggregates);
    } catch (const ConfigError& e) {
        std::cerr << "report: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ReportError& e) {
        std::cerr << "report: " << e.what() << "\n";
        return kExitUsage;
    }
    std::cout << "wrote " << out_path << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fair-ranking experiment harness for retrieval-augmented generation"};
    app.set_version_flag("--version", "fairrag 0.1.0");
    app.require_subcommand(1);

    // ingest
    auto* ingest = app.add_subcommand("ingest", "validate and canonicalize a corpus CSV");
    std::string ingest_corpus, ingest_overrides, ingest_out;
    std::size_t ingest_truncate = 100;
    ingest->add_option("--corpus", ingest_corpus, "input corpus CSV")->required();
    ingest->add_option("--overrides", ingest_overrides, "directory of <doc_id>.txt overrides");
    ingest->add_option("--truncate", ingest_truncate, "word truncation limit");
    ingest->add_option("--out", ingest_out, "output canonical CSV")->required();

    // run
    auto* run = app.add_subcommand("run", "run one experiment and write a run directory");
    std::string run_config, run_ranker, run_out;
    std::optional<std::uint64_t> run_seed;
    run->add_option("--config", run_config, "experiment config file")->required();
    run->add_option("--ranker", run_ranker,
                    "override ranker: standard|stochastic|forced|representative");
    run->add_option("--seed", run_seed, "override base seed");
    run->add_option("--out", run_out, "output run directory")->required();

    // analyze
    auto* analyze = app.add_subcommand("analyze", "pairwise t-tests across run directories");
    std::vector<std::string> analyze_runs;
    std::string analyze_metric, analyze_out = "ttests.csv";
    double analyze_alpha = 0.01;
    analyze->add_option("--runs", analyze_runs, "run directories")->required()->expected(-1);
    analyze->add_option("--metric", analyze_metric,
                        "exposure_disparity|exposure_share|generation_parity|utility")
        ->required();
    analyze->add_option("--alpha", analyze_alpha, "significance level (0.01 or 0.05)");
    analyze->add_option("--out", analyze_out, "output CSV path");

    // report
    auto* report = app.add_subcommand("report", "grouped-bar chart of aggregate means");
    std::vector<std::string> report_runs;
    std::string report_out;
    report->add_option("--runs", report_runs, "run directories")->required()->expected(-1);
    report->add_option("--out", report_out, "output path (.svg or .csv)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (ingest->parsed()) {
            return cmd_ingest(ingest_corpus, ingest_overrides, ingest_truncate, ingest_out);
        }
        if (run->parsed()) {
            return cmd_run(run_config, run_ranker, run_seed, run_out);
        }
        if (analyze->parsed()) {
            return cmd_analyze(analyze_runs, analyze_metric, analyze_alpha, analyze_out);
        }
        if (report->parsed()) {
            return cmd_report(report_runs, report_out);
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}
