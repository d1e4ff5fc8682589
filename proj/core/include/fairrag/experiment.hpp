#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fairrag/chat_client.hpp"
#include "fairrag/corpus.hpp"
#include "fairrag/generation.hpp"
#include "fairrag/ranking.hpp"
#include "fairrag/relevance.hpp"
#include "fairrag/stats.hpp"

namespace fairrag {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ExperimentError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RankerParams {
    double alpha = 5.0;
    double gamma = 2.0;
    double tau = 0.5;
    int min_per_group = -1;  // -1 = floor(k/2)
};

struct ExperimentConfig {
    std::string corpus_path;
    std::string overrides_dir;
    std::size_t truncation_limit = 100;

    std::string scorer_name = "lexical";  // lexical | synthetic | external
    std::string external_scores_path;
    SyntheticScorerParams synthetic;

    std::string ranker_name = "standard";  // standard | stochastic | forced | representative
    int k = 5;
    std::size_t pool_size_n = 50;
    int trials_per_ranker = 80;
    std::vector<int> scenarios = {1, 2, 3, 4};
    std::vector<std::string> topics;  // empty = all topics in the corpus
    std::uint64_t base_seed = 0;

    std::string generator_mode = "simulated";  // simulated | endpoint
    GeneratorSimParams sim;
    EndpointConfig endpoint;

    RankerParams ranker;

    int min_per_group_for_k() const {
        return ranker.min_per_group >= 0 ? ranker.min_per_group : k / 2;
    }
};

/// Parses a flat key=value config file ("#" comments). Unknown keys and
/// malformed values throw ConfigError naming the offending key.
ExperimentConfig parse_config(const std::filesystem::path& path);

/// Validates ranges and cross-field constraints; throws ConfigError.
void validate_config(const ExperimentConfig& config);

struct TrialRecord {
    int trial_id = 0;
    int scenario_id = 0;
    std::string topic_id;
    std::string ranker_name;
    std::uint64_t seed = 0;

    struct RankedDoc {
        std::string doc_id;
        GroupLabel group = GroupLabel::NonProtected;
    };
    std::vector<RankedDoc> ranked;

    double exposure_share = 0.0;
    double exposure_disparity = 0.0;
    std::optional<double> generation_parity;
    double utility = 0.0;
    std::optional<double> fairness_gap;
    std::optional<double> fairness_gap_magnitude;

    int citation_count = 0;
    int duplicate_citations = 0;
    int ungrounded_citations = 0;

    bool failed = false;
    std::string error;
};

/// Runs trials_per_ranker trials of the configured ranker. (scenario, topic)
/// pairs are cycled round-robin; trial i draws from a private PRNG seeded
/// base_seed + i. Trials run on a worker pool; results are returned in trial
/// order regardless of scheduling. Endpoint failures are recorded as failed
/// trials; the run aborts when more than 10% of trials fail.
std::vector<TrialRecord> run_experiment(const ExperimentConfig& config, const Corpus& corpus);

struct MetricSummary {
    SummaryStats stats;
    std::size_t excluded = 0;  // undefined-parity trials left out
};

// ranker -> metric name -> summary. Metric names: exposure_disparity,
// exposure_share, generation_parity, utility.
using Aggregates = std::map<std::string, std::map<std::string, MetricSummary>>;

Aggregates aggregate(const std::vector<TrialRecord>& records);

struct PairwiseResult {
    std::string ranker_a;
    std::string ranker_b;
    TTestResult test;
};

/// All pairwise t-tests between rankers for one metric, in lexicographic
/// ranker order.
std::vector<PairwiseResult> compare(const Aggregates& aggregates,
                                    const std::string& metric_name,
                                    double alpha_level);

// --- run directory I/O (atomic: write temp file, then rename) ---

void write_trials_jsonl(const std::filesystem::path& path,
                        const std::vector<TrialRecord>& records);
std::vector<TrialRecord> read_trials_jsonl(const std::filesystem::path& path);
std::string trials_to_jsonl(const std::vector<TrialRecord>& records);

void write_aggregate_csv(const std::filesystem::path& path, const Aggregates& aggregates);

void write_ttests_csv(const std::filesystem::path& path, const std::string& metric_name,
                      const std::vector<PairwiseResult>& results);

}  // namespace fairrag
