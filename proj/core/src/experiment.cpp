#include "fairrag/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "fairrag/metrics.hpp"

namespace fairrag {
namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) {
        return "";
    }
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    std::istringstream in(value);
    T out;
    in >> out;
    if (in.fail() || !in.eof()) {
        throw ConfigError("config key \"" + key + "\": bad value \"" + value + "\"");
    }
    return out;
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::istringstream in(value);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

void apply_key(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "corpus_path") {
        cfg.corpus_path = value;
    } else if (key == "overrides_dir") {
        cfg.overrides_dir = value;
    } else if (key == "truncation_limit") {
        cfg.truncation_limit = parse_number<std::size_t>(key, value);
    } else if (key == "scorer") {
        cfg.scorer_name = value;
    } else if (key == "external_scores") {
        cfg.external_scores_path = value;
    } else if (key == "synthetic_protected_lo") {
        cfg.synthetic.protected_lo = parse_number<double>(key, value);
    } else if (key == "synthetic_protected_hi") {
        cfg.synthetic.protected_hi = parse_number<double>(key, value);
    } else if (key == "synthetic_nonprotected_lo") {
        cfg.synthetic.nonprotected_lo = parse_number<double>(key, value);
    } else if (key == "synthetic_nonprotected_hi") {
        cfg.synthetic.nonprotected_hi = parse_number<double>(key, value);
    } else if (key == "synthetic_seed") {
        cfg.synthetic.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "ranker") {
        cfg.ranker_name = value;
    } else if (key == "k") {
        cfg.k = parse_number<int>(key, value);
    } else if (key == "pool_size_n") {
        cfg.pool_size_n = parse_number<std::size_t>(key, value);
    } else if (key == "trials_per_ranker") {
        cfg.trials_per_ranker = parse_number<int>(key, value);
    } else if (key == "scenarios") {
        cfg.scenarios.clear();
        for (const auto& s : split_list(value)) {
            cfg.scenarios.push_back(parse_number<int>(key, s));
        }
    } else if (key == "topics") {
        cfg.topics = split_list(value);
    } else if (key == "base_seed") {
        cfg.base_seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "generator_mode") {
        cfg.generator_mode = value;
    } else if (key == "alpha") {
        cfg.ranker.alpha = parse_number<double>(key, value);
    } else if (key == "gamma") {
        cfg.ranker.gamma = parse_number<double>(key, value);
    } else if (key == "tau") {
        cfg.ranker.tau = parse_number<double>(key, value);
    } else if (key == "min_per_group") {
        cfg.ranker.min_per_group = parse_number<int>(key, value);
    } else if (key == "sim_num_citations") {
        cfg.sim.num_citations = parse_number<int>(key, value);
    } else if (key == "sim_position_bias_beta") {
        cfg.sim.position_bias_beta = parse_number<double>(key, value);
    } else if (key == "sim_group_bias") {
        cfg.sim.group_bias_b = parse_number<double>(key, value);
    } else if (key == "sim_hallucination_prob") {
        cfg.sim.hallucination_prob_h = parse_number<double>(key, value);
    } else if (key == "endpoint_url") {
        cfg.endpoint.url = value;
    } else if (key == "endpoint_model") {
        cfg.endpoint.model = value;
    } else if (key == "endpoint_temperature") {
        cfg.endpoint.temperature = parse_number<double>(key, value);
    } else {
        throw ConfigError("unknown config key \"" + key + "\"");
    }
}

json optional_to_json(const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
}

std::optional<double> optional_from_json(const json& v) {
    return v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
}

json record_to_json(const TrialRecord& r) {
    json ranked = json::array();
    for (const auto& doc : r.ranked) {
        ranked.push_back({{"doc_id", doc.doc_id}, {"group", to_string(doc.group)}});
    }
    return json{{"trial_id", r.trial_id},
                {"scenario_id", r.scenario_id},
                {"topic_id", r.topic_id},
                {"ranker", r.ranker_name},
                {"seed", r.seed},
                {"ranked", std::move(ranked)},
                {"exposure_share", r.exposure_share},
                {"exposure_disparity", r.exposure_disparity},
                {"generation_parity", optional_to_json(r.generation_parity)},
                {"utility", r.utility},
                {"fairness_gap", optional_to_json(r.fairness_gap)},
                {"fairness_gap_magnitude", optional_to_json(r.fairness_gap_magnitude)},
                {"citation_count", r.citation_count},
                {"duplicate_citations", r.duplicate_citations},
                {"ungrounded_citations", r.ungrounded_citations},
                {"failed", r.failed},
                {"error", r.error}};
}

TrialRecord record_from_json(const json& j) {
    TrialRecord r;
    r.trial_id = j.at("trial_id").get<int>();
    r.scenario_id = j.at("scenario_id").get<int>();
    r.topic_id = j.at("topic_id").get<std::string>();
    r.ranker_name = j.at("ranker").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& doc : j.at("ranked")) {
        r.ranked.push_back({doc.at("doc_id").get<std::string>(),
                            doc.at("group").get<std::string>() == "protected"
                                ? GroupLabel::Protected
                                : GroupLabel::NonProtected});
    }
    r.exposure_share = j.at("exposure_share").get<double>();
    r.exposure_disparity = j.at("exposure_disparity").get<double>();
    r.generation_parity = optional_from_json(j.at("generation_parity"));
    r.utility = j.at("utility").get<double>();
    r.fairness_gap = optional_from_json(j.at("fairness_gap"));
    r.fairness_gap_magnitude = optional_from_json(j.at("fairness_gap_magnitude"));
    r.citation_count = j.at("citation_count").get<int>();
    r.duplicate_citations = j.at("duplicate_citations").get<int>();
    r.ungrounded_citations = j.at("ungrounded_citations").get<int>();
    r.failed = j.at("failed").get<bool>();
    r.error = j.at("error").get<std::string>();
    return r;
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw ExperimentError("cannot write: " + path.string());
        }
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

Scorer build_scorer(const ExperimentConfig& cfg) {
    if (cfg.scorer_name == "lexical") {
        return make_lexical_scorer();
    }
    if (cfg.scorer_name == "synthetic") {
        return make_synthetic_scorer(cfg.synthetic);
    }
    if (cfg.scorer_name == "external") {
        return make_external_scorer(cfg.external_scores_path);
    }
    throw ConfigError("unknown scorer \"" + cfg.scorer_name + "\"");
}

RankedList rank(const ExperimentConfig& cfg, const CandidatePool& pool, Rng& rng) {
    if (cfg.ranker_name == "standard") {
        return rank_standard(pool, cfg.k);
    }
    if (cfg.ranker_name == "stochastic") {
        return plackett_luce_sample(pool, cfg.k, cfg.ranker.alpha, rng);
    }
    if (cfg.ranker_name == "forced") {
        ForcedExposureParams params{cfg.min_per_group_for_k()};
        return rank_forced_exposure(pool, cfg.k, params);
    }
    if (cfg.ranker_name == "representative") {
        RepresentativeParams params;
        params.tau = cfg.ranker.tau;
        params.gamma = cfg.ranker.gamma;
        return rank_representative_stochastic(pool, cfg.k, params, rng);
    }
    throw ConfigError("unknown ranker \"" + cfg.ranker_name + "\"");
}

}  // namespace

ExperimentConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file: " + path.string());
    }
    ExperimentConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto comment = line.find('#');
        if (comment != std::string::npos) {
            line.resize(comment);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected key = value");
        }
        apply_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

void validate_config(const ExperimentConfig& cfg) {
    if (cfg.k < 1) {
        throw ConfigError("k must be >= 1");
    }
    if (static_cast<std::size_t>(cfg.k) > cfg.pool_size_n) {
        throw ConfigError("k must be <= pool_size_n (" + std::to_string(cfg.k) + " > " +
                          std::to_string(cfg.pool_size_n) + ")");
    }
    if (cfg.trials_per_ranker < 2) {
        throw ConfigError("trials_per_ranker must be >= 2");
    }
    if (cfg.scenarios.empty()) {
        throw ConfigError("scenarios must be non-empty");
    }
    for (int s : cfg.scenarios) {
        if (s < 1 || s > kNumScenarios) {
            throw ConfigError("scenario out of range: " + std::to_string(s));
        }
    }
    if (cfg.ranker_name != "standard" && cfg.ranker_name != "stochastic" &&
        cfg.ranker_name != "forced" && cfg.ranker_name != "representative") {
        throw ConfigError("unknown ranker \"" + cfg.ranker_name + "\"");
    }
    if (cfg.scorer_name != "lexical" && cfg.scorer_name != "synthetic" &&
        cfg.scorer_name != "external") {
        throw ConfigError("unknown scorer \"" + cfg.scorer_name + "\"");
    }
    if (cfg.scorer_name == "external" && cfg.external_scores_path.empty()) {
        throw ConfigError("external scorer requires external_scores");
    }
    if (cfg.generator_mode != "simulated" && cfg.generator_mode != "endpoint") {
        throw ConfigError("unknown generator_mode \"" + cfg.generator_mode + "\"");
    }
    if (cfg.ranker_name == "forced" && 2 * cfg.min_per_group_for_k() > cfg.k) {
        throw ConfigError("min_per_group too large: 2*min_per_group must be <= k");
    }
    if (cfg.ranker.tau < 0.0 || cfg.ranker.tau > 1.0) {
        throw ConfigError("tau must be in [0,1]");
    }
    if (cfg.ranker.alpha < 0.0) {
        throw ConfigError("alpha must be >= 0");
    }
    if (cfg.ranker.gamma <= 0.0) {
        throw ConfigError("gamma must be > 0");
    }
}

std::vector<TrialRecord> run_experiment(const ExperimentConfig& config, const Corpus& corpus) {
    validate_config(config);

    std::vector<std::string> topics = config.topics;
    if (topics.empty()) {
        topics = corpus.topic_ids();
    } else {
        for (const auto& topic : topics) {
            if (!corpus.has_topic(topic)) {
                throw ConfigError("topic filter names unknown topic \"" + topic + "\"");
            }
        }
    }
    if (topics.empty()) {
        throw ExperimentError("no topics available");
    }

    const Scorer scorer = build_scorer(config);

    struct Assignment {
        int scenario_id;
        std::string topic_id;
    };
    std::vector<Assignment> cycle;
    for (int scenario : config.scenarios) {
        for (const auto& topic : topics) {
            cycle.push_back({scenario, topic});
        }
    }

    const int total = config.trials_per_ranker;
    std::vector<TrialRecord> records(static_cast<std::size_t>(total));

    const auto run_one = [&](int i) {
        const auto& assignment = cycle[static_cast<std::size_t>(i) % cycle.size()];
        TrialRecord record;
        record.trial_id = i;
        record.scenario_id = assignment.scenario_id;
        record.topic_id = assignment.topic_id;
        record.ranker_name = config.ranker_name;
        record.seed = config.base_seed + static_cast<std::uint64_t>(i);
        try {
            Rng rng(record.seed);
            const std::string query =
                scenario_template(assignment.scenario_id);  // has {TOPIC} slot
            std::string resolved = query;
            const auto at = resolved.find("{TOPIC}");
            if (at != std::string::npos) {
                resolved.replace(at, 7, assignment.topic_id);
            }
            const auto pool =
                score_pool(resolved, corpus.all(), config.pool_size_n, scorer);
            const auto ranked = rank(config, pool, rng);
            for (const auto& entry : ranked.entries) {
                record.ranked.push_back({entry.candidate.doc->doc_id,
                                         entry.candidate.doc->group});
            }
            const auto retrieval = retrieval_metrics(ranked);
            record.exposure_share = retrieval.exposure_share_protected;
            record.exposure_disparity = retrieval.exposure_disparity;

            std::string output;
            if (config.generator_mode == "simulated") {
                output = simulate_generation(ranked, config.sim, rng);
            } else {
                PromptSpec spec{assignment.scenario_id, assignment.topic_id, &ranked};
                output = call_chat_endpoint(build_prompt(spec), config.endpoint);
            }
            const auto citations = parse_citations(output, ranked);
            const auto gen = generation_metrics(citations, ranked);
            record.generation_parity = gen.demographic_parity;
            record.utility = gen.utility;
            record.fairness_gap = gen.fairness_gap;
            record.fairness_gap_magnitude = gen.fairness_gap_magnitude;

            record.citation_count = static_cast<int>(citations.size());
            std::set<std::string> titles;
            for (const auto& citation : citations) {
                if (!titles.insert(citation.doc_title).second) {
                    ++record.duplicate_citations;
                }
                if (!citation.grounded) {
                    ++record.ungrounded_citations;
                }
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            record.failed = true;
            record.error = std::string("trial ") + std::to_string(i) + ": " + e.what();
        }
        records[static_cast<std::size_t>(i)] = std::move(record);
    };

    const unsigned workers =
        std::min<unsigned>(std::max(1U, std::thread::hardware_concurrency()),
                           static_cast<unsigned>(total));
    if (workers <= 1) {
        for (int i = 0; i < total; ++i) {
            run_one(i);
        }
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (int i = next.fetch_add(1); i < total; i = next.fetch_add(1)) {
                    run_one(i);
                }
            });
        }
        for (auto& t : pool) {
            t.join();
        }
    }

    const auto failed = std::count_if(records.begin(), records.end(),
                                      [](const TrialRecord& r) { return r.failed; });
    if (failed * 10 > total) {
        throw ExperimentError("aborting: " + std::to_string(failed) + " of " +
                              std::to_string(total) + " trials failed");
    }
    return records;
}

Aggregates aggregate(const std::vector<TrialRecord>& records) {
    std::map<std::string, std::vector<const TrialRecord*>> by_ranker;
    for (const auto& record : records) {
        if (!record.failed) {
            by_ranker[record.ranker_name].push_back(&record);
        }
    }
    Aggregates out;
    for (const auto& [ranker, group] : by_ranker) {
        std::vector<double> disparity, share, parity, util;
        std::size_t parity_excluded = 0;
        for (const TrialRecord* record : group) {
            disparity.push_back(record->exposure_disparity);
            share.push_back(record->exposure_share);
            util.push_back(record->utility);
            if (record->generation_parity) {
                parity.push_back(*record->generation_parity);
            } else {
                ++parity_excluded;
            }
        }
        auto& metrics = out[ranker];
        metrics["exposure_disparity"] = {summarize(disparity), 0};
        metrics["exposure_share"] = {summarize(share), 0};
        metrics["utility"] = {summarize(util), 0};
        if (parity.size() >= 2) {
            metrics["generation_parity"] = {summarize(parity), parity_excluded};
        } else {
            throw TooFewSamplesError("aggregate: ranker \"" + ranker +
                                     "\" has fewer than 2 defined-parity trials");
        }
    }
    return out;
}

std::vector<PairwiseResult> compare(const Aggregates& aggregates,
                                    const std::string& metric_name, double alpha_level) {
    std::vector<std::string> rankers;
    for (const auto& [ranker, metrics] : aggregates) {
        if (metrics.count(metric_name) == 0) {
            throw ExperimentError("metric \"" + metric_name + "\" missing for ranker \"" +
                                  ranker + "\"");
        }
        rankers.push_back(ranker);
    }
    if (rankers.size() < 2) {
        throw ExperimentError("compare: need at least 2 rankers");
    }
    std::vector<PairwiseResult> results;
    for (std::size_t i = 0; i < rankers.size(); ++i) {
        for (std::size_t j = i + 1; j < rankers.size(); ++j) {
            const auto& a = aggregates.at(rankers[i]).at(metric_name).stats;
            const auto& b = aggregates.at(rankers[j]).at(metric_name).stats;
            results.push_back({rankers[i], rankers[j], t_test(a, b, alpha_level)});
        }
    }
    return results;
}

std::string trials_to_jsonl(const std::vector<TrialRecord>& records) {
    std::string out;
    for (const auto& record : records) {
        out += record_to_json(record).dump();
        out += '\n';
    }
    return out;
}

void write_trials_jsonl(const std::filesystem::path& path,
                        const std::vector<TrialRecord>& records) {
    atomic_write(path, trials_to_jsonl(records));
}

std::vector<TrialRecord> read_trials_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ExperimentError("cannot open: " + path.string());
    }
    std::vector<TrialRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) {
            continue;
        }
        records.push_back(record_from_json(json::parse(line)));
    }
    return records;
}

void write_aggregate_csv(const std::filesystem::path& path, const Aggregates& aggregates) {
    std::ostringstream out;
    out.precision(10);
    out << "ranker,metric,n,mean,std,outliers,excluded\n";
    for (const auto& [ranker, metrics] : aggregates) {
        for (const auto& metric :
             {"exposure_disparity", "exposure_share", "generation_parity", "utility"}) {
            const auto it = metrics.find(metric);
            if (it == metrics.end()) {
                continue;
            }
            const auto& summary = it->second;
            out << ranker << ',' << metric << ',' << summary.stats.n << ','
                << summary.stats.mean << ',' << summary.stats.std_dev << ','
                << summary.stats.outlier_count << ',' << summary.excluded << '\n';
        }
    }
    atomic_write(path, out.str());
}

void write_ttests_csv(const std::filesystem::path& path, const std::string& metric_name,
                      const std::vector<PairwiseResult>& results) {
    std::ostringstream out;
    out.precision(10);
    out << "metric,ranker_a,ranker_b,t,df,critical_t,significant\n";
    for (const auto& result : results) {
        out << metric_name << ',' << result.ranker_a << ',' << result.ranker_b << ','
            << result.test.t_value << ',' << result.test.df << ',' << result.test.critical_t
            << ',' << (result.test.significant ? "true" : "false") << '\n';
    }
    atomic_write(path, out.str());
}

}  // namespace fairrag
