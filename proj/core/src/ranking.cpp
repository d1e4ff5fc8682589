#include "fairrag/ranking.hpp"

#include <algorithm>
#include <cmath>

namespace fairrag {
namespace {

constexpr double kWeightFloor = 1e-9;

void require_non_empty(const CandidatePool& pool, const char* op) {
    if (pool.empty()) {
        throw EmptyPoolError(std::string(op) + ": empty candidate pool");
    }
}

void require_k(int k, const char* op) {
    if (k < 1) {
        throw RankingError(std::string(op) + ": k must be >= 1");
    }
}

RankedList make_list(std::vector<ScoredCandidate> picks, int k) {
    RankedList list;
    list.k = k;
    list.entries.reserve(picks.size());
    int pos = 1;
    for (auto& cand : picks) {
        list.entries.push_back({pos++, cand});
    }
    return list;
}

// Sequential weighted sampling without replacement over `remaining`,
// removing each pick. Shared by the stochastic rankers.
std::vector<ScoredCandidate> sample_sequential(std::vector<ScoredCandidate> remaining,
                                               std::size_t count,
                                               const std::function<double(const ScoredCandidate&)>& weight_of,
                                               Rng& rng) {
    std::vector<ScoredCandidate> picks;
    picks.reserve(count);
    std::vector<double> weights;
    while (picks.size() < count && !remaining.empty()) {
        weights.clear();
        for (const auto& cand : remaining) {
            weights.push_back(std::max(weight_of(cand), kWeightFloor));
        }
        const std::size_t idx = weighted_index(weights, rng);
        picks.push_back(remaining[idx]);
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(idx));
    }
    return picks;
}

}  // namespace

double exposure_weight(int position) {
    return 1.0 / std::log2(static_cast<double>(position) + 1.0);
}

RankedList rank_standard(const CandidatePool& pool, int k) {
    require_non_empty(pool, "rank_standard");
    require_k(k, "rank_standard");
    const auto count = std::min<std::size_t>(static_cast<std::size_t>(k), pool.candidates.size());
    // Pool order is already descending norm_score with doc_id tie-break.
    std::vector<ScoredCandidate> picks(pool.candidates.begin(),
                                       pool.candidates.begin() + static_cast<std::ptrdiff_t>(count));
    return make_list(std::move(picks), k);
}

RankedList plackett_luce_sample(const CandidatePool& pool, int k, double alpha, Rng& rng) {
    require_non_empty(pool, "plackett_luce_sample");
    require_k(k, "plackett_luce_sample");
    if (alpha < 0.0) {
        throw RankingError("plackett_luce_sample: alpha must be >= 0");
    }
    const auto count = std::min<std::size_t>(static_cast<std::size_t>(k), pool.candidates.size());
    auto picks = sample_sequential(
        pool.candidates, count,
        [alpha](const ScoredCandidate& c) { return std::exp(alpha * c.norm_score); }, rng);
    return make_list(std::move(picks), k);
}

RankedList rank_forced_exposure(const CandidatePool& pool, int k,
                                const ForcedExposureParams& params, bool* quota_infeasible) {
    require_non_empty(pool, "rank_forced_exposure");
    require_k(k, "rank_forced_exposure");
    if (params.min_per_group < 0 || 2 * params.min_per_group > k) {
        throw RankingError("rank_forced_exposure: need 0 <= 2*min_per_group <= k");
    }

    std::vector<ScoredCandidate> heads[2];  // 0 = protected, 1 = non-protected
    for (const auto& cand : pool.candidates) {
        heads[cand.doc->group == GroupLabel::NonProtected ? 1 : 0].push_back(cand);
    }
    const auto count = std::min<std::size_t>(static_cast<std::size_t>(k), pool.candidates.size());

    // Quotas shrink to what each group can actually supply.
    int quota[2];
    for (int g = 0; g < 2; ++g) {
        quota[g] = std::min<int>(params.min_per_group, static_cast<int>(heads[g].size()));
    }
    if (quota_infeasible != nullptr) {
        *quota_infeasible = quota[0] < params.min_per_group || quota[1] < params.min_per_group;
    }

    std::vector<ScoredCandidate> picks;
    picks.reserve(count);
    std::size_t next[2] = {0, 0};
    while (picks.size() < count) {
        const int remaining = static_cast<int>(count - picks.size());
        const bool have[2] = {next[0] < heads[0].size(), next[1] < heads[1].size()};
        int chosen;
        if (have[0] && quota[0] >= remaining) {
            chosen = 0;
        } else if (have[1] && quota[1] >= remaining) {
            chosen = 1;
        } else if (!have[0]) {
            chosen = 1;
        } else if (!have[1]) {
            chosen = 0;
        } else {
            // Score competition; equal heads go to the protected group.
            chosen = heads[1][next[1]].norm_score > heads[0][next[0]].norm_score ? 1 : 0;
        }
        picks.push_back(heads[chosen][next[chosen]++]);
        quota[chosen] = std::max(0, quota[chosen] - 1);
    }
    return make_list(std::move(picks), k);
}

RankedList rank_representative_stochastic(const CandidatePool& pool, int k,
                                          const RepresentativeParams& params, Rng& rng) {
    require_non_empty(pool, "rank_representative_stochastic");
    require_k(k, "rank_representative_stochastic");
    const auto count = std::min<std::size_t>(static_cast<std::size_t>(k), pool.candidates.size());

    double total_exposure = 0.0;
    for (std::size_t pos = 1; pos <= count; ++pos) {
        total_exposure += exposure_weight(static_cast<int>(pos));
    }

    std::vector<ScoredCandidate> remaining = pool.candidates;
    std::vector<ScoredCandidate> picks;
    picks.reserve(count);
    double filled_exposure = 0.0;
    double protected_exposure = 0.0;
    double tail_exposure = total_exposure;  // exposure mass of unfilled positions
    std::vector<double> weights;

    while (picks.size() < count && !remaining.empty()) {
        const double share = filled_exposure > 0.0 ? protected_exposure / filled_exposure : 0.0;
        const double deficit = picks.empty() ? 0.0 : params.tau - share;

        // Feasibility guard: if even an all-protected completion cannot reach
        // tau, this position must go to a protected candidate (when any are
        // left).
        bool restrict_to_protected = false;
        if (params.feasibility_guard) {
            const double best_final_share = (protected_exposure + tail_exposure) / total_exposure;
            if (best_final_share < params.tau) {
                restrict_to_protected =
                    std::any_of(remaining.begin(), remaining.end(), [](const ScoredCandidate& c) {
                        return c.doc->group == GroupLabel::Protected;
                    });
            }
        }

        weights.clear();
        std::vector<std::size_t> eligible;
        for (std::size_t i = 0; i < remaining.size(); ++i) {
            const bool prot = remaining[i].doc->group == GroupLabel::Protected;
            if (restrict_to_protected && !prot) {
                continue;
            }
            double correction = 0.0;
            if (deficit > 0.0 && prot) {
                correction = std::clamp(params.gamma * deficit, 0.0, params.correction_cap);
            } else if (deficit < 0.0 && !prot) {
                correction = std::clamp(params.gamma * -deficit, 0.0, params.correction_cap);
            }
            eligible.push_back(i);
            weights.push_back(std::max(remaining[i].norm_score + correction, kWeightFloor));
        }

        const std::size_t pick = eligible[weighted_index(weights, rng)];
        const int position = static_cast<int>(picks.size()) + 1;
        const double ew = exposure_weight(position);
        filled_exposure += ew;
        tail_exposure -= ew;
        if (remaining[pick].doc->group == GroupLabel::Protected) {
            protected_exposure += ew;
        }
        picks.push_back(remaining[pick]);
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    return make_list(std::move(picks), k);
}

int protected_count(const RankedList& list) {
    return static_cast<int>(
        std::count_if(list.entries.begin(), list.entries.end(), [](const RankedEntry& e) {
            return e.candidate.doc->group == GroupLabel::Protected;
        }));
}

}  // namespace fairrag
