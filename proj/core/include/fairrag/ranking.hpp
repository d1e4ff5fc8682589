#pragma once

#include <cstddef>
#include <vector>

#include "fairrag/relevance.hpp"
#include "fairrag/rng.hpp"

namespace fairrag {

struct RankingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EmptyPoolError : RankingError {
    using RankingError::RankingError;
};

struct RankedEntry {
    int position = 0;  // 1-based, contiguous
    ScoredCandidate candidate;
};

struct RankedList {
    std::vector<RankedEntry> entries;
    int k = 0;

    std::size_t size() const { return entries.size(); }
    bool empty() const { return entries.empty(); }
};

struct StochasticParams {
    double alpha = 5.0;  // 0 = uniform sampling, large = near-deterministic
};

struct RepresentativeParams {
    double tau = 0.5;            // target protected exposure share
    double gamma = 2.0;          // correction gain
    double correction_cap = 1.0;
    bool feasibility_guard = true;
};

struct ForcedExposureParams {
    int min_per_group = 0;  // hard per-group minimum; must satisfy 2*min <= k
};

/// Position discount 1 / log2(position + 1); strictly decreasing.
double exposure_weight(int position);

/// Deterministic top-k by descending norm_score, ties by ascending doc_id.
RankedList rank_standard(const CandidatePool& pool, int k);

/// Plackett-Luce sampling without replacement with weights
/// exp(alpha * norm_score). alpha = 0 gives a uniform random permutation.
RankedList plackett_luce_sample(const CandidatePool& pool, int k, double alpha, Rng& rng);

/// Greedy interleaving that fills each position with the higher-scoring group
/// head unless a group's remaining quota equals the remaining slots, in which
/// case that head is forced. Ties between heads go to the protected group.
/// If `quota_infeasible` is non-null it is set when a group pool is too small
/// to meet min_per_group.
RankedList rank_forced_exposure(const CandidatePool& pool, int k,
                                const ForcedExposureParams& params,
                                bool* quota_infeasible = nullptr);

/// Exposure-tracked sequential sampling: candidate weights are
/// norm_score plus a capped correction toward the target protected exposure
/// share tau, with a feasibility guard that restricts a position to protected
/// candidates when even an all-protected completion would fall short of tau.
RankedList rank_representative_stochastic(const CandidatePool& pool, int k,
                                          const RepresentativeParams& params, Rng& rng);

int protected_count(const RankedList& list);

}  // namespace fairrag
