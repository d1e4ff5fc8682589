#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fairrag/corpus.hpp"

namespace fairrag {

struct RelevanceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EmptyDocumentSetError : RelevanceError {
    using RelevanceError::RelevanceError;
};

struct ScoredCandidate {
    const Document* doc = nullptr;
    double raw_score = 0.0;
    double norm_score = 0.0;  // min-max normalized within the pool, in [0,1]
};

struct CandidatePool {
    std::string query;
    // Descending raw_score, ties broken by ascending doc_id.
    std::vector<ScoredCandidate> candidates;
    std::size_t pool_size_n = 0;

    bool empty() const { return candidates.empty(); }
};

/// A scorer is a pure function of (query, document); higher is more relevant.
using Scorer = std::function<double(const std::string&, const Document&)>;

/// Token-overlap score: |query terms ∩ document terms| / |query terms|.
/// Terms are lowercased with punctuation stripped; document terms come from
/// title and text. Empty query scores 0.
double lexical_score(const std::string& query, const Document& doc);

Scorer make_lexical_scorer();

/// Per-group uniform score ranges for controlled skew experiments. Scores are
/// deterministic in (seed, query, doc_id).
struct SyntheticScorerParams {
    double protected_lo = 0.0;
    double protected_hi = 1.0;
    double nonprotected_lo = 0.0;
    double nonprotected_hi = 1.0;
    std::uint64_t seed = 0;
};

Scorer make_synthetic_scorer(const SyntheticScorerParams& params);

/// Reads precomputed raw scores from a CSV with header
/// `query_id,doc_id,score`; the scorer's query argument is the query_id.
/// Unlisted (query, doc) pairs score 0.
Scorer make_external_scorer(const std::filesystem::path& scores_csv);

/// Scores all documents, keeps the top-n by raw score (ties by ascending
/// doc_id), and min-max normalizes over the retained set. If all retained raw
/// scores are equal, every norm_score is 0.5.
CandidatePool score_pool(const std::string& query,
                         std::span<const Document* const> documents,
                         std::size_t n,
                         const Scorer& scorer);

}  // namespace fairrag
