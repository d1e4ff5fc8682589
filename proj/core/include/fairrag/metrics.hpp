#pragma once

#include <optional>
#include <vector>

#include "fairrag/generation.hpp"
#include "fairrag/ranking.hpp"

namespace fairrag {

struct MetricsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EmptyListError : MetricsError {
    using MetricsError::MetricsError;
};

struct RetrievalMetrics {
    double exposure_share_protected = 0.0;
    double exposure_disparity = 0.0;  // |share - 0.5|
};

struct GenerationMetrics {
    std::optional<double> demographic_parity;  // undefined iff zero grounded citations
    double utility = 0.0;
    std::optional<double> fairness_gap;
    std::optional<double> fairness_gap_magnitude;
};

/// Fraction of the list's total position-discounted exposure held by
/// protected-group entries.
double exposure_share(const RankedList& list);

/// |share - 0.5|.
double exposure_disparity(double share);

/// Protected fraction of grounded citations; nullopt when none are grounded.
std::optional<double> generation_parity(const std::vector<Citation>& citations);

/// Fraction of parsed citations whose title exactly matches (after trimming)
/// a context document title; 0 when nothing parsed.
double utility(const std::vector<Citation>& citations, const RankedList& context);

/// Signed difference gen_parity - exposure_share: positive means generation
/// over-represents the protected group relative to its retrieval exposure.
double fairness_gap(double gen_parity, double exposure_share);

/// |gen_parity - 0.5| - |exposure_share - 0.5|: positive means generation
/// worsens bias severity.
double fairness_gap_magnitude(double gen_parity, double exposure_share);

RetrievalMetrics retrieval_metrics(const RankedList& list);
GenerationMetrics generation_metrics(const std::vector<Citation>& citations,
                                     const RankedList& context);

}  // namespace fairrag
