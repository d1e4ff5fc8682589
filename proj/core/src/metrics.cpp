#include "fairrag/metrics.hpp"

#include <cmath>

namespace fairrag {

double exposure_share(const RankedList& list) {
    if (list.empty()) {
        throw EmptyListError("exposure_share: empty ranked list");
    }
    double total = 0.0;
    double prot = 0.0;
    for (const auto& entry : list.entries) {
        const double w = exposure_weight(entry.position);
        total += w;
        if (entry.candidate.doc->group == GroupLabel::Protected) {
            prot += w;
        }
    }
    return prot / total;
}

double exposure_disparity(double share) {
    return std::abs(share - 0.5);
}

std::optional<double> generation_parity(const std::vector<Citation>& citations) {
    std::size_t grounded = 0;
    std::size_t grounded_protected = 0;
    for (const auto& citation : citations) {
        if (citation.grounded) {
            ++grounded;
            if (citation.group == GroupLabel::Protected) {
                ++grounded_protected;
            }
        }
    }
    if (grounded == 0) {
        return std::nullopt;
    }
    return static_cast<double>(grounded_protected) / static_cast<double>(grounded);
}

double utility(const std::vector<Citation>& citations, const RankedList& /*context*/) {
    // A citation is grounded exactly when its title matches a context title
    // after trimming, so groundedness is the utility numerator.
    if (citations.empty()) {
        return 0.0;
    }
    std::size_t grounded = 0;
    for (const auto& citation : citations) {
        grounded += citation.grounded ? 1 : 0;
    }
    return static_cast<double>(grounded) / static_cast<double>(citations.size());
}

double fairness_gap(double gen_parity, double exposure_share) {
    return gen_parity - exposure_share;
}

double fairness_gap_magnitude(double gen_parity, double exposure_share) {
    return std::abs(gen_parity - 0.5) - std::abs(exposure_share - 0.5);
}

RetrievalMetrics retrieval_metrics(const RankedList& list) {
    RetrievalMetrics m;
    m.exposure_share_protected = exposure_share(list);
    m.exposure_disparity = exposure_disparity(m.exposure_share_protected);
    return m;
}

GenerationMetrics generation_metrics(const std::vector<Citation>& citations,
                                     const RankedList& context) {
    GenerationMetrics m;
    m.utility = utility(citations, context);
    m.demographic_parity = generation_parity(citations);
    if (m.demographic_parity) {
        const double share = exposure_share(context);
        m.fairness_gap = fairness_gap(*m.demographic_parity, share);
        m.fairness_gap_magnitude = fairness_gap_magnitude(*m.demographic_parity, share);
    }
    return m;
}

}  // namespace fairrag
