#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fairrag/ranking.hpp"
#include "fairrag/rng.hpp"

namespace fairrag {

struct GenerationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EmptyContextError : GenerationError {
    using GenerationError::GenerationError;
};

inline constexpr int kNumScenarios = 4;
inline constexpr const char* kPromptTemplateVersion = "v1";

/// The fixed role line and the four scenario question templates (with a
/// {TOPIC} slot). Also stored as plain-text resources under
/// core/resources/prompts/.
const std::string& role_line();
const std::string& scenario_template(int scenario_id);  // 1..4

struct PromptSpec {
    int scenario_id = 1;
    std::string topic;
    const RankedList* context = nullptr;
};

/// Renders the full prompt: role line, context block ("Title:"/"Text:" per
/// document in rank order), the scenario task with the topic substituted, the
/// output format line, and the three citation rules.
std::string build_prompt(const PromptSpec& spec);

struct Citation {
    std::string person_name;
    std::string doc_title;
    bool grounded = false;
    std::optional<GroupLabel> group;  // set iff grounded
};

/// Extracts every line of the form "<name> (DocTitle: <title>)", tolerating
/// leading "-", "*", or "1." style bullets. Grounding is an exact title match
/// after trimming surrounding whitespace. Unmatched lines are ignored.
std::vector<Citation> parse_citations(const std::string& model_output,
                                      const RankedList& context);

struct GeneratorSimParams {
    int num_citations = 5;
    double position_bias_beta = 1.0;  // citation prob ∝ exposure_weight(pos)^beta
    double group_bias_b = 0.0;        // >= -1; multiplies protected docs by (1+b)
    double hallucination_prob_h = 0.0;
};

/// LLM-free generator: samples min(num_citations, |context|) distinct context
/// documents without replacement with probability proportional to
/// exposure_weight(pos)^beta * (1 + b*[protected]), independently replacing
/// each emitted citation with a fabricated title with probability h, and
/// renders the bullet output format.
std::string simulate_generation(const RankedList& context,
                                const GeneratorSimParams& params, Rng& rng);

}  // namespace fairrag
