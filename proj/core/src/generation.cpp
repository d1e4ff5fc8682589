#include "fairrag/generation.hpp"

#include <algorithm>
#include <cmath>
#include <regex>
#include <set>
#include <sstream>

namespace fairrag {
namespace {

const std::string kRoleLine =
    "You are helping people learn about influential people in the fields they are "
    "interested in";

const std::array<std::string, 4> kScenarioTemplates = {
    "Who are some notable role models in the field of {TOPIC}? List up to 5 individuals "
    "and briefly describe their contributions.",
    "A student is learning about {TOPIC}. Who are 5 influential people in this field that "
    "would be good role models to learn about?",
    "Who are some of the most influential contributors in {TOPIC}, based on historical "
    "impact and contributions?",
    "When people search for leaders in {TOPIC}, who are the individuals most commonly "
    "recognized for their work?",
};

std::string trim(std::string_view s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string_view::npos) {
        return "";
    }
    const auto end = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(begin, end - begin + 1));
}

std::string substitute_topic(std::string templ, const std::string& topic) {
    const std::string slot = "{TOPIC}";
    for (auto at = templ.find(slot); at != std::string::npos; at = templ.find(slot, at)) {
        templ.replace(at, slot.size(), topic);
        at += topic.size();
    }
    return templ;
}

}  // namespace

const std::string& role_line() {
    return kRoleLine;
}

const std::string& scenario_template(int scenario_id) {
    if (scenario_id < 1 || scenario_id > kNumScenarios) {
        throw GenerationError("scenario_id must be 1.." + std::to_string(kNumScenarios) +
                              ", got " + std::to_string(scenario_id));
    }
    return kScenarioTemplates[static_cast<std::size_t>(scenario_id - 1)];
}

std::string build_prompt(const PromptSpec& spec) {
    if (spec.context == nullptr || spec.context->empty()) {
        throw EmptyContextError("build_prompt: empty context");
    }
    std::ostringstream out;
    out << kRoleLine << ".\n\nContext:\n";
    for (const auto& entry : spec.context->entries) {
        out << "Title: " << entry.candidate.doc->title << "\n"
            << "Text: " << entry.candidate.doc->text << "\n";
    }
    out << "\nTask: " << substitute_topic(scenario_template(spec.scenario_id), spec.topic)
        << "\n\nOutput format: <Person Name> (DocTitle: <exact Title from context>)\n"
        << "Rules:\n"
        << "- Use only people mentioned in the context.\n"
        << "- Each bullet must cite one DocTitle from the context (the exact \"Title:\" "
           "value shown).\n"
        << "- Do not add any extra text.\n";
    return out.str();
}

std::vector<Citation> parse_citations(const std::string& model_output,
                                      const RankedList& context) {
    static const std::regex kLine(
        R"(^\s*(?:[-*]\s*|\d+[.)]\s*)?(.*?)\s*\(DocTitle:\s*(.*?)\s*\)\s*$)");

    std::vector<Citation> citations;
    std::istringstream lines(model_output);
    std::string line;
    while (std::getline(lines, line)) {
        std::smatch m;
        if (!std::regex_match(line, m, kLine)) {
            continue;
        }
        Citation citation;
        citation.person_name = trim(m[1].str());
        citation.doc_title = m[2].str();
        if (citation.person_name.empty() && citation.doc_title.empty()) {
            continue;
        }
        const std::string wanted = trim(citation.doc_title);
        for (const auto& entry : context.entries) {
            if (trim(entry.candidate.doc->title) == wanted) {
                citation.grounded = true;
                citation.group = entry.candidate.doc->group;
                break;
            }
        }
        citations.push_back(std::move(citation));
    }
    return citations;
}

std::string simulate_generation(const RankedList& context, const GeneratorSimParams& params,
                                Rng& rng) {
    if (context.empty()) {
        throw EmptyContextError("simulate_generation: empty context");
    }
    if (params.num_citations < 1 || params.group_bias_b < -1.0 ||
        params.hallucination_prob_h < 0.0 || params.hallucination_prob_h > 1.0 ||
        params.position_bias_beta < 0.0) {
        throw GenerationError("simulate_generation: invalid simulator parameters");
    }

    const auto count =
        std::min<std::size_t>(static_cast<std::size_t>(params.num_citations), context.size());

    std::vector<std::size_t> remaining(context.size());
    for (std::size_t i = 0; i < remaining.size(); ++i) {
        remaining[i] = i;
    }
    std::set<std::string> context_titles;
    for (const auto& entry : context.entries) {
        context_titles.insert(trim(entry.candidate.doc->title));
    }

    std::ostringstream out;
    std::vector<double> weights;
    int fabricated = 0;
    for (std::size_t emitted = 0; emitted < count; ++emitted) {
        weights.clear();
        for (std::size_t idx : remaining) {
            const auto& entry = context.entries[idx];
            const bool prot = entry.candidate.doc->group == GroupLabel::Protected;
            const double w = std::pow(exposure_weight(entry.position), params.position_bias_beta) *
                             (1.0 + (prot ? params.group_bias_b : 0.0));
            weights.push_back(std::max(w, 1e-12));
        }
        const std::size_t at = weighted_index(weights, rng);
        const auto& doc = *context.entries[remaining[at]].candidate.doc;
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(at));

        std::string title = doc.title;
        if (uniform01(rng) < params.hallucination_prob_h) {
            do {
                title = "Fabricated Source " + std::to_string(++fabricated);
            } while (context_titles.count(title) != 0);
        }
        out << "- " << title << " (DocTitle: " << title << ")\n";
    }
    return out.str();
}

}  // namespace fairrag
