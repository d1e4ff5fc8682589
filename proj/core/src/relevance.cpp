#include "fairrag/relevance.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include "fairrag/rng.hpp"

namespace fairrag {
namespace {

std::set<std::string> tokenize(std::string_view text) {
    std::set<std::string> terms;
    std::string cur;
    for (char raw : text) {
        const auto c = static_cast<unsigned char>(raw);
        if (std::isalnum(c)) {
            cur += static_cast<char>(std::tolower(c));
        } else if (!cur.empty()) {
            terms.insert(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) {
        terms.insert(cur);
    }
    return terms;
}

}  // namespace

double lexical_score(const std::string& query, const Document& doc) {
    const auto query_terms = tokenize(query);
    if (query_terms.empty()) {
        return 0.0;
    }
    auto doc_terms = tokenize(doc.text);
    const auto title_terms = tokenize(doc.title);
    doc_terms.insert(title_terms.begin(), title_terms.end());
    std::size_t hits = 0;
    for (const auto& term : query_terms) {
        hits += doc_terms.count(term);
    }
    return static_cast<double>(hits) / static_cast<double>(query_terms.size());
}

Scorer make_lexical_scorer() {
    return [](const std::string& query, const Document& doc) {
        return lexical_score(query, doc);
    };
}

Scorer make_synthetic_scorer(const SyntheticScorerParams& params) {
    return [params](const std::string& query, const Document& doc) {
        // Deterministic per (seed, query, doc): hash into a private stream.
        std::uint64_t h = fnv1a64(query, 14695981039346656037ULL ^ params.seed);
        h = fnv1a64(doc.doc_id, h);
        Rng rng(h);
        rng.discard(3);  // decorrelate nearby hashes
        const double u = uniform01(rng);
        const bool prot = doc.group == GroupLabel::Protected;
        const double lo = prot ? params.protected_lo : params.nonprotected_lo;
        const double hi = prot ? params.protected_hi : params.nonprotected_hi;
        return lo + u * (hi - lo);
    };
}

Scorer make_external_scorer(const std::filesystem::path& scores_csv) {
    std::ifstream in(scores_csv);
    if (!in) {
        throw RelevanceError("cannot open external scores file: " + scores_csv.string());
    }
    auto table = std::make_shared<std::map<std::pair<std::string, std::string>, double>>();
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::istringstream ls(line);
        std::string query_id, doc_id, score_str;
        if (!std::getline(ls, query_id, ',') || !std::getline(ls, doc_id, ',') ||
            !std::getline(ls, score_str)) {
            throw RelevanceError("external scores line " + std::to_string(line_no) +
                                 ": expected query_id,doc_id,score");
        }
        if (line_no == 1 && query_id == "query_id") {
            continue;
        }
        try {
            (*table)[{query_id, doc_id}] = std::stod(score_str);
        } catch (const std::exception&) {
            throw RelevanceError("external scores line " + std::to_string(line_no) +
                                 ": bad score \"" + score_str + "\"");
        }
    }
    return [table](const std::string& query, const Document& doc) {
        const auto it = table->find({query, doc.doc_id});
        return it == table->end() ? 0.0 : it->second;
    };
}

CandidatePool score_pool(const std::string& query, std::span<const Document* const> documents,
                         std::size_t n, const Scorer& scorer) {
    if (documents.empty()) {
        throw EmptyDocumentSetError("score_pool: no documents");
    }
    if (n < 1) {
        throw RelevanceError("score_pool: n must be >= 1");
    }
    CandidatePool pool;
    pool.query = query;
    pool.pool_size_n = n;
    pool.candidates.reserve(documents.size());
    for (const Document* doc : documents) {
        pool.candidates.push_back({doc, scorer(query, *doc), 0.0});
    }
    std::sort(pool.candidates.begin(), pool.candidates.end(),
              [](const ScoredCandidate& a, const ScoredCandidate& b) {
                  if (a.raw_score != b.raw_score) {
                      return a.raw_score > b.raw_score;
                  }
                  return a.doc->doc_id < b.doc->doc_id;
              });
    if (pool.candidates.size() > n) {
        pool.candidates.resize(n);
    }

    const double max = pool.candidates.front().raw_score;
    const double min = pool.candidates.back().raw_score;
    for (auto& cand : pool.candidates) {
        cand.norm_score = (max == min) ? 0.5 : (cand.raw_score - min) / (max - min);
    }
    return pool;
}

}  // namespace fairrag
