#include <benchmark/benchmark.h>

#include <vector>

#include "fairrag/metrics.hpp"
#include "fairrag/ranking.hpp"
#include "fairrag/relevance.hpp"
#include "fairrag/stats.hpp"

using namespace fairrag;

namespace {

std::vector<Document> make_docs(std::size_t count) {
    std::vector<Document> docs;
    docs.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Document doc;
        doc.doc_id = "D" + std::to_string(1000 + i);
        doc.topic_id = "T1";
        doc.topic_number = 1;
        doc.group = i % 2 == 0 ? GroupLabel::Protected : GroupLabel::NonProtected;
        doc.title = "Person " + std::to_string(i);
        doc.text = "a short biography excerpt number " + std::to_string(i);
        docs.push_back(std::move(doc));
    }
    return docs;
}

CandidatePool make_pool(const std::vector<Document>& docs, std::size_t n) {
    std::vector<const Document*> ptrs;
    for (const auto& doc : docs) {
        ptrs.push_back(&doc);
    }
    SyntheticScorerParams params;
    params.seed = 7;
    return score_pool("bench", ptrs, n, make_synthetic_scorer(params));
}

void BM_ScorePool(benchmark::State& state) {
    const auto docs = make_docs(static_cast<std::size_t>(state.range(0)));
    std::vector<const Document*> ptrs;
    for (const auto& doc : docs) {
        ptrs.push_back(&doc);
    }
    const auto scorer = make_synthetic_scorer({});
    for (auto _ : state) {
        benchmark::DoNotOptimize(score_pool("bench", ptrs, 50, scorer));
    }
}
BENCHMARK(BM_ScorePool)->Arg(200)->Arg(2000);

void BM_PlackettLuce(benchmark::State& state) {
    const auto docs = make_docs(50);
    const auto pool = make_pool(docs, 50);
    Rng rng(1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(plackett_luce_sample(pool, 5, 5.0, rng));
    }
}
BENCHMARK(BM_PlackettLuce);

void BM_RepresentativeStochastic(benchmark::State& state) {
    const auto docs = make_docs(50);
    const auto pool = make_pool(docs, 50);
    Rng rng(1);
    const RepresentativeParams params;
    for (auto _ : state) {
        benchmark::DoNotOptimize(rank_representative_stochastic(pool, 5, params, rng));
    }
}
BENCHMARK(BM_RepresentativeStochastic);

void BM_ForcedExposure(benchmark::State& state) {
    const auto docs = make_docs(50);
    const auto pool = make_pool(docs, 50);
    const ForcedExposureParams params{2};
    for (auto _ : state) {
        benchmark::DoNotOptimize(rank_forced_exposure(pool, 5, params));
    }
}
BENCHMARK(BM_ForcedExposure);

void BM_CriticalT(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(critical_t(158, 0.01));
    }
}
BENCHMARK(BM_CriticalT);

}  // namespace

BENCHMARK_MAIN();
