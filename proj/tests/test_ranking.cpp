#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "fairrag/metrics.hpp"
#include "fairrag/ranking.hpp"
#include "pl_oracle.hpp"
#include "test_util.hpp"

using namespace fairrag;
using namespace fairrag::testutil;

namespace {

std::vector<std::string> ids_of(const RankedList& list) {
    std::vector<std::string> ids;
    for (const auto& entry : list.entries) {
        ids.push_back(entry.candidate.doc->doc_id);
    }
    return ids;
}

}  // namespace

TEST_SUITE("ranking") {

TEST_CASE("exposure weight is 1/log2(position+1)") {
    CHECK(exposure_weight(1) == doctest::Approx(1.0));
    CHECK(exposure_weight(3) == doctest::Approx(0.5));
    CHECK(exposure_weight(7) == doctest::Approx(1.0 / 3.0));
    for (int pos = 1; pos < 50; ++pos) {
        CHECK(exposure_weight(pos) > exposure_weight(pos + 1));
    }
}

TEST_CASE("standard ranking takes top-k with doc_id tie-break") {
    const auto fixture = make_pool({{0.9, GroupLabel::Protected},
                                    {0.7, GroupLabel::NonProtected},
                                    {0.5, GroupLabel::Protected}});
    const auto list = rank_standard(fixture.pool, 2);
    CHECK(ids_of(list) == std::vector<std::string>{"D00", "D01"});
    CHECK(list.entries[0].position == 1);
    CHECK(list.entries[1].position == 2);

    const auto tie = make_pool({{0.9, GroupLabel::Protected}, {0.9, GroupLabel::Protected}});
    CHECK(ids_of(rank_standard(tie.pool, 2)) == std::vector<std::string>{"D00", "D01"});

    const auto small = make_pool({{0.9, GroupLabel::Protected},
                                  {0.7, GroupLabel::Protected},
                                  {0.5, GroupLabel::Protected}});
    const auto padded = rank_standard(small.pool, 5);
    CHECK(padded.size() == 3);
    CHECK(padded.entries.back().position == 3);
}

TEST_CASE("empty pool is rejected by every ranker") {
    CandidatePool empty;
    Rng rng(1);
    CHECK_THROWS_AS(rank_standard(empty, 5), EmptyPoolError);
    CHECK_THROWS_AS(plackett_luce_sample(empty, 5, 1.0, rng), EmptyPoolError);
    CHECK_THROWS_AS(rank_forced_exposure(empty, 5, {2}), EmptyPoolError);
    CHECK_THROWS_AS(rank_representative_stochastic(empty, 5, {}, rng), EmptyPoolError);
}

TEST_CASE("PL with alpha=0 is uniform over permutations") {
    const auto fixture = make_pool({{0.9, GroupLabel::Protected},
                                    {0.5, GroupLabel::NonProtected},
                                    {0.1, GroupLabel::Protected}});
    Rng rng(7);
    std::map<std::vector<std::string>, int> counts;
    const int draws = 30000;
    for (int i = 0; i < draws; ++i) {
        counts[ids_of(plackett_luce_sample(fixture.pool, 3, 0.0, rng))]++;
    }
    CHECK(counts.size() == 6);
    for (const auto& [perm, count] : counts) {
        CHECK(std::abs(static_cast<double>(count) / draws - 1.0 / 6.0) < 0.02);
    }
}

TEST_CASE("PL concentrates on the top item at high alpha") {
    const auto fixture =
        make_pool({{1.0, GroupLabel::Protected}, {0.0, GroupLabel::NonProtected}});
    Rng rng(8);
    for (int i = 0; i < 2000; ++i) {
        CHECK(ids_of(plackett_luce_sample(fixture.pool, 2, 50.0, rng)) ==
              std::vector<std::string>{"D00", "D01"});
    }
}

TEST_CASE("PL matches enumeration on a 3-doc pool") {
    const auto fixture = make_pool({{1.0, GroupLabel::Protected},
                                    {0.5, GroupLabel::NonProtected},
                                    {0.0, GroupLabel::Protected}});
    const auto exact = enumerate_pl(fixture.pool, 2, 1.0);
    Rng rng(9);
    std::map<std::vector<std::string>, int> counts;
    const int draws = 40000;
    for (int i = 0; i < draws; ++i) {
        counts[ids_of(plackett_luce_sample(fixture.pool, 2, 1.0, rng))]++;
    }
    double total_prob = 0.0;
    for (const auto& [perm, prob] : exact) {
        total_prob += prob;
        CHECK(std::abs(static_cast<double>(counts[perm]) / draws - prob) < 0.02);
    }
    CHECK(total_prob == doctest::Approx(1.0));
}

TEST_CASE("PL is reproducible for a fixed seed") {
    Rng pool_rng(10);
    const auto fixture = random_group_pool(10, 0.0, 1.0, 0.0, 1.0, pool_rng);
    Rng a(123), b(123);
    for (int i = 0; i < 20; ++i) {
        CHECK(ids_of(plackett_luce_sample(fixture.pool, 5, 2.0, a)) ==
              ids_of(plackett_luce_sample(fixture.pool, 5, 2.0, b)));
    }
}

TEST_CASE("forced exposure reproduces the hand-traced interleaving") {
    const auto fixture = make_pool({{0.9, GroupLabel::Protected},
                                    {0.4, GroupLabel::Protected},
                                    {0.8, GroupLabel::NonProtected},
                                    {0.7, GroupLabel::NonProtected},
                                    {0.6, GroupLabel::NonProtected}});
    bool infeasible = true;
    const auto list = rank_forced_exposure(fixture.pool, 4, {2}, &infeasible);
    CHECK_FALSE(infeasible);
    // F0.9, M0.8, M0.7, then the last slot is forced female to meet the quota.
    REQUIRE(list.size() == 4);
    CHECK(list.entries[0].candidate.raw_score == doctest::Approx(0.9));
    CHECK(list.entries[0].candidate.doc->group == GroupLabel::Protected);
    CHECK(list.entries[1].candidate.raw_score == doctest::Approx(0.8));
    CHECK(list.entries[2].candidate.raw_score == doctest::Approx(0.7));
    CHECK(list.entries[3].candidate.raw_score == doctest::Approx(0.4));
    CHECK(list.entries[3].candidate.doc->group == GroupLabel::Protected);
}

TEST_CASE("forced exposure reports an unmeetable quota") {
    const auto fixture = make_pool(
        {{0.8, GroupLabel::NonProtected}, {0.7, GroupLabel::NonProtected}});
    bool infeasible = false;
    const auto list = rank_forced_exposure(fixture.pool, 2, {1}, &infeasible);
    CHECK(infeasible);
    CHECK(ids_of(list) == std::vector<std::string>{"D00", "D01"});
}

TEST_CASE("forced exposure keeps both groups when feasible") {
    const auto fixture =
        make_pool({{0.9, GroupLabel::Protected}, {0.1, GroupLabel::NonProtected}});
    const auto list = rank_forced_exposure(fixture.pool, 2, {1});
    CHECK(list.entries[0].candidate.doc->group == GroupLabel::Protected);
    CHECK(list.entries[1].candidate.doc->group == GroupLabel::NonProtected);
}

TEST_CASE("forced exposure quota holds on random feasible pools") {
    Rng rng(20);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto per_group = 2 + static_cast<std::size_t>(uniform01(rng) * 6);
        const auto fixture = random_group_pool(per_group, 0.0, 1.0, 0.0, 1.0, rng);
        const auto list = rank_forced_exposure(fixture.pool, 5, {2});
        CHECK(protected_count(list) >= 2);
        CHECK(static_cast<int>(list.size()) - protected_count(list) >= 2);
    }
}

TEST_CASE("forced exposure head tie goes to the protected group") {
    const auto fixture =
        make_pool({{0.5, GroupLabel::NonProtected}, {0.5, GroupLabel::Protected}});
    const auto list = rank_forced_exposure(fixture.pool, 2, {0});
    CHECK(list.entries[0].candidate.doc->group == GroupLabel::Protected);
}

TEST_CASE("representative guard restricts an infeasible tail to protected docs") {
    // With k=2 and a non-protected doc at position 1, even a protected doc at
    // position 2 yields share 1/log2(3) / (1 + 1/log2(3)) ~= 0.3869 < 0.5,
    // so position 2 must be protected whenever position 1 is not.
    const auto fixture = make_pool({{1.0, GroupLabel::NonProtected},
                                    {0.8, GroupLabel::NonProtected},
                                    {0.2, GroupLabel::Protected},
                                    {0.0, GroupLabel::Protected}});
    RepresentativeParams params;
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        Rng rng(seed);
        const auto list = rank_representative_stochastic(fixture.pool, 2, params, rng);
        REQUIRE(list.size() == 2);
        if (list.entries[0].candidate.doc->group == GroupLabel::NonProtected) {
            CHECK(list.entries[1].candidate.doc->group == GroupLabel::Protected);
        }
    }
}

TEST_CASE("correction cap binds: large gains act identically") {
    // After the first pick the deficit is +-0.5, so any gamma >= 2 hits the
    // cap and gives the same sampling weights; identical seeds must agree on
    // the first two positions.
    const auto fixture = make_pool({{0.9, GroupLabel::NonProtected},
                                    {0.7, GroupLabel::NonProtected},
                                    {0.6, GroupLabel::Protected},
                                    {0.3, GroupLabel::Protected},
                                    {0.1, GroupLabel::NonProtected}});
    RepresentativeParams g3;
    g3.gamma = 3.0;
    RepresentativeParams g100;
    g100.gamma = 100.0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        Rng a(seed), b(seed);
        const auto la = rank_representative_stochastic(fixture.pool, 3, g3, a);
        const auto lb = rank_representative_stochastic(fixture.pool, 3, g100, b);
        CHECK(la.entries[0].candidate.doc->doc_id == lb.entries[0].candidate.doc->doc_id);
        CHECK(la.entries[1].candidate.doc->doc_id == lb.entries[1].candidate.doc->doc_id);
    }
}

TEST_CASE("representative with no protected candidates degenerates gracefully") {
    const auto fixture = make_pool({{0.9, GroupLabel::NonProtected},
                                    {0.5, GroupLabel::NonProtected},
                                    {0.1, GroupLabel::NonProtected}});
    Rng rng(21);
    const auto list = rank_representative_stochastic(fixture.pool, 3, {}, rng);
    CHECK(list.size() == 3);
    std::set<std::string> ids;
    for (const auto& entry : list.entries) {
        ids.insert(entry.candidate.doc->doc_id);
    }
    CHECK(ids.size() == 3);
}

TEST_CASE("representative with gamma=0 and guard off matches PL on norm weights") {
    const auto fixture = make_pool({{1.0, GroupLabel::Protected},
                                    {0.8, GroupLabel::NonProtected},
                                    {0.4, GroupLabel::Protected},
                                    {0.0, GroupLabel::NonProtected}});
    RepresentativeParams params;
    params.gamma = 0.0;
    params.feasibility_guard = false;

    // Exact PL distribution with raw weights = norm_score (alpha-free):
    std::vector<std::pair<std::string, double>> items;
    for (const auto& cand : fixture.pool.candidates) {
        items.emplace_back(cand.doc->doc_id, std::max(cand.norm_score, 1e-9));
    }
    std::vector<bool> used(items.size(), false);
    std::vector<std::string> prefix;
    std::map<std::vector<std::string>, double> exact;
    enumerate_pl_rec(items, used, prefix, 1.0, 2, exact);

    Rng rng(22);
    std::map<std::vector<std::string>, int> counts;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
        counts[ids_of(rank_representative_stochastic(fixture.pool, 2, params, rng))]++;
    }
    for (const auto& [perm, prob] : exact) {
        CHECK(std::abs(static_cast<double>(counts[perm]) / draws - prob) < 0.02);
    }
}

TEST_CASE("representative mean share approaches tau on a balanced pool") {
    Rng pool_rng(23);
    double share_sum = 0.0;
    const int trials = 500;
    for (int trial = 0; trial < trials; ++trial) {
        const auto fixture = random_group_pool(10, 0.0, 1.0, 0.0, 1.0, pool_rng);
        Rng rng(1000 + static_cast<std::uint64_t>(trial));
        const auto list = rank_representative_stochastic(fixture.pool, 5, {}, rng);
        share_sum += exposure_share(list);
    }
    CHECK(std::abs(share_sum / trials - 0.5) < 0.05);
}

TEST_CASE("every ranker emits a duplicate-free list drawn from the pool") {
    Rng rng(24);
    for (int trial = 0; trial < 200; ++trial) {
        const auto per_group = 3 + static_cast<std::size_t>(uniform01(rng) * 5);
        const auto fixture = random_group_pool(per_group, 0.0, 1.0, 0.0, 1.0, rng);
        std::set<std::string> pool_ids;
        for (const auto& cand : fixture.pool.candidates) {
            pool_ids.insert(cand.doc->doc_id);
        }
        Rng trial_rng(trial);
        const RankedList lists[] = {
            rank_standard(fixture.pool, 5),
            plackett_luce_sample(fixture.pool, 5, 3.0, trial_rng),
            rank_forced_exposure(fixture.pool, 5, {2}),
            rank_representative_stochastic(fixture.pool, 5, {}, trial_rng),
        };
        for (const auto& list : lists) {
            CHECK(list.size() == std::min<std::size_t>(5, fixture.pool.candidates.size()));
            std::set<std::string> seen;
            int pos = 1;
            for (const auto& entry : list.entries) {
                CHECK(entry.position == pos++);
                CHECK(seen.insert(entry.candidate.doc->doc_id).second);
                CHECK(pool_ids.count(entry.candidate.doc->doc_id) == 1);
            }
        }
    }
}

TEST_CASE("high alpha reproduces the standard order on separated scores") {
    const auto fixture = make_pool({{1.0, GroupLabel::Protected},
                                    {0.85, GroupLabel::NonProtected},
                                    {0.6, GroupLabel::Protected},
                                    {0.35, GroupLabel::NonProtected},
                                    {0.1, GroupLabel::Protected}});
    const auto expected = ids_of(rank_standard(fixture.pool, 5));
    int matches = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        Rng rng(seed);
        if (ids_of(plackett_luce_sample(fixture.pool, 5, 50.0, rng)) == expected) {
            ++matches;
        }
    }
    CHECK(matches >= 198);
}

TEST_CASE("protected_count counts protected entries") {
    const auto fixture = make_pool({{0.9, GroupLabel::Protected},
                                    {0.8, GroupLabel::NonProtected},
                                    {0.7, GroupLabel::Protected}});
    CHECK(protected_count(rank_standard(fixture.pool, 3)) == 2);
    CHECK(protected_count(RankedList{}) == 0);
    const auto males = make_pool({{0.9, GroupLabel::NonProtected},
                                  {0.8, GroupLabel::NonProtected},
                                  {0.7, GroupLabel::NonProtected},
                                  {0.6, GroupLabel::NonProtected},
                                  {0.5, GroupLabel::NonProtected}});
    CHECK(protected_count(rank_standard(males.pool, 5)) == 0);
}

}  // TEST_SUITE
