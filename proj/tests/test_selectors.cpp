#include "fsaudit/selectors.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace fsaudit;
using test::make_dataset;

namespace {

ClassifierKind kind_of(ClassifierTag tag) {
    ClassifierKind k{ tag, {} };
    k.params.rf_trees = 10;
    return k;
}

// Adds copies of the given columns at the end.
Dataset with_duplicates(const Dataset &d, const std::vector<std::size_t> &cols) {
    std::vector<double> values;
    for (std::size_t r = 0; r < d.size(); ++r) {
        const auto row = d.row(r);
        values.insert(values.end(), row.begin(), row.end());
        for (const std::size_t c : cols) {
            values.push_back(row[c]);
        }
    }
    auto names = d.feature_names();
    for (const std::size_t c : cols) {
        names.push_back(names[c] + "_copy");
    }
    return Dataset(d.name(), d.size(), d.dim() + cols.size(), std::move(values), d.labels(), std::move(names), d.class_names());
}

struct OracleBest {
    double value;
    std::size_t min_card;
    std::set<std::vector<std::size_t>> winners;
};

// Enumerates every subset of `pool` directly through smoothed LOO.
OracleBest exhaustive_oracle(const ClassifierKind &kind, const Dataset &d, const std::vector<std::size_t> &pool, std::uint64_t seed) {
    std::vector<std::pair<double, std::vector<std::size_t>>> scored;
    for (std::size_t mask = 0; mask < (std::size_t{ 1 } << pool.size()); ++mask) {
        std::vector<std::size_t> s;
        for (std::size_t b = 0; b < pool.size(); ++b) {
            if ((mask >> b) & 1U) {
                s.push_back(pool[b]);
            }
        }
        std::sort(s.begin(), s.end());
        scored.emplace_back(loo_error(kind, d, FeatureSubset(s), seed, true).value, s);
    }
    OracleBest out{ 2.0, 99, {} };
    for (const auto &[v, s] : scored) {
        out.value = std::min(out.value, v);
    }
    for (const auto &[v, s] : scored) {
        if (v == out.value) {
            out.min_card = std::min(out.min_card, s.size());
        }
    }
    for (const auto &[v, s] : scored) {
        if (v == out.value && s.size() == out.min_card) {
            out.winners.insert(s);
        }
    }
    return out;
}

RankedList identity_ranking(std::size_t n) {
    std::vector<double> scores(n);
    for (std::size_t i = 0; i < n; ++i) {
        scores[i] = static_cast<double>(n - i);
    }
    return ranked_from_scores(scores);
}

}  // namespace

TEST(Schemes, TagsAndBudgets) {
    for (const auto tag : all_scheme_tags) {
        EXPECT_EQ(parse_scheme_tag(to_string(tag)), tag);
    }
    EXPECT_THROW((void)parse_scheme_tag("SFFS"), domain_error);
    EXPECT_EQ(SelectionScheme::of(SchemeTag::ALL).budget(), 1U);
    EXPECT_EQ(SelectionScheme::of(SchemeTag::TOP3).budget(), 1U);
    EXPECT_EQ(SelectionScheme::of(SchemeTag::TOP20).budget(), 1U);
    EXPECT_EQ(SelectionScheme::of(SchemeTag::BEST3).budget(), 1140U);
    EXPECT_EQ(SelectionScheme::of(SchemeTag::EX10).budget(), 1024U);
    EXPECT_EQ(SelectionScheme::of(SchemeTag::RND20).budget(), 1024U);
}

TEST(Candidates, CountsMatchBudgets) {
    const auto ranked = identity_ranking(25);
    for (const auto tag : all_scheme_tags) {
        const auto scheme = SelectionScheme::of(tag);
        EXPECT_EQ(candidate_subsets(scheme, ranked, 25, 7).size(), scheme.budget()) << to_string(tag);
    }
}

TEST(Candidates, TriplesAreDistinctAndFromThePool) {
    const auto ranked = identity_ranking(25);
    const auto c = candidate_subsets(SelectionScheme::of(SchemeTag::BEST3), ranked, 25, 0);
    std::set<std::vector<std::size_t>> seen;
    for (const auto &s : c) {
        ASSERT_EQ(s.size(), 3U);
        for (const std::size_t f : s) {
            EXPECT_LT(f, 20U);
        }
        seen.insert(s.sorted().indices());
    }
    EXPECT_EQ(seen.size(), 1140U);
}

TEST(Candidates, ExhaustiveIncludesEmptyAndIsDistinct) {
    const auto ranked = identity_ranking(12);
    const auto c = candidate_subsets(SelectionScheme::of(SchemeTag::EX10), ranked, 12, 0);
    std::set<std::vector<std::size_t>> seen;
    for (const auto &s : c) {
        seen.insert(s.sorted().indices());
    }
    EXPECT_EQ(seen.size(), 1024U);
    EXPECT_TRUE(seen.count({}) == 1);
}

TEST(Candidates, RandomMasksReproducibleAndHalfDense) {
    const auto ranked = identity_ranking(20);
    const auto scheme = SelectionScheme::of(SchemeTag::RND20);
    const auto a = candidate_subsets(scheme, ranked, 20, 5);
    const auto b = candidate_subsets(scheme, ranked, 20, 5);
    const auto c = candidate_subsets(scheme, ranked, 20, 6);
    EXPECT_EQ(a, b);
    EXPECT_NE(a, c);
    double members = 0.0;
    for (const auto &s : a) {
        members += static_cast<double>(s.size());
    }
    EXPECT_NEAR(members / (1024.0 * 20.0), 0.5, 0.02);
}

TEST(Candidates, TooFewRankedFeatures) {
    const auto ranked = identity_ranking(8);
    EXPECT_THROW((void)candidate_subsets(SelectionScheme::of(SchemeTag::EX10), ranked, 8, 0), domain_error);
    EXPECT_THROW((void)candidate_subsets(SelectionScheme::of(SchemeTag::TOP10), ranked, 8, 0), domain_error);
    EXPECT_EQ(candidate_subsets(SelectionScheme::of(SchemeTag::ALL), RankedList{}, 8, 0).front(), FeatureSubset::all(8));
}

TEST(Select, ExhaustiveMatchesBruteForce) {
    for (const auto tag : { ClassifierTag::LDC, ClassifierTag::NN1, ClassifierTag::DT, ClassifierTag::NB }) {
        for (std::uint64_t s = 0; s < 3; ++s) {
            const auto d = generate_gaussian_problem({ 6, 7, 2, 1.0 }, 50 + s);
            const auto ranked = rank_features({ RankerTag::SU, {} }, d, s);
            const std::vector<std::size_t> pool(ranked.order.begin(), ranked.order.begin() + 5);
            const auto res = select(SelectionScheme::exhaustive(5), ranked, kind_of(tag), d, s);
            const auto oracle = exhaustive_oracle(kind_of(tag), d, pool, s);
            EXPECT_EQ(res.evaluations, 32U);
            EXPECT_DOUBLE_EQ(res.criterion.value, oracle.value);
            EXPECT_EQ(res.subset.size(), oracle.min_card);
            EXPECT_EQ(oracle.winners.count(res.subset.sorted().indices()), 1U) << to_string(tag);
        }
    }
}

TEST(Select, PropertyTiesResolveToMinimalCardinality) {
    // Copies of a column do not change a tree, so every superset of a winner
    // that only adds copies ties with it.
    for (std::uint64_t s = 0; s < 5; ++s) {
        const auto base = generate_gaussian_problem({ 6, 3, 2, 1.5 }, 70 + s);
        const auto d = with_duplicates(base, { 0, 1 });
        const auto ranked = identity_ranking(5);
        const auto res = select(SelectionScheme::exhaustive(5), ranked, kind_of(ClassifierTag::DT), d, s);
        const auto oracle = exhaustive_oracle(kind_of(ClassifierTag::DT), d, { 0, 1, 2, 3, 4 }, s);
        EXPECT_EQ(res.subset.size(), oracle.min_card);
        EXPECT_GT(res.candidates_tied, 1U);
        const auto idx = res.subset.sorted().indices();
        EXPECT_FALSE(std::count(idx.begin(), idx.end(), 0U) == 1 && std::count(idx.begin(), idx.end(), 3U) == 1);
    }
}

TEST(Select, BudgetOneCriterionIsSmoothedLoo) {
    const auto d = generate_gaussian_problem({ 8, 12, 3, 1.0 }, 90);
    const auto ranked = rank_features({ RankerTag::RELIEFF, {} }, d, 0);
    for (const auto tag : { SchemeTag::ALL, SchemeTag::TOP3, SchemeTag::TOP10 }) {
        for (const auto ct : { ClassifierTag::LDC, ClassifierTag::RF }) {
            const auto res = select(SelectionScheme::of(tag), ranked, kind_of(ct), d, 4);
            EXPECT_EQ(res.evaluations, 1U);
            EXPECT_EQ(res.criterion.kind, EstimateKind::SLOO);
            EXPECT_EQ(res.criterion.value, loo_error(kind_of(ct), d, res.subset, 4, true).value);
        }
    }
}

TEST(Select, ExhaustiveDominatesFixedSubsetsOfItsPool) {
    const auto d = generate_gaussian_problem({ 8, 12, 3, 1.0 }, 91);
    const auto ranked = rank_features({ RankerTag::SU, {} }, d, 0);
    CriterionCache cache;
    const auto ex = select(SelectionScheme::of(SchemeTag::EX10), ranked, kind_of(ClassifierTag::LDC), d, 1, &cache);
    const auto t10 = select(SelectionScheme::of(SchemeTag::TOP10), ranked, kind_of(ClassifierTag::LDC), d, 1, &cache);
    const auto t3 = select(SelectionScheme::of(SchemeTag::TOP3), ranked, kind_of(ClassifierTag::LDC), d, 1, &cache);
    EXPECT_LE(ex.criterion.value, t10.criterion.value);
    EXPECT_LE(ex.criterion.value, t3.criterion.value);
    EXPECT_EQ(ex.evaluations, 1024U);
    // both fixed subsets were already scored during the exhaustive pass
    EXPECT_EQ(t10.trainings, 0U);
    EXPECT_EQ(t3.trainings, 0U);
}

TEST(Select, RandomSearchReproducible) {
    const auto d = generate_gaussian_problem({ 5, 22, 3, 1.0 }, 92);
    const auto ranked = rank_features({ RankerTag::SU, {} }, d, 0);
    const auto a = select(SelectionScheme::of(SchemeTag::RND20), ranked, kind_of(ClassifierTag::NN1), d, 8);
    const auto b = select(SelectionScheme::of(SchemeTag::RND20), ranked, kind_of(ClassifierTag::NN1), d, 8);
    EXPECT_EQ(a.subset, b.subset);
    EXPECT_EQ(a.criterion.value, b.criterion.value);
    EXPECT_EQ(a.evaluations, 1024U);
}

TEST(Select, BestThreeBudget) {
    const auto d = generate_gaussian_problem({ 4, 20, 3, 1.0 }, 93);
    const auto ranked = rank_features({ RankerTag::SU, {} }, d, 0);
    const auto res = select(SelectionScheme::of(SchemeTag::BEST3), ranked, kind_of(ClassifierTag::NN1), d, 0);
    EXPECT_EQ(res.evaluations, 1140U);
    EXPECT_EQ(res.subset.size(), 3U);
}

TEST(TieBreak, SeededAndInRange) {
    for (std::uint64_t s = 0; s < 50; ++s) {
        EXPECT_LT(tie_break_index(s, 7), 7U);
        EXPECT_EQ(tie_break_index(s, 7), tie_break_index(s, 7));
    }
}
