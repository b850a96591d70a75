#include "fsaudit/rankers.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numeric>

using namespace fsaudit;
using test::make_dataset;

namespace {

RankerKind kind_of(RankerTag tag) {
    RankerKind k{ tag, {} };
    k.params.rf_trees = 50;
    return k;
}

// SU from a contingency table with natural logs; the ratio does not depend on the base.
double su_oracle(const std::vector<std::size_t> &x, const std::vector<std::size_t> &y) {
    std::map<std::pair<std::size_t, std::size_t>, double> joint;
    std::map<std::size_t, double> mx;
    std::map<std::size_t, double> my;
    for (std::size_t i = 0; i < x.size(); ++i) {
        joint[{ x[i], y[i] }] += 1.0;
        mx[x[i]] += 1.0;
        my[y[i]] += 1.0;
    }
    const double n = static_cast<double>(x.size());
    double mi = 0.0;
    for (const auto &[k, c] : joint) {
        mi += c / n * std::log(c * n / (mx[k.first] * my[k.second]));
    }
    double hx = 0.0;
    double hy = 0.0;
    for (const auto &[k, c] : mx) {
        hx -= c / n * std::log(c / n);
    }
    for (const auto &[k, c] : my) {
        hy -= c / n * std::log(c / n);
    }
    return hx + hy == 0.0 ? 0.0 : 2.0 * mi / (hx + hy);
}

// Feature 0 is the label plus small noise, the rest are noise.
Dataset signal_plus_noise(std::uint64_t seed, std::size_t per_class = 20, std::size_t noise = 5) {
    rng gen{ seed };
    std::vector<std::vector<double>> rows;
    std::vector<std::size_t> labels;
    for (std::size_t i = 0; i < 2 * per_class; ++i) {
        const std::size_t y = i % 2;
        std::vector<double> r{ static_cast<double>(y) * 3.0 + 0.3 * gen.normal() };
        for (std::size_t j = 0; j < noise; ++j) {
            r.push_back(gen.normal());
        }
        rows.push_back(r);
        labels.push_back(y);
    }
    return make_dataset(rows, labels);
}

class EveryRanker : public ::testing::TestWithParam<RankerTag> {};

}  // namespace

TEST(Tags, RoundTrip) {
    for (const auto tag : all_ranker_tags) {
        EXPECT_EQ(parse_ranker_tag(to_string(tag)), tag);
    }
    EXPECT_THROW((void)parse_ranker_tag("MRMR"), domain_error);
}

TEST(SymmetricUncertainty, MatchesContingencyOracle) {
    rng gen{ 5 };
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::size_t> x(30);
        std::vector<std::size_t> y(30);
        for (std::size_t i = 0; i < 30; ++i) {
            x[i] = gen.below(4);
            y[i] = gen.below(3);
        }
        EXPECT_NEAR(symmetric_uncertainty(x, y), su_oracle(x, y), 1e-12);
    }
}

TEST(SymmetricUncertainty, PropertySymmetricAndBounded) {
    rng gen{ 6 };
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::size_t> x(20);
        std::vector<std::size_t> y(20);
        for (std::size_t i = 0; i < 20; ++i) {
            x[i] = gen.below(1 + trial % 5);
            y[i] = gen.below(2);
        }
        const double a = symmetric_uncertainty(x, y);
        EXPECT_NEAR(a, symmetric_uncertainty(y, x), 1e-12);
        EXPECT_GE(a, 0.0);
        EXPECT_LE(a, 1.0);
    }
}

TEST(SymmetricUncertainty, IdentityAndConstant) {
    const std::vector<std::size_t> y{ 0, 1, 1, 0, 1, 0 };
    const std::vector<std::size_t> c(6, 2);
    EXPECT_DOUBLE_EQ(symmetric_uncertainty(y, y), 1.0);
    EXPECT_DOUBLE_EQ(symmetric_uncertainty(c, y), 0.0);
    EXPECT_DOUBLE_EQ(symmetric_uncertainty(c, c), 0.0);
}

TEST(EqualFrequencyBins, CutsAtQuantiles) {
    const std::vector<double> v{ 8, 1, 7, 2, 6, 3, 5, 4 };
    const auto codes = equal_frequency_bins(v, 4);
    const std::vector<std::size_t> expected{ 3, 0, 3, 0, 2, 1, 2, 1 };
    EXPECT_EQ(codes, expected);
    const std::vector<double> same(5, 1.0);
    const auto one = equal_frequency_bins(same, 3);
    EXPECT_EQ(std::set<std::size_t>(one.begin(), one.end()).size(), 1U);
}

TEST(Su, LabelCopyRanksFirstAndConstantScoresZero) {
    const auto d = make_dataset({ { 0.3, 0, 5 }, { 0.1, 1, 5 }, { 0.5, 0, 5 }, { 0.2, 1, 5 }, { 0.9, 0, 5 }, { 0.4, 1, 5 }, { 0.8, 1, 5 }, { 0.6, 0, 5 } },
                                { 0, 1, 0, 1, 0, 1, 1, 0 });
    const auto list = rank_features(kind_of(RankerTag::SU), d, 0);
    EXPECT_EQ(list.order.front(), 1U);
    EXPECT_DOUBLE_EQ(list.scores.front(), 1.0);
    EXPECT_EQ(list.order.back(), 2U);
    EXPECT_DOUBLE_EQ(list.scores.back(), 0.0);
}

TEST_P(EveryRanker, SignalFeatureFirst) {
    const auto d = signal_plus_noise(17);
    const auto list = rank_features(kind_of(GetParam()), d, 3);
    EXPECT_EQ(list.order.front(), 0U);
}

TEST_P(EveryRanker, IsAPermutationWithSortedScores) {
    const auto d = generate_gaussian_problem({ 12, 15, 3, 1.0 }, 4);
    const auto list = rank_features(kind_of(GetParam()), d, 3);
    std::vector<std::size_t> sorted = list.order;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::size_t> iota(15);
    std::iota(iota.begin(), iota.end(), std::size_t{ 0 });
    EXPECT_EQ(sorted, iota);
    EXPECT_TRUE(std::is_sorted(list.scores.rbegin(), list.scores.rend()));
}

TEST_P(EveryRanker, PropertyRowOrderDoesNotMatter) {
    const auto d = generate_gaussian_problem({ 10, 8, 2, 1.0 }, 9);
    std::vector<std::size_t> rows(d.size());
    std::iota(rows.begin(), rows.end(), std::size_t{ 0 });
    const auto a = rank_features(kind_of(GetParam()), d, rows, 1);
    for (std::uint64_t s = 0; s < 3; ++s) {
        rng gen{ s };
        gen.shuffle(rows);
        const auto b = rank_features(kind_of(GetParam()), d, rows, 1);
        EXPECT_EQ(a.order, b.order);
        EXPECT_EQ(a.scores, b.scores);
    }
}

TEST_P(EveryRanker, SingleClassProbeIsRejected) {
    const auto d = make_dataset({ { 0, 1 }, { 1, 2 }, { 2, 2 } }, { 1, 1, 1 });
    EXPECT_THROW((void)rank_features(kind_of(GetParam()), d, 0), data_error);
}

INSTANTIATE_TEST_SUITE_P(All, EveryRanker, ::testing::ValuesIn(all_ranker_tags),
                         [](const auto &info) { return std::string(to_string(info.param)); });

TEST(TopK, Bounds) {
    const auto list = ranked_from_scores(std::vector<double>{ 0.2, 0.9, 0.2, 0.5 });
    const std::vector<std::size_t> order{ 1, 3, 0, 2 };
    EXPECT_EQ(list.order, order);
    EXPECT_EQ(top_k(list, 4).indices(), order);
    EXPECT_EQ(top_k(list, 0).size(), 0U);
    EXPECT_EQ(top_k(list, 2), (FeatureSubset{ 1, 3 }));
    EXPECT_THROW((void)top_k(list, 5), domain_error);
}

TEST(ReliefF, PropertyAffineRescaleInvariant) {
    const auto d = generate_gaussian_problem({ 12, 6, 2, 1.5 }, 21);
    std::vector<double> values;
    for (std::size_t r = 0; r < d.size(); ++r) {
        const auto row = d.row(r);
        for (std::size_t j = 0; j < d.dim(); ++j) {
            values.push_back(j == 1 ? -40.0 * row[j] + 7.0 : row[j]);
        }
    }
    const Dataset scaled(d.name(), d.size(), d.dim(), values, d.labels(), d.feature_names(), d.class_names());
    const auto a = rank_features(kind_of(RankerTag::RELIEFF), d, 0);
    const auto b = rank_features(kind_of(RankerTag::RELIEFF), scaled, 0);
    EXPECT_EQ(a.order, b.order);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_NEAR(a.scores[i], b.scores[i], 1e-9);
    }
}

TEST(SvmRfe, SingleStepMatchesWeightRanking) {
    const auto d = generate_gaussian_problem({ 15, 10, 3, 1.0 }, 31);
    auto rfe = kind_of(RankerTag::SVM_RFE);
    rfe.params.rfe_chunk = [](std::size_t active) { return active - 1; };
    const auto a = rank_features(rfe, d, 0);
    const auto b = rank_features(kind_of(RankerTag::SVM_W), d, 0);
    EXPECT_EQ(a.order, b.order);
}

TEST(SvmRfe, ScoresAreEliminationPositions) {
    const auto d = generate_gaussian_problem({ 10, 6, 2, 1.0 }, 32);
    const auto list = rank_features(kind_of(RankerTag::SVM_RFE), d, 0);
    for (std::size_t i = 0; i < list.size(); ++i) {
        EXPECT_DOUBLE_EQ(list.scores[i], static_cast<double>(list.size() - i));
    }
}
