#include "fsaudit/estimators.hpp"
#include "fsaudit/rankers.hpp"
#include "fsaudit/selectors.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace fsaudit;
using test::make_dataset;

namespace {

ClassifierKind kind_of(ClassifierTag tag) {
    ClassifierKind k{ tag, {} };
    k.params.rf_trees = 20;
    return k;
}

// Brute-force LOO: rebuild each fold as its own dataset.
double loo_oracle(const ClassifierKind &kind, const Dataset &d, const FeatureSubset &subset, bool smoothed) {
    double total = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const auto fold = d.without_row(i);
        const auto model = train(kind, fold, subset, 0);
        const auto p = predict_proba_row(model, d, i);
        total += smoothed ? 1.0 - p[d.label(i)] : (argmax(p) != d.label(i) ? 1.0 : 0.0);
    }
    return total / static_cast<double>(d.size());
}

}  // namespace

TEST(Kinds, RoundTrip) {
    for (const auto k : { EstimateKind::RESUB, EstimateKind::LOO, EstimateKind::SLOO, EstimateKind::RLOO, EstimateKind::HOLDOUT }) {
        EXPECT_EQ(parse_estimate_kind(to_string(k)), k);
    }
    EXPECT_THROW((void)parse_estimate_kind("CV10"), domain_error);
}

TEST(Resubstitution, NearestNeighbourOnDistinctPointsIsZero) {
    const auto d = generate_gaussian_problem({ 10, 5, 2, 0.5 }, 3);
    const auto e = resubstitution_error(kind_of(ClassifierTag::NN1), d, FeatureSubset::all(5), 0);
    EXPECT_EQ(e.value, 0.0);
    EXPECT_EQ(e.kind, EstimateKind::RESUB);
    EXPECT_EQ(e.n_evaluations, 1U);
}

TEST(Resubstitution, PriorOnlyBalancedIsHalf) {
    const auto d = generate_gaussian_problem({ 6, 2, 1, 1.0 }, 3);
    for (const auto tag : all_classifier_tags) {
        EXPECT_DOUBLE_EQ(resubstitution_error(kind_of(tag), d, FeatureSubset{}, 0).value, 0.5) << to_string(tag);
    }
}

TEST(Loo, FourPointLineWithNearestNeighbour) {
    const auto d = make_dataset({ { -2 }, { -1 }, { 1 }, { 2 } }, { 0, 0, 1, 1 });
    const auto e = loo_error(kind_of(ClassifierTag::NN1), d, FeatureSubset{ 0 }, 0, false);
    EXPECT_EQ(e.value, 0.0);
    EXPECT_EQ(e.n_evaluations, 4U);
}

TEST(Loo, ClassifierDependentPairs) {
    const auto ldc = kind_of(ClassifierTag::LDC);
    const auto nn = kind_of(ClassifierTag::NN1);
    const auto a = generate_classifier_dependent_pair(PairMode::ldc_wins, 1);
    EXPECT_EQ(loo_error(ldc, a, FeatureSubset{ 0, 1 }, 0, false).value, 0.0);
    EXPECT_EQ(loo_error(nn, a, FeatureSubset{ 0, 1 }, 0, false).value, 1.0);
    const auto b = generate_classifier_dependent_pair(PairMode::nn_wins, 1);
    EXPECT_EQ(loo_error(nn, b, FeatureSubset{ 0, 1 }, 0, false).value, 0.0);
    EXPECT_EQ(loo_error(ldc, b, FeatureSubset{ 0, 1 }, 0, false).value, 1.0);
    for (const auto &d : { a, b }) {
        EXPECT_GE(loo_error(ldc, d, FeatureSubset{ 0 }, 0, false).value, 0.4);
    }
}

TEST(Loo, PropertyMatchesBruteForce) {
    const auto d = generate_gaussian_problem({ 8, 4, 2, 1.0 }, 12);
    for (const auto tag : all_classifier_tags) {
        const auto k = kind_of(tag);
        const auto pair = loo_errors(k, d, all_rows(d.size()), FeatureSubset{ 0, 2, 3 }, 0);
        EXPECT_DOUBLE_EQ(pair.counting.value, loo_oracle(k, d, FeatureSubset{ 0, 2, 3 }, false)) << to_string(tag);
        EXPECT_NEAR(pair.smoothed.value, loo_oracle(k, d, FeatureSubset{ 0, 2, 3 }, true), 1e-12) << to_string(tag);
        // counting values are multiples of 1/N
        const double scaled = pair.counting.value * static_cast<double>(d.size());
        EXPECT_NEAR(scaled, std::round(scaled), 1e-9);
        EXPECT_GE(pair.smoothed.value, 0.0);
        EXPECT_LE(pair.smoothed.value, 1.0);
    }
}

TEST(Loo, SvmSmoothedEqualsCounting) {
    const auto d = generate_gaussian_problem({ 10, 6, 2, 0.8 }, 5);
    for (const auto tag : { ClassifierTag::SVML, ClassifierTag::SVMG }) {
        const auto pair = loo_errors(kind_of(tag), d, all_rows(d.size()), FeatureSubset::all(6), 0);
        EXPECT_EQ(pair.smoothed.value, pair.counting.value);
    }
}

TEST(Loo, VanishingClassCountsAsError) {
    const auto d = make_dataset({ { 0 }, { 1 }, { 2 }, { 3 }, { 9 } }, { 0, 0, 0, 0, 1 });
    const auto e = loo_error(kind_of(ClassifierTag::LDC), d, FeatureSubset{ 0 }, 0, false);
    EXPECT_GE(e.value, 0.2);
}

TEST(Holdout, ConstantPredictorOnSkewedHoldout) {
    // Classes A and B are not separable on x1, and A is the majority in training.
    const auto probe = make_dataset({ { 0 }, { 0 }, { 0 }, { 0 } }, { 0, 0, 0, 1 });
    std::vector<std::vector<double>> rows(10, std::vector<double>{ 0.0 });
    const auto holdout = make_dataset(rows, { 0, 0, 0, 0, 0, 0, 0, 1, 1, 1 });
    const auto e = holdout_true_error(kind_of(ClassifierTag::LDC), probe, FeatureSubset{ 0 }, holdout, 0);
    EXPECT_DOUBLE_EQ(e.value, 0.30);
    EXPECT_EQ(e.kind, EstimateKind::HOLDOUT);
}

TEST(Holdout, ProbeAsHoldoutEqualsResubstitution) {
    const auto d = generate_gaussian_problem({ 10, 5, 2, 1.0 }, 8);
    for (const auto tag : all_classifier_tags) {
        EXPECT_EQ(holdout_true_error(kind_of(tag), d, FeatureSubset::all(5), d, 3).value, resubstitution_error(kind_of(tag), d, FeatureSubset::all(5), 3).value);
    }
}

TEST(Holdout, RejectsMismatchedLayout) {
    const auto a = make_dataset({ { 0 }, { 1 } }, { 0, 1 });
    const auto b = make_dataset({ { 0 }, { 1 } }, { 0, 1 }, { "A", "C" });
    EXPECT_THROW((void)holdout_true_error(kind_of(ClassifierTag::LDC), a, FeatureSubset{ 0 }, b, 0), data_error);
}

TEST(Sonar, LdcOnRankedTopTen) {
    const auto split = stratified_split(test::sonar(), 10, 2024);
    const auto ranked = rank_features({ RankerTag::SU, {} }, split.probe, 0);
    const auto top = top_k(ranked, 10);
    const auto ldc = kind_of(ClassifierTag::LDC);
    const double e = holdout_true_error(ldc, split.probe, top, split.holdout, 0).value;
    EXPECT_GT(e, 0.15);
    EXPECT_LT(e, 0.50);
    // some 3-feature subset fits the 20-point probe exactly
    bool perfect = false;
    const std::size_t n = split.probe.dim();
    for (std::size_t a = 0; a < n && !perfect; ++a) {
        for (std::size_t b = a + 1; b < n && !perfect; ++b) {
            for (std::size_t c = b + 1; c < n && !perfect; ++c) {
                perfect = resubstitution_error(ldc, split.probe, FeatureSubset{ a, b, c }, 0).value == 0.0;
            }
        }
    }
    EXPECT_TRUE(perfect);
}

TEST(Rloo, AllSchemeEqualsCountingLoo) {
    const auto d = generate_gaussian_problem({ 8, 5, 2, 1.0 }, 41);
    for (const auto tag : { ClassifierTag::LDC, ClassifierTag::NN1, ClassifierTag::DT }) {
        const auto r = proper_rloo_error(kind_of(tag), { RankerTag::SU, {} }, SelectionScheme::of(SchemeTag::ALL), d, 0);
        EXPECT_EQ(r.estimate.value, loo_error(kind_of(tag), d, FeatureSubset::all(5), 0, false).value);
        EXPECT_EQ(r.estimate.kind, EstimateKind::RLOO);
        EXPECT_EQ(r.subset, FeatureSubset::all(5));
    }
}

TEST(Rloo, StableSelectionCollapsesToLoo) {
    // Feature 0 carries the label and every fold ranks it first.
    rng gen{ 3 };
    std::vector<std::vector<double>> rows;
    std::vector<std::size_t> labels;
    for (std::size_t i = 0; i < 16; ++i) {
        rows.push_back({ 10.0 * static_cast<double>(i % 2) + gen.normal(), gen.normal(), gen.normal() });
        labels.push_back(i % 2);
    }
    const auto d = make_dataset(rows, labels);
    const RankerKind relieff{ RankerTag::RELIEFF, {} };
    for (std::size_t i = 0; i < d.size(); ++i) {
        auto fold = all_rows(d.size());
        fold.erase(fold.begin() + static_cast<std::ptrdiff_t>(i));
        ASSERT_EQ(rank_features(relieff, d, fold, 0).order.front(), 0U);
    }
    auto top1 = SelectionScheme::of(SchemeTag::TOP3);
    top1.pool = 1;
    top1.k = 1;
    const auto r = proper_rloo_error(kind_of(ClassifierTag::LDC), relieff, top1, d, 0);
    EXPECT_EQ(r.subset, FeatureSubset{ 0 });
    EXPECT_EQ(r.estimate.value, loo_error(kind_of(ClassifierTag::LDC), d, FeatureSubset{ 0 }, 0, false).value);
}

TEST(Rloo, EvaluationAccounting) {
    const auto d = generate_gaussian_problem({ 6, 6, 2, 1.0 }, 4);
    const std::size_t n = d.size();
    auto best = SelectionScheme::of(SchemeTag::BEST3);
    best.pool = 5;
    const std::size_t budget = best.budget();
    ASSERT_EQ(budget, 10U);
    const auto r = proper_rloo_error(kind_of(ClassifierTag::LDC), { RankerTag::SU, {} }, best, d, 0);
    EXPECT_EQ(r.estimate.criterion_evaluations, n * budget + budget);
    // each fold scores `budget` subsets on N-1 rows and fits one final model;
    // the full-probe selection scores `budget` subsets on N rows
    EXPECT_EQ(r.estimate.n_evaluations, n * (budget * (n - 1) + 1) + budget * n);
    EXPECT_EQ(loo_error(kind_of(ClassifierTag::LDC), d, FeatureSubset{ 0 }, 0, true).n_evaluations, n);
}

TEST(Ordering, StatisticalTendencyOverProbes) {
    const auto ldc = kind_of(ClassifierTag::LDC);
    const RankerKind su{ RankerTag::SU, {} };
    const auto top3 = SelectionScheme::of(SchemeTag::TOP3);
    double resub = 0.0;
    double loo = 0.0;
    double after = 0.0;
    double rloo = 0.0;
    const int probes = 50;
    for (int s = 0; s < probes; ++s) {
        const auto d = generate_gaussian_problem({ 20, 20, 3, 1.0 }, 1000 + static_cast<std::uint64_t>(s));
        const auto all = FeatureSubset::all(d.dim());
        resub += resubstitution_error(ldc, d, all, 0).value;
        loo += loo_error(ldc, d, all, 0, false).value;
        const auto r = proper_rloo_error(ldc, su, top3, d, 0);
        rloo += r.estimate.value;
        after += loo_error(ldc, d, r.subset, 0, false).value;
    }
    EXPECT_LE(resub / probes, loo / probes + 0.01);
    EXPECT_LE(after / probes, rloo / probes + 0.01);
}
