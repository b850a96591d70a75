#ifndef FSAUDIT_ESTIMATORS_HPP_
#define FSAUDIT_ESTIMATORS_HPP_
#pragma once

#include "fsaudit/classifiers.hpp"
#include "fsaudit/common.hpp"
#include "fsaudit/dataset.hpp"

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fsaudit {

enum class EstimateKind { RESUB, LOO, SLOO, RLOO, HOLDOUT };

[[nodiscard]] constexpr std::string_view to_string(EstimateKind k) noexcept {
    switch (k) {
        case EstimateKind::RESUB: return "RESUB";
        case EstimateKind::LOO: return "LOO";
        case EstimateKind::SLOO: return "SLOO";
        case EstimateKind::RLOO: return "RLOO";
        case EstimateKind::HOLDOUT: return "HOLDOUT";
    }
    return "?";
}

[[nodiscard]] inline EstimateKind parse_estimate_kind(std::string_view s) {
    for (const EstimateKind k : { EstimateKind::RESUB, EstimateKind::LOO, EstimateKind::SLOO, EstimateKind::RLOO, EstimateKind::HOLDOUT }) {
        if (to_string(k) == s) {
            return k;
        }
    }
    throw domain_error("unknown estimator '" + std::string(s) + "'");
}

struct ErrorEstimate {
    double value{ 0.0 };
    EstimateKind kind{ EstimateKind::LOO };
    std::size_t n_evaluations{ 0 };  ///< model trainings consumed
    /// Subset-criterion evaluations consumed by selection inside the estimate
    /// (non-zero only for RLOO).
    std::size_t criterion_evaluations{ 0 };
};

/// Counting and smoothed LOO computed from the same N fold models.
struct LooPair {
    ErrorEstimate counting;
    ErrorEstimate smoothed;
};

[[nodiscard]] inline std::vector<std::size_t> all_rows(std::size_t n) {
    std::vector<std::size_t> rows(n);
    std::iota(rows.begin(), rows.end(), std::size_t{ 0 });
    return rows;
}

/// LOO over the listed rows of `data`.  Each fold trains on the other rows with
/// the same seed.  A fold whose training part lost a class scores that class
/// with posterior 0, so the held-out row counts as an error.  Fold errors are
/// summed in row order.
[[nodiscard]] inline LooPair loo_errors(const ClassifierKind &kind, const Dataset &data, std::span<const std::size_t> rows, const FeatureSubset &subset,
                                        std::uint64_t seed) {
    if (rows.size() < 2) {
        throw data_error("leave-one-out needs at least two instances");
    }
    std::vector<std::size_t> train_rows(rows.size() - 1);
    double wrong = 0.0;
    double soft = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::size_t w = 0;
        for (std::size_t j = 0; j < rows.size(); ++j) {
            if (j != i) {
                train_rows[w++] = rows[j];
            }
        }
        const auto model = train(kind, data, train_rows, subset, seed);
        const auto post = predict_proba_row(model, data, rows[i]);
        const std::size_t truth = data.label(rows[i]);
        wrong += argmax(post) != truth ? 1.0 : 0.0;
        soft += 1.0 - post[truth];
    }
    const auto n = static_cast<double>(rows.size());
    return { { wrong / n, EstimateKind::LOO, rows.size(), 0 }, { std::clamp(soft / n, 0.0, 1.0), EstimateKind::SLOO, rows.size(), 0 } };
}

[[nodiscard]] inline ErrorEstimate loo_error(const ClassifierKind &kind, const Dataset &probe, const FeatureSubset &subset, std::uint64_t seed, bool smoothed) {
    const auto rows = all_rows(probe.size());
    const auto pair = loo_errors(kind, probe, rows, subset, seed);
    return smoothed ? pair.smoothed : pair.counting;
}

[[nodiscard]] inline ErrorEstimate resubstitution_error(const ClassifierKind &kind, const Dataset &probe, const FeatureSubset &subset, std::uint64_t seed) {
    const auto model = train(kind, probe, subset, seed);
    std::size_t wrong = 0;
    for (std::size_t r = 0; r < probe.size(); ++r) {
        wrong += predict_label_row(model, probe, r) != probe.label(r) ? 1U : 0U;
    }
    return { static_cast<double>(wrong) / static_cast<double>(probe.size()), EstimateKind::RESUB, 1, 0 };
}

/// Counting error on `holdout` of the model trained on the whole probe.
[[nodiscard]] inline ErrorEstimate holdout_true_error(const ClassifierKind &kind, const Dataset &probe, const FeatureSubset &subset, const Dataset &holdout,
                                                      std::uint64_t seed) {
    if (holdout.class_names() != probe.class_names()) {
        throw data_error("holdout and probe disagree on the class list");
    }
    if (holdout.dim() != probe.dim()) {
        throw data_error("holdout and probe disagree on the number of features");
    }
    const auto model = train(kind, probe, subset, seed);
    std::size_t wrong = 0;
    for (std::size_t r = 0; r < holdout.size(); ++r) {
        wrong += predict_label_row(model, holdout, r) != holdout.label(r) ? 1U : 0U;
    }
    return { static_cast<double>(wrong) / static_cast<double>(holdout.size()), EstimateKind::HOLDOUT, 1, 0 };
}

}  // namespace fsaudit

#endif  // FSAUDIT_ESTIMATORS_HPP_
