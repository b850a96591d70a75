#ifndef FSAUDIT_RANKERS_HPP_
#define FSAUDIT_RANKERS_HPP_
#pragma once

#include "fsaudit/classifiers.hpp"
#include "fsaudit/common.hpp"
#include "fsaudit/dataset.hpp"
#include "fsaudit/detail/smo.hpp"
#include "fsaudit/detail/training_data.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fsaudit {

enum class RankerTag { SU, RF_IMP, RELIEFF, SVM_W, SVM_RFE };

inline constexpr std::array<RankerTag, 5> all_ranker_tags{ RankerTag::SU, RankerTag::RF_IMP, RankerTag::RELIEFF, RankerTag::SVM_W, RankerTag::SVM_RFE };

[[nodiscard]] constexpr std::string_view to_string(RankerTag tag) noexcept {
    switch (tag) {
        case RankerTag::SU: return "SU";
        case RankerTag::RF_IMP: return "RF_IMP";
        case RankerTag::RELIEFF: return "RELIEFF";
        case RankerTag::SVM_W: return "SVM_W";
        case RankerTag::SVM_RFE: return "SVM_RFE";
    }
    return "?";
}

[[nodiscard]] inline RankerTag parse_ranker_tag(std::string_view s) {
    for (const RankerTag t : all_ranker_tags) {
        if (to_string(t) == s) {
            return t;
        }
    }
    throw domain_error("unknown ranker '" + std::string(s) + "'");
}

/// Number of features SVM_RFE drops from `active` remaining ones in one step.
using EliminationChunk = std::function<std::size_t(std::size_t active)>;

struct RankerParams {
    std::size_t su_bins{ 0 };  ///< 0 selects ceil(sqrt(N))
    std::size_t relieff_k{ 3 };
    std::size_t rf_trees{ 100 };
    double svm_c{ 1.0 };
    double svm_tol{ 1e-3 };
    std::size_t svm_max_iter{ 100000 };
    std::size_t rfe_halving_floor{ 40 };
    EliminationChunk rfe_chunk{};  ///< overrides the halving rule when set
};

struct RankerKind {
    RankerTag tag{ RankerTag::SU };
    RankerParams params{};
};

/// Features best first.  scores[i] belongs to order[i].
struct RankedList {
    std::vector<std::size_t> order;
    std::vector<double> scores;

    [[nodiscard]] std::size_t size() const noexcept { return order.size(); }
};

/// Sorts by score descending, ties by ascending feature index.
[[nodiscard]] inline RankedList ranked_from_scores(std::span<const double> scores) {
    RankedList out;
    out.order.resize(scores.size());
    std::iota(out.order.begin(), out.order.end(), std::size_t{ 0 });
    std::stable_sort(out.order.begin(), out.order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    for (const std::size_t f : out.order) {
        out.scores.push_back(scores[f]);
    }
    return out;
}

[[nodiscard]] inline FeatureSubset top_k(const RankedList &list, std::size_t k) {
    if (k > list.size()) {
        throw domain_error("requested top " + std::to_string(k) + " of only " + std::to_string(list.size()) + " ranked features");
    }
    return FeatureSubset(std::vector<std::size_t>(list.order.begin(), list.order.begin() + static_cast<std::ptrdiff_t>(k)));
}

/// Bin codes from equal-frequency cut points: with values sorted ascending the
/// cuts are v[ceil(b N / B) - 1] for b = 1..B-1 and a value's bin is the
/// number of cuts strictly below it.
[[nodiscard]] inline std::vector<std::size_t> equal_frequency_bins(std::span<const double> values, std::size_t bins) {
    const std::size_t n = values.size();
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> cuts;
    for (std::size_t b = 1; b < bins; ++b) {
        const std::size_t pos = (b * n + bins - 1) / bins;
        cuts.push_back(sorted[pos == 0 ? 0 : pos - 1]);
    }
    std::vector<std::size_t> codes(n);
    for (std::size_t i = 0; i < n; ++i) {
        codes[i] = static_cast<std::size_t>(std::lower_bound(cuts.begin(), cuts.end(), values[i]) - cuts.begin());
    }
    return codes;
}

/// 2 I(X;Y) / (H(X) + H(Y)) on discrete codes, entropies in bits; 0 when both
/// variables are constant.
[[nodiscard]] inline double symmetric_uncertainty(std::span<const std::size_t> x, std::span<const std::size_t> y) {
    if (x.size() != y.size()) {
        throw domain_error("symmetric_uncertainty: length mismatch");
    }
    const auto n = static_cast<double>(x.size());
    std::map<std::size_t, double> px;
    std::map<std::size_t, double> py;
    std::map<std::pair<std::size_t, std::size_t>, double> pxy;
    for (std::size_t i = 0; i < x.size(); ++i) {
        px[x[i]] += 1.0;
        py[y[i]] += 1.0;
        pxy[{ x[i], y[i] }] += 1.0;
    }
    const auto h = [n](const auto &counts) {
        double acc = 0.0;
        for (const auto &[key, c] : counts) {
            const double p = c / n;
            acc -= p * std::log2(p);
        }
        return acc;
    };
    const double hx = h(px);
    const double hy = h(py);
    const double denom = hx + hy;
    if (denom <= 0.0) {
        return 0.0;
    }
    const double su = 2.0 * (hx + hy - h(pxy)) / denom;
    return std::clamp(su, 0.0, 1.0);
}

namespace detail {

inline std::vector<double> su_scores(const TrainingData &td, std::size_t bins) {
    if (bins == 0) {
        bins = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(td.rows))));
    }
    std::vector<double> scores(td.cols);
    std::vector<double> column(td.rows);
    for (std::size_t j = 0; j < td.cols; ++j) {
        for (std::size_t r = 0; r < td.rows; ++r) {
            column[r] = td.at(r, j);
        }
        scores[j] = symmetric_uncertainty(equal_frequency_bins(column, bins), td.y);
    }
    return scores;
}

inline std::vector<double> relieff_scores(const TrainingData &td, std::size_t k) {
    const std::size_t m = td.rows;
    const std::size_t d = td.cols;
    std::vector<double> inv_range(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
        double lo = td.at(0, j);
        double hi = lo;
        for (std::size_t r = 1; r < m; ++r) {
            lo = std::min(lo, td.at(r, j));
            hi = std::max(hi, td.at(r, j));
        }
        inv_range[j] = hi > lo ? 1.0 / (hi - lo) : 0.0;
    }
    std::vector<double> z(m * d);
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t j = 0; j < d; ++j) {
            z[r * d + j] = td.at(r, j) * inv_range[j];
        }
    }
    std::vector<double> dist(m * m, 0.0);
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = a + 1; b < m; ++b) {
            double acc = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                acc += std::abs(z[a * d + j] - z[b * d + j]);
            }
            dist[a * m + b] = acc;
            dist[b * m + a] = acc;
        }
    }
    const auto counts = td.class_counts();
    std::vector<double> w(d, 0.0);
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t ci = td.y[i];
        const double p_other = 1.0 - static_cast<double>(counts[ci]) / static_cast<double>(m);
        for (std::size_t c = 0; c < td.classes; ++c) {
            if (counts[c] == 0) {
                continue;
            }
            candidates.clear();
            for (std::size_t r = 0; r < m; ++r) {
                if (r != i && td.y[r] == c) {
                    candidates.push_back(r);
                }
            }
            if (candidates.empty()) {
                continue;
            }
            const std::size_t take = std::min(k, candidates.size());
            std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take), candidates.end(), [&](std::size_t a, std::size_t b) {
                const double da = dist[i * m + a];
                const double db = dist[i * m + b];
                return da != db ? da < db : a < b;
            });
            double factor = 0.0;
            if (c == ci) {
                factor = -1.0;
            } else if (p_other > 0.0) {
                factor = static_cast<double>(counts[c]) / static_cast<double>(m) / p_other;
            }
            factor /= static_cast<double>(m) * static_cast<double>(take);
            for (std::size_t t = 0; t < take; ++t) {
                const std::size_t r = candidates[t];
                for (std::size_t j = 0; j < d; ++j) {
                    w[j] += factor * std::abs(z[i * d + j] - z[r * d + j]);
                }
            }
        }
    }
    return w;
}

/// z-scores every column (sample standard deviation; constant columns become 0).
inline TrainingData standardized(const TrainingData &td) {
    TrainingData out = td;
    for (std::size_t j = 0; j < td.cols; ++j) {
        double mean = 0.0;
        for (std::size_t r = 0; r < td.rows; ++r) {
            mean += td.at(r, j);
        }
        mean /= static_cast<double>(td.rows);
        double ss = 0.0;
        for (std::size_t r = 0; r < td.rows; ++r) {
            ss += (td.at(r, j) - mean) * (td.at(r, j) - mean);
        }
        const double sd = td.rows > 1 ? std::sqrt(ss / static_cast<double>(td.rows - 1)) : 0.0;
        for (std::size_t r = 0; r < td.rows; ++r) {
            out.x[r * td.cols + j] = sd > 0.0 ? (td.at(r, j) - mean) / sd : 0.0;
        }
    }
    return out;
}

/// |w| of linear SVMs on the given columns, summed over one-vs-one machines.
inline std::vector<double> linear_svm_weights(const TrainingData &z, std::span<const std::size_t> cols, const RankerParams &p) {
    const std::size_t m = z.rows;
    std::vector<double> w(cols.size(), 0.0);
    const auto present = present_classes(z);
    for (std::size_t a = 0; a < present.size(); ++a) {
        for (std::size_t b = a + 1; b < present.size(); ++b) {
            std::vector<std::size_t> rows;
            std::vector<double> y;
            for (std::size_t r = 0; r < m; ++r) {
                if (z.y[r] == present[a] || z.y[r] == present[b]) {
                    rows.push_back(r);
                    y.push_back(z.y[r] == present[a] ? 1.0 : -1.0);
                }
            }
            const std::size_t k = rows.size();
            std::vector<double> gram(k * k, 0.0);
            for (std::size_t i = 0; i < k; ++i) {
                for (std::size_t t = i; t < k; ++t) {
                    double acc = 0.0;
                    for (const std::size_t c : cols) {
                        acc += z.at(rows[i], c) * z.at(rows[t], c);
                    }
                    gram[i * k + t] = acc;
                    gram[t * k + i] = acc;
                }
            }
            const SmoResult sol = solve_smo(gram, y, p.svm_c, p.svm_tol, p.svm_max_iter);
            std::vector<double> machine(cols.size(), 0.0);
            for (std::size_t i = 0; i < k; ++i) {
                if (sol.alpha[i] > 0.0) {
                    for (std::size_t c = 0; c < cols.size(); ++c) {
                        machine[c] += sol.alpha[i] * y[i] * z.at(rows[i], cols[c]);
                    }
                }
            }
            for (std::size_t c = 0; c < cols.size(); ++c) {
                w[c] += std::abs(machine[c]);
            }
        }
    }
    return w;
}

inline std::vector<double> rfe_scores(const TrainingData &td, const RankerParams &p) {
    const TrainingData z = standardized(td);
    const std::size_t n = td.cols;
    const EliminationChunk chunk = p.rfe_chunk ? p.rfe_chunk : EliminationChunk([floor = p.rfe_halving_floor](std::size_t active) {
        return active > floor ? active / 2 : std::size_t{ 1 };
    });
    std::vector<std::size_t> active(n);
    std::iota(active.begin(), active.end(), std::size_t{ 0 });
    // features in elimination order, worst first
    std::vector<std::size_t> eliminated;
    while (active.size() > 1) {
        const auto w = linear_svm_weights(z, active, p);
        std::vector<std::size_t> pos(active.size());
        std::iota(pos.begin(), pos.end(), std::size_t{ 0 });
        // weakest first; among equal weights the higher index goes first
        std::stable_sort(pos.begin(), pos.end(), [&](std::size_t a, std::size_t b) {
            return w[a] != w[b] ? w[a] < w[b] : active[a] > active[b];
        });
        const std::size_t drop = std::clamp<std::size_t>(chunk(active.size()), 1, active.size() - 1);
        std::vector<char> gone(active.size(), 0);
        for (std::size_t i = 0; i < drop; ++i) {
            eliminated.push_back(active[pos[i]]);
            gone[pos[i]] = 1;
        }
        std::vector<std::size_t> next;
        for (std::size_t i = 0; i < active.size(); ++i) {
            if (gone[i] == 0) {
                next.push_back(active[i]);
            }
        }
        active = std::move(next);
    }
    eliminated.insert(eliminated.end(), active.begin(), active.end());
    std::vector<double> scores(n);
    for (std::size_t i = 0; i < eliminated.size(); ++i) {
        scores[eliminated[i]] = static_cast<double>(i + 1);
    }
    return scores;
}

}  // namespace detail

/// Scores every feature of the given probe rows.  Rows are canonicalized first,
/// so the ranking does not depend on their order.
[[nodiscard]] inline RankedList rank_features(const RankerKind &kind, const Dataset &data, std::span<const std::size_t> rows, std::uint64_t seed) {
    std::vector<std::size_t> cols(data.dim());
    std::iota(cols.begin(), cols.end(), std::size_t{ 0 });
    const auto td = detail::make_training_data(data, rows, cols);
    if (detail::present_classes(td).size() < 2) {
        throw data_error("cannot rank features of a probe with a single class");
    }
    std::vector<double> scores;
    switch (kind.tag) {
        case RankerTag::SU: scores = detail::su_scores(td, kind.params.su_bins); break;
        case RankerTag::RELIEFF: scores = detail::relieff_scores(td, kind.params.relieff_k); break;
        case RankerTag::RF_IMP: {
            Hyperparams hp;
            hp.rf_trees = kind.params.rf_trees;
            scores.assign(td.cols, 0.0);
            (void)detail::fit_forest(td, hp, derive_seed(seed, "rf_importance"), &scores);
            for (double &s : scores) {
                s /= static_cast<double>(hp.rf_trees);
            }
            break;
        }
        case RankerTag::SVM_W: scores = detail::linear_svm_weights(detail::standardized(td), cols, kind.params); break;
        case RankerTag::SVM_RFE: scores = detail::rfe_scores(td, kind.params); break;
    }
    return ranked_from_scores(scores);
}

[[nodiscard]] inline RankedList rank_features(const RankerKind &kind, const Dataset &probe, std::uint64_t seed) {
    std::vector<std::size_t> rows(probe.size());
    std::iota(rows.begin(), rows.end(), std::size_t{ 0 });
    return rank_features(kind, probe, rows, seed);
}

}  // namespace fsaudit

#endif  // FSAUDIT_RANKERS_HPP_
