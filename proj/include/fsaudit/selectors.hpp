#ifndef FSAUDIT_SELECTORS_HPP_
#define FSAUDIT_SELECTORS_HPP_
#pragma once

#include "fsaudit/classifiers.hpp"
#include "fsaudit/common.hpp"
#include "fsaudit/dataset.hpp"
#include "fsaudit/estimators.hpp"
#include "fsaudit/rankers.hpp"

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace fsaudit {

enum class SchemeTag { ALL, TOP3, TOP10, TOP20, BEST3, EX10, RND20 };

inline constexpr std::array<SchemeTag, 7> all_scheme_tags{ SchemeTag::ALL,   SchemeTag::TOP3, SchemeTag::TOP10, SchemeTag::TOP20,
                                                           SchemeTag::BEST3, SchemeTag::EX10, SchemeTag::RND20 };

[[nodiscard]] constexpr std::string_view to_string(SchemeTag tag) noexcept {
    switch (tag) {
        case SchemeTag::ALL: return "ALL";
        case SchemeTag::TOP3: return "TOP3";
        case SchemeTag::TOP10: return "TOP10";
        case SchemeTag::TOP20: return "TOP20";
        case SchemeTag::BEST3: return "BEST3";
        case SchemeTag::EX10: return "EX10";
        case SchemeTag::RND20: return "RND20";
    }
    return "?";
}

[[nodiscard]] inline SchemeTag parse_scheme_tag(std::string_view s) {
    for (const SchemeTag t : all_scheme_tags) {
        if (to_string(t) == s) {
            return t;
        }
    }
    throw domain_error("unknown selection scheme '" + std::string(s) + "'");
}

/// How a ranked list becomes candidate subsets.  `pool` is the number of
/// top-ranked features the search draws from.
struct SelectionScheme {
    enum class Search { all, fixed, combinations, exhaustive, random };

    SchemeTag tag{ SchemeTag::ALL };
    Search search{ Search::all };
    std::size_t pool{ 0 };
    std::size_t k{ 0 };      ///< subset size for fixed and combinations
    std::size_t draws{ 0 };  ///< masks drawn by random search
    double inclusion{ 0.5 };

    [[nodiscard]] static SelectionScheme of(SchemeTag tag) {
        switch (tag) {
            case SchemeTag::ALL: return { tag, Search::all, 0, 0, 0, 0.5 };
            case SchemeTag::TOP3: return { tag, Search::fixed, 3, 3, 0, 0.5 };
            case SchemeTag::TOP10: return { tag, Search::fixed, 10, 10, 0, 0.5 };
            case SchemeTag::TOP20: return { tag, Search::fixed, 20, 20, 0, 0.5 };
            case SchemeTag::BEST3: return { tag, Search::combinations, 20, 3, 0, 0.5 };
            case SchemeTag::EX10: return { tag, Search::exhaustive, 10, 0, 0, 0.5 };
            case SchemeTag::RND20: return { tag, Search::random, 20, 0, 1024, 0.5 };
        }
        return {};
    }

    /// Exhaustive search over every subset of the top `pool` features.
    [[nodiscard]] static SelectionScheme exhaustive(std::size_t pool) { return { SchemeTag::EX10, Search::exhaustive, pool, 0, 0, 0.5 }; }

    /// Number of candidate subsets scored.
    [[nodiscard]] std::size_t budget() const noexcept {
        switch (search) {
            case Search::all:
            case Search::fixed: return 1;
            case Search::combinations: {
                std::size_t c = 1;
                for (std::size_t i = 0; i < k; ++i) {
                    c = c * (pool - i) / (i + 1);
                }
                return c;
            }
            case Search::exhaustive: return std::size_t{ 1 } << pool;
            case Search::random: return draws;
        }
        return 0;
    }

    [[nodiscard]] std::size_t required_features() const noexcept { return search == Search::all ? 0 : pool; }
};

struct SelectionResult {
    FeatureSubset subset;
    ErrorEstimate criterion;  ///< smoothed LOO of `subset`
    std::size_t evaluations{ 0 };
    std::size_t candidates_tied{ 0 };  ///< candidates sharing the minimum criterion
    std::size_t trainings{ 0 };        ///< fits actually performed (cache misses times N)
};

/// Memoized smoothed-LOO values.  Keys are (probe id, classifier kind, seed,
/// sorted subset); a cache may be shared by select calls on the same probe.
class CriterionCache {
  public:
    struct Hit {
        double value;
        bool cached;
    };

    template <typename Compute>
    Hit get_or_compute(std::uint64_t probe_id, const ClassifierKind &kind, std::uint64_t seed, const FeatureSubset &sorted_subset, Compute &&compute) {
        Key key{ probe_id, static_cast<int>(kind.tag), seed, sorted_subset.indices() };
        {
            const std::lock_guard lock(mutex_);
            if (const auto it = values_.find(key); it != values_.end()) {
                if (it->second.params == kind.params) {
                    return { it->second.value, true };
                }
            }
        }
        const double v = compute();
        const std::lock_guard lock(mutex_);
        values_.insert_or_assign(std::move(key), Entry{ v, kind.params });
        return { v, false };
    }

    [[nodiscard]] std::size_t size() const {
        const std::lock_guard lock(mutex_);
        return values_.size();
    }

  private:
    using Key = std::tuple<std::uint64_t, int, std::uint64_t, std::vector<std::size_t>>;
    struct Entry {
        double value;
        Hyperparams params;
    };
    mutable std::mutex mutex_;
    std::map<Key, Entry> values_;
};

/// Identifies a row selection of a dataset for cache keys.
[[nodiscard]] inline std::uint64_t probe_id(const Dataset &data, std::span<const std::size_t> rows) {
    std::uint64_t h = derive_seed(fnv1a64(data.name()), static_cast<std::uint64_t>(data.size()));
    for (const std::size_t r : rows) {
        h = derive_seed(h, static_cast<std::uint64_t>(r));
    }
    return h;
}

/// Index in [0, count) used to break ties that survive the cardinality rule.
[[nodiscard]] inline std::size_t tie_break_index(std::uint64_t seed, std::size_t count) {
    rng gen(derive_seed(seed, "selection_tie_break"));
    return gen.below(count);
}

/// Candidate subsets in scoring order.  Random masks come from a stream
/// derived from `seed`, so the same seed reproduces the same sequence.
[[nodiscard]] inline std::vector<FeatureSubset> candidate_subsets(const SelectionScheme &scheme, const RankedList &ranked, std::size_t n_features,
                                                                  std::uint64_t seed) {
    using Search = SelectionScheme::Search;
    if (ranked.size() < scheme.required_features()) {
        throw domain_error("scheme " + std::string(to_string(scheme.tag)) + " needs " + std::to_string(scheme.required_features()) + " ranked features, got " +
                           std::to_string(ranked.size()));
    }
    std::vector<FeatureSubset> out;
    const auto &top = ranked.order;
    switch (scheme.search) {
        case Search::all: out.push_back(FeatureSubset::all(n_features)); break;
        case Search::fixed: out.push_back(top_k(ranked, scheme.k)); break;
        case Search::combinations: {
            std::vector<std::size_t> pos(scheme.k);
            std::iota(pos.begin(), pos.end(), std::size_t{ 0 });
            while (true) {
                std::vector<std::size_t> s;
                for (const std::size_t p : pos) {
                    s.push_back(top[p]);
                }
                out.emplace_back(std::move(s));
                std::size_t i = scheme.k;
                while (i > 0 && pos[i - 1] == scheme.pool - scheme.k + i - 1) {
                    --i;
                }
                if (i == 0) {
                    break;
                }
                ++pos[i - 1];
                for (std::size_t j = i; j < scheme.k; ++j) {
                    pos[j] = pos[j - 1] + 1;
                }
            }
            break;
        }
        case Search::exhaustive: {
            const std::size_t total = std::size_t{ 1 } << scheme.pool;
            for (std::size_t mask = 0; mask < total; ++mask) {
                std::vector<std::size_t> s;
                for (std::size_t b = 0; b < scheme.pool; ++b) {
                    if (((mask >> b) & 1U) != 0U) {
                        s.push_back(top[b]);
                    }
                }
                out.emplace_back(std::move(s));
            }
            break;
        }
        case Search::random: {
            rng gen(derive_seed(seed, "random_subset_masks"));
            for (std::size_t i = 0; i < scheme.draws; ++i) {
                std::vector<std::size_t> s;
                for (std::size_t b = 0; b < scheme.pool; ++b) {
                    if (gen.bernoulli(scheme.inclusion)) {
                        s.push_back(top[b]);
                    }
                }
                out.emplace_back(std::move(s));
            }
            break;
        }
    }
    return out;
}

/// Scores every candidate of `scheme` by smoothed LOO over `rows` of `probe`
/// and returns the minimum.  Ties go to the smallest subset, then to a seeded
/// draw among the remaining candidates in candidate order.
[[nodiscard]] inline SelectionResult select(const SelectionScheme &scheme, const RankedList &ranked, const ClassifierKind &kind, const Dataset &probe,
                                            std::span<const std::size_t> rows, std::uint64_t seed, CriterionCache *cache = nullptr) {
    CriterionCache local;
    CriterionCache &memo = cache != nullptr ? *cache : local;
    const auto candidates = candidate_subsets(scheme, ranked, probe.dim(), seed);
    const std::uint64_t pid = probe_id(probe, rows);
    SelectionResult res;
    std::vector<double> values(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const FeatureSubset sorted = candidates[i].sorted();
        const auto hit = memo.get_or_compute(pid, kind, seed, sorted, [&] { return loo_errors(kind, probe, rows, sorted, seed).smoothed.value; });
        values[i] = hit.value;
        if (!hit.cached) {
            res.trainings += rows.size();
        }
    }
    res.evaluations = candidates.size();
    const double best = *std::min_element(values.begin(), values.end());
    std::size_t min_card = std::numeric_limits<std::size_t>::max();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (values[i] == best) {
            ++res.candidates_tied;
            min_card = std::min(min_card, candidates[i].size());
        }
    }
    std::vector<std::size_t> finalists;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (values[i] == best && candidates[i].size() == min_card) {
            finalists.push_back(i);
        }
    }
    const std::size_t pick = finalists.size() == 1 ? finalists.front() : finalists[tie_break_index(seed, finalists.size())];
    res.subset = candidates[pick];
    res.criterion = { best, EstimateKind::SLOO, rows.size(), 0 };
    return res;
}

[[nodiscard]] inline SelectionResult select(const SelectionScheme &scheme, const RankedList &ranked, const ClassifierKind &kind, const Dataset &probe,
                                            std::uint64_t seed, CriterionCache *cache = nullptr) {
    const auto rows = all_rows(probe.size());
    return select(scheme, ranked, kind, probe, rows, seed, cache);
}

struct RlooResult {
    ErrorEstimate estimate;
    FeatureSubset subset;  ///< selected on the whole probe
};

/// Proper leave-one-out: each fold ranks and selects on its own training part
/// and scores the held-out instance by counting.  `estimate.n_evaluations`
/// counts model trainings; `criterion_evaluations` counts scored candidates
/// (N budgets for the folds plus one for the final selection).
[[nodiscard]] inline RlooResult proper_rloo_error(const ClassifierKind &kind, const RankerKind &ranker, const SelectionScheme &scheme, const Dataset &probe,
                                                  std::uint64_t seed) {
    const std::size_t n = probe.size();
    if (n < 2) {
        throw data_error("leave-one-out needs at least two instances");
    }
    std::vector<std::size_t> train_rows;
    double wrong = 0.0;
    std::size_t criterion_evals = 0;
    std::size_t trainings = 0;
    for (std::size_t i = 0; i < n; ++i) {
        train_rows.clear();
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) {
                train_rows.push_back(j);
            }
        }
        RankedList ranked;
        if (scheme.search != SelectionScheme::Search::all) {
            ranked = rank_features(ranker, probe, train_rows, seed);
        }
        const auto sel = select(scheme, ranked, kind, probe, train_rows, seed);
        criterion_evals += sel.evaluations;
        trainings += sel.evaluations * train_rows.size() + 1;
        const auto model = train(kind, probe, train_rows, sel.subset, seed);
        wrong += predict_label_row(model, probe, i) != probe.label(i) ? 1.0 : 0.0;
    }
    RankedList ranked;
    if (scheme.search != SelectionScheme::Search::all) {
        ranked = rank_features(ranker, probe, seed);
    }
    const auto final_sel = select(scheme, ranked, kind, probe, seed);
    criterion_evals += final_sel.evaluations;
    trainings += final_sel.evaluations * n;
    return { { wrong / static_cast<double>(n), EstimateKind::RLOO, trainings, criterion_evals }, final_sel.subset };
}

}  // namespace fsaudit

#endif  // FSAUDIT_SELECTORS_HPP_
