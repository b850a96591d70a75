#ifndef FSAUDIT_STATS_HPP_
#define FSAUDIT_STATS_HPP_
#pragma once

#include "fsaudit/common.hpp"
#include "fsaudit/harness.hpp"
#include "fsaudit/samplesize.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <vector>

namespace fsaudit {

/// Blocks in rows, treatments in columns, midranks within each row.
struct RankMatrix {
    std::size_t rows{ 0 };
    std::size_t cols{ 0 };
    std::vector<double> values;

    [[nodiscard]] double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
    [[nodiscard]] std::span<const double> row(std::size_t r) const { return { values.data() + r * cols, cols }; }
};

struct FriedmanResult {
    double statistic{ 0.0 };
    std::size_t dof{ 0 };
    double p_value{ 1.0 };
    std::size_t n_blocks{ 0 };
    std::size_t k_treatments{ 0 };
};

/// Ascending ranks starting at 1; equal values share the mean of their ranks.
[[nodiscard]] inline std::vector<double> midranks(std::span<const double> v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), std::size_t{ 0 });
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> out(v.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) {
            ++j;
        }
        const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t t = i; t <= j; ++t) {
            out[order[t]] = r;
        }
        i = j + 1;
    }
    return out;
}

/// Ranks each row of an error matrix (lower error gets rank 1).
[[nodiscard]] inline RankMatrix rank_rows(const std::vector<std::vector<double>> &errors) {
    if (errors.empty() || errors.front().empty()) {
        throw domain_error("cannot rank an empty matrix");
    }
    RankMatrix m;
    m.rows = errors.size();
    m.cols = errors.front().size();
    for (const auto &row : errors) {
        if (row.size() != m.cols) {
            throw domain_error("ragged error matrix");
        }
        if (std::any_of(row.begin(), row.end(), [](double x) { return std::isnan(x); })) {
            throw domain_error("error matrix has missing entries");
        }
        const auto r = midranks(row);
        m.values.insert(m.values.end(), r.begin(), r.end());
    }
    return m;
}

[[nodiscard]] inline std::vector<double> column_means(const RankMatrix &m) {
    std::vector<double> out(m.cols, 0.0);
    for (std::size_t r = 0; r < m.rows; ++r) {
        for (std::size_t c = 0; c < m.cols; ++c) {
            out[c] += m.at(r, c);
        }
    }
    for (double &x : out) {
        x /= static_cast<double>(m.rows);
    }
    return out;
}

/// Blocked Friedman test with the tie-corrected statistic
/// (k-1) [sum_j R_j^2 - b^2 k (k+1)^2 / 4] / [sum r^2 - b k (k+1)^2 / 4]
/// referred to chi-square with k-1 degrees of freedom.
[[nodiscard]] inline FriedmanResult friedman_test(const RankMatrix &m) {
    if (m.rows < 2 || m.cols < 2) {
        throw domain_error("friedman_test needs at least 2 blocks and 2 treatments");
    }
    const auto b = static_cast<double>(m.rows);
    const auto k = static_cast<double>(m.cols);
    std::vector<double> sums(m.cols, 0.0);
    double sq = 0.0;
    for (std::size_t r = 0; r < m.rows; ++r) {
        for (std::size_t c = 0; c < m.cols; ++c) {
            sums[c] += m.at(r, c);
            sq += m.at(r, c) * m.at(r, c);
        }
    }
    double sum_r2 = 0.0;
    for (const double s : sums) {
        sum_r2 += s * s;
    }
    const double centre = b * k * (k + 1.0) * (k + 1.0) / 4.0;
    const double denom = sq - centre;
    FriedmanResult res;
    res.dof = m.cols - 1;
    res.n_blocks = m.rows;
    res.k_treatments = m.cols;
    if (denom <= 1e-12 * centre) {
        return res;
    }
    res.statistic = std::max(0.0, (k - 1.0) * (sum_r2 - b * centre) / denom);
    res.p_value = std::clamp(chi2_sf(res.statistic, static_cast<unsigned>(res.dof)), 0.0, 1.0);
    return res;
}

/// The rank matrix restricted to `columns`, re-ranked within each row.
[[nodiscard]] inline RankMatrix restrict_columns(const RankMatrix &m, std::span<const std::size_t> columns) {
    std::vector<std::vector<double>> sub(m.rows, std::vector<double>(columns.size()));
    for (std::size_t r = 0; r < m.rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            sub[r][c] = m.at(r, columns[c]);
        }
    }
    return rank_rows(sub);
}

/// Treatments in ascending average-rank order (ties by column index).
[[nodiscard]] inline std::vector<std::size_t> order_by_rank(std::span<const double> avg_ranks) {
    std::vector<std::size_t> order(avg_ranks.size());
    std::iota(order.begin(), order.end(), std::size_t{ 0 });
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return avg_ranks[a] < avg_ranks[b]; });
    return order;
}

/// Sequential prefix procedure: grow the prefix of best-ranked treatments
/// until the Friedman test on the prefix is significant at `alpha`; the group
/// is the last non-significant prefix (at least the best treatment).
[[nodiscard]] inline std::vector<std::size_t> best_group(std::span<const double> avg_ranks, const RankMatrix &ranks, double alpha) {
    if (avg_ranks.size() != ranks.cols) {
        throw domain_error("best_group: average ranks do not match the rank matrix");
    }
    const auto order = order_by_rank(avg_ranks);
    std::size_t size = 1;
    if (ranks.rows >= 2) {
        for (std::size_t m = 2; m <= order.size(); ++m) {
            const auto res = friedman_test(restrict_columns(ranks, std::span(order).first(m)));
            if (res.p_value < alpha) {
                break;
            }
            size = m;
        }
    }
    return { order.begin(), order.begin() + static_cast<std::ptrdiff_t>(size) };
}

// ---------------------------------------------------------------------------
// Rankings over grid records
// ---------------------------------------------------------------------------

enum class Metric { true_error, est_error };

[[nodiscard]] inline std::optional<double> metric_of(const RunRecord &r, Metric m) {
    if (r.failed()) {
        return std::nullopt;
    }
    return m == Metric::true_error ? r.true_error : r.est_error;
}

struct Combination {
    ClassifierTag classifier{ ClassifierTag::LDC };
    std::optional<RankerTag> ranker;
    SchemeTag selector{ SchemeTag::ALL };

    auto operator<=>(const Combination &) const = default;
    [[nodiscard]] std::string label() const {
        return std::string(to_string(classifier)) + "/" + (ranker ? std::string(to_string(*ranker)) + "/" : std::string{}) + std::string(to_string(selector));
    }
};

struct CombinationRank {
    Combination combination;
    double avg_rank{ 0.0 };
};

struct CombinationRanking {
    std::vector<CombinationRank> rows;  ///< ascending average rank
    std::size_t blocks_used{ 0 };
    std::size_t blocks_skipped{ 0 };
    std::vector<std::string> warnings;
};

/// Ranks every combination present in the records within each (dataset, run)
/// block and averages.  Blocks missing any combination are skipped.
[[nodiscard]] inline CombinationRanking combination_ranking(const std::vector<RunRecord> &records, Metric metric = Metric::true_error) {
    std::set<Combination> combos;
    std::map<std::pair<std::string, std::size_t>, std::map<Combination, double>> blocks;
    for (const auto &r : records) {
        const Combination c{ r.classifier, r.ranker, r.selector };
        combos.insert(c);
        if (const auto v = metric_of(r, metric)) {
            blocks[{ r.dataset, r.run }][c] = *v;
        } else {
            blocks[{ r.dataset, r.run }];
        }
    }
    const std::vector<Combination> list(combos.begin(), combos.end());
    CombinationRanking out;
    std::vector<std::vector<double>> matrix;
    for (const auto &[key, values] : blocks) {
        if (values.size() != list.size()) {
            ++out.blocks_skipped;
            continue;
        }
        std::vector<double> row;
        for (const auto &c : list) {
            row.push_back(values.at(c));
        }
        matrix.push_back(std::move(row));
    }
    out.blocks_used = matrix.size();
    if (out.blocks_skipped > 0) {
        out.warnings.push_back(std::to_string(out.blocks_skipped) + " incomplete (dataset, run) blocks skipped");
    }
    if (matrix.empty()) {
        out.warnings.emplace_back("no complete block; combination ranking is empty");
        return out;
    }
    const auto avg = column_means(rank_rows(matrix));
    for (const std::size_t i : order_by_rank(avg)) {
        out.rows.push_back({ list[i], avg[i] });
    }
    return out;
}

/// Average selector ranks for one (classifier, ranker) cell; the ALL column
/// reuses the classifier's ranker-free record of the same block.
struct SelectorCell {
    ClassifierTag classifier{ ClassifierTag::LDC };
    RankerTag ranker{ RankerTag::SU };
    std::vector<SchemeTag> selectors;
    std::vector<double> avg_ranks;  ///< aligned with selectors
    std::vector<std::size_t> best;  ///< indices into selectors
    FriedmanResult friedman;
    std::size_t blocks{ 0 };
};

struct SelectorTable {
    std::vector<SchemeTag> selectors;
    std::vector<SelectorCell> cells;
    std::vector<std::string> warnings;
};

[[nodiscard]] inline SelectorTable selector_rank_table(const std::vector<RunRecord> &records, double alpha = 0.05, Metric metric = Metric::true_error) {
    std::set<SchemeTag> sel_set;
    std::set<ClassifierTag> cls_set;
    std::set<RankerTag> rank_set;
    // (dataset, run, classifier, ranker-or-none, selector) -> value
    std::map<std::tuple<std::string, std::size_t, ClassifierTag, int, SchemeTag>, double> values;
    std::set<std::pair<std::string, std::size_t>> block_keys;
    for (const auto &r : records) {
        sel_set.insert(r.selector);
        cls_set.insert(r.classifier);
        if (r.ranker) {
            rank_set.insert(*r.ranker);
        }
        block_keys.insert({ r.dataset, r.run });
        if (const auto v = metric_of(r, metric)) {
            values[{ r.dataset, r.run, r.classifier, r.ranker ? static_cast<int>(*r.ranker) : -1, r.selector }] = *v;
        }
    }
    SelectorTable out;
    out.selectors.assign(sel_set.begin(), sel_set.end());
    for (const ClassifierTag c : cls_set) {
        for (const RankerTag rk : rank_set) {
            SelectorCell cell;
            cell.classifier = c;
            cell.ranker = rk;
            cell.selectors = out.selectors;
            std::vector<std::vector<double>> matrix;
            std::size_t skipped = 0;
            for (const auto &[ds, run] : block_keys) {
                std::vector<double> row;
                for (const SchemeTag s : out.selectors) {
                    const int rslot = s == SchemeTag::ALL ? -1 : static_cast<int>(rk);
                    const auto it = values.find({ ds, run, c, rslot, s });
                    if (it == values.end()) {
                        break;
                    }
                    row.push_back(it->second);
                }
                if (row.size() == out.selectors.size()) {
                    matrix.push_back(std::move(row));
                } else {
                    ++skipped;
                }
            }
            if (skipped > 0) {
                out.warnings.push_back(std::string(to_string(c)) + "/" + std::string(to_string(rk)) + ": " + std::to_string(skipped) + " incomplete blocks skipped");
            }
            cell.blocks = matrix.size();
            if (!matrix.empty()) {
                const auto ranks = rank_rows(matrix);
                cell.avg_ranks = column_means(ranks);
                cell.best = best_group(cell.avg_ranks, ranks, alpha);
                if (ranks.rows >= 2 && ranks.cols >= 2) {
                    cell.friedman = friedman_test(ranks);
                }
            }
            out.cells.push_back(std::move(cell));
        }
    }
    return out;
}

enum class Factor { classifier, ranker, selector };

/// Average rank of each level of `factor` per dataset, ranking within blocks
/// that fix every other factor plus (dataset, run).  Feeds the glyph plots.
struct FactorRanks {
    std::vector<std::string> datasets;
    std::vector<std::string> levels;
    std::vector<std::vector<double>> ranks;  ///< [level][dataset]
};

[[nodiscard]] inline FactorRanks factor_ranks(const std::vector<RunRecord> &records, Factor factor, Metric metric = Metric::true_error) {
    std::set<std::string> ds_set;
    std::set<int> level_set;
    // block key (dataset, run, other1, other2) -> level -> value
    using BlockKey = std::tuple<std::string, std::size_t, int, int>;
    std::map<BlockKey, std::map<int, double>> blocks;
    std::vector<const RunRecord *> all_records;
    for (const auto &r : records) {
        ds_set.insert(r.dataset);
        if (factor == Factor::ranker && !r.ranker) {
            continue;
        }
        const int c = static_cast<int>(r.classifier);
        const int rk = r.ranker ? static_cast<int>(*r.ranker) : -1;
        const int s = static_cast<int>(r.selector);
        int level = 0;
        BlockKey key;
        switch (factor) {
            case Factor::classifier:
                level = c;
                key = { r.dataset, r.run, rk, s };
                break;
            case Factor::ranker:
                level = rk;
                key = { r.dataset, r.run, c, s };
                break;
            case Factor::selector:
                level = s;
                key = { r.dataset, r.run, c, rk };
                break;
        }
        level_set.insert(level);
        if (const auto v = metric_of(r, metric)) {
            blocks[key][level] = *v;
        } else {
            blocks[key];
        }
    }
    if (factor == Factor::selector) {
        // the ALL record joins every ranker's block of its classifier
        std::vector<std::pair<BlockKey, double>> extra;
        for (const auto &[key, vals] : blocks) {
            if (std::get<3>(key) != -1) {
                continue;
            }
            for (const auto &[k2, v2] : blocks) {
                if (std::get<0>(k2) == std::get<0>(key) && std::get<1>(k2) == std::get<1>(key) && std::get<2>(k2) == std::get<2>(key) && std::get<3>(k2) != -1) {
                    for (const auto &[lvl, v] : vals) {
                        extra.emplace_back(k2, v);
                        (void)lvl;
                    }
                }
            }
        }
        for (const auto &[k, v] : extra) {
            blocks[k][static_cast<int>(SchemeTag::ALL)] = v;
        }
        std::erase_if(blocks, [](const auto &kv) { return std::get<3>(kv.first) == -1; });
    }
    FactorRanks out;
    out.datasets.assign(ds_set.begin(), ds_set.end());
    const std::vector<int> levels(level_set.begin(), level_set.end());
    for (const int l : levels) {
        switch (factor) {
            case Factor::classifier: out.levels.emplace_back(to_string(static_cast<ClassifierTag>(l))); break;
            case Factor::ranker: out.levels.emplace_back(to_string(static_cast<RankerTag>(l))); break;
            case Factor::selector: out.levels.emplace_back(to_string(static_cast<SchemeTag>(l))); break;
        }
    }
    std::map<std::string, std::vector<double>> sums;
    std::map<std::string, std::size_t> counts;
    for (const auto &[key, vals] : blocks) {
        if (vals.size() != levels.size()) {
            continue;
        }
        std::vector<double> row;
        for (const int l : levels) {
            row.push_back(vals.at(l));
        }
        const auto r = midranks(row);
        auto &s = sums[std::get<0>(key)];
        s.resize(levels.size(), 0.0);
        for (std::size_t i = 0; i < r.size(); ++i) {
            s[i] += r[i];
        }
        ++counts[std::get<0>(key)];
    }
    out.ranks.assign(levels.size(), std::vector<double>(out.datasets.size(), 0.0));
    for (std::size_t d = 0; d < out.datasets.size(); ++d) {
        const auto it = sums.find(out.datasets[d]);
        if (it == sums.end()) {
            continue;
        }
        for (std::size_t l = 0; l < levels.size(); ++l) {
            out.ranks[l][d] = it->second[l] / static_cast<double>(counts[out.datasets[d]]);
        }
    }
    return out;
}

}  // namespace fsaudit

#endif  // FSAUDIT_STATS_HPP_
