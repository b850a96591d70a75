#ifndef FSAUDIT_DETAIL_TREE_HPP_
#define FSAUDIT_DETAIL_TREE_HPP_
#pragma once

#include "fsaudit/common.hpp"
#include "fsaudit/detail/training_data.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

namespace fsaudit::detail {

/// Binary decision tree over dense rows.  Internal nodes test
/// x[feature] <= threshold; leaves hold a normalized class distribution.
struct Tree {
    struct Node {
        std::int32_t feature{ -1 };
        double threshold{ 0.0 };
        std::uint32_t left{ 0 };
        std::uint32_t right{ 0 };
        std::uint32_t dist{ 0 };  ///< offset into `dists` for leaves
    };
    std::vector<Node> nodes;
    std::vector<double> dists;
    std::size_t classes{ 0 };

    [[nodiscard]] std::span<const double> leaf_distribution(const double *x) const {
        std::uint32_t n = 0;
        while (nodes[n].feature >= 0) {
            n = x[nodes[n].feature] <= nodes[n].threshold ? nodes[n].left : nodes[n].right;
        }
        return { dists.data() + nodes[n].dist, classes };
    }
};

/// Grows information-gain trees on weighted rows.  Columns are sorted once
/// per builder; every tree grown from it scans those orders, masking rows
/// outside the node being split.
class TreeBuilder {
  public:
    explicit TreeBuilder(const TrainingData &td)
        : td_{ td }, order_(td.cols * td.rows), values_(td.cols * td.rows), step_(td.cols * td.rows), xlogx_(td.rows + 2) {
        const std::size_t m = td.rows;
        std::vector<std::uint32_t> o(m);
        for (std::size_t c = 0; c < td.cols; ++c) {
            std::iota(o.begin(), o.end(), 0U);
            std::stable_sort(o.begin(), o.end(), [&](std::uint32_t a, std::uint32_t b) { return td.at(a, c) < td.at(b, c); });
            for (std::size_t p = 0; p < m; ++p) {
                order_[c * m + p] = o[p];
                values_[c * m + p] = td.at(o[p], c);
            }
            for (std::size_t p = 0; p + 1 < m; ++p) {
                step_[c * m + p] = values_[c * m + p + 1] > values_[c * m + p] ? 1 : 0;
            }
        }
        for (std::size_t i = 1; i < xlogx_.size(); ++i) {
            const auto v = static_cast<double>(i);
            xlogx_[i] = v * std::log(v);
        }
    }

    /// `weights` are per-row multiplicities; `mtry` candidate features per node
    /// (all features when mtry >= cols, in column order).  `importance`, when
    /// given, accumulates weighted gain per column.
    Tree grow(std::span<const double> weights, std::size_t mtry, std::size_t min_split, rng *gen, std::vector<double> *importance) const {
        const std::size_t m = td_.rows;
        const std::size_t k = td_.classes;
        Tree tree;
        tree.classes = k;
        node_of_.assign(m, -1);
        double root_weight = 0.0;
        bool integral = true;
        std::uint32_t members = 0;
        for (std::size_t r = 0; r < m; ++r) {
            if (weights[r] > 0.0) {
                node_of_[r] = 0;
                root_weight += weights[r];
                integral = integral && weights[r] == std::floor(weights[r]);
                ++members;
            }
        }
        integral_ = integral && root_weight < static_cast<double>(xlogx_.size());
        if (integral_) {
            int_weight_.resize(m);
            for (std::size_t r = 0; r < m; ++r) {
                int_weight_[r] = static_cast<std::uint32_t>(weights[r]);
            }
        }
        tree.nodes.reserve(2 * members + 1);
        tree.dists.reserve((members + 1) * k);
        member_pos_.resize(m);
        tree.nodes.emplace_back();
        features_.resize(td_.cols);
        std::iota(features_.begin(), features_.end(), std::size_t{ 0 });

        pending_.assign(1, { 0, members });
        // Class weights per node, filled for the root here and for children
        // when their parent is split.
        node_counts_.assign((2 * members + 1) * k, 0.0);
        node_total_.assign(2 * members + 1, 0.0);
        for (std::size_t r = 0; r < m; ++r) {
            node_counts_[td_.y[r]] += weights[r];
            node_total_[0] += weights[r];
        }
        counts_.resize(k);
        left_.resize(k);
        right_.resize(k);
        auto &counts = counts_;
        auto &left = left_;
        auto &right = right_;
        while (!pending_.empty()) {
            const auto [id, size] = pending_.back();
            pending_.pop_back();
            const auto sid = static_cast<std::int32_t>(id);

            std::copy_n(node_counts_.begin() + static_cast<std::ptrdiff_t>(id * k), k, counts.begin());
            const double total = node_total_[id];
            const auto nonzero = std::count_if(counts.begin(), counts.end(), [](double c) { return c > 0.0; });
            std::int32_t best_feature = -1;
            std::size_t best_pos = 0;
            double best_gain = 1e-12;
            if (nonzero > 1 && total >= static_cast<double>(min_split)) {
                // Gain in nats is (impurity(parent) - impurity(left) - impurity(right)) / total
                // with impurity(n) = n log n - sum c log c.
                const double parent = impurity(counts, total);
                std::size_t candidates = td_.cols;
                if (mtry < td_.cols && gen != nullptr) {
                    for (std::size_t i = 0; i < mtry; ++i) {
                        std::swap(features_[i], features_[i + gen->below(td_.cols - i)]);
                    }
                    candidates = mtry;
                }
                const bool fast = integral_ && k == 2;
                double best_num = best_gain * total;
                for (std::size_t ci = 0; ci < candidates; ++ci) {
                    const std::size_t f = features_[ci];
                    const std::uint32_t *ord = order_.data() + f * m;
                    const std::uint8_t *step = step_.data() + f * m;
                    if (fast) {
                        scan_two_class(ord, values_.data() + f * m, sid, counts, parent, f, best_num, best_feature, best_pos);
                        continue;
                    }
                    std::fill(left.begin(), left.end(), 0.0);
                    double left_total = 0.0;
                    std::uint32_t seen = 0;
                    bool moved = false;
                    // A split is tried once per distinct left part: after the
                    // last member of a run of equal values, while members remain.
                    for (std::size_t p = 0; p + 1 < m; ++p) {
                        const std::uint32_t r = ord[p];
                        const bool in = node_of_[r] == sid;
                        const double w = in ? weights[r] : 0.0;
                        left[td_.y[r]] += w;
                        left_total += w;
                        seen += in ? 1U : 0U;
                        moved = moved || in;
                        if (step[p] == 0 || !moved || seen == size) {
                            continue;
                        }
                        moved = false;
                        const double right_total = total - left_total;
                        for (std::size_t c = 0; c < k; ++c) {
                            right[c] = counts[c] - left[c];
                        }
                        const double gain = (parent - impurity(left, left_total) - impurity(right, right_total)) / total;
                        if (gain > best_gain) {
                            best_gain = gain;
                            best_feature = static_cast<std::int32_t>(f);
                            best_pos = p;
                        }
                    }
                }
                if (fast) {
                    best_gain = best_num / total;
                }
            }
            if (best_feature < 0) {
                tree.nodes[id].feature = -1;
                tree.nodes[id].dist = static_cast<std::uint32_t>(tree.dists.size());
                for (std::size_t c = 0; c < k; ++c) {
                    tree.dists.push_back(total > 0.0 ? counts[c] / total : 0.0);
                }
                continue;
            }
            if (importance != nullptr) {
                (*importance)[static_cast<std::size_t>(best_feature)] += best_gain * total / root_weight;
            }
            const auto bf = static_cast<std::size_t>(best_feature);
            const std::uint32_t *ord = order_.data() + bf * m;
            const double *val = values_.data() + bf * m;
            // Threshold halfway between the nearest member values either side.
            std::size_t lo = best_pos;
            while (node_of_[ord[lo]] != sid) {
                --lo;
            }
            std::size_t hi = best_pos + 1;
            while (node_of_[ord[hi]] != sid) {
                ++hi;
            }
            const double a = val[lo];
            const double b = val[hi];
            double threshold = a + (b - a) / 2.0;
            if (!(threshold < b)) {
                threshold = a;
            }
            const auto l = static_cast<std::uint32_t>(tree.nodes.size());
            const auto rr = l + 1;
            tree.nodes.emplace_back();
            tree.nodes.emplace_back();
            tree.nodes[id].feature = best_feature;
            tree.nodes[id].threshold = threshold;
            tree.nodes[id].left = l;
            tree.nodes[id].right = rr;
            std::uint32_t left_size = 0;
            double *lc = node_counts_.data() + static_cast<std::size_t>(l) * k;
            double *rc = lc + k;
            for (std::size_t r = 0; r < m; ++r) {
                const bool in = node_of_[r] == sid;
                const bool goes_left = td_.at(r, bf) <= threshold;
                const double w = weights[r] * static_cast<double>(in);
                lc[td_.y[r]] += goes_left ? w : 0.0;
                rc[td_.y[r]] += goes_left ? 0.0 : w;
                const auto child = static_cast<std::int32_t>(goes_left ? l : rr);
                node_of_[r] = in ? child : node_of_[r];
                left_size += static_cast<std::uint32_t>(in && goes_left);
            }
            for (std::size_t c = 0; c < k; ++c) {
                node_total_[l] += lc[c];
                node_total_[rr] += rc[c];
            }
            pending_.push_back({ rr, size - left_size });
            pending_.push_back({ l, left_size });
        }
        return tree;
    }

  private:
    // Two classes with integer weights.  Node members are gathered first and
    // only boundaries between distinct member values are scored, which are
    // exactly the left parts the general scan visits.  `best_pos` is the last
    // member on the left, so the threshold search lands on the same pair.
    // `best_num` is gain * total.
    void scan_two_class(const std::uint32_t *ord, const double *val, std::int32_t sid, std::span<const double> counts, double parent, std::size_t f,
                        double &best_num, std::int32_t &best_feature, std::size_t &best_pos) const {
        const std::size_t m = td_.rows;
        std::uint32_t *pos = member_pos_.data();
        std::uint32_t cnt = 0;
        for (std::size_t p = 0; p < m; ++p) {
            pos[cnt] = static_cast<std::uint32_t>(p);
            cnt += static_cast<std::uint32_t>(node_of_[ord[p]] == sid);
        }
        const auto c0 = static_cast<std::uint32_t>(counts[0]);
        const auto c1 = static_cast<std::uint32_t>(counts[1]);
        const auto n = c0 + c1;
        const double *t = xlogx_.data();
        std::uint32_t lt = 0;
        std::uint32_t l1 = 0;
        for (std::uint32_t i = 0; i + 1 < cnt; ++i) {
            const std::uint32_t r = ord[pos[i]];
            lt += int_weight_[r];
            l1 += int_weight_[r] * static_cast<std::uint32_t>(td_.y[r]);
            const std::uint32_t l0 = lt - l1;
            const double num = parent - (t[lt] - t[l0] - t[l1]) - (t[n - lt] - t[c0 - l0] - t[c1 - l1]);
            if ((val[pos[i + 1]] > val[pos[i]] ? num : -1.0) > best_num) {
                best_num = num;
                best_feature = static_cast<std::int32_t>(f);
                best_pos = pos[i];
            }
        }
    }

    struct Pending {
        std::uint32_t id;
        std::uint32_t size;  ///< rows with positive weight in the node
    };

    [[nodiscard]] double xlogx(double v) const {
        if (integral_) {
            return xlogx_[static_cast<std::size_t>(v)];
        }
        return v > 0.0 ? v * std::log(v) : 0.0;
    }

    [[nodiscard]] double impurity(std::span<const double> counts, double total) const {
        if (integral_ && counts.size() == 2) {
            return xlogx_[static_cast<std::size_t>(total)] - xlogx_[static_cast<std::size_t>(counts[0])] - xlogx_[static_cast<std::size_t>(counts[1])];
        }
        double h = xlogx(total);
        for (const double c : counts) {
            h -= xlogx(c);
        }
        return h;
    }

    const TrainingData &td_;
    std::vector<std::uint32_t> order_;  ///< per column, rows by ascending value
    std::vector<double> values_;        ///< values in that order
    std::vector<std::uint8_t> step_;    ///< 1 where the next value is strictly larger
    std::vector<double> xlogx_;         ///< n log n for integer n
    mutable bool integral_{ true };
    mutable std::vector<std::int32_t> node_of_;
    mutable std::vector<std::uint32_t> member_pos_;
    mutable std::vector<std::uint32_t> int_weight_;
    mutable std::vector<std::size_t> features_;
    mutable std::vector<Pending> pending_;
    mutable std::vector<double> node_counts_;
    mutable std::vector<double> node_total_;
    mutable std::vector<double> counts_;
    mutable std::vector<double> left_;
    mutable std::vector<double> right_;
};

}  // namespace fsaudit::detail

#endif  // FSAUDIT_DETAIL_TREE_HPP_
