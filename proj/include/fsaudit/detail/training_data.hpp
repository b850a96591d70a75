#ifndef FSAUDIT_DETAIL_TRAINING_DATA_HPP_
#define FSAUDIT_DETAIL_TRAINING_DATA_HPP_
#pragma once

#include "fsaudit/dataset.hpp"

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

namespace fsaudit::detail {

/// Dense row-major copy of the training rows restricted to a column list.
/// Rows are stored in canonical order (label, then values lexicographically)
/// so every learner is insensitive to the order rows were supplied in.
struct TrainingData {
    std::size_t rows{ 0 };
    std::size_t cols{ 0 };
    std::size_t classes{ 0 };
    std::vector<double> x;
    std::vector<std::size_t> y;

    [[nodiscard]] const double *row(std::size_t r) const noexcept { return x.data() + r * cols; }
    [[nodiscard]] double at(std::size_t r, std::size_t c) const noexcept { return x[r * cols + c]; }

    [[nodiscard]] std::vector<std::size_t> class_counts() const {
        std::vector<std::size_t> counts(classes, 0);
        for (const std::size_t l : y) {
            ++counts[l];
        }
        return counts;
    }
};

inline TrainingData make_training_data(const Dataset &data, std::span<const std::size_t> rows, std::span<const std::size_t> cols) {
    std::vector<std::size_t> order(rows.begin(), rows.end());
    const auto less = [&](std::size_t a, std::size_t b) {
        if (data.label(a) != data.label(b)) {
            return data.label(a) < data.label(b);
        }
        for (const std::size_t c : cols) {
            const double va = data.value(a, c);
            const double vb = data.value(b, c);
            if (va != vb) {
                return va < vb;
            }
        }
        return false;
    };
    if (!std::is_sorted(order.begin(), order.end(), less)) {
        std::stable_sort(order.begin(), order.end(), less);
    }
    TrainingData td;
    td.rows = order.size();
    td.cols = cols.size();
    td.classes = data.class_count();
    td.x.resize(td.rows * td.cols);
    td.y.resize(td.rows);
    for (std::size_t i = 0; i < td.rows; ++i) {
        const auto src = data.row(order[i]);
        double *dst = td.x.data() + i * td.cols;
        for (std::size_t k = 0; k < td.cols; ++k) {
            dst[k] = src[cols[k]];
        }
        td.y[i] = data.label(order[i]);
    }
    return td;
}

}  // namespace fsaudit::detail

#endif  // FSAUDIT_DETAIL_TRAINING_DATA_HPP_
