#ifndef FSAUDIT_DATASET_HPP_
#define FSAUDIT_DATASET_HPP_
#pragma once

#include "fsaudit/common.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace fsaudit {

/// Ordered list of column indices into a Dataset.  Order is significant for
/// reporting (rank order); models treat it as a set.
class FeatureSubset {
  public:
    FeatureSubset() = default;
    explicit FeatureSubset(std::vector<std::size_t> indices) : indices_{ std::move(indices) } {}
    FeatureSubset(std::initializer_list<std::size_t> indices) : indices_{ indices } {}

    [[nodiscard]] static FeatureSubset all(std::size_t n) {
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) {
            idx[i] = i;
        }
        return FeatureSubset{ std::move(idx) };
    }

    [[nodiscard]] std::size_t size() const noexcept { return indices_.size(); }
    [[nodiscard]] bool empty() const noexcept { return indices_.empty(); }
    [[nodiscard]] std::size_t operator[](std::size_t i) const { return indices_[i]; }
    [[nodiscard]] auto begin() const noexcept { return indices_.begin(); }
    [[nodiscard]] auto end() const noexcept { return indices_.end(); }
    [[nodiscard]] const std::vector<std::size_t> &indices() const noexcept { return indices_; }

    /// Same features in ascending index order.
    [[nodiscard]] FeatureSubset sorted() const {
        auto idx = indices_;
        std::sort(idx.begin(), idx.end());
        return FeatureSubset{ std::move(idx) };
    }

    friend bool operator==(const FeatureSubset &, const FeatureSubset &) = default;

  private:
    std::vector<std::size_t> indices_;
};

/// Labelled numeric instance matrix.  Rows are instances, columns features.
/// Immutable after construction.
class Dataset {
  public:
    Dataset() = default;

    Dataset(std::string name,
            std::size_t rows,
            std::size_t cols,
            std::vector<double> values,
            std::vector<std::size_t> labels,
            std::vector<std::string> feature_names,
            std::vector<std::string> class_names,
            std::string label_name = "class") :
        name_{ std::move(name) },
        rows_{ rows },
        cols_{ cols },
        values_{ std::move(values) },
        labels_{ std::move(labels) },
        feature_names_{ std::move(feature_names) },
        class_names_{ std::move(class_names) },
        label_name_{ std::move(label_name) } {
        if (rows_ < 2) {
            throw data_error{ "dataset '" + name_ + "' needs at least 2 rows" };
        }
        if (cols_ < 1) {
            throw data_error{ "dataset '" + name_ + "' needs at least 1 feature" };
        }
        if (values_.size() != rows_ * cols_) {
            throw data_error{ "dataset '" + name_ + "': value count does not match rows x cols" };
        }
        if (labels_.size() != rows_) {
            throw data_error{ "dataset '" + name_ + "': label count does not match row count" };
        }
        if (feature_names_.size() != cols_) {
            throw data_error{ "dataset '" + name_ + "': feature name count does not match column count" };
        }
        if (class_names_.empty()) {
            throw data_error{ "dataset '" + name_ + "' has no classes" };
        }
        for (const std::size_t l : labels_) {
            if (l >= class_names_.size()) {
                throw data_error{ "dataset '" + name_ + "': label index out of range" };
            }
        }
        for (const double v : values_) {
            if (!std::isfinite(v)) {
                throw data_error{ "dataset '" + name_ + "' contains a non-finite value" };
            }
        }
    }

    /// Builds a dataset from string labels; classes are ordered by name.
    [[nodiscard]] static Dataset from_string_labels(std::string name,
                                                    std::size_t rows,
                                                    std::size_t cols,
                                                    std::vector<double> values,
                                                    const std::vector<std::string> &labels,
                                                    std::vector<std::string> feature_names,
                                                    std::string label_name = "class") {
        const std::set<std::string> distinct(labels.begin(), labels.end());
        std::vector<std::string> class_names(distinct.begin(), distinct.end());
        std::vector<std::size_t> idx;
        idx.reserve(labels.size());
        for (const auto &l : labels) {
            idx.push_back(static_cast<std::size_t>(std::lower_bound(class_names.begin(), class_names.end(), l) - class_names.begin()));
        }
        return Dataset{ std::move(name), rows, cols, std::move(values), std::move(idx), std::move(feature_names), std::move(class_names), std::move(label_name) };
    }

    [[nodiscard]] const std::string &name() const noexcept { return name_; }
    /// Number of instances (N).
    [[nodiscard]] std::size_t size() const noexcept { return rows_; }
    /// Number of features (n).
    [[nodiscard]] std::size_t dim() const noexcept { return cols_; }
    [[nodiscard]] std::size_t class_count() const noexcept { return class_names_.size(); }

    [[nodiscard]] double value(std::size_t row, std::size_t col) const { return values_[row * cols_ + col]; }
    [[nodiscard]] std::span<const double> row(std::size_t r) const { return { values_.data() + r * cols_, cols_ }; }
    [[nodiscard]] std::size_t label(std::size_t r) const { return labels_[r]; }
    [[nodiscard]] const std::vector<std::size_t> &labels() const noexcept { return labels_; }
    [[nodiscard]] const std::vector<double> &values() const noexcept { return values_; }
    [[nodiscard]] const std::vector<std::string> &feature_names() const noexcept { return feature_names_; }
    [[nodiscard]] const std::vector<std::string> &class_names() const noexcept { return class_names_; }
    [[nodiscard]] const std::string &label_name() const noexcept { return label_name_; }

    [[nodiscard]] std::vector<std::size_t> class_counts() const {
        std::vector<std::size_t> counts(class_names_.size(), 0);
        for (const std::size_t l : labels_) {
            ++counts[l];
        }
        return counts;
    }

    /// Rows of this dataset, in the given order, keeping the class list.
    [[nodiscard]] Dataset select_rows(std::span<const std::size_t> rows) const {
        std::vector<double> values;
        values.reserve(rows.size() * cols_);
        std::vector<std::size_t> labels;
        labels.reserve(rows.size());
        for (const std::size_t r : rows) {
            const auto src = row(r);
            values.insert(values.end(), src.begin(), src.end());
            labels.push_back(labels_[r]);
        }
        return Dataset{ name_, rows.size(), cols_, std::move(values), std::move(labels), feature_names_, class_names_, label_name_ };
    }

    /// Copy of this dataset without row `skip`.
    [[nodiscard]] Dataset without_row(std::size_t skip) const {
        std::vector<std::size_t> keep;
        keep.reserve(rows_ - 1);
        for (std::size_t r = 0; r < rows_; ++r) {
            if (r != skip) {
                keep.push_back(r);
            }
        }
        return select_rows(keep);
    }

    friend bool operator==(const Dataset &, const Dataset &) = default;

  private:
    std::string name_;
    std::size_t rows_{ 0 };
    std::size_t cols_{ 0 };
    std::vector<double> values_;
    std::vector<std::size_t> labels_;
    std::vector<std::string> feature_names_;
    std::vector<std::string> class_names_;
    std::string label_name_{ "class" };
};

/// Probe sample Z and the withheld remainder used as the population proxy.
struct SplitPair {
    Dataset probe;
    Dataset holdout;
    std::vector<std::size_t> probe_rows;
    std::vector<std::size_t> holdout_rows;
};

// ---------------------------------------------------------------------------
// CSV ingestion
// ---------------------------------------------------------------------------

/// Which CSV column carries the class label.
struct LabelColumn {
    struct last {};
    std::variant<last, std::size_t, std::string> which{ last{} };

    /// Parses "last", a 0-based index, or a header name.
    [[nodiscard]] static LabelColumn parse(std::string_view text) {
        if (text.empty() || text == "last") {
            return {};
        }
        std::size_t idx = 0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), idx);
        if (ec == std::errc{} && ptr == text.data() + text.size()) {
            return LabelColumn{ idx };
        }
        return LabelColumn{ std::string{ text } };
    }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.emplace_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    cells.emplace_back(trim(cur));
    return cells;
}

inline bool parse_real(std::string_view s, double &out) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
    }
    if (s.empty()) {
        return false;
    }
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size() && std::isfinite(out);
}

inline std::string format_real(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

}  // namespace detail

/// Parses a header-first, comma-separated table.  Rows and columns in error
/// messages are 1-based (row 1 is the first data row).
[[nodiscard]] inline Dataset read_csv(std::istream &in, const std::string &name, const LabelColumn &label_column = {}) {
    std::string line;
    if (!std::getline(in, line)) {
        throw data_error{ name + ": missing header row" };
    }
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF && static_cast<unsigned char>(line[1]) == 0xBB && static_cast<unsigned char>(line[2]) == 0xBF) {
        line.erase(0, 3);
    }
    const auto header = detail::split_csv_line(line);
    const std::size_t width = header.size();
    if (width < 2) {
        throw data_error{ name + ": need at least one feature column and a label column" };
    }

    std::size_t label_idx = width - 1;
    if (const auto *idx = std::get_if<std::size_t>(&label_column.which)) {
        if (*idx >= width) {
            throw data_error{ name + ": label column index " + std::to_string(*idx) + " out of range" };
        }
        label_idx = *idx;
    } else if (const auto *col = std::get_if<std::string>(&label_column.which)) {
        const auto it = std::find(header.begin(), header.end(), *col);
        if (it == header.end()) {
            throw data_error{ name + ": no column named '" + *col + "'" };
        }
        label_idx = static_cast<std::size_t>(it - header.begin());
    }

    std::vector<std::string> feature_names;
    for (std::size_t c = 0; c < width; ++c) {
        if (c != label_idx) {
            feature_names.push_back(header[c]);
        }
    }
    {
        std::set<std::string> seen;
        for (const auto &f : feature_names) {
            if (!seen.insert(f).second) {
                throw data_error{ name + ": duplicate feature name '" + f + "'" };
            }
        }
    }

    std::vector<double> values;
    std::vector<std::string> labels;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (detail::trim(line).empty()) {
            continue;
        }
        ++row;
        const auto cells = detail::split_csv_line(line);
        if (cells.size() != width) {
            throw data_error{ name + ": row " + std::to_string(row) + " has " + std::to_string(cells.size()) + " cells, expected " + std::to_string(width) };
        }
        for (std::size_t c = 0; c < width; ++c) {
            if (c == label_idx) {
                if (cells[c].empty()) {
                    throw data_error{ name + ": missing label at row " + std::to_string(row) };
                }
                labels.push_back(cells[c]);
                continue;
            }
            double v = 0.0;
            if (!detail::parse_real(cells[c], v)) {
                throw data_error{ name + ": non-numeric value at (" + std::to_string(row) + ", " + std::to_string(c + 1) + ")" };
            }
            values.push_back(v);
        }
    }
    if (row < 2) {
        throw data_error{ name + ": need at least 2 data rows" };
    }
    const std::string label_name = header[label_idx];
    auto data = Dataset::from_string_labels(name, row, width - 1, std::move(values), labels, std::move(feature_names), label_name);
    if (data.class_count() < 2) {
        throw data_error{ name + ": fewer than 2 classes" };
    }
    return data;
}

/// Dataset name defaults to the file stem.
[[nodiscard]] inline Dataset load_csv(const std::string &path, const LabelColumn &label_column = {}, std::string name = {}) {
    std::ifstream in{ path };
    if (!in) {
        throw data_error{ "cannot open '" + path + "'" };
    }
    if (name.empty()) {
        const auto slash = path.find_last_of("/\\");
        name = path.substr(slash == std::string::npos ? 0 : slash + 1);
        if (const auto dot = name.rfind('.'); dot != std::string::npos && dot > 0) {
            name.erase(dot);
        }
    }
    return read_csv(in, name, label_column);
}

/// Writes features then the label column; reals use shortest round-trip form.
inline void write_csv(std::ostream &out, const Dataset &d) {
    for (std::size_t c = 0; c < d.dim(); ++c) {
        out << d.feature_names()[c] << ',';
    }
    out << d.label_name() << '\n';
    for (std::size_t r = 0; r < d.size(); ++r) {
        for (std::size_t c = 0; c < d.dim(); ++c) {
            out << detail::format_real(d.value(r, c)) << ',';
        }
        out << d.class_names()[d.label(r)] << '\n';
    }
}

inline void save_csv(const std::string &path, const Dataset &d) {
    std::ofstream out{ path };
    if (!out) {
        throw data_error{ "cannot write '" + path + "'" };
    }
    write_csv(out, d);
}

// ---------------------------------------------------------------------------
// Restriction and sampling
// ---------------------------------------------------------------------------

/// Keeps the two most frequent classes; equal counts are resolved by class name.
[[nodiscard]] inline Dataset restrict_to_top2_classes(const Dataset &d) {
    if (d.class_count() < 2) {
        throw data_error{ d.name() + ": fewer than 2 classes" };
    }
    const auto counts = d.class_counts();
    std::vector<std::size_t> order(d.class_count());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    // class_names are sorted, so index order is name order
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return counts[a] > counts[b]; });
    const std::size_t first = std::min(order[0], order[1]);
    const std::size_t second = std::max(order[0], order[1]);

    std::vector<double> values;
    std::vector<std::size_t> labels;
    for (std::size_t r = 0; r < d.size(); ++r) {
        const std::size_t l = d.label(r);
        if (l != first && l != second) {
            continue;
        }
        const auto src = d.row(r);
        values.insert(values.end(), src.begin(), src.end());
        labels.push_back(l == first ? 0 : 1);
    }
    const std::size_t n = labels.size();
    return Dataset{ d.name(), n, d.dim(), std::move(values), std::move(labels), d.feature_names(), { d.class_names()[first], d.class_names()[second] }, d.label_name() };
}

/// Draws `per_class` rows of every class without replacement; the rest is the holdout.
[[nodiscard]] inline SplitPair stratified_split(const Dataset &d, std::size_t per_class, std::uint64_t seed) {
    const auto counts = d.class_counts();
    for (std::size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] <= per_class) {
            throw data_error{ d.name() + ": class '" + d.class_names()[c] + "' has " + std::to_string(counts[c]) + " instances; need more than " + std::to_string(per_class) };
        }
    }
    rng gen{ derive_seed(seed, "stratified_split") };
    std::vector<char> in_probe(d.size(), 0);
    for (std::size_t c = 0; c < counts.size(); ++c) {
        std::vector<std::size_t> members;
        for (std::size_t r = 0; r < d.size(); ++r) {
            if (d.label(r) == c) {
                members.push_back(r);
            }
        }
        // partial Fisher-Yates: first per_class slots
        for (std::size_t i = 0; i < per_class; ++i) {
            std::swap(members[i], members[i + gen.below(members.size() - i)]);
            in_probe[members[i]] = 1;
        }
    }
    SplitPair out;
    for (std::size_t r = 0; r < d.size(); ++r) {
        (in_probe[r] ? out.probe_rows : out.holdout_rows).push_back(r);
    }
    out.probe = d.select_rows(out.probe_rows);
    out.holdout = d.select_rows(out.holdout_rows);
    return out;
}

// ---------------------------------------------------------------------------
// Synthetic data
// ---------------------------------------------------------------------------

enum class PairMode { ldc_wins, nn_wins };

namespace detail {

inline Dataset finish_planar(std::string name, std::vector<std::pair<double, double>> uv, std::vector<std::size_t> labels, std::uint64_t seed) {
    // rotate by 45 degrees so neither axis alone separates the classes, then
    // apply a seed-dependent scale, offset and row order
    rng gen{ derive_seed(seed, name) };
    const double scale = 1.0 + gen.unit();
    const double ox = 10.0 * (gen.unit() - 0.5);
    const double oy = 10.0 * (gen.unit() - 0.5);
    std::vector<std::size_t> order(uv.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    gen.shuffle(order);
    const double c = std::numbers::sqrt2 / 2.0;
    std::vector<double> values;
    std::vector<std::size_t> out_labels;
    for (const std::size_t i : order) {
        const auto [u, v] = uv[i];
        values.push_back(ox + scale * c * (u - v));
        values.push_back(oy + scale * c * (u + v));
        out_labels.push_back(labels[i]);
    }
    const std::size_t n = out_labels.size();
    return Dataset{ std::move(name), n, 2, std::move(values), std::move(out_labels), { "x1", "x2" }, { "A", "B" } };
}

}  // namespace detail

/// Two-feature, two-class data where the better classifier depends on the
/// model family.  ldc_wins: two parallel rows of points, classes offset by a
/// small gap and interleaved along the row, so every nearest neighbour is of
/// the other class while a linear boundary separates the rows.  nn_wins: tight
/// same-class pairs laid out A B B A A B B A so both class means coincide and
/// each held-out point pulls its own class mean away from itself.
[[nodiscard]] inline Dataset generate_classifier_dependent_pair(PairMode mode, std::uint64_t seed) {
    std::vector<std::pair<double, double>> uv;
    std::vector<std::size_t> labels;
    if (mode == PairMode::ldc_wins) {
        constexpr std::size_t per_class = 10;
        constexpr double gap = 0.5;
        for (std::size_t i = 0; i < per_class; ++i) {
            uv.emplace_back(2.0 * static_cast<double>(i), 0.0);
            labels.push_back(0);
            uv.emplace_back(2.0 * static_cast<double>(i) + 1.0, gap);
            labels.push_back(1);
        }
        return detail::finish_planar("fig3_ldc_wins", std::move(uv), std::move(labels), seed);
    }
    constexpr double half_pair = 0.45;
    constexpr std::size_t pattern[] = { 0, 1, 1, 0, 0, 1, 1, 0 };
    for (std::size_t k = 0; k < std::size(pattern); ++k) {
        uv.emplace_back(static_cast<double>(k), half_pair);
        labels.push_back(pattern[k]);
        uv.emplace_back(static_cast<double>(k), -half_pair);
        labels.push_back(pattern[k]);
    }
    return detail::finish_planar("fig3_nn_wins", std::move(uv), std::move(labels), seed);
}

/// Two Gaussian classes with unit variances; class "pos" is shifted by `shift`
/// on the first `informative` features.
struct GaussianProblem {
    std::size_t per_class{ 20 };
    std::size_t features{ 20 };
    std::size_t informative{ 3 };
    double shift{ 1.0 };
};

[[nodiscard]] inline Dataset generate_gaussian_problem(const GaussianProblem &p, std::uint64_t seed, std::string name = "gauss") {
    rng gen{ derive_seed(seed, "gaussian_problem") };
    std::vector<double> values;
    std::vector<std::size_t> labels;
    values.reserve(2 * p.per_class * p.features);
    for (std::size_t i = 0; i < 2 * p.per_class; ++i) {
        const std::size_t cls = i % 2;
        for (std::size_t f = 0; f < p.features; ++f) {
            const double mean = (cls == 1 && f < p.informative) ? p.shift : 0.0;
            values.push_back(mean + gen.normal());
        }
        labels.push_back(cls);
    }
    std::vector<std::string> names;
    for (std::size_t f = 0; f < p.features; ++f) {
        names.push_back("g" + std::to_string(f + 1));
    }
    return Dataset{ std::move(name), 2 * p.per_class, p.features, std::move(values), std::move(labels), std::move(names), { "neg", "pos" } };
}

}  // namespace fsaudit

#endif  // FSAUDIT_DATASET_HPP_
