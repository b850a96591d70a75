#ifndef FSAUDIT_CLASSIFIERS_HPP_
#define FSAUDIT_CLASSIFIERS_HPP_
#pragma once

#include "fsaudit/common.hpp"
#include "fsaudit/dataset.hpp"
#include "fsaudit/detail/smo.hpp"
#include "fsaudit/detail/training_data.hpp"
#include "fsaudit/detail/tree.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

namespace fsaudit {

enum class ClassifierTag { NN1, DT, LDC, NB, RF, SVMG, SVML };

inline constexpr std::array<ClassifierTag, 7> all_classifier_tags{ ClassifierTag::NN1, ClassifierTag::DT,   ClassifierTag::LDC, ClassifierTag::NB,
                                                                   ClassifierTag::RF,  ClassifierTag::SVMG, ClassifierTag::SVML };

[[nodiscard]] constexpr std::string_view to_string(ClassifierTag tag) noexcept {
    switch (tag) {
        case ClassifierTag::NN1: return "1NN";
        case ClassifierTag::DT: return "DT";
        case ClassifierTag::LDC: return "LDC";
        case ClassifierTag::NB: return "NB";
        case ClassifierTag::RF: return "RF";
        case ClassifierTag::SVMG: return "SVMG";
        case ClassifierTag::SVML: return "SVML";
    }
    return "?";
}

/// Accepts the printed names plus "NN1" as an alias of "1NN".
[[nodiscard]] inline ClassifierTag parse_classifier_tag(std::string_view s) {
    if (s == "NN1") {
        return ClassifierTag::NN1;
    }
    for (const ClassifierTag t : all_classifier_tags) {
        if (to_string(t) == s) {
            return t;
        }
    }
    throw domain_error("unknown classifier '" + std::string(s) + "'");
}

/// Tunables for every classifier kind.  Each kind reads only its own fields.
struct Hyperparams {
    double ldc_lambda{ 1e-3 };       ///< ridge as a fraction of the mean feature variance
    double nb_var_floor{ 1e-9 };     ///< variance floor as a fraction of the squared feature range
    std::size_t dt_min_split{ 2 };   ///< nodes with fewer instances become leaves (DT and RF)
    std::size_t rf_trees{ 100 };
    double svm_c{ 1.0 };
    double svm_tol{ 1e-3 };
    double svmg_gamma{ 0.0 };        ///< 0 selects 1 / |subset|
    std::size_t svm_max_iter{ 100000 };

    bool operator==(const Hyperparams &) const = default;
};

struct ClassifierKind {
    ClassifierTag tag{ ClassifierTag::LDC };
    Hyperparams params{};

    bool operator==(const ClassifierKind &) const = default;
};

/// Per-class probabilities ordered like the dataset's class names.
using PosteriorVector = std::vector<double>;

/// Index of the largest entry; ties go to the lower index.
[[nodiscard]] inline std::size_t argmax(std::span<const double> p) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < p.size(); ++i) {
        if (p[i] > p[best]) {
            best = i;
        }
    }
    return best;
}

namespace detail {

struct PriorState {
    std::vector<double> prior;
};

struct NearestNeighbourState {
    TrainingData td;
};

struct LdcState {
    std::vector<std::size_t> present;
    std::vector<double> log_prior;  // per present class
    Eigen::MatrixXd means;          // present x d
    Eigen::MatrixXd centered;       // m x d, rows minus their class mean
    Eigen::LLT<Eigen::MatrixXd> inner;
    double ridge{ 1.0 };
    bool identity{ false };
};

struct BayesState {
    std::vector<std::size_t> present;
    std::vector<double> log_prior;
    std::vector<std::size_t> active;  // columns with non-zero range
    std::vector<double> mean;         // present x active
    std::vector<double> var;
};

struct TreeState {
    Tree tree;
};

struct ForestState {
    std::vector<Tree> trees;
};

struct SvmMachine {
    std::size_t pos{ 0 };  // predicted when the decision value is >= 0
    std::size_t neg{ 0 };
    std::size_t rows{ 0 };
    std::vector<double> sv;  // support vectors, normalized, row-major
    std::vector<double> coef;
    std::vector<double> w;  // primal weights for the linear kernel
    double rho{ 0.0 };
};

struct SvmState {
    bool linear{ true };
    double gamma{ 1.0 };
    std::vector<double> lo;
    std::vector<double> scale;
    std::optional<std::size_t> single;
    std::vector<SvmMachine> machines;
};

using ModelState = std::variant<PriorState, NearestNeighbourState, LdcState, BayesState, TreeState, ForestState, SvmState>;

}  // namespace detail

/// A fitted classifier.  Columns are held in ascending feature-index order
/// internally, so the fitted state does not depend on the order of the subset.
class TrainedModel {
  public:
    [[nodiscard]] const ClassifierKind &kind() const noexcept { return kind_; }
    [[nodiscard]] const std::vector<std::string> &class_names() const noexcept { return class_names_; }
    [[nodiscard]] const FeatureSubset &subset() const noexcept { return subset_; }
    [[nodiscard]] std::size_t dim() const noexcept { return subset_.size(); }
    [[nodiscard]] bool prior_only() const noexcept { return std::holds_alternative<detail::PriorState>(state_); }

    // internal access for the free functions below
    [[nodiscard]] const std::vector<std::size_t> &sorted_columns() const noexcept { return cols_; }
    [[nodiscard]] const std::vector<std::size_t> &column_positions() const noexcept { return perm_; }
    [[nodiscard]] const detail::ModelState &state() const noexcept { return state_; }

    TrainedModel(ClassifierKind kind, std::vector<std::string> class_names, FeatureSubset subset, std::vector<std::size_t> cols, std::vector<std::size_t> perm,
                 detail::ModelState state)
        : kind_{ kind }, class_names_{ std::move(class_names) }, subset_{ std::move(subset) }, cols_{ std::move(cols) }, perm_{ std::move(perm) }, state_{ std::move(state) } {}

  private:
    ClassifierKind kind_;
    std::vector<std::string> class_names_;
    FeatureSubset subset_;
    std::vector<std::size_t> cols_;
    std::vector<std::size_t> perm_;  // cols_[k] == subset_[perm_[k]]
    detail::ModelState state_;
};

namespace detail {

inline std::vector<std::size_t> present_classes(const TrainingData &td) {
    const auto counts = td.class_counts();
    std::vector<std::size_t> present;
    for (std::size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] > 0) {
            present.push_back(c);
        }
    }
    return present;
}

inline void softmax_into(std::span<const double> scores, std::span<const std::size_t> classes, PosteriorVector &out) {
    double top = -std::numeric_limits<double>::infinity();
    for (const double s : scores) {
        top = std::max(top, s);
    }
    double total = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const double e = std::exp(scores[i] - top);
        out[classes[i]] = e;
        total += e;
    }
    for (const std::size_t c : classes) {
        out[c] /= total;
    }
}

inline PriorState fit_prior(const TrainingData &td) {
    PriorState s;
    s.prior.assign(td.classes, 0.0);
    for (const std::size_t l : td.y) {
        s.prior[l] += 1.0;
    }
    for (double &p : s.prior) {
        p /= static_cast<double>(td.rows);
    }
    return s;
}

inline LdcState fit_ldc(const TrainingData &td, const Hyperparams &hp) {
    if (!(hp.ldc_lambda > 0.0)) {
        throw domain_error("ldc_lambda must be positive");
    }
    LdcState s;
    const std::size_t m = td.rows;
    const std::size_t d = td.cols;
    s.present = present_classes(td);
    const auto counts = td.class_counts();
    const std::size_t cp = s.present.size();
    s.means = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(cp), static_cast<Eigen::Index>(d));
    std::vector<std::size_t> slot(td.classes, 0);
    for (std::size_t i = 0; i < cp; ++i) {
        slot[s.present[i]] = i;
        s.log_prior.push_back(std::log(static_cast<double>(counts[s.present[i]]) / static_cast<double>(m)));
    }
    for (std::size_t r = 0; r < m; ++r) {
        const auto k = static_cast<Eigen::Index>(slot[td.y[r]]);
        for (std::size_t j = 0; j < d; ++j) {
            s.means(k, static_cast<Eigen::Index>(j)) += td.at(r, j);
        }
    }
    for (std::size_t i = 0; i < cp; ++i) {
        s.means.row(static_cast<Eigen::Index>(i)) /= static_cast<double>(counts[s.present[i]]);
    }
    s.centered.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d));
    for (std::size_t r = 0; r < m; ++r) {
        const auto k = static_cast<Eigen::Index>(slot[td.y[r]]);
        for (std::size_t j = 0; j < d; ++j) {
            s.centered(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = td.at(r, j) - s.means(k, static_cast<Eigen::Index>(j));
        }
    }
    const double dof = m > cp ? static_cast<double>(m - cp) : static_cast<double>(m);
    const Eigen::VectorXd col_ss = s.centered.colwise().squaredNorm().transpose();
    const double trace = col_ss.sum() / dof;
    const auto n_eff = (col_ss.array() > 0.0).count();
    if (!(trace > 0.0) || n_eff == 0) {
        s.identity = true;
        return s;
    }
    s.ridge = hp.ldc_lambda * trace / static_cast<double>(n_eff);
    // (r I + U'U / dof)^-1 = (1/r) (I - U' (r dof I + U U')^-1 U)
    Eigen::MatrixXd inner = s.centered * s.centered.transpose();
    inner.diagonal().array() += s.ridge * dof;
    s.inner.compute(inner);
    return s;
}

inline void ldc_posterior(const LdcState &s, const double *x, std::size_t d, PosteriorVector &out) {
    std::vector<double> scores(s.present.size());
    const Eigen::Map<const Eigen::VectorXd> xv(x, static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < s.present.size(); ++i) {
        const Eigen::VectorXd z = xv - s.means.row(static_cast<Eigen::Index>(i)).transpose();
        double q = z.squaredNorm();
        if (!s.identity) {
            const Eigen::VectorXd v = s.centered * z;
            q = (q - v.dot(s.inner.solve(v))) / s.ridge;
        }
        scores[i] = -0.5 * q + s.log_prior[i];
    }
    softmax_into(scores, s.present, out);
}

inline BayesState fit_bayes(const TrainingData &td, const Hyperparams &hp) {
    BayesState s;
    const std::size_t m = td.rows;
    s.present = present_classes(td);
    const auto counts = td.class_counts();
    std::vector<double> floor;
    for (std::size_t j = 0; j < td.cols; ++j) {
        double lo = td.at(0, j);
        double hi = lo;
        for (std::size_t r = 1; r < m; ++r) {
            lo = std::min(lo, td.at(r, j));
            hi = std::max(hi, td.at(r, j));
        }
        if (hi > lo) {
            s.active.push_back(j);
            floor.push_back(hp.nb_var_floor * (hi - lo) * (hi - lo));
        }
    }
    const std::size_t a = s.active.size();
    s.mean.assign(s.present.size() * a, 0.0);
    s.var.assign(s.present.size() * a, 0.0);
    for (std::size_t i = 0; i < s.present.size(); ++i) {
        const std::size_t c = s.present[i];
        const auto cnt = static_cast<double>(counts[c]);
        s.log_prior.push_back(std::log(cnt / static_cast<double>(m)));
        for (std::size_t k = 0; k < a; ++k) {
            const std::size_t j = s.active[k];
            double sum = 0.0;
            for (std::size_t r = 0; r < m; ++r) {
                if (td.y[r] == c) {
                    sum += td.at(r, j);
                }
            }
            const double mu = sum / cnt;
            double ss = 0.0;
            for (std::size_t r = 0; r < m; ++r) {
                if (td.y[r] == c) {
                    ss += (td.at(r, j) - mu) * (td.at(r, j) - mu);
                }
            }
            const double v = counts[c] > 1 ? ss / (cnt - 1.0) : 0.0;
            s.mean[i * a + k] = mu;
            s.var[i * a + k] = std::max(v, floor[k]);
        }
    }
    return s;
}

inline void bayes_posterior(const BayesState &s, const double *x, PosteriorVector &out) {
    constexpr double log_2pi = 1.8378770664093454836;
    const std::size_t a = s.active.size();
    std::vector<double> scores(s.present.size());
    for (std::size_t i = 0; i < s.present.size(); ++i) {
        double lp = s.log_prior[i];
        for (std::size_t k = 0; k < a; ++k) {
            const double v = s.var[i * a + k];
            const double dz = x[s.active[k]] - s.mean[i * a + k];
            lp -= 0.5 * (log_2pi + std::log(v) + dz * dz / v);
        }
        scores[i] = lp;
    }
    softmax_into(scores, s.present, out);
}

inline void nn_posterior(const NearestNeighbourState &s, const double *x, PosteriorVector &out) {
    const auto &td = s.td;
    std::vector<double> nearest(td.classes, std::numeric_limits<double>::infinity());
    for (std::size_t r = 0; r < td.rows; ++r) {
        const double *p = td.row(r);
        double d2 = 0.0;
        for (std::size_t j = 0; j < td.cols; ++j) {
            const double diff = x[j] - p[j];
            d2 += diff * diff;
        }
        nearest[td.y[r]] = std::min(nearest[td.y[r]], d2);
    }
    std::vector<std::size_t> present;
    std::vector<double> scores;
    for (std::size_t c = 0; c < td.classes; ++c) {
        if (std::isfinite(nearest[c])) {
            present.push_back(c);
            scores.push_back(-std::sqrt(nearest[c]));
        }
    }
    softmax_into(scores, present, out);
}

inline ForestState fit_forest(const TrainingData &td, const Hyperparams &hp, std::uint64_t seed, std::vector<double> *importance) {
    ForestState s;
    const TreeBuilder builder(td);
    const auto mtry = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(td.cols))));
    std::vector<double> weights(td.rows);
    for (std::size_t t = 0; t < hp.rf_trees; ++t) {
        rng gen(derive_seed(seed, static_cast<std::uint64_t>(t)));
        std::fill(weights.begin(), weights.end(), 0.0);
        for (std::size_t i = 0; i < td.rows; ++i) {
            weights[gen.below(td.rows)] += 1.0;
        }
        s.trees.push_back(builder.grow(weights, mtry, hp.dt_min_split, &gen, importance));
    }
    return s;
}

inline double svm_kernel(bool linear, double gamma, const double *a, const double *b, std::size_t d) {
    double acc = 0.0;
    if (linear) {
        for (std::size_t j = 0; j < d; ++j) {
            acc += a[j] * b[j];
        }
        return acc;
    }
    for (std::size_t j = 0; j < d; ++j) {
        const double diff = a[j] - b[j];
        acc += diff * diff;
    }
    return std::exp(-gamma * acc);
}

inline SvmState fit_svm(const TrainingData &td, const Hyperparams &hp, bool linear) {
    SvmState s;
    s.linear = linear;
    const std::size_t d = td.cols;
    s.gamma = hp.svmg_gamma > 0.0 ? hp.svmg_gamma : 1.0 / static_cast<double>(d);
    s.lo.assign(d, 0.0);
    s.scale.assign(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
        double lo = td.at(0, j);
        double hi = lo;
        for (std::size_t r = 1; r < td.rows; ++r) {
            lo = std::min(lo, td.at(r, j));
            hi = std::max(hi, td.at(r, j));
        }
        s.lo[j] = lo;
        s.scale[j] = hi > lo ? 1.0 / (hi - lo) : 0.0;
    }
    const auto present = present_classes(td);
    if (present.size() == 1) {
        s.single = present.front();
        return s;
    }
    std::vector<double> norm(td.rows * d);
    for (std::size_t r = 0; r < td.rows; ++r) {
        for (std::size_t j = 0; j < d; ++j) {
            norm[r * d + j] = (td.at(r, j) - s.lo[j]) * s.scale[j];
        }
    }
    for (std::size_t a = 0; a < present.size(); ++a) {
        for (std::size_t b = a + 1; b < present.size(); ++b) {
            std::vector<std::size_t> rows;
            std::vector<double> y;
            for (std::size_t r = 0; r < td.rows; ++r) {
                if (td.y[r] == present[a] || td.y[r] == present[b]) {
                    rows.push_back(r);
                    y.push_back(td.y[r] == present[a] ? 1.0 : -1.0);
                }
            }
            const std::size_t m = rows.size();
            std::vector<double> gram(m * m);
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t k = i; k < m; ++k) {
                    const double v = svm_kernel(linear, s.gamma, &norm[rows[i] * d], &norm[rows[k] * d], d);
                    gram[i * m + k] = v;
                    gram[k * m + i] = v;
                }
            }
            const SmoResult sol = solve_smo(gram, y, hp.svm_c, hp.svm_tol, hp.svm_max_iter);
            SvmMachine mach;
            mach.pos = present[a];
            mach.neg = present[b];
            mach.rho = sol.rho;
            if (linear) {
                mach.w.assign(d, 0.0);
            }
            for (std::size_t i = 0; i < m; ++i) {
                if (sol.alpha[i] <= 0.0) {
                    continue;
                }
                const double cf = sol.alpha[i] * y[i];
                const double *row = &norm[rows[i] * d];
                if (linear) {
                    for (std::size_t j = 0; j < d; ++j) {
                        mach.w[j] += cf * row[j];
                    }
                } else {
                    mach.coef.push_back(cf);
                    mach.sv.insert(mach.sv.end(), row, row + d);
                    ++mach.rows;
                }
            }
            s.machines.push_back(std::move(mach));
        }
    }
    return s;
}

inline void svm_posterior(const SvmState &s, const double *x, std::size_t d, PosteriorVector &out) {
    if (s.single) {
        out[*s.single] = 1.0;
        return;
    }
    std::vector<double> z(d);
    for (std::size_t j = 0; j < d; ++j) {
        z[j] = (x[j] - s.lo[j]) * s.scale[j];
    }
    std::vector<double> votes(out.size(), 0.0);
    for (const auto &mach : s.machines) {
        double f = -mach.rho;
        if (s.linear) {
            for (std::size_t j = 0; j < d; ++j) {
                f += mach.w[j] * z[j];
            }
        } else {
            for (std::size_t i = 0; i < mach.rows; ++i) {
                f += mach.coef[i] * svm_kernel(false, s.gamma, &mach.sv[i * d], z.data(), d);
            }
        }
        votes[f >= 0.0 ? mach.pos : mach.neg] += 1.0;
    }
    out[argmax(votes)] = 1.0;
}

/// Posterior for an instance already laid out in the model's sorted column order.
inline PosteriorVector posterior_sorted(const TrainedModel &model, const double *x) {
    PosteriorVector out(model.class_names().size(), 0.0);
    const std::size_t d = model.dim();
    std::visit(
        [&](const auto &s) {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, PriorState>) {
                out = s.prior;
            } else if constexpr (std::is_same_v<S, NearestNeighbourState>) {
                nn_posterior(s, x, out);
            } else if constexpr (std::is_same_v<S, LdcState>) {
                ldc_posterior(s, x, d, out);
            } else if constexpr (std::is_same_v<S, BayesState>) {
                bayes_posterior(s, x, out);
            } else if constexpr (std::is_same_v<S, TreeState>) {
                const auto dist = s.tree.leaf_distribution(x);
                std::copy(dist.begin(), dist.end(), out.begin());
            } else if constexpr (std::is_same_v<S, ForestState>) {
                for (const auto &t : s.trees) {
                    const auto dist = t.leaf_distribution(x);
                    for (std::size_t c = 0; c < out.size(); ++c) {
                        out[c] += dist[c];
                    }
                }
                for (double &p : out) {
                    p /= static_cast<double>(s.trees.size());
                }
            } else {
                svm_posterior(s, x, d, out);
            }
        },
        model.state());
    return out;
}

inline ModelState fit_state(const ClassifierKind &kind, const TrainingData &td, std::uint64_t seed) {
    if (td.cols == 0) {
        return fit_prior(td);
    }
    switch (kind.tag) {
        case ClassifierTag::NN1: return NearestNeighbourState{ td };
        case ClassifierTag::DT: {
            const TreeBuilder builder(td);
            const std::vector<double> ones(td.rows, 1.0);
            return TreeState{ builder.grow(ones, td.cols, kind.params.dt_min_split, nullptr, nullptr) };
        }
        case ClassifierTag::LDC: return fit_ldc(td, kind.params);
        case ClassifierTag::NB: return fit_bayes(td, kind.params);
        case ClassifierTag::RF: return fit_forest(td, kind.params, derive_seed(seed, "random_forest"), nullptr);
        case ClassifierTag::SVMG: return fit_svm(td, kind.params, false);
        case ClassifierTag::SVML: return fit_svm(td, kind.params, true);
    }
    return fit_prior(td);
}

}  // namespace detail

/// Trains on the given rows of `data` restricted to `subset`.  Classes with no
/// training rows get zero posterior.  An empty subset yields the prior-only model.
[[nodiscard]] inline TrainedModel train(const ClassifierKind &kind, const Dataset &data, std::span<const std::size_t> rows, const FeatureSubset &subset,
                                        std::uint64_t seed) {
    if (rows.empty()) {
        throw data_error("cannot train on zero instances");
    }
    for (const std::size_t f : subset) {
        if (f >= data.dim()) {
            throw domain_error("feature index " + std::to_string(f) + " out of range for " + std::to_string(data.dim()) + " features");
        }
    }
    for (const std::size_t r : rows) {
        if (r >= data.size()) {
            throw domain_error("row index " + std::to_string(r) + " out of range");
        }
    }
    std::vector<std::size_t> perm(subset.size());
    std::iota(perm.begin(), perm.end(), std::size_t{ 0 });
    std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) { return subset[a] < subset[b]; });
    std::vector<std::size_t> cols(subset.size());
    for (std::size_t k = 0; k < perm.size(); ++k) {
        cols[k] = subset[perm[k]];
    }
    const auto td = detail::make_training_data(data, rows, cols);
    auto state = detail::fit_state(kind, td, seed);
    return { kind, data.class_names(), subset, std::move(cols), std::move(perm), std::move(state) };
}

[[nodiscard]] inline TrainedModel train(const ClassifierKind &kind, const Dataset &data, const FeatureSubset &subset, std::uint64_t seed) {
    std::vector<std::size_t> rows(data.size());
    std::iota(rows.begin(), rows.end(), std::size_t{ 0 });
    return train(kind, data, rows, subset, seed);
}

/// `instance` lists values in the order of the model's subset.
[[nodiscard]] inline PosteriorVector predict_proba(const TrainedModel &model, std::span<const double> instance) {
    if (instance.size() != model.dim()) {
        throw domain_error("instance has " + std::to_string(instance.size()) + " values but the model expects " + std::to_string(model.dim()));
    }
    const auto &perm = model.column_positions();
    std::vector<double> x(perm.size());
    for (std::size_t k = 0; k < perm.size(); ++k) {
        x[k] = instance[perm[k]];
    }
    return detail::posterior_sorted(model, x.data());
}

/// Posterior for row `r` of a dataset with the training data's column layout.
[[nodiscard]] inline PosteriorVector predict_proba_row(const TrainedModel &model, const Dataset &data, std::size_t r) {
    const auto &cols = model.sorted_columns();
    if (!cols.empty() && cols.back() >= data.dim()) {
        throw domain_error("dataset has fewer columns than the model's subset requires");
    }
    const auto row = data.row(r);
    std::vector<double> x(cols.size());
    for (std::size_t k = 0; k < cols.size(); ++k) {
        x[k] = row[cols[k]];
    }
    return detail::posterior_sorted(model, x.data());
}

[[nodiscard]] inline std::size_t predict_label(const TrainedModel &model, std::span<const double> instance) { return argmax(predict_proba(model, instance)); }

[[nodiscard]] inline std::size_t predict_label_row(const TrainedModel &model, const Dataset &data, std::size_t r) {
    return argmax(predict_proba_row(model, data, r));
}

}  // namespace fsaudit

#endif  // FSAUDIT_CLASSIFIERS_HPP_
