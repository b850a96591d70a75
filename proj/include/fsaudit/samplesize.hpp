#ifndef FSAUDIT_SAMPLESIZE_HPP_
#define FSAUDIT_SAMPLESIZE_HPP_
#pragma once

#include "fsaudit/common.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fsaudit {

// ---------------------------------------------------------------------------
// Distribution kernels
// ---------------------------------------------------------------------------

/// Regularized lower incomplete gamma function P(a, x).
[[nodiscard]] inline double regularized_gamma_p(double a, double x) {
    if (a <= 0.0) {
        throw domain_error{ "regularized_gamma_p: shape must be positive" };
    }
    if (x <= 0.0) {
        return 0.0;
    }
    const double log_prefix = a * std::log(x) - x - std::lgamma(a);
    if (x < a + 1.0) {
        // power series
        double term = 1.0 / a;
        double sum = term;
        for (int k = 1; k < 1000; ++k) {
            term *= x / (a + k);
            sum += term;
            if (std::abs(term) < std::abs(sum) * 1e-16) {
                break;
            }
        }
        return std::min(1.0, sum * std::exp(log_prefix));
    }
    // continued fraction for Q(a, x), modified Lentz
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 1000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) {
            d = tiny;
        }
        c = b + an / c;
        if (std::abs(c) < tiny) {
            c = tiny;
        }
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) {
            break;
        }
    }
    return std::max(0.0, 1.0 - std::exp(log_prefix) * h);
}

[[nodiscard]] inline double chi2_cdf(double x, unsigned dof) {
    if (dof == 0) {
        throw domain_error{ "chi2_cdf: degrees of freedom must be positive" };
    }
    if (x <= 0.0) {
        return 0.0;
    }
    if (dof == 1) {
        return std::erf(std::sqrt(x / 2.0));
    }
    return regularized_gamma_p(dof / 2.0, x / 2.0);
}

/// Upper tail 1 - F(x), computed without cancellation for large x.
[[nodiscard]] inline double chi2_sf(double x, unsigned dof) {
    if (x <= 0.0) {
        return 1.0;
    }
    if (dof == 1) {
        return std::erfc(std::sqrt(x / 2.0));
    }
    if (dof == 2) {
        return std::exp(-x / 2.0);
    }
    return 1.0 - chi2_cdf(x, dof);
}

/// Quantile of the chi-squared distribution: x with F(x; dof) = q.
[[nodiscard]] inline double chi2_inv_cdf(double q, unsigned dof) {
    if (!(q > 0.0 && q < 1.0)) {
        throw domain_error{ "chi2_inv_cdf: probability must lie in (0, 1)" };
    }
    if (dof == 0) {
        throw domain_error{ "chi2_inv_cdf: degrees of freedom must be positive" };
    }
    if (dof == 2) {
        return -2.0 * std::log1p(-q);
    }
    double lo = 0.0;
    double hi = std::max(1.0, static_cast<double>(dof));
    while (chi2_cdf(hi, dof) < q) {
        lo = hi;
        hi *= 2.0;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (chi2_cdf(mid, dof) < q ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

[[nodiscard]] inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

/// Standard normal quantile: rational initial guess (Acklam) refined by Halley steps.
[[nodiscard]] inline double normal_inv_cdf(double q) {
    if (!(q > 0.0 && q < 1.0)) {
        throw domain_error{ "normal_inv_cdf: probability must lie in (0, 1)" };
    }
    constexpr double a[] = { -3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02, 1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00 };
    constexpr double b[] = { -5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02, 6.680131188771972e+01, -1.328068155288572e+01 };
    constexpr double c[] = { -7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00, -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00 };
    constexpr double d[] = { 7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00, 3.754408661907416e+00 };
    constexpr double p_low = 0.02425;

    double x = 0.0;
    if (q < p_low) {
        const double t = std::sqrt(-2.0 * std::log(q));
        x = (((((c[0] * t + c[1]) * t + c[2]) * t + c[3]) * t + c[4]) * t + c[5]) / ((((d[0] * t + d[1]) * t + d[2]) * t + d[3]) * t + 1.0);
    } else if (q <= 1.0 - p_low) {
        const double t = q - 0.5;
        const double r = t * t;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * t / (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double t = std::sqrt(-2.0 * std::log1p(-q));
        x = -(((((c[0] * t + c[1]) * t + c[2]) * t + c[3]) * t + c[4]) * t + c[5]) / ((((d[0] * t + d[1]) * t + d[2]) * t + d[3]) * t + 1.0);
    }
    for (int it = 0; it < 3; ++it) {
        const double e = normal_cdf(x) - q;
        const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(x * x / 2.0);
        x -= u / (1.0 + x * u / 2.0);
    }
    return x;
}

// ---------------------------------------------------------------------------
// Sample sizes for telling two features apart
// ---------------------------------------------------------------------------

/// Correctness of two single-feature classifiers as paired Bernoulli variables
/// w1, w2.  `d_agree` is P(w1 = 1, w2 = 1).
struct McNemarPlan {
    double p1{ 0.0 };
    double p2{ 0.0 };
    double d_agree{ 0.0 };
    double alpha{ 0.05 };

    /// Cell probabilities of the 2x2 table: a (both wrong), b (only 1 right),
    /// c (only 2 right), d (both right).
    [[nodiscard]] double cell_a() const noexcept { return 1.0 - p1 - p2 + d_agree; }
    [[nodiscard]] double cell_b() const noexcept { return p1 - d_agree; }
    [[nodiscard]] double cell_c() const noexcept { return p2 - d_agree; }
    [[nodiscard]] double cell_d() const noexcept { return d_agree; }

    /// Agreement under independence of w1 and w2.
    [[nodiscard]] static McNemarPlan independent(double p1, double p2, double alpha) { return { p1, p2, p1 * p2, alpha }; }

    void validate() const {
        if (!(alpha > 0.0 && alpha < 1.0)) {
            throw domain_error{ "alpha must lie in (0, 1)" };
        }
        if (p1 == p2) {
            throw domain_error{ "no detectable difference: p1 equals p2" };
        }
        if (!(p2 > 0.0 && p1 > p2 && p1 < 1.0)) {
            throw domain_error{ "need 0 < p2 < p1 < 1" };
        }
        constexpr double slack = 1e-12;
        if (d_agree < std::max(0.0, p1 + p2 - 1.0) - slack || d_agree > p2 + slack) {
            throw domain_error{ "d_agree must lie in [max(0, p1 + p2 - 1), p2]" };
        }
    }
};

/// McNemar statistic on observed discordant counts B and C.
[[nodiscard]] inline double mcnemar_statistic(double count_b, double count_c) {
    if (count_b + count_c <= 0.0) {
        return 0.0;
    }
    return (count_b - count_c) * (count_b - count_c) / (count_b + count_c);
}

/// Statistic implied by expected counts N x probability.
[[nodiscard]] inline double mcnemar_expected_statistic(const McNemarPlan &plan, double n) {
    return n * (plan.p1 - plan.p2) * (plan.p1 - plan.p2) / (plan.p1 + plan.p2 - 2.0 * plan.d_agree);
}

/// Sample size at which the expected McNemar statistic reaches the critical
/// value of chi-squared(1) at level alpha.  Real-valued; callers may ceil.
[[nodiscard]] inline double mcnemar_sample_size(const McNemarPlan &plan) {
    plan.validate();
    const double gap = plan.p1 - plan.p2;
    return chi2_inv_cdf(1.0 - plan.alpha, 1) * (plan.p1 + plan.p2 - 2.0 * plan.d_agree) / (gap * gap);
}

/// Paired continuous correctness scores v1, v2 with given moments.
struct SmoothedPlan {
    double p1{ 0.0 };
    double p2{ 0.0 };
    double var1{ 0.0 };
    double var2{ 0.0 };
    double cov{ 0.0 };
    double alpha{ 0.05 };
    bool two_tailed{ false };

    void validate() const {
        if (!(alpha > 0.0 && alpha < 1.0)) {
            throw domain_error{ "alpha must lie in (0, 1)" };
        }
        if (p1 == p2) {
            throw domain_error{ "no detectable difference: p1 equals p2" };
        }
        if (!(p1 > p2)) {
            throw domain_error{ "need p1 > p2" };
        }
        if (var1 < 0.0 || var2 < 0.0) {
            throw domain_error{ "variances must be non-negative" };
        }
        if (std::abs(cov) > std::sqrt(var1 * var2) * (1.0 + 1e-12) + 1e-300) {
            throw domain_error{ "|cov| must not exceed sqrt(var1 * var2)" };
        }
    }
};

struct SmoothedSampleSize {
    double n{ 0.0 };
    /// Set when var1 + var2 - 2 cov <= 0; n is then 0.
    bool degenerate{ false };
};

/// Normal-approximation sample size for the difference of smoothed scores.
/// A lower bound for what a signed-rank test would need.
[[nodiscard]] inline SmoothedSampleSize smoothed_sample_size(const SmoothedPlan &plan) {
    plan.validate();
    const double spread = plan.var1 + plan.var2 - 2.0 * plan.cov;
    if (spread <= 1e-15 * std::max(1.0, plan.var1 + plan.var2)) {
        return { 0.0, true };
    }
    const double a = plan.two_tailed ? plan.alpha / 2.0 : plan.alpha;
    const double gap = plan.p1 - plan.p2;
    return { normal_inv_cdf(1.0 - a) * spread / (gap * gap), false };
}

struct CurvePoint {
    double p1{ 0.0 };
    double alpha{ 0.0 };
    double n{ 0.0 };
};

/// N over a grid of p1 with p2 = p1 - gap.  Without `d_agree` the two
/// correctness indicators are taken as independent (d = p1 p2).
[[nodiscard]] inline std::vector<CurvePoint> sample_size_curve(std::span<const double> p1_grid,
                                                               double gap,
                                                               std::span<const double> alphas,
                                                               std::optional<double> d_agree = std::nullopt) {
    std::vector<CurvePoint> rows;
    rows.reserve(p1_grid.size() * alphas.size());
    for (const double alpha : alphas) {
        for (const double p1 : p1_grid) {
            const double p2 = p1 - gap;
            if (!(p2 > 0.0)) {
                throw domain_error{ "p1 - gap must be positive (p1 = " + std::to_string(p1) + ")" };
            }
            const McNemarPlan plan{ p1, p2, d_agree.value_or(p1 * p2), alpha };
            rows.push_back({ p1, alpha, mcnemar_sample_size(plan) });
        }
    }
    return rows;
}

/// Evenly spaced grid from `from` to `to` inclusive (to within half a step).
[[nodiscard]] inline std::vector<double> linear_grid(double from, double to, double step) {
    if (!(step > 0.0) || to < from) {
        throw domain_error{ "invalid grid" };
    }
    std::vector<double> g;
    const auto count = static_cast<std::size_t>(std::floor((to - from) / step + 0.5));
    for (std::size_t i = 0; i <= count; ++i) {
        g.push_back(from + step * static_cast<double>(i));
    }
    return g;
}

}  // namespace fsaudit

#endif  // FSAUDIT_SAMPLESIZE_HPP_
