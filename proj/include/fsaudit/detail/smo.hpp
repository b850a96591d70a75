#ifndef FSAUDIT_DETAIL_SMO_HPP_
#define FSAUDIT_DETAIL_SMO_HPP_
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace fsaudit::detail {

struct SmoResult {
    std::vector<double> alpha;
    double rho{ 0.0 };  ///< decision value is sum_i alpha_i y_i K(x_i, x) - rho
    std::size_t iterations{ 0 };
};

/// C-SVC dual solved by sequential minimal optimization with the maximal
/// violating pair working set.  `kernel` is the m x m Gram matrix (row-major),
/// `y` holds +1/-1.
inline SmoResult solve_smo(const std::vector<double> &kernel, const std::vector<double> &y, double c, double tol, std::size_t max_iter) {
    const std::size_t m = y.size();
    constexpr double tau = 1e-12;
    SmoResult res;
    res.alpha.assign(m, 0.0);
    std::vector<double> grad(m, -1.0);
    auto &a = res.alpha;
    const auto q = [&](std::size_t i, std::size_t j) { return y[i] * y[j] * kernel[i * m + j]; };

    while (res.iterations < max_iter) {
        double gmax = -std::numeric_limits<double>::infinity();
        double gmin = std::numeric_limits<double>::infinity();
        std::size_t i = m;
        std::size_t j = m;
        for (std::size_t t = 0; t < m; ++t) {
            const bool up = (y[t] > 0.0) ? a[t] < c : a[t] > 0.0;
            const bool low = (y[t] > 0.0) ? a[t] > 0.0 : a[t] < c;
            const double v = -y[t] * grad[t];
            if (up && v > gmax) {
                gmax = v;
                i = t;
            }
            if (low && v < gmin) {
                gmin = v;
                j = t;
            }
        }
        if (i == m || j == m || gmax - gmin < tol) {
            break;
        }
        ++res.iterations;
        const double ai = a[i];
        const double aj = a[j];
        if (y[i] != y[j]) {
            double quad = q(i, i) + q(j, j) + 2.0 * q(i, j);
            if (quad <= 0.0) {
                quad = tau;
            }
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = a[i] - a[j];
            a[i] += delta;
            a[j] += delta;
            if (diff > 0.0) {
                if (a[j] < 0.0) {
                    a[j] = 0.0;
                    a[i] = diff;
                }
            } else if (a[i] < 0.0) {
                a[i] = 0.0;
                a[j] = -diff;
            }
            if (diff > 0.0) {
                if (a[i] > c) {
                    a[i] = c;
                    a[j] = c - diff;
                }
            } else if (a[j] > c) {
                a[j] = c;
                a[i] = c + diff;
            }
        } else {
            double quad = q(i, i) + q(j, j) - 2.0 * q(i, j);
            if (quad <= 0.0) {
                quad = tau;
            }
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = a[i] + a[j];
            a[i] -= delta;
            a[j] += delta;
            if (sum > c) {
                if (a[i] > c) {
                    a[i] = c;
                    a[j] = sum - c;
                }
            } else if (a[j] < 0.0) {
                a[j] = 0.0;
                a[i] = sum;
            }
            if (sum > c) {
                if (a[j] > c) {
                    a[j] = c;
                    a[i] = sum - c;
                }
            } else if (a[i] < 0.0) {
                a[i] = 0.0;
                a[j] = sum;
            }
        }
        const double di = a[i] - ai;
        const double dj = a[j] - aj;
        for (std::size_t t = 0; t < m; ++t) {
            grad[t] += q(i, t) * di + q(j, t) * dj;
        }
    }

    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    double free_sum = 0.0;
    std::size_t free_count = 0;
    for (std::size_t t = 0; t < m; ++t) {
        const double yg = y[t] * grad[t];
        if (a[t] >= c) {
            if (y[t] < 0.0) {
                ub = std::min(ub, yg);
            } else {
                lb = std::max(lb, yg);
            }
        } else if (a[t] <= 0.0) {
            if (y[t] > 0.0) {
                ub = std::min(ub, yg);
            } else {
                lb = std::max(lb, yg);
            }
        } else {
            ++free_count;
            free_sum += yg;
        }
    }
    if (free_count > 0) {
        res.rho = free_sum / static_cast<double>(free_count);
    } else if (std::isfinite(ub) && std::isfinite(lb)) {
        res.rho = (ub + lb) / 2.0;
    } else {
        res.rho = std::isfinite(ub) ? ub : (std::isfinite(lb) ? lb : 0.0);
    }
    return res;
}

}  // namespace fsaudit::detail

#endif  // FSAUDIT_DETAIL_SMO_HPP_
