#ifndef FSAUDIT_COMMON_HPP_
#define FSAUDIT_COMMON_HPP_
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fsaudit {

/// Raised for malformed or inconsistent input data (bad CSV cells, violated preconditions on datasets).
class data_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Raised when a requested computation is not defined for the given arguments.
class domain_error : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------
// Seeding.
//
// Every random decision in the toolkit is drawn from a stream whose seed is a
// pure function of a master seed and a sequence of tags.  The mixing function
// is SplitMix64's finalizer and strings are folded with 64-bit FNV-1a, so any
// derived seed can be recomputed by hand from the logged master seed.
// ---------------------------------------------------------------------------

[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30U)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27U)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31U);
}

[[nodiscard]] constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (const char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) noexcept {
    return mix64(base ^ mix64(tag + 0x632BE59BD9B4E019ULL));
}

[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t base, std::string_view tag) noexcept {
    return derive_seed(base, fnv1a64(tag));
}

/// Seed of one benchmark cell: hash(master seed, dataset name, run index).
[[nodiscard]] constexpr std::uint64_t cell_seed(std::uint64_t master, std::string_view dataset, std::size_t run) noexcept {
    return derive_seed(derive_seed(master, dataset), static_cast<std::uint64_t>(run));
}

/// Deterministic random stream: the SplitMix64 sequence started at `seed`.
/// Construction is free, which matters because forests open one stream per
/// tree.  Bounded integers and unit reals are derived from raw 64-bit draws
/// here rather than through the standard distributions, whose output is
/// implementation-defined.
class rng {
  public:
    using result_type = std::uint64_t;

    explicit rng(std::uint64_t seed) : state_{ seed } {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }
    result_type operator()() {
        const std::uint64_t out = mix64(state_);
        state_ += 0x9E3779B97F4A7C15ULL;
        return out;
    }

    /// Uniform integer in [0, bound).  bound must be positive.
    std::size_t below(std::size_t bound) {
        const auto b = static_cast<std::uint64_t>(bound);
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % b;
        std::uint64_t x = (*this)();
        while (x >= limit) {
            x = (*this)();
        }
        return static_cast<std::size_t>(x % b);
    }

    /// Uniform real in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>((*this)() >> 11U) * 0x1.0p-53; }

    bool bernoulli(double p) { return unit() < p; }

    /// Standard normal draw (Marsaglia polar method).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u = 0.0;
        double v = 0.0;
        double s = 0.0;
        do {
            u = 2.0 * unit() - 1.0;
            v = 2.0 * unit() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    template <typename T>
    void shuffle(std::vector<T> &v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

  private:
    std::uint64_t state_;
    double spare_{ 0.0 };
    bool has_spare_{ false };
};

}  // namespace fsaudit

#endif  // FSAUDIT_COMMON_HPP_
