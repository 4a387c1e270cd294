#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace mfpotts {

// Entries below this are treated as exact zeros in x log x.
inline constexpr double kEntropyFloor = 1e-300;

inline double xlogx(double x) noexcept { return x < kEntropyFloor ? 0.0 : x * std::log(x); }

// log(sum_i exp(v_i)), shifted by the max. Empty input gives -inf.
inline double log_sum_exp(std::span<const double> v) noexcept {
    if (v.empty()) return -std::numeric_limits<double>::infinity();
    const double top = *std::max_element(v.begin(), v.end());
    if (!std::isfinite(top)) return top;
    double sum = 0.0;
    for (double x : v) sum += std::exp(x - top);
    return top + std::log(sum);
}

// Single-pass log-sum-exp for streams too long to buffer.
class LogSumExpAccumulator {
public:
    void add(double x) noexcept {
        if (x == -std::numeric_limits<double>::infinity()) return;
        if (x <= max_) {
            sum_ += std::exp(x - max_);
        } else {
            sum_ = sum_ * std::exp(max_ - x) + 1.0;
            max_ = x;
        }
    }

    void merge(const LogSumExpAccumulator& other) noexcept {
        if (other.sum_ == 0.0) return;
        if (other.max_ <= max_) {
            sum_ += other.sum_ * std::exp(other.max_ - max_);
        } else {
            sum_ = sum_ * std::exp(max_ - other.max_) + other.sum_;
            max_ = other.max_;
        }
    }

    double value() const noexcept {
        if (sum_ == 0.0) return -std::numeric_limits<double>::infinity();
        return max_ + std::log(sum_);
    }

private:
    double max_ = -std::numeric_limits<double>::infinity();
    double sum_ = 0.0;
};

// The map x -> exp(x_r) / sum_s exp(x_s), max-shifted. Writes into out (same length).
inline void softmax(std::span<const double> x, std::span<double> out) noexcept {
    const double top = *std::max_element(x.begin(), x.end());
    double sum = 0.0;
    for (std::size_t r = 0; r < x.size(); ++r) {
        out[r] = std::exp(x[r] - top);
        sum += out[r];
    }
    for (double& o : out) o /= sum;
}

inline std::vector<double> softmax(std::span<const double> x) {
    std::vector<double> out(x.size());
    softmax(x, out);
    return out;
}

// Binary entropy in the +-1 parametrisation: H(s) = -(1+s)/2 log((1+s)/2) - (1-s)/2 log((1-s)/2).
inline double binary_entropy(double s) noexcept {
    return -xlogx(0.5 * (1.0 + s)) - xlogx(0.5 * (1.0 - s));
}

}  // namespace mfpotts
