#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "mfpotts/error.hpp"
#include "mfpotts/matrix.hpp"

namespace mfpotts {

// A probability vector on q colors.
class SimplexPoint {
public:
    SimplexPoint() = default;

    explicit SimplexPoint(std::vector<double> probs) : probs_(std::move(probs)) {
        detail::require(!probs_.empty(), "simplex point must have at least one coordinate");
        double sum = 0.0;
        for (double p : probs_) {
            detail::require(p >= 0.0 && p <= 1.0, "simplex point coordinates must lie in [0,1]");
            sum += p;
        }
        detail::require(std::abs(sum - 1.0) <= 1e-12, "simplex point must sum to 1");
    }

    static SimplexPoint uniform(std::size_t q) { return SimplexPoint(std::vector<double>(q, 1.0 / static_cast<double>(q))); }

    std::size_t size() const noexcept { return probs_.size(); }
    double operator[](std::size_t r) const noexcept { return probs_[r]; }
    const std::vector<double>& probs() const noexcept { return probs_; }

    // For q = 2: probs[0] - probs[1].
    double magnetization() const noexcept { return probs_.size() == 2 ? probs_[0] - probs_[1] : 0.0; }

private:
    std::vector<double> probs_;
};

// Generalised Potts model on n sites with q colors:
//   H(y) = 1/2 sum_{i,j} A(i,j) J(y_i, y_j) + sum_i h(y_i).
// Colors are 0-based here; color 0 carries the external field in the standard model.
class PottsModel {
public:
    PottsModel(CouplingMatrix a, std::size_t q, std::vector<double> j, std::vector<double> h)
        : a_(std::move(a)), q_(q), j_(std::move(j)), h_(std::move(h)) {
        detail::require(q_ >= 2, "Potts model needs q >= 2");
        detail::require(j_.size() == q_ * q_, "J must be q x q");
        detail::require(h_.size() == q_, "h must have length q");
        for (std::size_t r = 0; r < q_; ++r)
            for (std::size_t s = r + 1; s < q_; ++s)
                detail::require(j_[r * q_ + s] == j_[s * q_ + r], "J must be symmetric");
    }

    // J = beta * I_q, h = (B, 0, ..., 0).
    static PottsModel standard(CouplingMatrix a, std::size_t q, double beta, double field) {
        std::vector<double> j(q * q, 0.0);
        for (std::size_t r = 0; r < q; ++r) j[r * q + r] = beta;
        std::vector<double> h(q, 0.0);
        h[0] = field;
        return PottsModel(std::move(a), q, std::move(j), std::move(h));
    }

    static PottsModel with_fields(CouplingMatrix a, std::size_t q, double beta, std::vector<double> h) {
        std::vector<double> j(q * q, 0.0);
        for (std::size_t r = 0; r < q; ++r) j[r * q + r] = beta;
        return PottsModel(std::move(a), q, std::move(j), std::move(h));
    }

    const CouplingMatrix& coupling() const noexcept { return a_; }
    std::size_t n() const noexcept { return a_.n(); }
    std::size_t q() const noexcept { return q_; }
    double J(std::size_t r, std::size_t s) const noexcept { return j_[r * q_ + s]; }
    double h(std::size_t r) const noexcept { return h_[r]; }
    const std::vector<double>& J_entries() const noexcept { return j_; }
    const std::vector<double>& fields() const noexcept { return h_; }

    // Same model with colors relabelled: new color r is old color perm[r].
    PottsModel permuted_colors(std::span<const std::size_t> perm) const {
        detail::require(perm.size() == q_, "color permutation must have length q");
        std::vector<double> j(q_ * q_), h(q_);
        for (std::size_t r = 0; r < q_; ++r) {
            h[r] = h_[perm[r]];
            for (std::size_t s = 0; s < q_; ++s) j[r * q_ + s] = j_[perm[r] * q_ + perm[s]];
        }
        return PottsModel(a_, q_, std::move(j), std::move(h));
    }

private:
    CouplingMatrix a_;
    std::size_t q_;
    std::vector<double> j_;
    std::vector<double> h_;
};

}  // namespace mfpotts
