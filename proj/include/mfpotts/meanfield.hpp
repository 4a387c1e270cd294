#pragma once

// Naive mean-field: the product-measure objective M(theta), its coordinate-wise
// maximiser, and a multistart coordinate-ascent solver.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "mfpotts/error.hpp"
#include "mfpotts/exact.hpp"
#include "mfpotts/model.hpp"
#include "mfpotts/numeric.hpp"
#include "mfpotts/rng.hpp"

namespace mfpotts {

// Row-stochastic n x q matrix: theta_i is the marginal law of site i.
class ProductMeasure {
public:
    ProductMeasure() = default;

    ProductMeasure(std::size_t n, std::size_t q, std::vector<double> theta)
        : n_(n), q_(q), theta_(std::move(theta)) {
        detail::require(n_ >= 1 && q_ >= 1, "product measure needs n, q >= 1");
        detail::require(theta_.size() == n_ * q_, "product measure needs n*q entries");
        for (std::size_t i = 0; i < n_; ++i) {
            double sum = 0.0;
            for (double p : row(i)) {
                detail::require(p >= 0.0 && p <= 1.0, "product measure entries must lie in [0,1]");
                sum += p;
            }
            detail::require(std::abs(sum - 1.0) <= 1e-12, "product measure rows must sum to 1");
        }
    }

    static ProductMeasure uniform(std::size_t n, std::size_t q) {
        return ProductMeasure(n, q, std::vector<double>(n * q, 1.0 / static_cast<double>(q)));
    }

    // Every site deterministic: row i is the unit vector at y[i].
    static ProductMeasure point_mass(const ColorConfig& y, std::size_t q) {
        std::vector<double> theta(y.size() * q, 0.0);
        for (std::size_t i = 0; i < y.size(); ++i) theta[i * q + y[i]] = 1.0;
        return ProductMeasure(y.size(), q, std::move(theta));
    }

    std::size_t n() const noexcept { return n_; }
    std::size_t q() const noexcept { return q_; }
    double operator()(std::size_t i, std::size_t r) const noexcept { return theta_[i * q_ + r]; }
    std::span<const double> row(std::size_t i) const noexcept { return {theta_.data() + i * q_, q_}; }
    std::span<double> mutable_row(std::size_t i) noexcept { return {theta_.data() + i * q_, q_}; }
    const std::vector<double>& entries() const noexcept { return theta_; }

    double sup_distance(const ProductMeasure& other) const noexcept {
        double d = 0.0;
        for (std::size_t k = 0; k < theta_.size(); ++k) d = std::max(d, std::abs(theta_[k] - other.theta_[k]));
        return d;
    }

private:
    std::size_t n_ = 0;
    std::size_t q_ = 0;
    std::vector<double> theta_;
};

namespace detail {

inline void check_shapes(const PottsModel& model, const ProductMeasure& theta) {
    require(theta.n() == model.n() && theta.q() == model.q(), "product measure shape must be n x q of the model");
}

// gamma_ir = sum_s J(r,s) sum_j A(i,j) theta_j(s), written into out (length q).
inline void local_field(const PottsModel& model, const ProductMeasure& theta, std::size_t i, std::span<double> out) {
    const std::size_t q = model.q();
    const auto a_row = model.coupling().row(i);
    std::vector<double> mixed(q, 0.0);
    for (std::size_t j = 0; j < model.n(); ++j) {
        const double w = a_row[j];
        if (w == 0.0) continue;
        const auto tj = theta.row(j);
        for (std::size_t s = 0; s < q; ++s) mixed[s] += w * tj[s];
    }
    for (std::size_t r = 0; r < q; ++r) {
        double g = 0.0;
        for (std::size_t s = 0; s < q; ++s) g += model.J(r, s) * mixed[s];
        out[r] = g;
    }
}

// T(gamma_i + h): the closed-form maximiser over row i with the other rows fixed.
inline std::vector<double> best_row(const PottsModel& model, const ProductMeasure& theta, std::size_t i) {
    std::vector<double> g(model.q());
    local_field(model, theta, i, g);
    for (std::size_t r = 0; r < model.q(); ++r) g[r] += model.h(r);
    return softmax(g);
}

}  // namespace detail

// M(theta) = 1/2 sum_{i,j} A(i,j) sum_{r,s} theta_i(r) theta_j(s) J(r,s)
//            + sum_{i,r} h_r theta_i(r) - sum_{i,r} theta_i(r) log theta_i(r)
inline double mf_objective(const PottsModel& model, const ProductMeasure& theta) {
    detail::check_shapes(model, theta);
    const std::size_t n = model.n();
    const std::size_t q = model.q();
    const auto& a = model.coupling();
    std::vector<double> mixed(q);
    double pair = 0.0, field = 0.0, entropy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        std::fill(mixed.begin(), mixed.end(), 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            const double w = a(i, j);
            if (w == 0.0) continue;
            for (std::size_t s = 0; s < q; ++s) mixed[s] += w * theta(j, s);
        }
        for (std::size_t r = 0; r < q; ++r) {
            const double tr = theta(i, r);
            double js = 0.0;
            for (std::size_t s = 0; s < q; ++s) js += model.J(r, s) * mixed[s];
            pair += tr * js;
            field += model.h(r) * tr;
            entropy -= xlogx(tr);
        }
    }
    return 0.5 * pair + field + entropy;
}

inline ProductMeasure mf_update_site(const PottsModel& model, const ProductMeasure& theta, std::size_t site) {
    detail::check_shapes(model, theta);
    detail::require(site < model.n(), "mf_update_site: site out of range");
    detail::require(model.coupling().zero_diagonal(), "mf_update_site: coupling matrix must have zero diagonal");
    ProductMeasure out = theta;
    const auto row = detail::best_row(model, theta, site);
    std::copy(row.begin(), row.end(), out.mutable_row(site).begin());
    return out;
}

struct Schedule {
    std::size_t max_sweeps = 500;
    double tol = 1e-10;
    std::size_t restarts = 0;  // 0 selects q + 3
    double damping = 0.0;      // new = (1 - damping) * update + damping * old
    std::uint64_t seed = 0;

    std::size_t starts(std::size_t q) const noexcept { return restarts == 0 ? q + 3 : restarts; }
};

struct VariationalResult {
    double value = 0.0;
    ProductMeasure theta_star;
    bool converged = false;
    std::size_t sweeps_used = 0;
    std::size_t restarts_tried = 0;
    // Distinct endpoints (sup-norm radius 1e-6) whose value ties the best within 1e-9.
    std::vector<ProductMeasure> maximizers;
    // Final objective value of every start, in start order.
    std::vector<double> start_values;
};

inline constexpr double kOptimumClusterRadius = 1e-6;

namespace detail {

// Start k: 0 uniform, 1..q pure color k-1, then Dirichlet(1) rows from the seed.
inline ProductMeasure initial_measure(std::size_t n, std::size_t q, std::size_t k, std::uint64_t seed) {
    if (k == 0) return ProductMeasure::uniform(n, q);
    if (k <= q) return ProductMeasure::point_mass(ColorConfig(n, k - 1), q);
    SplitMix64 rng(seed ^ (0xA0761D6478BD642FULL * static_cast<std::uint64_t>(k)));
    std::vector<double> theta(n * q);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t r = 0; r < q; ++r) {
            theta[i * q + r] = -std::log(1.0 - rng.uniform()) + 1e-12;
            sum += theta[i * q + r];
        }
        for (std::size_t r = 0; r < q; ++r) theta[i * q + r] /= sum;
        // Exact row sums for the validating constructor.
        double rest = 1.0;
        for (std::size_t r = 0; r + 1 < q; ++r) rest -= theta[i * q + r];
        theta[i * q + q - 1] = std::max(0.0, rest);
    }
    return ProductMeasure(n, q, std::move(theta));
}

struct AscentOutcome {
    ProductMeasure theta;
    bool converged = false;
    std::size_t sweeps = 0;
};

template <class SiteUpdate>
AscentOutcome coordinate_ascent(ProductMeasure theta, std::size_t sites, const Schedule& schedule,
                                SiteUpdate&& update) {
    AscentOutcome out;
    for (std::size_t sweep = 1; sweep <= schedule.max_sweeps; ++sweep) {
        double change = 0.0;
        for (std::size_t i = 0; i < sites; ++i) {
            const std::vector<double> next = update(theta, i);
            auto row = theta.mutable_row(i);
            for (std::size_t r = 0; r < row.size(); ++r) {
                const double v = (1.0 - schedule.damping) * next[r] + schedule.damping * row[r];
                change = std::max(change, std::abs(v - row[r]));
                row[r] = v;
            }
        }
        out.sweeps = sweep;
        if (change <= schedule.tol) {
            out.converged = true;
            break;
        }
    }
    out.theta = std::move(theta);
    return out;
}

inline std::vector<ProductMeasure> cluster(const std::vector<const ProductMeasure*>& points) {
    std::vector<ProductMeasure> out;
    for (const auto* p : points) {
        const bool seen = std::any_of(out.begin(), out.end(),
                                      [&](const ProductMeasure& o) { return o.sup_distance(*p) <= kOptimumClusterRadius; });
        if (!seen) out.push_back(*p);
    }
    return out;
}

}  // namespace detail

// Multistart coordinate ascent on M. Sites are visited in order 0..n-1; with
// damping 0 every update is a coordinate maximisation, so M never decreases.
// The best start wins; exact ties go to the earliest start.
inline VariationalResult mf_solve(const PottsModel& model, const Schedule& schedule = {}) {
    detail::require(model.coupling().zero_diagonal(), "mf_solve: coupling matrix must have zero diagonal");
    detail::require(schedule.damping >= 0.0 && schedule.damping < 1.0, "mf_solve: damping must lie in [0,1)");
    detail::require(schedule.max_sweeps >= 1, "mf_solve: max_sweeps must be positive");
    const std::size_t n = model.n();
    const std::size_t q = model.q();
    const std::size_t starts = schedule.starts(q);

    std::vector<detail::AscentOutcome> outcomes;
    outcomes.reserve(starts);
    VariationalResult result;
    std::size_t best = 0;
    for (std::size_t k = 0; k < starts; ++k) {
        auto outcome = detail::coordinate_ascent(
            detail::initial_measure(n, q, k, schedule.seed), n, schedule,
            [&](const ProductMeasure& theta, std::size_t i) { return detail::best_row(model, theta, i); });
        result.start_values.push_back(mf_objective(model, outcome.theta));
        if (k == 0 || result.start_values[k] > result.start_values[best]) best = k;
        outcomes.push_back(std::move(outcome));
    }

    result.value = result.start_values[best];
    result.theta_star = outcomes[best].theta;
    result.converged = outcomes[best].converged;
    result.sweeps_used = outcomes[best].sweeps;
    result.restarts_tried = starts;

    const double slack = 1e-9 * std::max(1.0, std::abs(result.value));
    std::vector<const ProductMeasure*> ties;
    for (std::size_t k = 0; k < starts; ++k)
        if (result.start_values[k] >= result.value - slack) ties.push_back(&outcomes[k].theta);
    result.maximizers = detail::cluster(ties);
    return result;
}

struct GapReport {
    double phi = 0.0;          // exact log partition function
    double sup_m = 0.0;        // best mean-field value found
    double gap_per_site = 0.0; // (phi - sup_m) / n
};

inline GapReport mf_gap(const PottsModel& model, const Schedule& schedule = {},
                        std::uint64_t cap = kDefaultEnumerationCap) {
    GapReport g;
    g.phi = log_partition(model, cap);
    g.sup_m = mf_solve(model, schedule).value;
    g.gap_per_site = (g.phi - g.sup_m) / static_cast<double>(model.n());
    return g;
}

}  // namespace mfpotts
