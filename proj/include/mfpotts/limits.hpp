#pragma once

// Closed forms and fixed points for the large-n limits: the Curie-Weiss
// simplex problem, its rate function, the magnetization root m(beta, B) and
// the bi-regular bipartite Ising limit.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mfpotts/error.hpp"
#include "mfpotts/model.hpp"
#include "mfpotts/numeric.hpp"
#include "mfpotts/rng.hpp"

namespace mfpotts {

// f(theta) = beta/2 sum theta_r^2 + sum h_r theta_r - sum theta_r log theta_r
inline double cw_objective(double beta, std::span<const double> h, std::span<const double> theta) {
    double s = 0.0;
    for (std::size_t r = 0; r < theta.size(); ++r)
        s += 0.5 * beta * theta[r] * theta[r] + h[r] * theta[r] - xlogx(theta[r]);
    return s;
}

struct CwLimit {
    double value = 0.0;
    std::vector<SimplexPoint> argmax;  // deduplicated at sup-norm radius 1e-6
};

struct MinimizerSet {
    std::vector<SimplexPoint> points;
    double rate_min = 0.0;
};

inline constexpr double kSimplexClusterRadius = 1e-6;

namespace detail {

inline std::vector<double> cw_map(double beta, std::span<const double> h, std::span<const double> theta) {
    std::vector<double> x(theta.size());
    for (std::size_t r = 0; r < theta.size(); ++r) x[r] = beta * theta[r] + h[r];
    return softmax(x);
}

// Projected gradient ascent with backtracking; only accepts improving steps.
inline void polish_on_simplex(double beta, std::span<const double> h, std::vector<double>& theta) {
    const std::size_t q = theta.size();
    double value = cw_objective(beta, h, theta);
    double step = 1e-2;
    for (int it = 0; it < 200 && step > 1e-18; ++it) {
        std::vector<double> grad(q);
        double mean = 0.0;
        for (std::size_t r = 0; r < q; ++r) {
            grad[r] = beta * theta[r] + h[r] - std::log(std::max(theta[r], kEntropyFloor)) - 1.0;
            mean += grad[r];
        }
        mean /= static_cast<double>(q);
        std::vector<double> trial(q);
        double sum = 0.0;
        for (std::size_t r = 0; r < q; ++r) {
            trial[r] = std::max(0.0, theta[r] + step * (grad[r] - mean));
            sum += trial[r];
        }
        for (double& t : trial) t /= sum;
        const double tv = cw_objective(beta, h, trial);
        if (tv > value) {
            theta = std::move(trial);
            value = tv;
            step *= 2.0;
        } else {
            step *= 0.25;
        }
    }
}

inline std::vector<double> exact_simplex(std::vector<double> p) {
    double rest = 1.0;
    for (std::size_t r = 0; r + 1 < p.size(); ++r) {
        p[r] = std::clamp(p[r], 0.0, 1.0);
        rest -= p[r];
    }
    p.back() = std::clamp(rest, 0.0, 1.0);
    return p;
}

}  // namespace detail

// Maximises f over the simplex: damped self-consistency theta <- T(beta theta + h)
// from the uniform point, the q near-vertices at distance 1e-3 and 8 seeded
// random points, then a projected-ascent polish. Returns every maximiser whose
// value ties the best within 1e-9.
inline CwLimit cw_limit(std::size_t q, double beta, std::span<const double> h) {
    detail::require(q >= 2, "cw_limit: q must be at least 2");
    detail::require(h.size() == q, "cw_limit: h must have length q");

    std::vector<std::vector<double>> starts;
    starts.emplace_back(q, 1.0 / static_cast<double>(q));
    for (std::size_t v = 0; v < q; ++v) {
        std::vector<double> p(q, 1e-3 / static_cast<double>(q - 1));
        p[v] = 1.0 - 1e-3;
        starts.push_back(std::move(p));
    }
    SplitMix64 rng(0x5EED5EEDULL);
    for (int k = 0; k < 8; ++k) {
        std::vector<double> p(q);
        double sum = 0.0;
        for (double& x : p) sum += (x = -std::log(1.0 - rng.uniform()) + 1e-12);
        for (double& x : p) x /= sum;
        starts.push_back(std::move(p));
    }

    std::vector<std::pair<double, std::vector<double>>> ends;
    for (auto theta : starts) {
        for (int it = 0; it < 100000; ++it) {
            const auto next = detail::cw_map(beta, h, theta);
            double change = 0.0;
            for (std::size_t r = 0; r < q; ++r) {
                const double v = 0.5 * theta[r] + 0.5 * next[r];
                change = std::max(change, std::abs(v - theta[r]));
                theta[r] = v;
            }
            if (change <= 1e-15) break;
        }
        detail::polish_on_simplex(beta, h, theta);
        theta = detail::exact_simplex(std::move(theta));
        ends.emplace_back(cw_objective(beta, h, theta), std::move(theta));
    }

    CwLimit out;
    out.value = ends.front().first;
    for (const auto& e : ends) out.value = std::max(out.value, e.first);
    const double slack = 1e-9 * std::max(1.0, std::abs(out.value));
    for (const auto& [val, theta] : ends) {
        if (val < out.value - slack) continue;
        const bool seen = std::any_of(out.argmax.begin(), out.argmax.end(), [&](const SimplexPoint& p) {
            double d = 0.0;
            for (std::size_t r = 0; r < q; ++r) d = std::max(d, std::abs(p[r] - theta[r]));
            return d <= kSimplexClusterRadius;
        });
        if (!seen) out.argmax.emplace_back(theta);
    }
    return out;
}

inline CwLimit cw_limit(std::size_t q, double beta, const std::vector<double>& h) {
    return cw_limit(q, beta, std::span<const double>(h));
}

// The root of m = tanh(beta m + B) with the sign of B; for B = 0 the positive
// root when beta > 1, else 0. Bisection to adjacent doubles.
inline double cw_magnetization(double beta, double field) {
    if (field < 0.0) return -cw_magnetization(beta, -field);
    auto g = [&](double m) { return std::tanh(beta * m + field) - m; };
    double lo, hi;
    if (beta < 0.0) {
        lo = -1.0;  // g decreasing: unique root
        hi = 1.0;
    } else if (field == 0.0) {
        if (beta <= 1.0) return 0.0;
        lo = 1e-15;
        hi = 1.0;
    } else {
        lo = 0.0;
        hi = 1.0;
    }
    // Invariant: g(lo) > 0 >= g(hi).
    if (g(hi) > 0.0) return hi;
    for (int it = 0; it < 2000; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (g(mid) > 0.0 ? lo : hi) = mid;
    }
    return std::abs(g(lo)) < std::abs(g(hi)) ? lo : hi;
}

struct LdpRate {
    double rate = 0.0;
    double rate_tilde = 0.0;
};

// I(mu) = sum_r mu_r log mu_r - beta mu_r^2 / 2 - h_r mu_r
inline double ldp_rate_value(double beta, std::span<const double> h, const SimplexPoint& mu) {
    return -cw_objective(beta, h, mu.probs());
}

inline MinimizerSet ldp_minimizers(std::size_t q, double beta, std::span<const double> h) {
    auto lim = cw_limit(q, beta, h);
    return MinimizerSet{std::move(lim.argmax), -lim.value};
}

inline MinimizerSet ldp_minimizers(std::size_t q, double beta, const std::vector<double>& h) {
    return ldp_minimizers(q, beta, std::span<const double>(h));
}

// rate_tilde = I - min I, clamped at 0 against rounding at the minimiser.
inline LdpRate ldp_rate(std::size_t q, double beta, std::span<const double> h, const SimplexPoint& mu,
                        double rate_min) {
    detail::require(mu.size() == q && h.size() == q, "ldp_rate: dimension mismatch");
    LdpRate out;
    out.rate = ldp_rate_value(beta, h, mu);
    out.rate_tilde = std::max(0.0, out.rate - rate_min);
    return out;
}

inline LdpRate ldp_rate(std::size_t q, double beta, std::span<const double> h, const SimplexPoint& mu) {
    return ldp_rate(q, beta, h, mu, ldp_minimizers(q, beta, h).rate_min);
}

// ---------------------------------------------------------------------------
// Bipartite Ising

// eta(s) = tanh(beta (1 - p) tanh(beta p s))
inline double bipartite_eta(double beta, double p, double s) {
    return std::tanh(beta * (1.0 - p) * std::tanh(beta * p * s));
}

inline bool bipartite_supercritical(double beta, double p) { return beta * beta * p * (1.0 - p) > 1.0; }

// Unique nonnegative fixed point of eta_{|beta|, p}; 0 on and below the
// critical curve beta^2 p (1 - p) = 1.
inline double bipartite_sigma(double beta, double p) {
    detail::require(p > 0.0 && p < 1.0, "bipartite_sigma: p must lie in (0,1)");
    const double b = std::abs(beta);
    if (!bipartite_supercritical(b, p)) return 0.0;
    auto g = [&](double s) { return bipartite_eta(b, p, s) - s; };

    double s = 1.0;
    for (int it = 0; it < 200; ++it) s = 0.5 * s + 0.5 * bipartite_eta(b, p, s);

    double lo = 1e-15, hi = 1.0;  // g(lo) > 0 >= g(hi)
    if (g(hi) > 0.0) return hi;
    if (s > lo && s < hi) (g(s) > 0.0 ? lo : hi) = s;
    for (int it = 0; it < 2000; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (g(mid) > 0.0 ? lo : hi) = mid;
    }
    return std::abs(g(lo)) < std::abs(g(hi)) ? lo : hi;
}

// Limit of Phi_n / n for bi-regular bipartite graphs with side fraction p,
// adjacency scaled by 1/(c + d), J = beta I_2, h = 0.
inline double bipartite_limit(double beta, double p) {
    detail::require(p > 0.0 && p < 1.0, "bipartite_limit: p must lie in (0,1)");
    const double base = 0.5 * beta * p * (1.0 - p);
    if (!bipartite_supercritical(beta, p)) return base + std::log(2.0);
    const double b = std::abs(beta);
    const double s1 = bipartite_sigma(b, p);
    const double s2 = bipartite_sigma(b, 1.0 - p);
    return base + 0.5 * b * p * (1.0 - p) * s1 * s2 + p * binary_entropy(s1) + (1.0 - p) * binary_entropy(s2);
}

// sup of the mean-field objective on G_{(a,b),(c,d)} scaled by 1/(c+d):
// (beta/2) E + (|beta|/2) E sigma_a sigma_b + a H(sigma_a) + b H(sigma_b), E = ac/(c+d).
// For beta < 0 the optimal sides carry opposite signs, so the cross term stays +|beta|.
inline double finite_bipartite_value(std::size_t a, std::size_t b, std::size_t c, std::size_t d, double beta) {
    detail::require(a >= 1 && b >= 1 && c >= 1 && d >= 1, "finite_bipartite_value: sizes and degrees must be positive");
    detail::require(a * c == b * d, "finite_bipartite_value: bi-regularity needs a*c == b*d");
    const double cd = static_cast<double>(c + d);
    const double edges = static_cast<double>(a * c) / cd;
    const double sa = bipartite_sigma(beta, static_cast<double>(d) / cd);
    const double sb = bipartite_sigma(beta, static_cast<double>(c) / cd);
    return 0.5 * beta * edges + 0.5 * std::abs(beta) * edges * sa * sb + static_cast<double>(a) * binary_entropy(sa) +
           static_cast<double>(b) * binary_entropy(sb);
}

// Exact sup of the mean-field objective on the same graph with J = beta I_2,
// h = 0. Stationarity of (beta/2) sum A s_i s_j + sum H(s_i) gives
// s_i = tanh((beta/2) sum_j A(i,j) s_j), so the side magnetizations are the
// fixed points of eta at beta/2, not beta as in finite_bipartite_value.
inline double finite_bipartite_sup(std::size_t a, std::size_t b, std::size_t c, std::size_t d, double beta) {
    detail::require(a >= 1 && b >= 1 && c >= 1 && d >= 1, "finite_bipartite_sup: sizes and degrees must be positive");
    detail::require(a * c == b * d, "finite_bipartite_sup: bi-regularity needs a*c == b*d");
    const double cd = static_cast<double>(c + d);
    const double edges = static_cast<double>(a * c) / cd;
    const double sa = bipartite_sigma(0.5 * beta, static_cast<double>(d) / cd);
    const double sb = bipartite_sigma(0.5 * beta, static_cast<double>(c) / cd);
    return 0.5 * beta * edges + 0.5 * std::abs(beta) * edges * sa * sb + static_cast<double>(a) * binary_entropy(sa) +
           static_cast<double>(b) * binary_entropy(sb);
}

}  // namespace mfpotts
