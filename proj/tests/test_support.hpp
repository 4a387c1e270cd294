#pragma once

// Shared generators and independent oracles for the test suites.

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "mfpotts/mfpotts.hpp"

namespace mfpotts::testing {

inline double uniform_in(SplitMix64& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

inline std::size_t index_below(SplitMix64& rng, std::size_t k) {
    return static_cast<std::size_t>(rng.uniform() * static_cast<double>(k)) % k;
}

// Symmetric zero-diagonal matrix with entries in [-scale, scale].
inline CouplingMatrix random_coupling(SplitMix64& rng, std::size_t n, double scale = 1.0) {
    auto a = CouplingMatrix::zeros(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) a.set(i, j, uniform_in(rng, -scale, scale));
    return a;
}

inline std::vector<double> random_symmetric_j(SplitMix64& rng, std::size_t q, double scale) {
    std::vector<double> j(q * q);
    for (std::size_t r = 0; r < q; ++r)
        for (std::size_t s = r; s < q; ++s) j[r * q + s] = j[s * q + r] = uniform_in(rng, -scale, scale);
    return j;
}

inline std::vector<double> random_fields(SplitMix64& rng, std::size_t q, double scale) {
    std::vector<double> h(q);
    for (double& x : h) x = uniform_in(rng, -scale, scale);
    return h;
}

inline ProductMeasure random_measure(SplitMix64& rng, std::size_t n, std::size_t q) {
    std::vector<double> t(n * q);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t r = 0; r < q; ++r) s += (t[i * q + r] = rng.uniform() + 1e-3);
        double rest = 1.0;
        for (std::size_t r = 0; r + 1 < q; ++r) rest -= (t[i * q + r] /= s);
        t[i * q + q - 1] = rest;
    }
    return ProductMeasure(n, q, std::move(t));
}

// A random graph-ish model: one of several ensembles or a dense random matrix,
// q <= 3, |beta| <= 3, |h| <= 1, n <= 8.
inline PottsModel random_small_model(SplitMix64& rng) {
    const std::size_t q = 2 + index_below(rng, 2);
    const double beta = uniform_in(rng, -3.0, 3.0);
    std::vector<double> h = random_fields(rng, q, 1.0);
    CouplingMatrix a;
    switch (index_below(rng, 5)) {
        case 0: a = generate(ensemble::Complete{2 + index_below(rng, 7)}); break;
        case 1: a = generate(ensemble::RegularCirculant{8, 2}); break;
        case 2: a = generate(ensemble::CompleteBipartite{1 + index_below(rng, 4), 1 + index_below(rng, 4)}); break;
        case 3: a = drop_diagonal(generate(ensemble::SherringtonKirkpatrick{2 + index_below(rng, 7), rng()})).first; break;
        default: a = random_coupling(rng, 2 + index_below(rng, 7)); break;
    }
    std::vector<double> j(q * q, 0.0);
    if (index_below(rng, 3) == 0) {
        j = random_symmetric_j(rng, q, 3.0);
    } else {
        for (std::size_t r = 0; r < q; ++r) j[r * q + r] = beta;
    }
    return PottsModel(std::move(a), q, std::move(j), std::move(h));
}

// Naive enumeration of log Z straight from the Hamiltonian definition.
inline double naive_log_partition(const PottsModel& model) {
    const std::size_t n = model.n(), q = model.q();
    ColorConfig y(n, 0);
    std::vector<double> energies;
    for (;;) {
        energies.push_back(hamiltonian(model, y));
        std::size_t i = 0;
        while (i < n && ++y[i] == q) y[i++] = 0;
        if (i == n) break;
    }
    double m = energies.front();
    for (double e : energies) m = std::max(m, e);
    double s = 0.0;
    for (double e : energies) s += std::exp(e - m);
    return m + std::log(s);
}

inline double cw_f(double beta, const std::vector<double>& h, const std::vector<double>& t) {
    double s = 0.0;
    for (std::size_t r = 0; r < t.size(); ++r) {
        s += 0.5 * beta * t[r] * t[r] + h[r] * t[r];
        if (t[r] > 0.0) s -= t[r] * std::log(t[r]);
    }
    return s;
}

// Grid maximum of a function on [lo, hi] followed by golden-section refinement.
inline std::pair<double, double> grid_max_1d(const std::function<double(double)>& f, double lo, double hi,
                                              int points = 20001) {
    double best_x = lo, best = f(lo);
    for (int k = 1; k < points; ++k) {
        const double x = lo + (hi - lo) * k / (points - 1);
        const double v = f(x);
        if (v > best) best = v, best_x = x;
    }
    const double step = (hi - lo) / (points - 1);
    double a = std::max(lo, best_x - step), b = std::min(hi, best_x + step);
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 200; ++it) {
        const double c = b - g * (b - a), d = a + g * (b - a);
        (f(c) > f(d) ? b : a) = (f(c) > f(d) ? d : c);
    }
    const double x = 0.5 * (a + b);
    return {x, std::max(best, f(x))};
}

// Curie-Weiss value for q = 2 by a 1-d search over theta_1.
inline double cw_grid_q2(double beta, const std::vector<double>& h) {
    return grid_max_1d([&](double t) { return cw_f(beta, h, {t, 1.0 - t}); }, 0.0, 1.0).second;
}

// q = 3 grid search on the simplex (step 1/n) with local refinement.
inline double cw_grid_q3(double beta, const std::vector<double>& h, int n = 600) {
    double best = -1e300, bx = 0, by = 0;
    for (int a = 0; a <= n; ++a)
        for (int b = 0; a + b <= n; ++b) {
            const double x = double(a) / n, y = double(b) / n;
            const double v = cw_f(beta, h, {x, y, 1.0 - x - y});
            if (v > best) best = v, bx = x, by = y;
        }
    double step = 1.0 / n;
    for (int it = 0; it < 60; ++it) {
        bool moved = false;
        for (int dx = -1; dx <= 1; ++dx)
            for (int dy = -1; dy <= 1; ++dy) {
                const double x = bx + dx * step, y = by + dy * step;
                if (x < 0 || y < 0 || x + y > 1) continue;
                const double v = cw_f(beta, h, {x, y, 1.0 - x - y});
                if (v > best) best = v, bx = x, by = y, moved = true;
            }
        if (!moved) step *= 0.5;
    }
    return best;
}

// Plain bisection for m = tanh(beta m + B) on (0, 1], independent of the library.
inline double bisect_tanh_root(double beta, double field) {
    double lo = field > 0 ? 0.0 : 1e-12, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (std::tanh(beta * mid + field) - mid > 0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Undamped-then-damped plain iteration of eta from 1.
inline double damped_sigma_oracle(double beta, double p) {
    double s = 1.0;
    for (int it = 0; it < 200000; ++it) {
        const double next = std::tanh(beta * (1 - p) * std::tanh(beta * p * s));
        s = 0.7 * s + 0.3 * next;
    }
    return s;
}

inline double entropy2(double s) {
    auto term = [](double x) { return x > 0 ? -x * std::log(x) : 0.0; };
    return term((1 + s) / 2) + term((1 - s) / 2);
}

inline StepGraphon random_step(SplitMix64& rng, std::size_t k, bool equal_masses = false) {
    std::vector<double> v(k * k), m(k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i; j < k; ++j) v[i * k + j] = v[j * k + i] = uniform_in(rng, -1.0, 1.0);
    if (equal_masses) return StepGraphon::uniform_blocks(k, std::move(v));
    double s = 0.0;
    for (double& x : m) s += (x = rng.uniform() + 0.05);
    double rest = 1.0;
    for (std::size_t i = 0; i + 1 < k; ++i) rest -= (m[i] /= s);
    m[k - 1] = rest;
    return StepGraphon(k, std::move(v), std::move(m));
}

// Cut norm by naive enumeration of all subset pairs (k <= 10).
inline double naive_cut_norm(const StepGraphon& w) {
    const std::size_t k = w.k();
    double best = 0.0;
    for (std::uint32_t s = 0; s < (1u << k); ++s)
        for (std::uint32_t t = 0; t < (1u << k); ++t) {
            double v = 0.0;
            for (std::size_t i = 0; i < k; ++i)
                if (s >> i & 1u)
                    for (std::size_t j = 0; j < k; ++j)
                        if (t >> j & 1u) v += w.mass(i) * w.mass(j) * w.value(i, j);
            best = std::max(best, std::abs(v));
        }
    return best;
}

}  // namespace mfpotts::testing
