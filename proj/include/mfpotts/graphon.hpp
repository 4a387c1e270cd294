#pragma once

// Block-constant graphons: the step kernel W_{A} of a matrix, exact cut and
// infinity-to-one norms by enumeration, and the functional F(W, rho) over
// block-constant fractional partitions.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mfpotts/error.hpp"
#include "mfpotts/matrix.hpp"
#include "mfpotts/meanfield.hpp"
#include "mfpotts/numeric.hpp"

namespace mfpotts {

class StepGraphon {
public:
    StepGraphon() = default;

    StepGraphon(std::size_t k, std::vector<double> values, std::vector<double> masses)
        : k_(k), values_(std::move(values)), masses_(std::move(masses)) {
        detail::require(k_ >= 1, "step graphon needs at least one block");
        detail::require(values_.size() == k_ * k_, "step graphon values must be k x k");
        detail::require(masses_.size() == k_, "step graphon needs k masses");
        double total = 0.0;
        for (double m : masses_) {
            detail::require(m > 0.0, "step graphon masses must be positive");
            total += m;
        }
        detail::require(std::abs(total - 1.0) <= 1e-12, "step graphon masses must sum to 1");
        for (std::size_t i = 0; i < k_; ++i)
            for (std::size_t j = i + 1; j < k_; ++j)
                detail::require(value(i, j) == value(j, i), "step graphon values must be symmetric");
    }

    static StepGraphon uniform_blocks(std::size_t k, std::vector<double> values) {
        return StepGraphon(k, std::move(values), std::vector<double>(k, 1.0 / static_cast<double>(k)));
    }

    std::size_t k() const noexcept { return k_; }
    double value(std::size_t i, std::size_t j) const noexcept { return values_[i * k_ + j]; }
    double mass(std::size_t i) const noexcept { return masses_[i]; }
    const std::vector<double>& values() const noexcept { return values_; }
    const std::vector<double>& masses() const noexcept { return masses_; }

    // integral of W over the unit square
    double integral() const noexcept {
        double s = 0.0;
        for (std::size_t i = 0; i < k_; ++i)
            for (std::size_t j = 0; j < k_; ++j) s += masses_[i] * masses_[j] * value(i, j);
        return s;
    }

    StepGraphon scaled(double c) const {
        StepGraphon out = *this;
        for (double& v : out.values_) v *= c;
        return out;
    }

    // Blocks relabelled: new block i is old block perm[i].
    StepGraphon permuted(std::span<const std::size_t> perm) const {
        detail::require(perm.size() == k_, "permutation length must equal k");
        std::vector<double> v(k_ * k_), m(k_);
        for (std::size_t i = 0; i < k_; ++i) {
            m[i] = masses_[perm[i]];
            for (std::size_t j = 0; j < k_; ++j) v[i * k_ + j] = value(perm[i], perm[j]);
        }
        return StepGraphon(k_, std::move(v), std::move(m));
    }

private:
    std::size_t k_ = 0;
    std::vector<double> values_;
    std::vector<double> masses_;
};

// Block-constant fractional partition: row i is the color law on block i.
using BlockPartition = ProductMeasure;

// W_A(x, y) = A(i, j) on the (i, j) cell of the uniform n-block grid, times n when asked.
inline StepGraphon step_from_matrix(const CouplingMatrix& a, bool multiply_by_n) {
    const std::size_t n = a.n();
    std::vector<double> v = a.entries();
    if (multiply_by_n)
        for (double& x : v) x *= static_cast<double>(n);
    return StepGraphon::uniform_blocks(n, std::move(v));
}

// ---------------------------------------------------------------------------
// Norms

struct CutNorms {
    double cut = 0.0;       // sup over block unions S, T of |int_{S x T} W|
    double inf_to_1 = 0.0;  // sup over f, g in {-1, +1}^k of |int W f g|
};

inline constexpr std::size_t kCutNormBlockCap = 20;

namespace detail {

inline std::vector<double> cell_weights(const StepGraphon& w) {
    const std::size_t k = w.k();
    std::vector<double> out(k * k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) out[i * k + j] = w.mass(i) * w.mass(j) * w.value(i, j);
    return out;
}

// Column sums r_j = sum_i x_i w_ij in a fixed order; x is a 0/1 or +-1 vector.
inline void column_sums(const std::vector<double>& wt, std::size_t k, const std::vector<double>& x,
                        std::vector<double>& r) {
    for (std::size_t j = 0; j < k; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < k; ++i) s += x[i] * wt[i * k + j];
        r[j] = s;
    }
}

// Best T for a given S: all positive or all negative column sums.
inline double best_rectangle(const std::vector<double>& r) {
    double pos = 0.0, neg = 0.0;
    for (double v : r) {
        if (v > 0.0) pos += v;
        if (v < 0.0) neg -= v;
    }
    return std::max(pos, neg);
}

inline double l1(const std::vector<double>& r) {
    double s = 0.0;
    for (double v : r) s += std::abs(v);
    return s;
}

// Gray-code walk over 2^bits left vectors. `base` is the vector at code 0 and
// flipping bit b adds `delta(b)` times row (offset + b). Incremental sums pick
// candidates; every candidate within `slack` of the running best is re-scored
// from scratch so the answer equals a from-scratch enumeration.
template <class Score>
double gray_search(const std::vector<double>& wt, std::size_t k, std::vector<double> x, std::size_t offset,
                   std::size_t bits, double on, double off, double slack, Score&& score) {
    std::vector<double> r(k), exact(k);
    column_sums(wt, k, x, r);
    double best = score(r);
    const std::uint64_t total = std::uint64_t{1} << bits;
    for (std::uint64_t step = 1; step < total; ++step) {
        const std::size_t b = offset + static_cast<std::size_t>(std::countr_zero(step));
        const double delta = (x[b] == on) ? (off - on) : (on - off);
        x[b] = (x[b] == on) ? off : on;
        for (std::size_t j = 0; j < k; ++j) r[j] += delta * wt[b * k + j];
        if ((step & 0x3FF) == 0) column_sums(wt, k, x, r);
        const double approx = score(r);
        if (approx >= best - slack) {
            column_sums(wt, k, x, exact);
            best = std::max(best, score(exact));
        }
    }
    return best;
}

}  // namespace detail

inline CutNorms cut_norm_exact(const StepGraphon& w, std::size_t cap = kCutNormBlockCap) {
    const std::size_t k = w.k();
    if (k > cap || k > 40)
        throw CapExceeded("cut_norm_exact: " + std::to_string(k) + " blocks exceed cap " + std::to_string(cap));
    const auto wt = detail::cell_weights(w);
    double scale = 0.0;
    for (double v : wt) scale += std::abs(v);
    const double slack = 1e-10 * scale;

    CutNorms out;
    out.cut = detail::gray_search(wt, k, std::vector<double>(k, 0.0), 0, k, 1.0, 0.0, slack, detail::best_rectangle);
    // f and -f give the same value, so pin f_0 = +1.
    std::vector<double> f(k, 1.0);
    out.inf_to_1 = detail::gray_search(wt, k, std::move(f), 1, k - 1, 1.0, -1.0, slack, detail::l1);
    return out;
}

// ---------------------------------------------------------------------------
// F(W, rho) = 1/2 sum_{r,s} J_rs int W rho_r rho_s + sum_r h_r int rho_r - int sum_r rho_r log rho_r

inline double f_functional(const StepGraphon& w, const BlockPartition& rho, std::span<const double> j_entries,
                           std::span<const double> h) {
    const std::size_t k = w.k();
    const std::size_t q = rho.q();
    detail::require(rho.n() == k, "f_functional: partition block count must equal graphon block count");
    detail::require(j_entries.size() == q * q && h.size() == q, "f_functional: J must be q x q and h length q");
    std::vector<double> mixed(q);
    double pair = 0.0, field = 0.0, entropy = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        std::fill(mixed.begin(), mixed.end(), 0.0);
        for (std::size_t jb = 0; jb < k; ++jb) {
            const double wij = w.mass(jb) * w.value(i, jb);
            if (wij == 0.0) continue;
            for (std::size_t s = 0; s < q; ++s) mixed[s] += wij * rho(jb, s);
        }
        double local_pair = 0.0, local_field = 0.0, local_entropy = 0.0;
        for (std::size_t r = 0; r < q; ++r) {
            double js = 0.0;
            for (std::size_t s = 0; s < q; ++s) js += j_entries[r * q + s] * mixed[s];
            local_pair += rho(i, r) * js;
            local_field += h[r] * rho(i, r);
            local_entropy -= xlogx(rho(i, r));
        }
        pair += w.mass(i) * local_pair;
        field += w.mass(i) * local_field;
        entropy += w.mass(i) * local_entropy;
    }
    return 0.5 * pair + field + entropy;
}

struct FSupResult {
    double value = 0.0;
    BlockPartition rho_star;
    bool converged = false;
    std::size_t sweeps_used = 0;
};

// Block-coordinate ascent: rho_i <- T(gamma_i + h) with the mass-weighted field
// gamma_ir = sum_s J_rs sum_j m_j W_ij rho_js. Starts as in mf_solve.
inline FSupResult f_sup(const StepGraphon& w, std::size_t q, std::span<const double> j_entries,
                        std::span<const double> h, const Schedule& schedule = {}) {
    detail::require(q >= 2, "f_sup: q must be at least 2");
    detail::require(j_entries.size() == q * q && h.size() == q, "f_sup: J must be q x q and h length q");
    detail::require(schedule.damping >= 0.0 && schedule.damping < 1.0, "f_sup: damping must lie in [0,1)");
    const std::size_t k = w.k();

    auto update = [&](const BlockPartition& rho, std::size_t i) {
        std::vector<double> mixed(q, 0.0), g(q);
        for (std::size_t jb = 0; jb < k; ++jb) {
            const double wij = w.mass(jb) * w.value(i, jb);
            if (wij == 0.0) continue;
            for (std::size_t s = 0; s < q; ++s) mixed[s] += wij * rho(jb, s);
        }
        for (std::size_t r = 0; r < q; ++r) {
            double v = h[r];
            for (std::size_t s = 0; s < q; ++s) v += j_entries[r * q + s] * mixed[s];
            g[r] = v;
        }
        return softmax(g);
    };

    FSupResult best;
    const std::size_t starts = schedule.starts(q);
    for (std::size_t s = 0; s < starts; ++s) {
        auto outcome = detail::coordinate_ascent(detail::initial_measure(k, q, s, schedule.seed), k, schedule, update);
        const double v = f_functional(w, outcome.theta, j_entries, h);
        if (s == 0 || v > best.value) {
            best.value = v;
            best.rho_star = std::move(outcome.theta);
            best.converged = outcome.converged;
            best.sweeps_used = outcome.sweeps;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Cut distance restricted to block permutations (an upper bound on the true
// cut distance, which ranges over all measure-preserving couplings).

inline constexpr std::size_t kCutDistanceBlockCap = 8;

inline double cut_distance_blocks(const StepGraphon& w1, const StepGraphon& w2, std::size_t cap = kCutDistanceBlockCap) {
    const std::size_t k = w1.k();
    detail::require(w2.k() == k, "cut_distance_blocks: graphons need equal block counts");
    for (std::size_t i = 0; i < k; ++i)
        detail::require(std::abs(w1.mass(i) - w2.mass(i)) <= 1e-12, "cut_distance_blocks: graphons need equal masses");
    if (k > cap) throw CapExceeded("cut_distance_blocks: " + std::to_string(k) + " blocks exceed cap " + std::to_string(cap));

    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    double best = std::numeric_limits<double>::infinity();
    do {
        bool preserves = true;
        for (std::size_t i = 0; i < k && preserves; ++i) preserves = std::abs(w2.mass(perm[i]) - w1.mass(i)) <= 1e-12;
        if (!preserves) continue;
        std::vector<double> diff(k * k);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) diff[i * k + j] = w1.value(i, j) - w2.value(perm[i], perm[j]);
        best = std::min(best, cut_norm_exact(StepGraphon(k, std::move(diff), w1.masses())).cut);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

// ---------------------------------------------------------------------------
// File format: line 1 k; line 2 the k masses; then k rows of k values.

inline StepGraphon read_graphon(std::istream& in) {
    long long k = 0;
    if (!(in >> k) || k < 1) throw ParseError("graphon file: first token must be a positive block count");
    const auto kk = static_cast<std::size_t>(k);
    std::vector<double> masses(kk), values(kk * kk);
    for (double& m : masses)
        if (!(in >> m)) throw ParseError("graphon file: expected " + std::to_string(kk) + " masses");
    for (double& v : values)
        if (!(in >> v)) throw ParseError("graphon file: expected " + std::to_string(kk * kk) + " values");
    std::string rest;
    if (in >> rest) throw ParseError("graphon file: trailing data '" + rest + "'");
    double total = 0.0;
    for (double m : masses) {
        if (!(m > 0.0)) throw ParseError("graphon file: masses must be positive");
        total += m;
    }
    if (std::abs(total - 1.0) > 1e-12) throw ParseError("graphon file: masses must sum to 1");
    for (std::size_t i = 0; i < kk; ++i)
        for (std::size_t j = i + 1; j < kk; ++j) {
            double& a = values[i * kk + j];
            double& b = values[j * kk + i];
            if (!detail::nearly_equal(a, b)) throw ParseError("graphon file: values are not symmetric");
            a = b = 0.5 * (a + b);
        }
    return StepGraphon(kk, std::move(values), std::move(masses));
}

inline StepGraphon load_graphon(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open graphon file '" + path + "'");
    return read_graphon(in);
}

inline void write_graphon(std::ostream& out, const StepGraphon& w) {
    const auto old_precision = out.precision(17);
    out << w.k() << '\n';
    for (std::size_t i = 0; i < w.k(); ++i) out << (i ? " " : "") << w.mass(i);
    out << '\n';
    for (std::size_t i = 0; i < w.k(); ++i) {
        for (std::size_t j = 0; j < w.k(); ++j) out << (j ? " " : "") << w.value(i, j);
        out << '\n';
    }
    out.precision(old_precision);
}

}  // namespace mfpotts
