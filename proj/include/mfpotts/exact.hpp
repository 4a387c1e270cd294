#pragma once

// Brute-force oracle: everything here enumerates all q^n colorings.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mfpotts/error.hpp"
#include "mfpotts/model.hpp"
#include "mfpotts/numeric.hpp"

namespace mfpotts {

using ColorConfig = std::vector<std::size_t>;

inline constexpr std::uint64_t kDefaultEnumerationCap = std::uint64_t{1} << 24;

inline double hamiltonian(const PottsModel& model, const ColorConfig& y) {
    const std::size_t n = model.n();
    detail::require(y.size() == n, "hamiltonian: configuration length must equal n");
    for (std::size_t c : y) detail::require(c < model.q(), "hamiltonian: color out of range");
    const auto& a = model.coupling();
    double pair = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) pair += a(i, j) * model.J(y[i], y[j]);
    double field = 0.0;
    for (std::size_t i = 0; i < n; ++i) field += model.h(y[i]);
    return 0.5 * pair + field;
}

// Number of configurations q^n, or throws CapExceeded when it passes cap.
inline std::uint64_t configuration_count(std::size_t n, std::size_t q, std::uint64_t cap) {
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < n; ++i) {
        if (total > cap / q) {
            throw CapExceeded("enumeration of " + std::to_string(q) + "^" + std::to_string(n) +
                              " configurations exceeds cap " + std::to_string(cap));
        }
        total *= q;
    }
    if (total > cap)
        throw CapExceeded("enumeration of " + std::to_string(total) + " configurations exceeds cap " +
                          std::to_string(cap));
    return total;
}

namespace detail {

// Walks [q]^n as a mixed-radix counter with site 0 fastest, handing each
// configuration and its energy to visit(y, energy). Energies are updated
// incrementally and recomputed from scratch every 4096 steps.
template <class Visitor>
void for_each_configuration(const PottsModel& model, std::uint64_t cap, Visitor&& visit) {
    const std::size_t n = model.n();
    const std::size_t q = model.q();
    configuration_count(n, q, cap);
    const auto& a = model.coupling();

    ColorConfig y(n, 0);
    double energy = hamiltonian(model, y);
    std::uint64_t step = 0;

    auto change = [&](std::size_t i, std::size_t to) {
        const std::size_t from = y[i];
        double delta = model.h(to) - model.h(from);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            delta += a(i, j) * (model.J(to, y[j]) - model.J(from, y[j]));
        }
        delta += 0.5 * a(i, i) * (model.J(to, to) - model.J(from, from));
        y[i] = to;
        energy += delta;
    };

    for (;;) {
        visit(static_cast<const ColorConfig&>(y), energy);
        std::size_t i = 0;
        while (i < n && y[i] + 1 == q) {
            change(i, 0);
            ++i;
        }
        if (i == n) return;
        change(i, y[i] + 1);
        if ((++step & 0xFFF) == 0) energy = hamiltonian(model, y);
    }
}

}  // namespace detail

inline double log_partition(const PottsModel& model, std::uint64_t cap = kDefaultEnumerationCap) {
    LogSumExpAccumulator acc;
    detail::for_each_configuration(model, cap, [&](const ColorConfig&, double e) { acc.add(e); });
    return acc.value();
}

// P(Y_i = . | Y_k = y_k, k != i): the map T applied to gamma_i + h with
// gamma_ir = sum_s J(r,s) sum_j A(i,j) [y_j = s]. Requires a zero diagonal.
inline SimplexPoint conditional_distribution(const PottsModel& model, const ColorConfig& y, std::size_t site) {
    const std::size_t n = model.n();
    const std::size_t q = model.q();
    detail::require(site < n, "conditional_distribution: site out of range");
    detail::require(y.size() == n, "conditional_distribution: configuration length must equal n");
    detail::require(model.coupling().zero_diagonal(), "conditional_distribution: coupling matrix must have zero diagonal");
    const auto& a = model.coupling();
    std::vector<double> field(q, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        detail::require(y[j] < q, "conditional_distribution: color out of range");
        const double w = a(site, j);
        if (w == 0.0) continue;
        for (std::size_t r = 0; r < q; ++r) field[r] += w * model.J(r, y[j]);
    }
    for (std::size_t r = 0; r < q; ++r) field[r] += model.h(r);
    return SimplexPoint(softmax(field));
}

// Exact law of the color counts (k_1..k_q), sum k_r = n, under the Gibbs measure.
struct EmpiricalLaw {
    std::size_t n = 0;
    std::size_t q = 0;
    double log_partition = 0.0;
    // Sorted lexicographically by count vector.
    std::vector<std::pair<std::vector<std::size_t>, double>> probabilities;

    double total() const {
        double s = 0.0;
        for (const auto& [counts, p] : probabilities) s += p;
        return s;
    }

    double probability(const std::vector<std::size_t>& counts) const {
        auto it = std::lower_bound(probabilities.begin(), probabilities.end(), counts,
                                   [](const auto& entry, const auto& key) { return entry.first < key; });
        return it != probabilities.end() && it->first == counts ? it->second : 0.0;
    }
};

struct MagnetizationAtom {
    double m;  // (k_1 - k_2) / n
    double probability;
};

inline EmpiricalLaw empirical_law(const PottsModel& model, std::uint64_t cap = kDefaultEnumerationCap) {
    const std::size_t n = model.n();
    const std::size_t q = model.q();
    configuration_count(n, q, cap);

    // Key on the first q-1 counts; dense storage whenever it fits.
    std::uint64_t dense_size = 1;
    bool dense = true;
    for (std::size_t r = 0; r + 1 < q; ++r) {
        if (dense_size > (std::uint64_t{1} << 22) / (n + 1)) {
            dense = false;
            break;
        }
        dense_size *= (n + 1);
    }

    std::vector<std::size_t> counts(q, 0);
    counts[0] = n;
    std::vector<LogSumExpAccumulator> dense_acc(dense ? dense_size : 0);
    std::map<std::vector<std::size_t>, LogSumExpAccumulator> sparse_acc;
    LogSumExpAccumulator total;
    ColorConfig prev(n, 0);

    auto key_of = [&] {
        std::uint64_t key = 0;
        for (std::size_t r = q - 1; r-- > 0;) key = key * (n + 1) + counts[r];
        return key;
    };

    detail::for_each_configuration(model, cap, [&](const ColorConfig& y, double e) {
        for (std::size_t i = 0; i < n; ++i) {
            if (y[i] == prev[i]) continue;
            --counts[prev[i]];
            ++counts[y[i]];
            prev[i] = y[i];
        }
        total.add(e);
        if (dense)
            dense_acc[key_of()].add(e);
        else
            sparse_acc[counts].add(e);
    });

    EmpiricalLaw law;
    law.n = n;
    law.q = q;
    law.log_partition = total.value();
    auto emit = [&](const std::vector<std::size_t>& c, const LogSumExpAccumulator& acc) {
        const double lw = acc.value();
        if (std::isinf(lw)) return;
        law.probabilities.emplace_back(c, std::exp(lw - law.log_partition));
    };
    if (dense) {
        std::vector<std::size_t> c(q);
        for (std::uint64_t key = 0; key < dense_size; ++key) {
            std::uint64_t rest = key;
            std::size_t used = 0;
            for (std::size_t r = 0; r + 1 < q; ++r) {
                c[r] = static_cast<std::size_t>(rest % (n + 1));
                rest /= (n + 1);
                used += c[r];
            }
            if (used > n) continue;
            c[q - 1] = n - used;
            emit(c, dense_acc[key]);
        }
        std::sort(law.probabilities.begin(), law.probabilities.end());
    } else {
        for (const auto& [c, acc] : sparse_acc) emit(c, acc);
    }
    return law;
}

// Law of (k_1 - k_2)/n for q = 2, ascending in m.
inline std::vector<MagnetizationAtom> magnetization_law(const EmpiricalLaw& law) {
    detail::require(law.q == 2, "magnetization_law: requires q = 2");
    std::vector<MagnetizationAtom> out;
    for (const auto& [c, p] : law.probabilities)
        out.push_back({(static_cast<double>(c[0]) - static_cast<double>(c[1])) / static_cast<double>(law.n), p});
    std::sort(out.begin(), out.end(), [](const auto& l, const auto& r) { return l.m < r.m; });
    return out;
}

// Probability mass of the magnetization law within [center - delta, center + delta].
inline double mass_within(const std::vector<MagnetizationAtom>& law, double center, double delta) {
    double s = 0.0;
    for (const auto& atom : law)
        if (std::abs(atom.m - center) <= delta + 1e-12) s += atom.probability;
    return s;
}

}  // namespace mfpotts
