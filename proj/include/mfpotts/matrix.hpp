#pragma once

// Symmetric coupling matrices: ensemble generators, file I/O and the spectral
// quantities that decide whether the naive mean-field bound is tight.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mfpotts/error.hpp"
#include "mfpotts/rng.hpp"

namespace mfpotts {

// Where the normalisation of a coupling matrix came from.
enum class ScalingTag { raw, per_edge, per_degree, bipartite, sk, hopfield, custom };

inline const char* to_string(ScalingTag tag) noexcept {
    switch (tag) {
        case ScalingTag::raw: return "raw";
        case ScalingTag::per_edge: return "per_edge";
        case ScalingTag::per_degree: return "per_degree";
        case ScalingTag::bipartite: return "bipartite";
        case ScalingTag::sk: return "sk";
        case ScalingTag::hopfield: return "hopfield";
        case ScalingTag::custom: return "custom";
    }
    return "custom";
}

// Dense symmetric n x n real matrix. Symmetry is exact and checked on construction.
class CouplingMatrix {
public:
    CouplingMatrix() = default;

    CouplingMatrix(std::size_t n, std::vector<double> entries, ScalingTag tag = ScalingTag::custom)
        : n_(n), entries_(std::move(entries)), tag_(tag) {
        detail::require(n_ >= 1, "coupling matrix needs n >= 1");
        detail::require(entries_.size() == n_ * n_, "coupling matrix entry count must be n*n");
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = i + 1; j < n_; ++j)
                detail::require((*this)(i, j) == (*this)(j, i), "coupling matrix must be exactly symmetric");
    }

    static CouplingMatrix zeros(std::size_t n, ScalingTag tag = ScalingTag::custom) {
        return CouplingMatrix(n, std::vector<double>(n * n, 0.0), tag);
    }

    std::size_t n() const noexcept { return n_; }
    ScalingTag scaling() const noexcept { return tag_; }
    void set_scaling(ScalingTag tag) noexcept { tag_ = tag; }

    double operator()(std::size_t i, std::size_t j) const noexcept { return entries_[i * n_ + j]; }

    // Sets (i,j) and (j,i) together so symmetry is preserved.
    void set(std::size_t i, std::size_t j, double v) noexcept {
        entries_[i * n_ + j] = v;
        entries_[j * n_ + i] = v;
    }

    std::span<const double> row(std::size_t i) const noexcept { return {entries_.data() + i * n_, n_}; }
    const std::vector<double>& entries() const noexcept { return entries_; }

    bool zero_diagonal() const noexcept {
        for (std::size_t i = 0; i < n_; ++i)
            if ((*this)(i, i) != 0.0) return false;
        return true;
    }

    double frobenius_sq() const noexcept {
        double s = 0.0;
        for (double v : entries_) s += v * v;
        return s;
    }

    CouplingMatrix scaled(double c, ScalingTag tag) const {
        CouplingMatrix out = *this;
        for (double& v : out.entries_) v *= c;
        out.tag_ = tag;
        return out;
    }

private:
    std::size_t n_ = 0;
    std::vector<double> entries_;
    ScalingTag tag_ = ScalingTag::custom;
};

// Returns A with its diagonal set to zero and the removed mass sum_i |A(i,i)|.
inline std::pair<CouplingMatrix, double> drop_diagonal(const CouplingMatrix& a) {
    CouplingMatrix out = a;
    double mass = 0.0;
    for (std::size_t i = 0; i < a.n(); ++i) {
        mass += std::abs(a(i, i));
        out.set(i, i, 0.0);
    }
    return {std::move(out), mass};
}

// ---------------------------------------------------------------------------
// Ensembles

namespace ensemble {

struct Complete { std::size_t n; };
struct RegularCirculant { std::size_t n; std::size_t d; };
struct Hypercube { std::size_t d; };
struct ErdosRenyi { std::size_t n; double p; std::uint64_t seed; };
struct CompleteBipartite { std::size_t a; std::size_t b; };
// Left vertex i joins right vertices (i*c + t) mod b for 0 <= t < c.
struct BipartiteCirculant { std::size_t a; std::size_t b; std::size_t c; };
struct Star { std::size_t n; bool scaled; };
struct SherringtonKirkpatrick { std::size_t n; std::uint64_t seed; };
struct Hopfield { std::size_t n; std::size_t m; std::uint64_t seed; };
struct FromFile { std::string path; };

}  // namespace ensemble

using EnsembleSpec = std::variant<ensemble::Complete, ensemble::RegularCirculant, ensemble::Hypercube,
                                  ensemble::ErdosRenyi, ensemble::CompleteBipartite,
                                  ensemble::BipartiteCirculant, ensemble::Star,
                                  ensemble::SherringtonKirkpatrick, ensemble::Hopfield, ensemble::FromFile>;

inline CouplingMatrix load_matrix(const std::string& path);

namespace detail {

// 0/1 adjacency with an edge count.
struct Adjacency {
    std::size_t n;
    std::vector<double> entries;
    std::size_t edges = 0;

    explicit Adjacency(std::size_t n_) : n(n_), entries(n_ * n_, 0.0) {}

    void connect(std::size_t i, std::size_t j) {
        if (i == j || entries[i * n + j] != 0.0) return;
        entries[i * n + j] = entries[j * n + i] = 1.0;
        ++edges;
    }

    CouplingMatrix scaled(double c, ScalingTag tag) && {
        for (double& v : entries) v *= c;
        return CouplingMatrix(n, std::move(entries), tag);
    }

    CouplingMatrix per_edge() && {
        require(edges > 0, "graph has no edges; n/(2|E|) scaling is undefined");
        const double c = static_cast<double>(n) / (2.0 * static_cast<double>(edges));
        return std::move(*this).scaled(c, ScalingTag::per_edge);
    }
};

inline CouplingMatrix make(const ensemble::Complete& e) {
    require(e.n >= 1, "complete: n must be positive");
    Adjacency g(e.n);
    for (std::size_t i = 0; i < e.n; ++i)
        for (std::size_t j = i + 1; j < e.n; ++j) g.connect(i, j);
    return std::move(g).per_edge();
}

inline CouplingMatrix make(const ensemble::RegularCirculant& e) {
    require(e.n >= 2 && e.d >= 1 && e.d < e.n, "regular_circulant: need 1 <= d < n");
    require((e.n * e.d) % 2 == 0, "regular_circulant: n*d must be even");
    Adjacency g(e.n);
    for (std::size_t i = 0; i < e.n; ++i) {
        for (std::size_t t = 1; t <= e.d / 2; ++t) g.connect(i, (i + t) % e.n);
        if (e.d % 2 == 1) g.connect(i, (i + e.n / 2) % e.n);
    }
    return std::move(g).scaled(1.0 / static_cast<double>(e.d), ScalingTag::per_degree);
}

inline CouplingMatrix make(const ensemble::Hypercube& e) {
    require(e.d >= 1 && e.d <= 12, "hypercube: need 1 <= d <= 12");
    const std::size_t n = std::size_t{1} << e.d;
    Adjacency g(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t b = 0; b < e.d; ++b) g.connect(i, i ^ (std::size_t{1} << b));
    return std::move(g).scaled(1.0 / static_cast<double>(e.d), ScalingTag::per_degree);
}

inline CouplingMatrix make(const ensemble::ErdosRenyi& e) {
    require(e.n >= 2, "erdos_renyi: n must be at least 2");
    require(e.p >= 0.0 && e.p <= 1.0, "erdos_renyi: p must lie in [0,1]");
    SplitMix64 rng(e.seed);
    Adjacency g(e.n);
    for (std::size_t i = 0; i < e.n; ++i)
        for (std::size_t j = i + 1; j < e.n; ++j)
            if (rng.uniform() < e.p) g.connect(i, j);
    require(g.edges > 0, "erdos_renyi: sampled graph has no edges");
    return std::move(g).scaled(1.0 / (static_cast<double>(e.n) * e.p), ScalingTag::per_degree);
}

inline CouplingMatrix bipartite_scaled(Adjacency g, std::size_t c, std::size_t d) {
    return std::move(g).scaled(1.0 / static_cast<double>(c + d), ScalingTag::bipartite);
}

inline CouplingMatrix make(const ensemble::CompleteBipartite& e) {
    require(e.a >= 1 && e.b >= 1, "complete_bipartite: sides must be positive");
    Adjacency g(e.a + e.b);
    for (std::size_t i = 0; i < e.a; ++i)
        for (std::size_t j = 0; j < e.b; ++j) g.connect(i, e.a + j);
    return bipartite_scaled(std::move(g), e.b, e.a);
}

inline CouplingMatrix make(const ensemble::BipartiteCirculant& e) {
    require(e.a >= 1 && e.b >= 1 && e.c >= 1, "bipartite_circulant: parameters must be positive");
    require(e.c <= e.b, "bipartite_circulant: need c <= b");
    require((e.a * e.c) % e.b == 0, "bipartite_circulant: a*c must be divisible by b");
    const std::size_t d = e.a * e.c / e.b;
    Adjacency g(e.a + e.b);
    for (std::size_t i = 0; i < e.a; ++i)
        for (std::size_t t = 0; t < e.c; ++t) g.connect(i, e.a + (i * e.c + t) % e.b);
    return bipartite_scaled(std::move(g), e.c, d);
}

inline CouplingMatrix make(const ensemble::Star& e) {
    require(e.n >= 2, "star: n must be at least 2");
    Adjacency g(e.n);
    for (std::size_t j = 1; j < e.n; ++j) g.connect(0, j);
    if (!e.scaled) return std::move(g).scaled(1.0, ScalingTag::raw);
    return std::move(g).per_edge();
}

inline CouplingMatrix make(const ensemble::SherringtonKirkpatrick& e) {
    require(e.n >= 1, "sk: n must be positive");
    SplitMix64 rng(e.seed);
    CouplingMatrix a = CouplingMatrix::zeros(e.n, ScalingTag::sk);
    const double c = 1.0 / std::sqrt(static_cast<double>(e.n));
    for (std::size_t i = 0; i < e.n; ++i)
        for (std::size_t j = i + 1; j < e.n; ++j) a.set(i, j, c * rng.gaussian());
    return a;
}

// Keeps the diagonal m/n: the pattern overlap of a site with itself.
inline CouplingMatrix make(const ensemble::Hopfield& e) {
    require(e.n >= 1 && e.m >= 1, "hopfield: n and m must be positive");
    SplitMix64 rng(e.seed);
    std::vector<double> eta(e.n * e.m);
    for (double& v : eta) v = rng.coin() ? 1.0 : -1.0;
    CouplingMatrix a = CouplingMatrix::zeros(e.n, ScalingTag::hopfield);
    const double c = 1.0 / static_cast<double>(e.n);
    for (std::size_t i = 0; i < e.n; ++i)
        for (std::size_t j = i; j < e.n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < e.m; ++k) s += eta[i * e.m + k] * eta[j * e.m + k];
            a.set(i, j, c * s);
        }
    return a;
}

inline CouplingMatrix make(const ensemble::FromFile& e) { return load_matrix(e.path); }

}  // namespace detail

inline CouplingMatrix generate(const EnsembleSpec& spec) {
    return std::visit([](const auto& e) { return detail::make(e); }, spec);
}

// ---------------------------------------------------------------------------
// File format
//
// Dense:  first line n, then n lines of n reals.
// Sparse: first line "sparse n", then lines "i j value" (0-based), mirrored.

namespace detail {

inline bool nearly_equal(double a, double b) {
    return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

inline CouplingMatrix read_sparse(std::istream& in, std::size_t n) {
    std::vector<double> entries(n * n, 0.0);
    std::map<std::pair<std::size_t, std::size_t>, double> seen;
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        long long i = -1, j = -1;
        double v = 0.0;
        if (!(ls >> i >> j >> v)) throw ParseError("sparse matrix: bad entry on line " + std::to_string(lineno));
        if (i < 0 || j < 0 || static_cast<std::size_t>(i) >= n || static_cast<std::size_t>(j) >= n)
            throw ParseError("sparse matrix: index out of range on line " + std::to_string(lineno));
        const auto key = std::make_pair(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        if (seen.contains(key)) throw ParseError("sparse matrix: duplicate entry on line " + std::to_string(lineno));
        seen.emplace(key, v);
        if (auto mirror = seen.find({key.second, key.first}); mirror != seen.end() && i != j) {
            if (!nearly_equal(mirror->second, v))
                throw ParseError("sparse matrix: asymmetric pair on line " + std::to_string(lineno));
            continue;
        }
        entries[key.first * n + key.second] = v;
        entries[key.second * n + key.first] = v;
    }
    return CouplingMatrix(n, std::move(entries), ScalingTag::custom);
}

inline CouplingMatrix read_dense(std::istream& in, std::size_t n) {
    std::vector<double> entries(n * n);
    for (std::size_t k = 0; k < n * n; ++k)
        if (!(in >> entries[k])) throw ParseError("dense matrix: expected " + std::to_string(n * n) + " entries");
    std::string rest;
    if (in >> rest) throw ParseError("dense matrix: trailing data '" + rest + "'");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double& a = entries[i * n + j];
            double& b = entries[j * n + i];
            if (!nearly_equal(a, b))
                throw ParseError("dense matrix: asymmetric at (" + std::to_string(i) + "," + std::to_string(j) + ")");
            a = b = 0.5 * (a + b);
        }
    return CouplingMatrix(n, std::move(entries), ScalingTag::custom);
}

}  // namespace detail

inline CouplingMatrix read_matrix(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) throw ParseError("matrix file is empty");
    std::istringstream hs(header);
    std::string first;
    hs >> first;
    const bool sparse = first == "sparse";
    std::string count_token = first;
    if (sparse) hs >> count_token;
    std::size_t n = 0;
    try {
        std::size_t used = 0;
        const long long parsed = std::stoll(count_token, &used);
        if (used != count_token.size() || parsed < 1) throw ParseError("matrix header: n must be a positive integer");
        n = static_cast<std::size_t>(parsed);
    } catch (const std::logic_error&) {
        throw ParseError("matrix header: cannot parse n from '" + header + "'");
    }
    return sparse ? detail::read_sparse(in, n) : detail::read_dense(in, n);
}

inline CouplingMatrix load_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open matrix file '" + path + "'");
    return read_matrix(in);
}

inline void write_matrix(std::ostream& out, const CouplingMatrix& a) {
    const auto old_precision = out.precision(17);
    out << a.n() << '\n';
    for (std::size_t i = 0; i < a.n(); ++i) {
        for (std::size_t j = 0; j < a.n(); ++j) out << (j ? " " : "") << a(i, j);
        out << '\n';
    }
    out.precision(old_precision);
}

// ---------------------------------------------------------------------------
// Row sums

struct RowSumSummary {
    std::vector<double> sums;
    double mean = 0.0;
    double delta = 0.0;
    double deviation_fraction = 0.0;  // fraction of rows with |R(i) - 1| > delta
};

inline std::vector<double> row_sums(const CouplingMatrix& a) {
    std::vector<double> out(a.n());
    for (std::size_t i = 0; i < a.n(); ++i) {
        const auto r = a.row(i);
        out[i] = std::accumulate(r.begin(), r.end(), 0.0);
    }
    return out;
}

inline RowSumSummary row_sum_summary(const CouplingMatrix& a, double delta) {
    RowSumSummary s;
    s.sums = row_sums(a);
    s.delta = delta;
    s.mean = std::accumulate(s.sums.begin(), s.sums.end(), 0.0) / static_cast<double>(a.n());
    const auto off = std::count_if(s.sums.begin(), s.sums.end(), [&](double r) { return std::abs(r - 1.0) > delta; });
    s.deviation_fraction = static_cast<double>(off) / static_cast<double>(a.n());
    return s;
}

// ---------------------------------------------------------------------------
// Eigenvalues

inline constexpr int kJacobiMaxSweeps = 100;
inline constexpr double kJacobiRelativeThreshold = 1e-12;

// All eigenvalues of a symmetric matrix, ascending, by cyclic Jacobi rotations.
// Stops once the off-diagonal Frobenius norm is below 1e-12 * ||A||_F; throws
// ConvergenceError after kJacobiMaxSweeps sweeps.
inline std::vector<double> symmetric_eigenvalues(const CouplingMatrix& matrix) {
    const std::size_t n = matrix.n();
    std::vector<double> a = matrix.entries();
    const double norm = std::sqrt(matrix.frobenius_sq());
    std::vector<double> eig(n);
    auto diag = [&] {
        for (std::size_t i = 0; i < n; ++i) eig[i] = a[i * n + i];
        std::sort(eig.begin(), eig.end());
        return eig;
    };
    if (norm == 0.0 || n == 1) return diag();

    const double target = kJacobiRelativeThreshold * norm;
    for (int sweep = 0; sweep <= kJacobiMaxSweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += a[i * n + j] * a[i * n + j];
        if (std::sqrt(2.0 * off) <= target) return diag();
        if (sweep == kJacobiMaxSweeps) break;

        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                if (apq == 0.0) continue;
                const double app = a[p * n + p];
                const double aqq = a[q * n + q];
                const double theta = (aqq - app) / (2.0 * apq);
                double t;
                if (std::abs(theta) > 1e150) {
                    t = 0.5 / theta;
                } else {
                    t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                    if (theta < 0.0) t = -t;
                }
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                double* rp = &a[p * n];
                double* rq = &a[q * n];
                for (std::size_t r = 0; r < n; ++r) {
                    if (r == p || r == q) continue;
                    const double arp = rp[r];
                    const double arq = rq[r];
                    const double np_ = c * arp - s * arq;
                    const double nq_ = s * arp + c * arq;
                    rp[r] = np_;
                    rq[r] = nq_;
                    a[r * n + p] = np_;
                    a[r * n + q] = nq_;
                }
                rp[p] = app - t * apq;
                rq[q] = aqq + t * apq;
                rp[q] = rq[p] = 0.0;
            }
        }
    }
    throw ConvergenceError("Jacobi eigensolver did not converge within " + std::to_string(kJacobiMaxSweeps) +
                           " sweeps");
}

// ---------------------------------------------------------------------------
// Spectral diagnostics

struct SpectralOptions {
    double eps = 1.0;
    double row_sum_delta = 0.1;
    // Half-width of the window used for the empirical spectral mass outside [-delta, delta].
    double spectral_delta = 0.1;
};

struct SpectralDiagnostics {
    std::size_t n = 0;
    double eps = 0.0;
    std::vector<double> eigenvalues;  // ascending
    double trace_sq_over_n = 0.0;         // sum_ij A(i,j)^2 / n
    double eigen_sq_over_n = 0.0;         // sum_i lambda_i^2 / n
    std::size_t n_big = 0;                // #{|lambda| > eps/2}
    int top_level = 0;                    // ceil(log2 sqrt(n))
    std::map<int, std::size_t> level_set_sizes;  // k -> |I_k|, k = 0..top_level
    std::size_t beyond_top_level = 0;     // #{|lambda| > 2^top_level}
    double net_log_size_bound = 0.0;      // upper bound on log|net| / n
    double lambda_max_abs = 0.0;
    double row_sum_mean = 0.0;
    double row_sum_delta = 0.0;
    double row_sum_deviation_fraction = 0.0;
    double spectral_delta = 0.0;
    double spectral_mass_outside = 0.0;   // fraction of |lambda| > spectral_delta
};

namespace detail {

// x > t, with relative slack so eigenvalues that equal a threshold up to
// rounding are not pushed across it.
inline bool exceeds(double x, double t) noexcept { return x > t * (1.0 + 1e-12); }

inline int top_level_index(std::size_t n) noexcept {
    int l = 0;
    while ((std::size_t{1} << (2 * l)) < n) ++l;  // smallest l with 4^l >= n
    return l;
}

}  // namespace detail

// Upper bound on (1/n) log of the size of the product-of-nets construction
// built over the level sets I_k: the log of the number of admissible tuples
// (j_0..j_l) with 0 <= j_k <= l and sum 4^{j_k} <= 5n, plus the largest
// sum_k |I_k| max(0, log(6/eps * 2^{k+j_k} / sqrt|I_k|)) over those tuples.
// This is a bound, not the size of an explicit net.
inline double net_log_size_bound(const std::map<int, std::size_t>& level_sizes, int top_level, double eps,
                                 std::size_t n) {
    const std::size_t budget = 5 * n;
    const double neg_inf = -std::numeric_limits<double>::infinity();
    std::vector<double> best(budget + 1, neg_inf);
    std::vector<double> count(budget + 1, 0.0);
    best[0] = 0.0;
    count[0] = 1.0;
    for (int k = 0; k <= top_level; ++k) {
        const auto it = level_sizes.find(k);
        const std::size_t size = it == level_sizes.end() ? 0 : it->second;
        std::vector<double> next_best(budget + 1, neg_inf);
        std::vector<double> next_count(budget + 1, 0.0);
        for (int j = 0; j <= top_level; ++j) {
            const std::size_t cost = std::size_t{1} << (2 * j);
            if (cost > budget) break;
            double gain = 0.0;
            if (size > 0) {
                const double per = std::log(6.0 / eps) + (k + j) * std::log(2.0) -
                                   0.5 * std::log(static_cast<double>(size));
                gain = static_cast<double>(size) * std::max(0.0, per);
            }
            for (std::size_t b = 0; b + cost <= budget; ++b) {
                if (count[b] == 0.0) continue;
                next_count[b + cost] += count[b];
                next_best[b + cost] = std::max(next_best[b + cost], best[b] + gain);
            }
        }
        best = std::move(next_best);
        count = std::move(next_count);
    }
    const double tuples = std::accumulate(count.begin(), count.end(), 0.0);
    const double top = *std::max_element(best.begin(), best.end());
    if (tuples == 0.0) return std::numeric_limits<double>::infinity();
    return (std::log(tuples) + top) / static_cast<double>(n);
}

inline SpectralDiagnostics spectral_diagnostics(const CouplingMatrix& a, const SpectralOptions& opt = {}) {
    detail::require(opt.eps > 0.0, "spectral_diagnostics: eps must be positive");
    SpectralDiagnostics d;
    d.n = a.n();
    d.eps = opt.eps;
    const double n = static_cast<double>(a.n());
    d.eigenvalues = symmetric_eigenvalues(a);
    d.trace_sq_over_n = a.frobenius_sq() / n;
    double eig_sq = 0.0;
    for (double l : d.eigenvalues) eig_sq += l * l;
    d.eigen_sq_over_n = eig_sq / n;

    d.top_level = detail::top_level_index(a.n());
    for (int k = 0; k <= d.top_level; ++k) d.level_set_sizes[k] = 0;
    std::size_t outside = 0;
    for (double l : d.eigenvalues) {
        const double x = std::abs(l);
        d.lambda_max_abs = std::max(d.lambda_max_abs, x);
        if (x > opt.spectral_delta) ++outside;
        if (!detail::exceeds(x, opt.eps / 2.0)) continue;
        ++d.n_big;
        if (!detail::exceeds(x, 1.0)) {
            ++d.level_set_sizes[0];
            continue;
        }
        int k = 1;
        while (k <= d.top_level && detail::exceeds(x, std::ldexp(1.0, k))) ++k;
        if (k > d.top_level)
            ++d.beyond_top_level;
        else
            ++d.level_set_sizes[k];
    }
    d.net_log_size_bound = net_log_size_bound(d.level_set_sizes, d.top_level, opt.eps, a.n());

    const auto rs = row_sum_summary(a, opt.row_sum_delta);
    d.row_sum_mean = rs.mean;
    d.row_sum_delta = opt.row_sum_delta;
    d.row_sum_deviation_fraction = rs.deviation_fraction;
    d.spectral_delta = opt.spectral_delta;
    d.spectral_mass_outside = static_cast<double>(outside) / n;
    return d;
}

// ---------------------------------------------------------------------------
// The l1-type condition sup_{x in [0,1]^n} sum_i |sum_j A(i,j) x_j|.

struct L1Condition {
    double bound = 0.0;            // sum_ij |A(i,j)|
    std::optional<double> exact;   // vertex enumeration, when n <= cap
};

inline L1Condition l1_condition(const CouplingMatrix& a, std::size_t exact_cap = 20) {
    L1Condition out;
    for (double v : a.entries()) out.bound += std::abs(v);
    const std::size_t n = a.n();
    if (n > exact_cap || n >= 63) return out;

    // Gray-code walk over {0,1}^n keeping v = A x; the objective is convex, so
    // its maximum over the cube sits at a vertex.
    std::vector<double> v(n, 0.0);
    std::vector<bool> x(n, false);
    double best = 0.0;
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t step = 1; step < total; ++step) {
        const auto flip = static_cast<std::size_t>(std::countr_zero(step));
        const double sign = x[flip] ? -1.0 : 1.0;
        x[flip] = !x[flip];
        for (std::size_t i = 0; i < n; ++i) v[i] += sign * a(i, flip);
        // Resynchronise periodically to bound rounding drift.
        if ((step & 0xFFF) == 0) {
            for (std::size_t i = 0; i < n; ++i) {
                double s = 0.0;
                for (std::size_t j = 0; j < n; ++j)
                    if (x[j]) s += a(i, j);
                v[i] = s;
            }
        }
        double val = 0.0;
        for (double vi : v) val += std::abs(vi);
        best = std::max(best, val);
    }
    out.exact = best;
    return out;
}

}  // namespace mfpotts
