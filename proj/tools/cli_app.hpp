#pragma once

// Command-line front end. Everything lives in run_cli so tests can drive the
// tool in-process; main() only forwards argv.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mfpotts/mfpotts.hpp"

namespace mfpotts::cli {

using nlohmann::json;

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2, kCap = 3, kIo = 4 };

struct Globals {
    bool json_output = true;
    std::string csv_path;
    std::uint64_t seed = 0;
    double tol = 1e-10;
    std::size_t max_sweeps = 500;
    std::size_t restarts = 0;
    std::uint64_t cap = kDefaultEnumerationCap;

    Schedule schedule(double damping) const {
        Schedule s;
        s.max_sweeps = max_sweeps;
        s.tol = tol;
        s.restarts = restarts;
        s.damping = damping;
        s.seed = seed;
        return s;
    }
};

struct EnsembleArgs {
    std::string name;
    std::string matrix_path;
    std::string n_list;
    std::size_t d = 0, a = 0, b = 0, c = 0, m = 0;
    double p = -1.0;
    bool scaled = false;
};

struct ModelArgs {
    std::size_t q = 2;
    double beta = 0.0;
    std::string j_path;
    std::optional<double> field;
    std::vector<double> h;
    double damping = 0.0;
};

namespace detail {

inline std::vector<std::size_t> parse_size_list(const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        long long v = 0;
        try {
            v = std::stoll(item, &used);
        } catch (const std::logic_error&) {
            throw InvalidArgument("cannot parse integer list '" + text + "'");
        }
        if (used != item.size() || v < 1) throw InvalidArgument("list entries must be positive integers: '" + text + "'");
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

// "lo:hi:step" inclusive of hi up to rounding.
inline std::vector<double> parse_grid(const std::string& text) {
    double lo = 0, hi = 0, step = 0;
    char c1 = 0, c2 = 0;
    std::istringstream ss(text);
    if (!(ss >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || !(step > 0.0) || hi < lo)
        throw InvalidArgument("grid must look like lo:hi:step with step > 0, got '" + text + "'");
    std::vector<double> out;
    const auto count = static_cast<long long>(std::floor((hi - lo) / step + 1e-9));
    for (long long k = 0; k <= count; ++k) out.push_back(lo + static_cast<double>(k) * step);
    return out;
}

inline void add_ensemble_options(CLI::App* cmd, EnsembleArgs& e, bool n_is_list = false) {
    cmd->add_option("--ensemble", e.name,
                    "complete | regular_circulant | hypercube | erdos_renyi | complete_bipartite | "
                    "bipartite_circulant | star | sk | hopfield");
    cmd->add_option("--matrix", e.matrix_path, "matrix file (dense or sparse format)");
    cmd->add_option("--n", e.n_list, n_is_list ? "vertex counts, comma separated" : "vertex count");
    cmd->add_option("--d", e.d, "degree (regular_circulant) or dimension (hypercube)");
    cmd->add_option("--p", e.p, "edge probability (erdos_renyi)");
    cmd->add_option("--a", e.a, "left side size (bipartite)");
    cmd->add_option("--b", e.b, "right side size (bipartite)");
    cmd->add_option("--c", e.c, "left degree (bipartite_circulant)");
    cmd->add_option("--m", e.m, "pattern count (hopfield)");
    cmd->add_flag("--scaled", e.scaled, "star: scale by n/(2|E|) instead of raw adjacency");
}

inline void add_model_options(CLI::App* cmd, ModelArgs& m) {
    cmd->add_option("--q", m.q, "number of colors")->check(CLI::Range(2, 1 << 20));
    cmd->add_option("--beta", m.beta, "J = beta * I_q");
    cmd->add_option("--J", m.j_path, "file with a symmetric q x q coupling matrix J");
    cmd->add_option("--B", m.field, "field on color 1: h = (B, 0, ..., 0)");
    cmd->add_option("--h", m.h, "per-color fields, comma separated")->delimiter(',');
    cmd->add_option("--damping", m.damping, "mean-field damping in [0,1)");
}

inline std::vector<std::size_t> n_values(const EnsembleArgs& e) { return parse_size_list(e.n_list); }

inline std::size_t single_n(const EnsembleArgs& e) {
    const auto ns = n_values(e);
    if (ns.size() != 1) throw InvalidArgument("--n must be a single positive integer here");
    return ns.front();
}

inline EnsembleSpec make_spec(const EnsembleArgs& e, std::optional<std::size_t> n, std::uint64_t seed) {
    if (!e.matrix_path.empty()) return ensemble::FromFile{e.matrix_path};
    auto need_n = [&] {
        if (!n) throw InvalidArgument("ensemble '" + e.name + "' needs --n");
        return *n;
    };
    const std::string& name = e.name;
    if (name == "complete") return ensemble::Complete{need_n()};
    if (name == "regular_circulant" || name == "regular") return ensemble::RegularCirculant{need_n(), e.d};
    if (name == "hypercube") return ensemble::Hypercube{e.d};
    if (name == "erdos_renyi" || name == "er") return ensemble::ErdosRenyi{need_n(), e.p, seed};
    if (name == "complete_bipartite") return ensemble::CompleteBipartite{e.a, e.b};
    if (name == "bipartite_circulant") return ensemble::BipartiteCirculant{e.a, e.b, e.c};
    if (name == "star") return ensemble::Star{need_n(), e.scaled};
    if (name == "sk") return ensemble::SherringtonKirkpatrick{need_n(), seed};
    if (name == "hopfield") return ensemble::Hopfield{need_n(), e.m, seed};
    if (name.empty()) throw InvalidArgument("give either --ensemble or --matrix");
    throw InvalidArgument("unknown ensemble '" + name + "'");
}

inline bool ensemble_uses_n(const EnsembleArgs& e) {
    return e.matrix_path.empty() && e.name != "hypercube" && e.name != "complete_bipartite" &&
           e.name != "bipartite_circulant";
}

inline CouplingMatrix build_matrix(const EnsembleArgs& e, std::uint64_t seed) {
    std::optional<std::size_t> n;
    if (ensemble_uses_n(e)) n = single_n(e);
    return generate(make_spec(e, n, seed));
}

inline json ensemble_inputs(const EnsembleArgs& e, std::uint64_t seed) {
    json j;
    if (!e.matrix_path.empty()) {
        j["matrix"] = e.matrix_path;
        return j;
    }
    j["ensemble"] = e.name;
    if (!e.n_list.empty()) j["n"] = e.n_list;
    if (e.name == "regular_circulant" || e.name == "regular" || e.name == "hypercube") j["d"] = e.d;
    if (e.name == "erdos_renyi" || e.name == "er") j["p"] = e.p;
    if (e.name == "complete_bipartite" || e.name == "bipartite_circulant") {
        j["a"] = e.a;
        j["b"] = e.b;
    }
    if (e.name == "bipartite_circulant") j["c"] = e.c;
    if (e.name == "hopfield") j["m"] = e.m;
    if (e.name == "star") j["scaled"] = e.scaled;
    j["seed"] = seed;
    return j;
}

// Same format as matrix files: header q, then a symmetric q x q block.
inline std::vector<double> read_j_file(const std::string& path, std::size_t q) {
    const auto j = load_matrix(path);
    if (j.n() != q) throw ParseError("J file '" + path + "' is " + std::to_string(j.n()) + " x " + std::to_string(j.n()) +
                                     " but q = " + std::to_string(q));
    return j.entries();
}

inline std::vector<double> resolve_j(const ModelArgs& m) {
    if (!m.j_path.empty()) return read_j_file(m.j_path, m.q);
    std::vector<double> j(m.q * m.q, 0.0);
    for (std::size_t r = 0; r < m.q; ++r) j[r * m.q + r] = m.beta;
    return j;
}

inline std::vector<double> resolve_h(const ModelArgs& m) {
    if (m.field && !m.h.empty()) throw InvalidArgument("give --B or --h, not both");
    if (!m.h.empty()) {
        if (m.h.size() != m.q) throw InvalidArgument("--h must list exactly q values");
        return m.h;
    }
    std::vector<double> h(m.q, 0.0);
    if (m.field) h[0] = *m.field;
    return h;
}

inline json model_inputs(const ModelArgs& m) {
    json j;
    j["q"] = m.q;
    if (m.j_path.empty())
        j["beta"] = m.beta;
    else
        j["J"] = m.j_path;
    j["h"] = resolve_h(m);
    return j;
}

inline json schedule_inputs(const Globals& g, double damping) {
    return json{{"max_sweeps", g.max_sweeps},
                {"tol", g.tol},
                {"restarts", g.restarts == 0 ? json("q+3") : json(g.restarts)},
                {"damping", damping},
                {"seed", g.seed}};
}

// Zero-diagonal projection for the variational commands, with a warning.
inline PottsModel make_model(CouplingMatrix a, const ModelArgs& m, std::ostream& err, double* dropped = nullptr) {
    auto [clean, mass] = drop_diagonal(a);
    if (mass > 0.0) err << "warning: zeroed diagonal of the coupling matrix (dropped mass " << mass << ")\n";
    if (dropped) *dropped = mass;
    return PottsModel(std::move(clean), m.q, resolve_j(m), resolve_h(m));
}

inline json rows_of(const ProductMeasure& theta) {
    json rows = json::array();
    for (std::size_t i = 0; i < theta.n(); ++i) rows.push_back(std::vector<double>(theta.row(i).begin(), theta.row(i).end()));
    return rows;
}

inline json points_of(const std::vector<SimplexPoint>& pts) {
    json out = json::array();
    for (const auto& p : pts) out.push_back(p.probs());
    return out;
}

inline std::ofstream open_csv(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open CSV file '" + path + "' for writing");
    out.precision(17);
    return out;
}

// Predicted magnetization locations for q = 2 on asymptotically regular graphs.
inline std::vector<double> predicted_magnetizations(double beta, double field) {
    if (field != 0.0) return {cw_magnetization(beta / 2.0, field / 2.0)};
    if (beta <= 2.0) return {0.0};
    const double m = cw_magnetization(beta / 2.0, 0.0);
    return {-m, m};
}

}  // namespace detail

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Mean-field Potts toolkit: exact oracles, mean-field solvers, spectral diagnostics and limits",
                 "mfpotts"};
    app.fallthrough();
    app.set_help_flag("--help", "print this help and exit");  // -h is taken by the field list
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("mfpotts ") + kVersion);

    Globals g;
    app.add_flag("--json", g.json_output, "emit a JSON report on stdout (default)");
    app.add_option("--csv", g.csv_path, "also write tabular results to this CSV file");
    app.add_option("--seed", g.seed, "seed for random ensembles and random restarts");
    app.add_option("--tol", g.tol, "mean-field convergence tolerance (sup-norm row change)");
    app.add_option("--max-sweeps", g.max_sweeps, "mean-field sweep cap");
    app.add_option("--restarts", g.restarts, "mean-field starts (default q + 3)");
    app.add_option("--cap", g.cap, "enumeration cap on q^n");

    EnsembleArgs ens;
    ModelArgs mod;

    auto* gen = app.add_subcommand("gen", "generate a coupling matrix");
    detail::add_ensemble_options(gen, ens);
    std::string gen_out;
    gen->add_option("--out", gen_out, "write the matrix file here");

    auto* diagnose = app.add_subcommand("diagnose", "spectral and row-sum diagnostics of a coupling matrix");
    detail::add_ensemble_options(diagnose, ens);
    double eps = 1.0, row_delta = 0.1, spectral_delta = 0.1, threshold = 0.1;
    std::size_t exact_cap = 20;
    diagnose->add_option("--eps", eps, "eigenvalue cutoff scale (counts |lambda| > eps/2)");
    diagnose->add_option("--delta", row_delta, "row-sum deviation half-width around 1");
    diagnose->add_option("--spectral-delta", spectral_delta, "eigenvalue window for the spectral mass report");
    diagnose->add_option("--threshold", threshold, "tr(A^2)/n threshold of the finite-n heuristic flag");
    diagnose->add_option("--exact-cap", exact_cap, "largest n for exact l1-condition enumeration");

    auto* exact = app.add_subcommand("exact", "exact log partition function by enumeration");
    detail::add_ensemble_options(exact, ens);
    detail::add_model_options(exact, mod);
    bool want_law = false;
    std::vector<std::size_t> config;
    std::optional<std::size_t> site;
    exact->add_flag("--law", want_law, "report the exact law of the color counts");
    exact->add_option("--config", config, "configuration (colors 1..q, comma separated)")->delimiter(',');
    exact->add_option("--site", site, "site (1-based) for the conditional law given --config");

    auto* mf = app.add_subcommand("mf", "maximise the mean-field objective");
    detail::add_ensemble_options(mf, ens);
    detail::add_model_options(mf, mod);

    auto* compare = app.add_subcommand("compare", "exact vs mean-field per site over a sweep in n");
    detail::add_ensemble_options(compare, ens, true);
    detail::add_model_options(compare, mod);

    auto* limit = app.add_subcommand("limit", "closed-form limits");
    limit->require_subcommand(1);
    std::string grid;
    double p = 0.5;
    std::vector<double> mu;
    auto* limit_cw = limit->add_subcommand("cw", "Curie-Weiss simplex limit");
    auto* limit_bip = limit->add_subcommand("bipartite", "bi-regular bipartite Ising limit");
    auto* limit_ldp = limit->add_subcommand("ldp", "rate-function minimisers");
    for (auto* sub : {limit_cw, limit_ldp}) {
        sub->add_option("--q", mod.q, "number of colors")->check(CLI::Range(2, 1 << 20));
        sub->add_option("--beta", mod.beta, "inverse temperature");
        sub->add_option("--B", mod.field, "field on color 1");
        sub->add_option("--h", mod.h, "per-color fields, comma separated")->delimiter(',');
        sub->add_option("--beta-grid", grid, "sweep beta over lo:hi:step (rows go to --csv)");
    }
    limit_ldp->add_option("--mu", mu, "evaluate the rate function at this simplex point")->delimiter(',');
    limit_bip->add_option("--beta", mod.beta, "inverse temperature (sign selects ferro/antiferro)");
    limit_bip->add_option("--p", p, "left side fraction in (0,1)");
    limit_bip->add_option("--beta-grid", grid, "sweep beta over lo:hi:step (rows go to --csv)");

    auto* concentration = app.add_subcommand("concentration", "exact magnetization law vs predicted locations (q = 2)");
    detail::add_ensemble_options(concentration, ens);
    double conc_delta = 0.15;
    concentration->add_option("--beta", mod.beta, "inverse temperature");
    concentration->add_option("--B", mod.field, "field on color 1");
    concentration->add_option("--delta", conc_delta, "window half-width around predicted locations");

    auto* graphon = app.add_subcommand("graphon", "step-graphon tools");
    graphon->require_subcommand(1);
    std::string graphon_path, other_path;
    bool multiply_by_n = false;
    auto* g_cut = graphon->add_subcommand("cutnorm", "exact cut and infinity-to-one norms");
    auto* g_fsup = graphon->add_subcommand("fsup", "maximise F(W, rho) over block partitions");
    auto* g_dist = graphon->add_subcommand("dist", "cut distance over block permutations (upper bound)");
    for (auto* sub : {g_cut, g_fsup, g_dist}) {
        sub->add_option("--graphon", graphon_path, "step graphon file");
        detail::add_ensemble_options(sub, ens);
        sub->add_flag("--multiply-by-n", multiply_by_n, "use W_{nA} when building from a matrix");
    }
    g_dist->add_option("--other", other_path, "second step graphon file")->required();
    detail::add_model_options(g_fsup, mod);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << "mfpotts " << kVersion << '\n';
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }

    json report;
    report["version"] = std::string("mfpotts ") + kVersion;
    json inputs, results;

    try {
        auto load_step = [&]() -> StepGraphon {
            if (!graphon_path.empty()) return load_graphon(graphon_path);
            return step_from_matrix(detail::build_matrix(ens, g.seed), multiply_by_n);
        };

        if (gen->parsed()) {
            report["command"] = "gen";
            inputs = detail::ensemble_inputs(ens, g.seed);
            const auto a = detail::build_matrix(ens, g.seed);
            results["n"] = a.n();
            results["scaling"] = to_string(a.scaling());
            results["trace_sq_over_n"] = a.frobenius_sq() / static_cast<double>(a.n());
            if (!gen_out.empty()) {
                std::ofstream f(gen_out, std::ios::binary);
                if (!f) throw ParseError("cannot open '" + gen_out + "' for writing");
                write_matrix(f, a);
                inputs["out"] = gen_out;
            } else {
                json rows = json::array();
                for (std::size_t i = 0; i < a.n(); ++i) rows.push_back(std::vector<double>(a.row(i).begin(), a.row(i).end()));
                results["entries"] = rows;
            }
        } else if (diagnose->parsed()) {
            report["command"] = "diagnose";
            inputs = detail::ensemble_inputs(ens, g.seed);
            inputs["eps"] = eps;
            inputs["delta"] = row_delta;
            inputs["spectral_delta"] = spectral_delta;
            inputs["threshold"] = threshold;
            inputs["exact_cap"] = exact_cap;
            const auto a = detail::build_matrix(ens, g.seed);
            const auto d = spectral_diagnostics(a, {eps, row_delta, spectral_delta});
            const auto l1 = l1_condition(a, exact_cap);
            results["n"] = a.n();
            results["scaling"] = to_string(a.scaling());
            results["eigenvalues"] = d.eigenvalues;
            results["trace_sq_over_n"] = d.trace_sq_over_n;
            results["eigen_sq_over_n"] = d.eigen_sq_over_n;
            results["n_big"] = d.n_big;
            json levels = json::object();
            for (const auto& [k, size] : d.level_set_sizes) levels[std::to_string(k)] = size;
            results["level_set_sizes"] = levels;
            results["beyond_top_level"] = d.beyond_top_level;
            results["net_log_size_bound"] = d.net_log_size_bound;
            results["lambda_max_abs"] = d.lambda_max_abs;
            results["spectral_mass_outside"] = d.spectral_mass_outside;
            results["row_sums"] = {{"mean", d.row_sum_mean}, {"delta", d.row_sum_delta},
                                   {"deviation_fraction", d.row_sum_deviation_fraction}};
            results["l1_condition"] = {{"bound", l1.bound}, {"exact", l1.exact ? json(*l1.exact) : json(nullptr)}};
            results["meets_mean_field_heuristic"] = d.trace_sq_over_n <= threshold;
            results["heuristic_note"] = "finite-n heuristic tr(A^2)/n <= threshold; not the asymptotic o(n) condition";
        } else if (exact->parsed()) {
            report["command"] = "exact";
            inputs = detail::ensemble_inputs(ens, g.seed);
            inputs["model"] = detail::model_inputs(mod);
            inputs["cap"] = g.cap;
            double dropped = 0.0;
            const auto model = detail::make_model(detail::build_matrix(ens, g.seed), mod, err, &dropped);
            const double n = static_cast<double>(model.n());
            results["n"] = model.n();
            results["diagonal_mass_dropped"] = dropped;
            if (want_law) {
                const auto law = empirical_law(model, g.cap);
                results["phi"] = law.log_partition;
                json entries = json::array();
                for (const auto& [counts, prob] : law.probabilities) entries.push_back({{"counts", counts}, {"probability", prob}});
                results["law"] = entries;
            } else {
                results["phi"] = log_partition(model, g.cap);
            }
            results["phi_per_site"] = results["phi"].get<double>() / n;
            if (!config.empty()) {
                ColorConfig y;
                for (std::size_t c : config) {
                    if (c < 1 || c > model.q()) throw InvalidArgument("--config colors must lie in 1..q");
                    y.push_back(c - 1);
                }
                inputs["config"] = config;
                results["hamiltonian"] = hamiltonian(model, y);
                if (site) {
                    if (*site < 1 || *site > model.n()) throw InvalidArgument("--site must lie in 1..n");
                    inputs["site"] = *site;
                    results["conditional"] = conditional_distribution(model, y, *site - 1).probs();
                }
            } else if (site) {
                throw InvalidArgument("--site needs --config");
            }
        } else if (mf->parsed()) {
            report["command"] = "mf";
            inputs = detail::ensemble_inputs(ens, g.seed);
            inputs["model"] = detail::model_inputs(mod);
            inputs["schedule"] = detail::schedule_inputs(g, mod.damping);
            double dropped = 0.0;
            const auto model = detail::make_model(detail::build_matrix(ens, g.seed), mod, err, &dropped);
            const auto r = mf_solve(model, g.schedule(mod.damping));
            results["n"] = model.n();
            results["diagonal_mass_dropped"] = dropped;
            results["value"] = r.value;
            results["value_per_site"] = r.value / static_cast<double>(model.n());
            results["converged"] = r.converged;
            results["sweeps_used"] = r.sweeps_used;
            results["restarts_tried"] = r.restarts_tried;
            results["distinct_maximizers"] = r.maximizers.size();
            results["start_values"] = r.start_values;
            results["theta_star"] = detail::rows_of(r.theta_star);
        } else if (compare->parsed()) {
            report["command"] = "compare";
            inputs = detail::ensemble_inputs(ens, g.seed);
            inputs["model"] = detail::model_inputs(mod);
            inputs["schedule"] = detail::schedule_inputs(g, mod.damping);
            inputs["cap"] = g.cap;
            std::vector<std::optional<std::size_t>> sizes;
            if (detail::ensemble_uses_n(ens)) {
                for (std::size_t n : detail::n_values(ens)) sizes.emplace_back(n);
                if (sizes.empty()) throw InvalidArgument("compare needs --n");
            } else {
                sizes.emplace_back(std::nullopt);
            }
            json rows = json::array();
            std::ofstream csv;
            if (!g.csv_path.empty()) {
                csv = detail::open_csv(g.csv_path);
                csv << "n,phi_per_site,supm_per_site,gap_per_site\n";
                inputs["csv"] = g.csv_path;
            }
            for (const auto& n : sizes) {
                const auto model = detail::make_model(generate(detail::make_spec(ens, n, g.seed)), mod, err);
                const double nn = static_cast<double>(model.n());
                json row{{"n", model.n()}};
                try {
                    const auto gap = mf_gap(model, g.schedule(mod.damping), g.cap);
                    row["status"] = "ok";
                    row["phi_per_site"] = gap.phi / nn;
                    row["supm_per_site"] = gap.sup_m / nn;
                    row["gap_per_site"] = gap.gap_per_site;
                    if (csv.is_open())
                        csv << model.n() << ',' << gap.phi / nn << ',' << gap.sup_m / nn << ',' << gap.gap_per_site << '\n';
                } catch (const CapExceeded& e) {
                    row["status"] = "skipped";
                    row["reason"] = e.what();
                    if (csv.is_open()) csv << model.n() << ",skipped,skipped,skipped\n";
                }
                rows.push_back(row);
            }
            results["rows"] = rows;
        } else if (limit->parsed()) {
            const std::vector<double> betas = grid.empty() ? std::vector<double>{mod.beta} : detail::parse_grid(grid);
            std::ofstream csv;
            if (!g.csv_path.empty()) {
                csv = detail::open_csv(g.csv_path);
                inputs["csv"] = g.csv_path;
            }
            if (!grid.empty()) inputs["beta_grid"] = grid;
            json rows = json::array();
            if (limit_cw->parsed() || limit_ldp->parsed()) {
                const bool is_cw = limit_cw->parsed();
                report["command"] = is_cw ? "limit cw" : "limit ldp";
                const auto h = detail::resolve_h(mod);
                inputs["q"] = mod.q;
                inputs["h"] = h;
                if (grid.empty()) inputs["beta"] = mod.beta;
                if (csv.is_open()) csv << (is_cw ? "beta,value,argmax_count\n" : "beta,rate_min,minimizer_count\n");
                for (double beta : betas) {
                    json row{{"beta", beta}};
                    const auto lim = cw_limit(mod.q, beta, h);
                    if (is_cw) {
                        row["value"] = lim.value;
                        row["argmax"] = detail::points_of(lim.argmax);
                    } else {
                        row["rate_min"] = -lim.value;
                        row["minimizers"] = detail::points_of(lim.argmax);
                        if (mod.q == 2) {
                            std::vector<double> ms;
                            for (const auto& pt : lim.argmax) ms.push_back(pt.magnetization());
                            row["magnetizations"] = ms;
                            row["predicted_magnetizations"] = detail::predicted_magnetizations(beta, h[0] - h[1]);
                        }
                        if (!mu.empty()) {
                            const SimplexPoint point(mu);
                            const auto rate = ldp_rate(mod.q, beta, h, point, -lim.value);
                            row["rate_at_mu"] = {{"mu", mu}, {"rate", rate.rate}, {"rate_tilde", rate.rate_tilde}};
                        }
                    }
                    if (csv.is_open())
                        csv << beta << ',' << (is_cw ? lim.value : -lim.value) << ',' << lim.argmax.size() << '\n';
                    rows.push_back(row);
                }
                if (!mu.empty()) inputs["mu"] = mu;
            } else {
                report["command"] = "limit bipartite";
                if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("--p must lie in (0,1)");
                inputs["p"] = p;
                if (grid.empty()) inputs["beta"] = mod.beta;
                if (csv.is_open()) csv << "beta,value,sigma_p,sigma_1mp\n";
                for (double beta : betas) {
                    const double v = bipartite_limit(beta, p);
                    const double s1 = bipartite_sigma(beta, p);
                    const double s2 = bipartite_sigma(beta, 1.0 - p);
                    rows.push_back({{"beta", beta},
                                    {"value", v},
                                    {"sigma_p", s1},
                                    {"sigma_1mp", s2},
                                    {"regime", bipartite_supercritical(beta, p) ? "supercritical" : "subcritical"}});
                    if (csv.is_open()) csv << beta << ',' << v << ',' << s1 << ',' << s2 << '\n';
                }
            }
            if (grid.empty())
                results = rows.front();
            else
                results["rows"] = rows;
        } else if (concentration->parsed()) {
            report["command"] = "concentration";
            inputs = detail::ensemble_inputs(ens, g.seed);
            const double field = mod.field.value_or(0.0);
            inputs["beta"] = mod.beta;
            inputs["B"] = field;
            inputs["delta"] = conc_delta;
            inputs["cap"] = g.cap;
            ModelArgs binary = mod;
            binary.q = 2;
            binary.h.clear();
            binary.j_path.clear();
            const auto model = detail::make_model(detail::build_matrix(ens, g.seed), binary, err);
            const auto law = magnetization_law(empirical_law(model, g.cap));
            const auto predicted = detail::predicted_magnetizations(mod.beta, field);
            json atoms = json::array();
            for (const auto& atom : law) atoms.push_back({{"m", atom.m}, {"probability", atom.probability}});
            double total = 0.0, positive = 0.0, negative = 0.0;
            for (const auto& atom : law) {
                bool near = false;
                for (double loc : predicted) near = near || std::abs(atom.m - loc) <= conc_delta + 1e-12;
                if (near) total += atom.probability;
                if (atom.m > 0.0) positive += atom.probability;
                if (atom.m < 0.0) negative += atom.probability;
            }
            json per_location = json::array();
            for (double loc : predicted) per_location.push_back({{"location", loc}, {"mass", mass_within(law, loc, conc_delta)}});
            results["n"] = model.n();
            results["law"] = atoms;
            results["predicted_locations"] = predicted;
            results["regime"] = field != 0.0 ? "field" : (mod.beta <= 2.0 ? "single" : "symmetric_pair");
            results["mass_within_delta"] = total;
            results["per_location"] = per_location;
            results["mass_positive"] = positive;
            results["mass_negative"] = negative;
        } else if (graphon->parsed()) {
            if (!graphon_path.empty()) inputs["graphon"] = graphon_path;
            else inputs = detail::ensemble_inputs(ens, g.seed);
            inputs["multiply_by_n"] = multiply_by_n;
            const auto w = load_step();
            results["k"] = w.k();
            if (g_cut->parsed()) {
                report["command"] = "graphon cutnorm";
                const auto norms = cut_norm_exact(w);
                results["cut"] = norms.cut;
                results["inf_to_1"] = norms.inf_to_1;
            } else if (g_fsup->parsed()) {
                report["command"] = "graphon fsup";
                inputs["model"] = detail::model_inputs(mod);
                inputs["schedule"] = detail::schedule_inputs(g, mod.damping);
                const auto j = detail::resolve_j(mod);
                const auto h = detail::resolve_h(mod);
                const auto r = f_sup(w, mod.q, j, h, g.schedule(mod.damping));
                results["value"] = r.value;
                results["converged"] = r.converged;
                results["sweeps_used"] = r.sweeps_used;
                results["rho_star"] = detail::rows_of(r.rho_star);
            } else {
                report["command"] = "graphon dist";
                inputs["other"] = other_path;
                results["cut_distance_upper_bound"] = cut_distance_blocks(w, load_graphon(other_path));
            }
        }
    } catch (const CapExceeded& e) {
        err << "error: " << e.what() << '\n';
        return kCap;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kIo;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }

    report["inputs"] = inputs;
    report["results"] = results;
    out << report.dump(2) << '\n';
    return kOk;
}

}  // namespace mfpotts::cli
