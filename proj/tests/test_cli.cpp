#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli_app.hpp"
#include "mfpotts/mfpotts.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

CliRun run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = mfpotts::cli::run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return std::string(MFPOTTS_DATA_DIR) + "/" + name; }

json results_of(const CliRun& r) {
    EXPECT_EQ(r.code, 0) << r.err;
    return json::parse(r.out).at("results");
}

fs::path temp_file(const std::string& name) { return fs::temp_directory_path() / ("mfpotts_test_" + name); }

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Golden files hold {"command", "results"}; inputs echo absolute paths and are left out.
void check_golden(const std::string& name, const std::vector<std::string>& args) {
    const CliRun r = run(args);
    ASSERT_EQ(r.code, 0) << r.err;
    const json doc = json::parse(r.out);
    const std::string actual = json{{"command", doc.at("command")}, {"results", doc.at("results")}}.dump(2) + "\n";
    const fs::path path = fs::path(MFPOTTS_GOLDEN_DIR) / (name + ".json");
    if (const char* update = std::getenv("MFPOTTS_UPDATE_GOLDEN"); update && std::string(update) == "1") {
        std::ofstream(path, std::ios::binary) << actual;
        return;
    }
    ASSERT_TRUE(fs::exists(path)) << path;
    EXPECT_EQ(actual, slurp(path)) << "golden mismatch for " << name;
}

const std::vector<std::pair<std::string, std::vector<std::string>>>& golden_cases() {
    static const std::vector<std::pair<std::string, std::vector<std::string>>> cases{
        {"diagnose_hypercube6", {"diagnose", "--ensemble", "hypercube", "--d", "6", "--eps", "1.0"}},
        {"diagnose_zero", {"diagnose", "--matrix", data("zero.txt")}},
        {"diagnose_star", {"diagnose", "--ensemble", "star", "--n", "9"}},
        {"compare_complete", {"compare", "--ensemble", "complete", "--q", "2", "--beta", "1", "--B", "0", "--n", "6,8,10,12,14,16"}},
        {"compare_free", {"compare", "--ensemble", "complete", "--q", "2", "--beta", "0", "--B", "0", "--n", "8"}},
        {"compare_k33", {"compare", "--matrix", data("k33.txt"), "--q", "2", "--beta", "3"}},
        {"limit_cw", {"limit", "cw", "--q", "2", "--beta", "1", "--h", "0,0"}},
        {"limit_cw_q3", {"limit", "cw", "--q", "3", "--beta", "4", "--B", "0.1"}},
        {"limit_bipartite", {"limit", "bipartite", "--beta", "2", "--p", "0.5"}},
        {"limit_bipartite_sweep", {"limit", "bipartite", "--p", "0.5", "--beta-grid", "-4:4:0.5"}},
        {"limit_ldp", {"limit", "ldp", "--q", "2", "--beta", "3", "--h", "0,0", "--mu", "0.5,0.5"}},
    };
    return cases;
}

}  // namespace

TEST(CliGolden, MatchesStoredResults) {
    for (const auto& [name, args] : golden_cases()) {
        SCOPED_TRACE(name);
        check_golden(name, args);
    }
}

TEST(CliDeterminism, RerunsAreByteIdentical) {
    std::vector<std::vector<std::string>> commands;
    for (const auto& [name, args] : golden_cases()) commands.push_back(args);
    commands.push_back({"diagnose", "--ensemble", "sk", "--n", "400", "--seed", "1"});
    commands.push_back({"mf", "--ensemble", "sk", "--n", "10", "--q", "3", "--beta", "2", "--seed", "7", "--restarts", "9"});
    commands.push_back({"gen", "--ensemble", "erdos_renyi", "--n", "12", "--p", "0.4", "--seed", "5"});
    commands.push_back({"exact", "--ensemble", "hopfield", "--n", "6", "--m", "2", "--seed", "2", "--law"});
    commands.push_back({"concentration", "--ensemble", "complete", "--n", "14", "--beta", "3", "--B", "1"});
    commands.push_back({"limit", "ldp", "--q", "2", "--beta-grid", "0.5:4:0.5", "--B", "0.5"});
    commands.push_back({"graphon", "fsup", "--ensemble", "sk", "--n", "6", "--seed", "3", "--multiply-by-n", "--q", "2", "--beta", "1"});
    for (const auto& args : commands) {
        const CliRun a = run(args), b = run(args);
        ASSERT_EQ(a.code, 0) << a.err;
        EXPECT_EQ(json::parse(a.out).at("results").dump(), json::parse(b.out).at("results").dump());
        EXPECT_EQ(a.out, b.out);
    }
}

TEST(CliDiagnose, HypercubeSix) {
    const auto r = results_of(run({"diagnose", "--ensemble", "hypercube", "--d", "6", "--eps", "1.0"}));
    EXPECT_EQ(r.at("n"), 64);
    EXPECT_NEAR(r.at("trace_sq_over_n").get<double>(), 1.0 / 6.0, 1e-12);
    EXPECT_EQ(r.at("n_big"), 14);
    EXPECT_FALSE(r.at("meets_mean_field_heuristic").get<bool>());
    EXPECT_NE(r.at("heuristic_note").get<std::string>().find("heuristic"), std::string::npos);
}

TEST(CliDiagnose, SkTraceNearOne) {
    const auto r = results_of(run({"diagnose", "--ensemble", "sk", "--n", "400", "--seed", "1"}));
    EXPECT_NEAR(r.at("trace_sq_over_n").get<double>(), 1.0, 0.15);
}

TEST(CliDiagnose, ZeroMatrix) {
    const auto r = results_of(run({"diagnose", "--matrix", data("zero.txt")}));
    EXPECT_EQ(r.at("trace_sq_over_n").get<double>(), 0.0);
    EXPECT_EQ(r.at("n_big").get<int>(), 0);
    EXPECT_EQ(r.at("l1_condition").at("bound").get<double>(), 0.0);
    EXPECT_EQ(r.at("l1_condition").at("exact").get<double>(), 0.0);
    for (double l : r.at("eigenvalues").get<std::vector<double>>()) EXPECT_EQ(l, 0.0);
    EXPECT_TRUE(r.at("meets_mean_field_heuristic").get<bool>());
}

TEST(CliDiagnose, ThresholdFlag) {
    const auto r = results_of(run({"diagnose", "--ensemble", "hypercube", "--d", "6", "--threshold", "0.2"}));
    EXPECT_TRUE(r.at("meets_mean_field_heuristic").get<bool>());
}

TEST(CliCompare, CompleteSweepAndCsv) {
    const auto csv = temp_file("compare.csv");
    const auto r = results_of(run({"compare", "--ensemble", "complete", "--q", "2", "--beta", "1", "--B", "0", "--n",
                                   "6,8,10,12,14,16", "--csv", csv.string()}));
    const auto rows = r.at("rows");
    ASSERT_EQ(rows.size(), 6u);
    for (const auto& row : rows) EXPECT_GE(row.at("gap_per_site").get<double>(), 0.0);
    EXPECT_LE(rows.back().at("gap_per_site").get<double>(), rows.front().at("gap_per_site").get<double>());

    const std::string text = slurp(csv);
    EXPECT_EQ(text.rfind("n,phi_per_site,supm_per_site,gap_per_site\n", 0), 0u);
    EXPECT_EQ(text.find('\r'), std::string::npos);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 7);
    std::istringstream lines(text);
    std::string line;
    std::getline(lines, line);
    std::getline(lines, line);
    std::istringstream cells(line);
    std::string cell;
    std::vector<std::string> parts;
    while (std::getline(cells, cell, ',')) parts.push_back(cell);
    ASSERT_EQ(parts.size(), 4u);
    EXPECT_EQ(parts[0], "6");
    EXPECT_EQ(std::stod(parts[3]), rows[0].at("gap_per_site").get<double>());
    fs::remove(csv);
}

TEST(CliCompare, FreeModelIsLogTwo) {
    const auto row = results_of(run({"compare", "--ensemble", "complete", "--q", "2", "--beta", "0", "--B", "0", "--n", "8"}))
                         .at("rows")
                         .at(0);
    EXPECT_NEAR(row.at("phi_per_site").get<double>(), std::log(2.0), 1e-14);
    EXPECT_NEAR(row.at("supm_per_site").get<double>(), std::log(2.0), 1e-14);
}

TEST(CliCompare, K33MatchesTrueSupremum) {
    const auto row = results_of(run({"compare", "--matrix", data("k33.txt"), "--q", "2", "--beta", "3"})).at("rows").at(0);
    const double supm = row.at("supm_per_site").get<double>();
    EXPECT_NEAR(supm, mfpotts::finite_bipartite_sup(3, 3, 3, 3, 3.0) / 6.0, 1e-7);
    // The sigma-at-beta closed form sits strictly below the solver's value here.
    EXPECT_GT(supm, mfpotts::finite_bipartite_value(3, 3, 3, 3, 3.0) / 6.0 + 0.1);
}

TEST(CliCompare, CapExceededRowsAreSkipped) {
    const auto csv = temp_file("skip.csv");
    const auto rows = results_of(run({"compare", "--ensemble", "complete", "--q", "2", "--beta", "1", "--n", "4,30", "--csv",
                                      csv.string()}))
                          .at("rows");
    EXPECT_EQ(rows.at(0).at("status"), "ok");
    EXPECT_EQ(rows.at(1).at("status"), "skipped");
    EXPECT_NE(rows.at(1).at("reason").get<std::string>().find("cap"), std::string::npos);
    EXPECT_NE(slurp(csv).find("30,skipped"), std::string::npos);
    fs::remove(csv);
}

TEST(CliLimit, Examples) {
    EXPECT_NEAR(results_of(run({"limit", "cw", "--q", "2", "--beta", "1", "--h", "0,0"})).at("value").get<double>(),
                0.943147, 1e-6);
    EXPECT_EQ(results_of(run({"limit", "bipartite", "--beta", "2", "--p", "0.5"})).at("value").get<double>(),
              0.25 + std::log(2.0));
    const auto ldp = results_of(run({"limit", "ldp", "--q", "2", "--beta", "3", "--h", "0,0"}));
    auto ms = ldp.at("magnetizations").get<std::vector<double>>();
    ASSERT_EQ(ms.size(), 2u);
    std::sort(ms.begin(), ms.end());
    EXPECT_NEAR(ms[1], 0.8586, 1e-4);
    EXPECT_NEAR(ms[0], -0.8586, 1e-4);
}

TEST(CliLimit, SweepWritesCsv) {
    const auto csv = temp_file("sweep.csv");
    const auto r = results_of(run({"limit", "cw", "--q", "2", "--beta-grid", "0:4:1", "--csv", csv.string()}));
    EXPECT_EQ(r.at("rows").size(), 5u);
    const std::string text = slurp(csv);
    EXPECT_EQ(text.rfind("beta,value,argmax_count\n", 0), 0u);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 6);
    fs::remove(csv);
}

TEST(CliConcentration, SymmetricBimodalLaw) {
    const auto r = results_of(run({"concentration", "--ensemble", "complete", "--n", "14", "--beta", "4", "--B", "0"}));
    EXPECT_EQ(r.at("regime"), "symmetric_pair");
    EXPECT_NEAR(r.at("mass_positive").get<double>(), r.at("mass_negative").get<double>(), 1e-12);
    EXPECT_EQ(r.at("predicted_locations").size(), 2u);
}

TEST(CliConcentration, FieldCase) {
    const auto r = results_of(run({"concentration", "--ensemble", "complete", "--n", "14", "--beta", "3", "--B", "1"}));
    const auto loc = r.at("predicted_locations").get<std::vector<double>>();
    ASSERT_EQ(loc.size(), 1u);
    EXPECT_NEAR(loc[0], 0.9594710427973249, 1e-12);
    EXPECT_GT(r.at("mass_within_delta").get<double>(), 0.5);
}

TEST(CliConcentration, HighTemperatureMassNearZeroIsReported) {
    const auto r = results_of(run({"concentration", "--ensemble", "complete", "--n", "14", "--beta", "1", "--B", "0"}));
    // Exact value; a closed-form binomial sum gives the same number.
    EXPECT_NEAR(r.at("mass_within_delta").get<double>(), 0.41961608671835354, 1e-12);
}

TEST(CliExact, ConfigurationAndConditional) {
    const auto r = results_of(run({"exact", "--ensemble", "complete", "--n", "3", "--q", "2", "--beta", "1", "--config",
                                   "1,1,2", "--site", "3"}));
    EXPECT_NEAR(r.at("phi").get<double>(), 2.9368155611886246, 1e-13);
    EXPECT_NEAR(r.at("conditional").at(0).get<double>(), 0.7310585786300049, 1e-15);
    EXPECT_NEAR(r.at("hamiltonian").get<double>(), 0.5, 1e-15);
}

TEST(CliExact, DiagonalIsZeroedWithWarning) {
    const CliRun r = run({"exact", "--matrix", data("cycle4_diag.txt"), "--q", "2", "--beta", "1"});
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.err.find("warning"), std::string::npos);
    EXPECT_EQ(json::parse(r.out).at("results").at("diagonal_mass_dropped").get<double>(), 0.5);
}

TEST(CliExact, JFileMatchesExplicitModel) {
    const auto r = results_of(run({"exact", "--ensemble", "complete", "--n", "5", "--q", "2", "--J", data("j_ferro.txt")}));
    const mfpotts::PottsModel m(mfpotts::generate(mfpotts::ensemble::Complete{5}), 2, {1, 0.5, 0.5, 1}, {0, 0});
    EXPECT_NEAR(r.at("phi").get<double>(), mfpotts::log_partition(m), 1e-13);
}

TEST(CliGraphon, Commands) {
    const auto cut = results_of(run({"graphon", "cutnorm", "--graphon", data("offdiag_graphon.txt")}));
    EXPECT_EQ(cut.at("cut").get<double>(), 0.5);
    const auto dist = results_of(run({"graphon", "dist", "--graphon", data("offdiag_graphon.txt"), "--other",
                                      data("zero_graphon.txt")}));
    EXPECT_EQ(dist.at("cut_distance_upper_bound").get<double>(), 0.5);
    const auto fsup = results_of(run({"graphon", "fsup", "--ensemble", "complete", "--n", "12", "--multiply-by-n", "--q",
                                      "2", "--beta", "1"}));
    const auto mf = results_of(run({"mf", "--ensemble", "complete", "--n", "12", "--q", "2", "--beta", "1"}));
    EXPECT_NEAR(fsup.at("value").get<double>(), mf.at("value_per_site").get<double>(), 1e-8);
}

TEST(CliGen, WritesLoadableMatrix) {
    const auto path = temp_file("gen.txt");
    const CliRun r = run({"gen", "--ensemble", "sk", "--n", "7", "--seed", "4", "--out", path.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(mfpotts::load_matrix(path.string()).entries(),
              mfpotts::generate(mfpotts::ensemble::SherringtonKirkpatrick{7, 4}).entries());
    fs::remove(path);
}

TEST(CliJson, NumbersRoundTrip) {
    const CliRun r = run({"mf", "--ensemble", "sk", "--n", "6", "--seed", "2", "--q", "2", "--beta", "1.3"});
    const json doc = json::parse(r.out);
    EXPECT_EQ(json::parse(doc.dump()), doc);
    const double v = doc.at("results").at("value").get<double>();
    const auto m = mfpotts::PottsModel::standard(
        mfpotts::drop_diagonal(mfpotts::generate(mfpotts::ensemble::SherringtonKirkpatrick{6, 2})).first, 2, 1.3, 0.0);
    mfpotts::Schedule s;
    s.seed = 2;
    EXPECT_EQ(v, mfpotts::mf_solve(m, s).value);
    EXPECT_EQ(doc.at("inputs").at("seed"), 2);
    EXPECT_EQ(doc.at("version"), "mfpotts 0.1.0");
    EXPECT_EQ(doc.at("command"), "mf");
}

TEST(CliExitCodes, Mapping) {
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"bogus"}).code, 2);
    EXPECT_EQ(run({"diagnose", "--ensemble", "nope", "--n", "3"}).code, 2);
    EXPECT_EQ(run({"diagnose", "--ensemble", "complete"}).code, 2);
    EXPECT_EQ(run({"limit", "bipartite", "--beta", "2", "--p", "1.5"}).code, 2);
    EXPECT_EQ(run({"limit", "cw", "--q", "1", "--beta", "1"}).code, 2);
    EXPECT_EQ(run({"mf", "--ensemble", "complete", "--n", "4", "--q", "3", "--h", "1,2"}).code, 2);
    EXPECT_EQ(run({"exact", "--ensemble", "complete", "--n", "40", "--q", "2"}).code, 3);
    EXPECT_EQ(run({"exact", "--ensemble", "complete", "--n", "10", "--q", "2", "--cap", "100"}).code, 3);
    EXPECT_EQ(run({"diagnose", "--matrix", "/nonexistent/m.txt"}).code, 4);
    EXPECT_EQ(run({"diagnose", "--matrix", data("bad.txt")}).code, 4);
    EXPECT_EQ(run({"graphon", "cutnorm", "--graphon", data("bad.txt")}).code, 4);
    EXPECT_EQ(run({"compare", "--ensemble", "complete", "--n", "4", "--q", "2", "--csv", "/nonexistent/dir/x.csv"}).code, 4);
    const CliRun help = run({"--help"});
    EXPECT_EQ(help.code, 0);
    EXPECT_NE(help.out.find("diagnose"), std::string::npos);
}
