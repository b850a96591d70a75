#include "fsaudit/cli.hpp"
#include "fsaudit/harness.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include "json.hpp"

using namespace fsaudit;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result call(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(std::move(args), out, err);
    return { code, out.str(), err.str() };
}

bool has(const std::string &text, const std::string &needle) { return text.find(needle) != std::string::npos; }

// Three tiny datasets and a manifest naming them by relative path.
fs::path small_bench_dir() {
    const auto dir = test::scratch_dir("cli_bench");
    std::ofstream man(dir / "manifest.csv");
    man << "# name,path,instances,features\n";
    std::uint64_t seed = 1;
    for (const std::string name : { "a", "b", "c" }) {
        save_csv((dir / (name + ".csv")).string(), generate_gaussian_problem({ 14, 12, 2, 1.2 }, seed++, name));
        man << name << ',' << name << ".csv,28,12\n";
    }
    return dir;
}

}  // namespace

TEST(Cli, NoArgumentsPrintsUsage) {
    const auto r = call({});
    EXPECT_EQ(r.code, 1);
    EXPECT_TRUE(has(r.err, "samplesize"));
    EXPECT_TRUE(r.out.empty());
}

TEST(Cli, SampleSizeWorkedExample) {
    const auto r = call({ "samplesize", "--p1", "0.85", "--p2", "0.80", "--d", "0.68", "--alpha", "0.05" });
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "445.6\n");
    EXPECT_TRUE(has(r.err, "fsaudit: config"));
}

TEST(Cli, SampleSizeJsonAndCurve) {
    auto r = call({ "samplesize", "--p1", "0.85", "--p2", "0.80", "--d", "0.68", "--json" });
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_NEAR(j["n"].get<double>(), 445.6, 0.05);
    EXPECT_EQ(j["n_ceil"].get<int>(), 446);

    r = call({ "samplesize", "--curve" });
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.rfind("p1,alpha,n\n", 0), 0u);
}

TEST(Cli, SampleSizeRejectsImpossibleAgreement) {
    EXPECT_EQ(call({ "samplesize", "--p1", "0.85", "--p2", "0.80", "--d", "0.9" }).code, 2);
}

TEST(Cli, DemoFig3) {
    auto r = call({ "demo", "fig3", "--mode", "ldc-wins" });
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(has(r.out, "LOO(LDC)=0\n"));
    EXPECT_TRUE(has(r.out, "LOO(1NN)=1\n"));

    r = call({ "demo", "fig3", "--mode", "nn-wins" });
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(has(r.out, "LOO(LDC)=1\n"));
    EXPECT_TRUE(has(r.out, "LOO(1NN)=0\n"));
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(call({ "frobnicate" }).code, 1);
    EXPECT_EQ(call({ "samplesize", "--bogus" }).code, 1);
    EXPECT_EQ(call({ "demo", "fig3", "--mode", "both" }).code, 1);
    EXPECT_EQ(call({ "rank" }).code, 1);
}

TEST(Cli, MissingDataIsADataError) {
    const auto r = call({ "rank", "--data", "/nonexistent/x.csv" });
    EXPECT_EQ(r.code, 2);
    EXPECT_FALSE(r.err.empty());
}

TEST(Cli, RankSonar) {
    const auto r = call({ "rank", "--data", test::data_path("sonar.csv"), "--top", "5" });
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "rank,feature_index,feature_name,score");
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
    }
    EXPECT_EQ(rows, 5);
}

TEST(Cli, SelectAndEstimateOnProbe) {
    const auto data = test::data_path("sonar.csv");
    auto r = call({ "select", "--data", data, "--classifier", "LDC", "--scheme", "TOP3", "--per-class", "10" });
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(has(r.out, "subset: "));
    EXPECT_TRUE(has(r.out, "criterion (smoothed LOO): "));
    EXPECT_TRUE(has(r.out, "holdout error"));

    r = call({ "estimate", "--data", data, "--classifier", "1NN", "--estimator", "RESUB", "--subset", "0,1,2", "--per-class", "10" });
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(has(r.out, "RESUB=0"));
}

TEST(Cli, SameSeedSameOutput) {
    const std::vector<std::string> args{ "select", "--data", test::data_path("sonar.csv"), "--classifier", "NB", "--scheme", "RND20", "--per-class", "8", "--seed", "9" };
    const auto a = call(args);
    const auto b = call(args);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(a.err, b.err);
}

TEST(Cli, ConfigFile) {
    const auto dir = test::scratch_dir("cli_config");
    {
        std::ofstream(dir / "good.cfg") << "# overrides\nrf.trees=7\nsvm.c = 2\n";
        std::ofstream(dir / "bad.cfg") << "rf.treez=7\n";
        std::ofstream(dir / "nan.cfg") << "rf.trees=many\n";
        std::ofstream(dir / "zero.cfg") << "ldc.lambda=0\n";
    }
    const auto data = test::data_path("sonar.csv");
    auto r = call({ "--config", (dir / "good.cfg").string(), "rank", "--data", data, "--top", "1" });
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(has(r.err, "rf.trees"));
    EXPECT_EQ(call({ "--config", (dir / "bad.cfg").string(), "rank", "--data", data }).code, 1);
    EXPECT_EQ(call({ "--config", (dir / "nan.cfg").string(), "rank", "--data", data }).code, 1);
    EXPECT_EQ(call({ "--config", (dir / "zero.cfg").string(), "rank", "--data", data }).code, 1);
}

TEST(Cli, BenchAnalyzeReport) {
    const auto dir = small_bench_dir();
    const auto results = (dir / "results.jsonl").string();
    const std::vector<std::string> bench{ "bench",     "--manifest", (dir / "manifest.csv").string(), "--out", results, "--classifiers", "LDC,1NN",
                                          "--rankers", "SU",         "--selectors", "ALL,TOP3", "--runs", "2", "--per-class", "5", "--json" };
    auto r = call(bench);
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["records"].get<int>(), 24);
    EXPECT_EQ(j["expected"].get<int>(), 24);
    EXPECT_EQ(j["failed"].get<int>(), 0);
    const auto first = test::slurp(results);

    auto resumed = bench;
    resumed.push_back("--resume");
    r = call(resumed);
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(nlohmann::json::parse(r.out)["written"].get<int>(), 0);
    EXPECT_EQ(test::slurp(results), first);

    const auto an = dir / "analysis";
    r = call({ "analyze", "--in", results, "--out", an.string() });
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(an / "selector_ranks.csv"));
    EXPECT_TRUE(fs::exists(an / "combinations.csv"));
    EXPECT_TRUE(fs::exists(an / "friedman.json"));

    const auto rep = dir / "report";
    r = call({ "report", "--in", results, "--out", rep.string() });
    ASSERT_EQ(r.code, 0) << r.err;
    int html = 0, svg = 0;
    for (const auto &e : fs::directory_iterator(rep)) {
        html += e.path().extension() == ".html";
        svg += e.path().extension() == ".svg";
    }
    EXPECT_EQ(html, 1);
    EXPECT_GE(svg, 1);
}

TEST(Cli, DemoSynthRoundTrip) {
    const auto dir = test::scratch_dir("cli_synth");
    const auto path = (dir / "w.csv").string();
    const auto r = call({ "demo", "synth", "--out", path, "--per-class", "5", "--features", "30" });
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(has(r.out, "wrote 10 x 30"));
    const auto d = load_csv(path, {}, "w");
    EXPECT_EQ(d.size(), 10u);
    EXPECT_EQ(d.dim(), 30u);
}
