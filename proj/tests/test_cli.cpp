// End-to-end checks of the qflimit binary: artifact formats, determinism,
// exit codes, and the gen -> estimate -> simulate -> limit-sample -> compare
// pipeline. The binary path is injected at compile time.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "qflimit/limits.hpp"
#include "qflimit/sampling.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class CliTest : public ::testing::Test {
  protected:
    void SetUp() override {
        char tmpl[] = "/tmp/qflimit_cli_XXXXXX";
        ASSERT_NE(mkdtemp(tmpl), nullptr);
        dir_ = tmpl;
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (fs::path(dir_) / name).string(); }

    // run the CLI; returns the exit status, stdout captured to `out` when given
    int run(const std::string& args, const std::string& out = "") const {
        std::string cmd = std::string(QFLIMIT_CLI_PATH) + " " + args;
        cmd += out.empty() ? " >/dev/null" : (" >" + out);
        cmd += " 2>/dev/null";
        const int rc = std::system(cmd.c_str());
        return rc == -1 ? -1 : WEXITSTATUS(rc);
    }

    static std::string slurp(const std::string& p) {
        std::ifstream in(p);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    std::string dir_;
};

TEST_F(CliTest, GenCompleteGraphAndSidecar) {
    ASSERT_EQ(run("gen complete --n 4 --out " + path("g.edges")), 0);
    const qflimit::Graph g = qflimit::read_edge_list_file(path("g.edges"));
    EXPECT_EQ(g.n(), 4u);
    EXPECT_EQ(g.edge_count(), 6u);
    const json side = json::parse(slurp(path("g.edges.json")));
    EXPECT_EQ(side.at("edges").get<int>(), 6);
    EXPECT_EQ(side.at("n").get<int>(), 4);
    EXPECT_EQ(side.at("spec").at("kind"), "complete");
}

TEST_F(CliTest, GenErIsDeterministic) {
    ASSERT_EQ(run("gen er --n 100 --p 0.5 --seed 3 --out " + path("a.edges")), 0);
    ASSERT_EQ(run("gen er --n 100 --p 0.5 --seed 3 --out " + path("b.edges")), 0);
    EXPECT_EQ(slurp(path("a.edges")), slurp(path("b.edges")));
    ASSERT_EQ(run("gen er --n 100 --p 0.5 --seed 4 --out " + path("c.edges")), 0);
    EXPECT_NE(slurp(path("a.edges")), slurp(path("c.edges")));
}

TEST_F(CliTest, GenCoexistenceEdgeBudget) {
    ASSERT_EQ(run("gen coexist --n 30 --seed 1 --out " + path("c.edges")), 0);
    const json side = json::parse(slurp(path("c.edges.json")));
    const double edges = side.at("edges").get<double>();
    EXPECT_NEAR(edges, 1.75 * 30 * 30, 0.10 * 1.75 * 30 * 30);
}

TEST_F(CliTest, ExitCodes) {
    EXPECT_EQ(run("gen er --n 10 --p 1.5 --out " + path("x.edges")), 1);      // bad parameter
    EXPECT_EQ(run("no-such-command"), 1);                                     // parse error
    EXPECT_EQ(run("estimate --graph " + path("missing.edges")), 2);           // I/O error
    ASSERT_EQ(run("gen complete --n 4 --out " + path("k4.edges")), 0);
    EXPECT_EQ(run("fourth --graph " + path("k4.edges") + " --f pareto --mc-reps 0 --oracle"),
              3);  // oracle needs finite moments: infinite m4 and no --M
    EXPECT_EQ(run("fourth --graph " + path("k4.edges") + " --f pareto --mc-reps 0"),
              0);  // without --oracle the exact entry is omitted instead
    ASSERT_EQ(run("gen complete --n 12 --out " + path("k12.edges")), 0);
    EXPECT_EQ(run("fourth --graph " + path("k12.edges") + " --oracle --mc-reps 0"),
              1);  // oracle capped at 8 vertices
    EXPECT_EQ(run("hist --sample " + path("k4.edges") + " --out " + path("h.csv")),
              2);  // not a sample CSV
}

TEST_F(CliTest, EstimateStdoutIsLimitSpecJson) {
    ASSERT_EQ(run("gen er --n 80 --p 0.4 --seed 9 --out " + path("g.edges")), 0);
    ASSERT_EQ(run("estimate --graph " + path("g.edges") + " --K 4 --s-max 3",
                  path("spec.json")), 0);
    const qflimit::LimitSpec spec =
        qflimit::LimitSpec::from_json(json::parse(slurp(path("spec.json"))));
    EXPECT_EQ(spec.K, 4u);
    EXPECT_EQ(spec.rho.size(), 3u);
    EXPECT_EQ(spec.provenance.at("command"), "estimate");
}

TEST_F(CliTest, SimulationArtifactsAndHist) {
    ASSERT_EQ(run("gen er --n 60 --p 0.3 --seed 2 --out " + path("g.edges")), 0);
    ASSERT_EQ(run("simulate --graph " + path("g.edges") +
                  " --f uniform --reps 2000 --seed 11 --out " + path("s.csv")), 0);
    const qflimit::EmpiricalSample s = qflimit::read_sample_csv_file(path("s.csv"));
    EXPECT_EQ(s.values.size(), 2000u);
    const json side = json::parse(slurp(path("s.csv.json")));
    EXPECT_EQ(side.at("reps").get<int>(), 2000);
    EXPECT_EQ(side.at("f").get<std::string>(), "uniform");

    ASSERT_EQ(run("hist --sample " + path("s.csv") + " --bins 16 --out " + path("h.csv")), 0);
    std::ifstream h(path("h.csv"));
    std::string line;
    ASSERT_TRUE(std::getline(h, line));
    EXPECT_EQ(line, "bin_left,bin_right,count");
    long long total = 0;
    int rows = 0;
    while (std::getline(h, line)) {
        const auto last = line.rfind(',');
        total += std::stoll(line.substr(last + 1));
        ++rows;
    }
    EXPECT_EQ(rows, 16);
    EXPECT_EQ(total, 2000);
}

TEST_F(CliTest, PipelineCompareEmpiricalVsLimit) {
    ASSERT_EQ(run("gen er --n 100 --p 0.5 --seed 7 --out " + path("g.edges")), 0);
    ASSERT_EQ(run("estimate --graph " + path("g.edges") + " --out " + path("spec.json")), 0);
    ASSERT_EQ(run("simulate --graph " + path("g.edges") +
                  " --f normal --reps 20000 --seed 21 --out " + path("emp.csv")), 0);
    ASSERT_EQ(run("limit-sample --spec " + path("spec.json") +
                  " --f normal --reps 20000 --seed 22 --out " + path("lim.csv")), 0);
    ASSERT_EQ(run("compare --a " + path("emp.csv") + " --b " + path("lim.csv"),
                  path("cmp.json")), 0);
    const json rep = json::parse(slurp(path("cmp.json")));
    EXPECT_LT(rep.at("ks").get<double>(), 0.05);
    EXPECT_TRUE(rep.at("wasserstein1").is_number());
    // against an analytic law reference instead of a second sample
    ASSERT_EQ(run("compare --a " + path("emp.csv") + " --law normal:1", path("law.json")), 0);
    const json lawrep = json::parse(slurp(path("law.json")));
    EXPECT_GT(lawrep.at("ks").get<double>(), 0.0);
    EXPECT_TRUE(lawrep.at("wasserstein1").is_null());
    // --b and --law are mutually exclusive
    EXPECT_NE(run("compare --a " + path("emp.csv") + " --b " + path("lim.csv") +
                  " --law normal:1"), 0);
}

TEST_F(CliTest, WorkerCountDoesNotChangeBytes) {
    ASSERT_EQ(run("gen er --n 60 --p 0.4 --seed 5 --out " + path("g.edges")), 0);
    const std::string base = "simulate --graph " + path("g.edges") +
                             " --f normal --reps 4000 --seed 13 --out ";
    ASSERT_EQ(run(base + path("t1.csv") + " --threads 1"), 0);
    ASSERT_EQ(run(base + path("t4.csv") + " --threads 4"), 0);
    EXPECT_EQ(slurp(path("t1.csv")), slurp(path("t4.csv")));
    // env-variable override takes the same path
    const std::string env_cmd = std::string("QFLIMIT_THREADS=6 ") + QFLIMIT_CLI_PATH + " " +
                                base + path("t6.csv") + " >/dev/null 2>&1";
    ASSERT_EQ(WEXITSTATUS(std::system(env_cmd.c_str())), 0);
    EXPECT_EQ(slurp(path("t1.csv")), slurp(path("t6.csv")));
}

TEST_F(CliTest, CsvReportFormat) {
    ASSERT_EQ(run("gen complete --n 30 --out " + path("g.edges")), 0);
    ASSERT_EQ(run("--format csv diagnose --graph " + path("g.edges") + " --f rademacher",
                  path("d.csv")), 0);
    std::ifstream in(path("d.csv"));
    std::string header;
    ASSERT_TRUE(std::getline(in, header));
    EXPECT_EQ(header, "key,value");
    bool saw_verdict = false;
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("verdict,", 0) == 0) saw_verdict = true;
    }
    EXPECT_TRUE(saw_verdict);
    // global flag also accepted after the subcommand name
    ASSERT_EQ(run("diagnose --graph " + path("g.edges") + " --f rademacher --format csv",
                  path("d2.csv")), 0);
    std::ifstream in2(path("d2.csv"));
    ASSERT_TRUE(std::getline(in2, header));
    EXPECT_EQ(header, "key,value");
}

TEST_F(CliTest, FourthReportFields) {
    ASSERT_EQ(run("gen complete --n 4 --out " + path("g.edges")), 0);
    ASSERT_EQ(run("fourth --graph " + path("g.edges") +
                  " --f normal --mc-reps 5000 --seed 3 --oracle", path("f.json")), 0);
    const json rep = json::parse(slurp(path("f.json")));
    EXPECT_NEAR(rep.at("exact_fourth").get<double>(), 10.0, 1e-12);
    EXPECT_NEAR(rep.at("oracle_fourth").get<double>(), 10.0, 1e-12);
    EXPECT_TRUE(rep.at("mc_fourth").is_number());
    // grid mode emits an array of reports
    ASSERT_EQ(run("fourth --graph " + path("g.edges") +
                  " --f pareto --M-grid 1,2,4 --mc-reps 0", path("curve.json")), 0);
    const json curve = json::parse(slurp(path("curve.json"))).at("reports");
    ASSERT_TRUE(curve.is_array());
    ASSERT_EQ(curve.size(), 3u);
    EXPECT_LT(curve[0].at("exact_fourth").get<double>(),
              curve[2].at("exact_fourth").get<double>());
}

}  // namespace
