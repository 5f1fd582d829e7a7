#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "bftsim/engine.hpp"
#include "bftsim/event_log.hpp"
#include "bftsim/wsss.hpp"
#include "commands.hpp"

namespace fs = std::filesystem;
using namespace bftsim;

namespace {

struct CliResult {
    int code = 0;
    std::string out;
    std::string err;
};

CliResult invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "bftsim");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    CliResult r;
    r.code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream(p, std::ios::binary) << text;
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("bftsim_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }
    static std::string scenario(const std::string& name) { return std::string(BFTSIM_SCENARIO_DIR) + "/" + name; }

    fs::path dir_;
};

}  // namespace

TEST_F(Cli, RunWritesReport) {
    const auto r = invoke({"run", "--config", scenario("base.cfg"), "--seed", "42", "--out", path("r.json")});
    EXPECT_EQ(r.code, cli::kOk) << r.err;
    ASSERT_TRUE(fs::exists(path("r.json")));
    const auto report = parse_report(slurp(path("r.json")), ReportFormat::Json);
    EXPECT_EQ(report.seed, 42u);
    EXPECT_EQ(report.scheduler, "wsss");
}

TEST_F(Cli, RunIsDeterministic) {
    ASSERT_EQ(invoke({"run", "--config", scenario("base.cfg"), "--seed", "42", "--out", path("a.json")}).code, 0);
    ASSERT_EQ(invoke({"run", "--config", scenario("base.cfg"), "--seed", "42", "--out", path("b.json")}).code, 0);
    EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
}

TEST_F(Cli, RunMissingConfigNamesPath) {
    const auto r = invoke({"run", "--config", path("nope.cfg")});
    EXPECT_EQ(r.code, cli::kConfig);
    EXPECT_NE(r.err.find(path("nope.cfg")), std::string::npos) << r.err;
}

TEST_F(Cli, RunInvalidConfig) {
    spit(path("bad.cfg"), "base_interval = 0\n");
    const auto r = invoke({"run", "--config", path("bad.cfg")});
    EXPECT_EQ(r.code, cli::kConfig);
    EXPECT_NE(r.err.find("base_interval"), std::string::npos);
}

TEST_F(Cli, RunOverridesAndSideFiles) {
    const auto r = invoke({"run", "--config", scenario("single_vn.cfg"), "--scheduler", "mesf", "--checkpoint", "sync",
                        "--format", "csv", "--event-log", path("log.csv"), "--ledger", path("ledger.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto report = parse_report(r.out, ReportFormat::Csv);
    EXPECT_EQ(report.scheduler, "mesf");
    EXPECT_EQ(report.checkpoint_policy, "sync");
    EXPECT_EQ(slurp(path("log.csv")).rfind("time,seq,kind,target,detail\n", 0), 0u);
    EXPECT_EQ(slurp(path("ledger.csv")).rfind("ckpt_id,scope,time,status,size,cost\n", 0), 0u);
}

TEST_F(Cli, UsageErrors) {
    EXPECT_EQ(invoke({}).code, cli::kUsage);
    EXPECT_EQ(invoke({"frobnicate"}).code, cli::kUsage);
    EXPECT_EQ(invoke({"run"}).code, cli::kUsage);
    EXPECT_EQ(invoke({"run", "--config", scenario("base.cfg"), "--format", "xml"}).code, cli::kUsage);
    EXPECT_EQ(invoke({"run", "--config", scenario("base.cfg"), "--scheduler", "fifo"}).code, cli::kUsage);
    EXPECT_EQ(invoke({"--help"}).code, cli::kOk);
}

TEST_F(Cli, CompareNeedsTwoCombos) {
    const auto r = invoke({"compare", "--config", scenario("single_vn.cfg"), "--combo", "wsss+tcc"});
    EXPECT_EQ(r.code, cli::kUsage);
    EXPECT_NE(r.err.find("need >= 2"), std::string::npos);
}

TEST_F(Cli, CompareReflexiveIsAllZero) {
    const auto r = invoke({"compare", "--config", scenario("single_vn.cfg"), "--combo", "wsss+tcc", "--combo", "wsss+tcc"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream lines(r.out);
    std::string line;
    std::getline(lines, line);
    EXPECT_EQ(line, "metric,wsss+tcc,wsss+tcc,delta,favors");
    int rows = 0;
    while (std::getline(lines, line)) {
        ++rows;
        const bool zero = line.find(",0,tie") != std::string::npos || line.find(",0,neutral") != std::string::npos ||
                          line.find("not_modeled") != std::string::npos;
        EXPECT_TRUE(zero) << line;
    }
    EXPECT_EQ(rows, 13);
}

TEST_F(Cli, CompareCrossesLists) {
    const auto r = invoke({"compare", "--config", scenario("single_vn.cfg"), "--scheduler", "wsss,mesf", "--checkpoint",
                        "tcc", "--format", "json", "--out", path("cmp.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    const std::string json = slurp(path("cmp.json"));
    EXPECT_NE(json.find("\"baseline\": \"wsss+tcc\""), std::string::npos);
    EXPECT_NE(json.find("\"candidate\": \"mesf+tcc\""), std::string::npos);
    EXPECT_NE(r.out.find("wsss+tcc vs mesf+tcc"), std::string::npos);
}

TEST_F(Cli, CompareUnknownPolicy) {
    EXPECT_EQ(invoke({"compare", "--config", scenario("single_vn.cfg"), "--combo", "wsss+tcc", "--combo", "wsss+magic"}).code,
              cli::kUsage);
}

TEST_F(Cli, FsmTraceVerdicts) {
    spit(path("ok.trace"), "S0 high noerror -> S1\n");
    auto r = invoke({"fsm-trace", path("ok.trace")});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "conformant\n");

    spit(path("bad.trace"), "S0 high noerror -> S2\n");
    r = invoke({"fsm-trace", path("bad.trace")});
    EXPECT_EQ(r.code, cli::kRuntime);
    EXPECT_EQ(r.out.rfind("divergence at line 1", 0), 0u);

    spit(path("empty.trace"), "");
    r = invoke({"fsm-trace", path("empty.trace")});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.err.find("0 steps"), std::string::npos);

    spit(path("junk.trace"), "S0 high noerror -> S1\nhello\n");
    r = invoke({"fsm-trace", path("junk.trace")});
    EXPECT_EQ(r.code, cli::kConfig);
    EXPECT_NE(r.err.find("line 2"), std::string::npos) << r.err;
}

TEST_F(Cli, FsmTraceShippedSamples) {
    EXPECT_EQ(invoke({"fsm-trace", scenario("conformant.fsmtrace")}).code, 0);
    EXPECT_EQ(invoke({"fsm-trace", scenario("divergent.fsmtrace")}).code, cli::kRuntime);
}

TEST_F(Cli, RankRecountsFailures) {
    std::string log = "time,seq,kind,target,detail\n";
    for (int i = 0; i < 5; ++i) log += "1,1,Failure,s1,erroneous\n";
    for (int i = 0; i < 2; ++i) log += "2,2,Failure,s2,Y\n";
    spit(path("log.csv"), log);
    const auto r = invoke({"rank", "--event-log", path("log.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "server_id,fault_count,w_count,y_count,rank\ns2,2,0,2,1\ns1,5,5,0,2\n");
}

TEST_F(Cli, RankEmptyLogWarns) {
    spit(path("empty.csv"), "time,seq,kind,target,detail\n");
    const auto r = invoke({"rank", "--event-log", path("empty.csv")});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "server_id,fault_count,w_count,y_count,rank\n");
    EXPECT_NE(r.err.find("warning"), std::string::npos);
}

TEST_F(Cli, RankCorruptLine) {
    spit(path("corrupt.csv"), "time,seq,kind,target,detail\n1,1,Failure,s1,erroneous\nnot a record\n");
    const auto r = invoke({"rank", "--event-log", path("corrupt.csv")});
    EXPECT_EQ(r.code, cli::kConfig);
    EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
}

TEST_F(Cli, RankMatchesGeneratingRun) {
    ASSERT_EQ(invoke({"run", "--config", scenario("desk.cfg"), "--event-log", path("log.csv"), "--out", path("r.json")}).code, 0);
    const auto r = invoke({"rank", "--event-log", path("log.csv"), "--out", path("rank.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto live = run_scenario(validate_config(load_config_file(scenario("desk.cfg"))));
    EXPECT_EQ(slurp(path("rank.csv")), ranking_csv(rank_servers(live.servers)));
}
