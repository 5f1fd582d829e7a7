#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "bftsim/config.hpp"
#include "bftsim/rng.hpp"
#include "bftsim/types.hpp"
#include "bftsim/workload.hpp"
#include "bftsim/wsss.hpp"

using namespace bftsim;

namespace {

std::vector<int> sizes(const std::vector<Job>& jobs) {
    std::vector<int> out;
    for (const auto& j : jobs) out.push_back(static_cast<int>(j.tasks.size()));
    return out;
}

// Every composition of n into k positive parts, lexicographic order.
void compositions(int n, int k, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (k == 0) {
        if (n == 0) out.push_back(cur);
        return;
    }
    for (int first = n - (k - 1); first >= 1; --first) {
        cur.push_back(first);
        compositions(n - first, k - 1, cur, out);
        cur.pop_back();
    }
}

// Lexicographically-first balanced partition: largest parts first.
std::vector<int> balanced_oracle(int n, int k) {
    std::vector<std::vector<int>> all;
    std::vector<int> cur;
    compositions(n, k, cur, all);
    std::vector<std::vector<int>> balanced;
    for (auto& c : all) {
        const auto [lo, hi] = std::minmax_element(c.begin(), c.end());
        if (*hi - *lo <= 1) balanced.push_back(c);
    }
    return *std::max_element(balanced.begin(), balanced.end());
}

std::string message_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST(Config, AcceptsValidValues) {
    const SimConfig cfg = validate_config(RawConfig{{"base_interval", "10"},
                                                    {"initial_ft_interval", "10"},
                                                    {"p_detect", "0.88"},
                                                    {"migration_threshold", "5"},
                                                    {"suspicion_threshold", "3"},
                                                    {"seed", "42"}});
    EXPECT_EQ(cfg.base_interval, 10);
    EXPECT_EQ(cfg.initial_ft_interval, 10);
    EXPECT_DOUBLE_EQ(cfg.p_detect, 0.88);
    EXPECT_EQ(cfg.migration_threshold, 5);
    EXPECT_EQ(cfg.suspicion_threshold, 3);
    EXPECT_EQ(cfg.seed, 42u);
}

TEST(Config, RejectsNonPositiveBaseInterval) {
    const auto msg = message_of([] { validate_config(RawConfig{{"base_interval", "0"}}); });
    EXPECT_EQ(msg.rfind("base_interval must be positive", 0), 0u) << msg;
    EXPECT_THROW(validate_config(RawConfig{{"initial_ft_interval", "-1"}}), ConfigError);
}

TEST(Config, RejectsProbabilityOutOfRange) {
    const auto msg = message_of([] { validate_config(RawConfig{{"p_detect", "1.5"}}); });
    EXPECT_NE(msg.find("p_detect out of range"), std::string::npos) << msg;
    EXPECT_THROW(validate_config(RawConfig{{"p_prop", "-0.1"}}), ConfigError);
}

TEST(Config, RejectsNonIncreasingThresholds) {
    const auto msg = message_of([] { validate_config(RawConfig{{"delay_threshold_high", "1.0"}}); });
    EXPECT_EQ(msg.rfind("delay_threshold_high", 0), 0u) << msg;
    EXPECT_THROW(validate_config(RawConfig{{"delay_threshold_low", "1.0"}}), ConfigError);
    EXPECT_THROW(validate_config(RawConfig{{"suspicion_threshold", "0"}}), ConfigError);
    EXPECT_THROW(validate_config(RawConfig{{"migration_threshold", "0"}}), ConfigError);
}

TEST(Config, RejectsUnknownKeyAndBadNumbers) {
    EXPECT_THROW(validate_config(RawConfig{{"bogus", "1"}}), ConfigError);
    EXPECT_THROW(validate_config(RawConfig{{"horizon", "ten"}}), ConfigError);
    EXPECT_THROW(parse_config_text("base_interval 10\n"), ConfigError);
}

TEST(Config, CapacityShortfallIsNamed) {
    try {
        validate_config(RawConfig{{"server_count", "2"}, {"server_capacity", "3"}, {"vn_count", "10"}});
        FAIL() << "expected CapacityError";
    } catch (const CapacityError& e) {
        EXPECT_EQ(e.shortfall(), 4);
        EXPECT_NE(std::string(e.what()).find("shortfall"), std::string::npos);
    }
}

TEST(Config, ParsesFileTextWithCommentsAndFaults) {
    const auto raw = parse_config_text(
        "# desk\nbase_interval = 20   # inline\n\nfault = byzantine v3 40\nfault = spike t2 10 1.5 30\n");
    const SimConfig cfg = validate_config(raw);
    EXPECT_EQ(cfg.base_interval, 20);
    ASSERT_EQ(cfg.faults.size(), 2u);
    EXPECT_EQ(cfg.faults[0].kind, FaultKind::Byzantine);
    EXPECT_EQ(cfg.faults[0].target, (FaultTarget{FaultTarget::Kind::Vn, 3}));
    EXPECT_EQ(cfg.faults[0].time, 40);
    EXPECT_EQ(cfg.faults[1].kind, FaultKind::DelaySpike);
    EXPECT_EQ(cfg.faults[1].target, (FaultTarget{FaultTarget::Kind::Task, 2}));
    EXPECT_DOUBLE_EQ(cfg.faults[1].magnitude, 1.5);
    EXPECT_EQ(cfg.faults[1].duration, 30);
}

TEST(Config, FaultTimeMustPrecedeHorizon) {
    EXPECT_THROW(validate_config(RawConfig{{"horizon", "100"}, {"fault", "crash v1 100"}}), ConfigError);
    EXPECT_NO_THROW(validate_config(RawConfig{{"horizon", "100"}, {"fault", "crash v1 99"}}));
}

TEST(Config, MissingFileNamesPath) {
    const auto msg = message_of([] { load_config_file("/nonexistent/base.cfg"); });
    EXPECT_NE(msg.find("/nonexistent/base.cfg"), std::string::npos);
}

TEST(Config, ValidationIsIdempotentAndRoundTrips) {
    SimConfig cfg;
    cfg.base_interval = 7;
    cfg.p_prop = 0.3;
    cfg.interval_growth = IntervalGrowth::Geometric;
    cfg.faults.push_back(parse_fault_spec("crash random 5"));
    const SimConfig once = validate_config(cfg);
    EXPECT_EQ(validate_config(once), once);
    EXPECT_EQ(validate_config(to_raw(once)), once);
}

TEST(Config, ScenarioIdIgnoresPolicyTags) {
    SimConfig a;
    SimConfig b = a;
    b.scheduler = SchedulerPolicy::Mesf;
    b.checkpoint_policy = CheckpointPolicy::Synchronous;
    EXPECT_EQ(scenario_id(a), scenario_id(b));
    b.seed = 7;
    EXPECT_NE(scenario_id(a), scenario_id(b));
}

TEST(Enums, RoundTripThroughText) {
    for (auto s : {NodeState::FailSafe, NodeState::Byzantine, NodeState::FailStop}) {
        EXPECT_EQ(parse_node_state(to_string(s)), s);
    }
    for (auto d : {DelayClass::Low, DelayClass::Normal, DelayClass::High, DelayClass::Extreme}) {
        EXPECT_EQ(parse_delay_class(to_string(d)), d);
    }
    for (auto c : {ChecksumResult::NoError, ChecksumResult::Error}) EXPECT_EQ(parse_checksum(to_string(c)), c);
    for (auto c : {CheckpointStatus::Null, CheckpointStatus::Confirmed, CheckpointStatus::Previous,
                   CheckpointStatus::Complete}) {
        EXPECT_EQ(parse_checkpoint_status(to_string(c)), c);
    }
    for (auto p : {PerformanceClass::NotPerforming, PerformanceClass::Performing, PerformanceClass::Wary}) {
        EXPECT_EQ(parse_performance(to_string(p)), p);
    }
    for (auto k : {FailureKind::Erroneous, FailureKind::DelaySensitive}) EXPECT_EQ(parse_failure_kind(to_string(k)), k);
    for (auto p : {SchedulerPolicy::Wsss, SchedulerPolicy::Mesf, SchedulerPolicy::Random}) {
        EXPECT_EQ(parse_scheduler(to_string(p)), p);
    }
    for (auto p : {CheckpointPolicy::Tcc, CheckpointPolicy::Synchronous, CheckpointPolicy::Independent}) {
        EXPECT_EQ(parse_checkpoint_policy(to_string(p)), p);
    }
    EXPECT_EQ(parse_node_state("fail-safe"), NodeState::FailSafe);
    EXPECT_THROW(parse_scheduler("xml"), Error);
}

TEST(Enums, DelayClassIsTotallyOrdered) {
    EXPECT_LT(DelayClass::Low, DelayClass::Normal);
    EXPECT_LT(DelayClass::Normal, DelayClass::High);
    EXPECT_LT(DelayClass::High, DelayClass::Extreme);
}

TEST(Labels, ParseWithAndWithoutPrefix) {
    EXPECT_EQ(server_label(3), "s3");
    EXPECT_EQ(parse_label("s3", 's'), 3);
    EXPECT_EQ(parse_label("12", 'v'), 12);
    EXPECT_THROW(parse_label("sx", 's'), Error);
}

TEST(SplitApplication, ExactDivision) { EXPECT_EQ(sizes(split_application(12, 3)), (std::vector<int>{4, 4, 4})); }

TEST(SplitApplication, UnevenMatchesBalancedPartitionOracle) {
    EXPECT_EQ(sizes(split_application(10, 3)), (std::vector<int>{4, 3, 3}));
    for (int n = 1; n <= 12; ++n) {
        for (int k = 1; k <= n; ++k) EXPECT_EQ(sizes(split_application(n, k)), balanced_oracle(n, k)) << n << "/" << k;
    }
}

TEST(SplitApplication, SingletonJobs) {
    const auto jobs = split_application(5, 5);
    ASSERT_EQ(jobs.size(), 5u);
    for (int j = 0; j < 5; ++j) EXPECT_EQ(jobs[static_cast<std::size_t>(j)].tasks, (std::vector<TaskId>{j}));
}

TEST(SplitApplication, Rejections) {
    EXPECT_THROW(split_application(0, 1), ConfigError);
    EXPECT_THROW(split_application(3, 0), ConfigError);
    EXPECT_THROW(split_application(3, 4), ConfigError);
}

TEST(SplitApplication, IsAPartition) {
    Rng rng(9);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = static_cast<int>(rng.uniform_int(1, 300));
        const int k = static_cast<int>(rng.uniform_int(1, n));
        std::set<TaskId> seen;
        std::size_t total = 0;
        for (const auto& j : split_application(n, k)) {
            total += j.tasks.size();
            seen.insert(j.tasks.begin(), j.tasks.end());
        }
        EXPECT_EQ(total, static_cast<std::size_t>(n));
        EXPECT_EQ(seen.size(), static_cast<std::size_t>(n));
        EXPECT_EQ(*seen.rbegin(), n - 1);
    }
}

TEST(Workload, ConstantDemand) {
    Rng rng(1);
    WorkloadSpec spec;
    spec.task_count = 12;
    spec.job_count = 3;
    spec.demand = {100, 100};
    const auto app = generate_workload(spec, rng);
    ASSERT_EQ(app.jobs.size(), 3u);
    for (const auto& j : app.jobs) EXPECT_EQ(j.tasks.size(), 4u);
    for (const auto& t : app.tasks) EXPECT_EQ(t.demand, 100);
}

TEST(Workload, SameSeedSameWorkload) {
    WorkloadSpec spec;
    spec.task_count = 50;
    spec.job_count = 5;
    spec.demand = {50, 150};
    Rng a(42), b(42);
    const auto x = generate_workload(spec, a);
    const auto y = generate_workload(spec, b);
    ASSERT_EQ(x.tasks.size(), y.tasks.size());
    for (std::size_t i = 0; i < x.tasks.size(); ++i) EXPECT_EQ(x.tasks[i].demand, y.tasks[i].demand);
}

TEST(Workload, UniformDemandMean) {
    WorkloadSpec spec;
    spec.task_count = 10000;
    spec.job_count = 10;
    spec.demand = {50, 150};
    Rng rng(5);
    const auto app = generate_workload(spec, rng);
    double sum = 0;
    for (const auto& t : app.tasks) {
        EXPECT_GE(t.demand, 50);
        EXPECT_LE(t.demand, 150);
        sum += static_cast<double>(t.demand);
    }
    EXPECT_NEAR(sum / 10000.0, 100.0, 2.0);
}

TEST(Workload, TraceScalesDemand) {
    WorkloadSpec spec;
    spec.task_count = 4;
    spec.job_count = 2;
    spec.demand = {100, 100};
    spec.job_interarrival = 300;
    spec.trace = parse_utilization_trace("50\n75\n", 300);
    Rng rng(1);
    const auto app = generate_workload(spec, rng);
    EXPECT_EQ(app.jobs[1].release_time, 300);
    EXPECT_EQ(app.tasks[0].demand, 50);
    EXPECT_EQ(app.tasks[3].demand, 75);
}

TEST(UtilizationTrace, ParsesSamples) {
    const auto trace = parse_utilization_trace("50\n75\n", 300);
    EXPECT_EQ(trace, (UtilizationTrace{{0, 50}, {300, 75}}));
    EXPECT_EQ(utilization_at(trace, 299), 50);
    EXPECT_EQ(utilization_at(trace, 300), 75);
}

TEST(UtilizationTrace, Rejections) {
    const auto abc = message_of([] { parse_utilization_trace("abc\n", 300); });
    EXPECT_NE(abc.find("line 1"), std::string::npos) << abc;
    const auto big = message_of([] { parse_utilization_trace("10\n150\n", 300); });
    EXPECT_NE(big.find("out of range 0-100"), std::string::npos) << big;
    EXPECT_NE(big.find("line 2"), std::string::npos) << big;
    EXPECT_THROW(parse_utilization_trace("", 300), ConfigError);
    EXPECT_THROW(load_utilization_trace("/nonexistent/trace.txt", 300), ConfigError);
}
