#include <gtest/gtest.h>

#include <map>
#include <tuple>

#include "bftsim/config.hpp"
#include "bftsim/detection.hpp"
#include "bftsim/rng.hpp"

using namespace bftsim;

namespace {

constexpr NodeState S0 = NodeState::FailSafe;
constexpr NodeState S1 = NodeState::Byzantine;
constexpr NodeState S2 = NodeState::FailStop;

const NodeState kStates[] = {S0, S1, S2};
const DelayClass kDelays[] = {DelayClass::Low, DelayClass::Normal, DelayClass::High, DelayClass::Extreme};
const ChecksumResult kChecksums[] = {ChecksumResult::NoError, ChecksumResult::Error};

// Hand-written transition tables. Byzantine machine: columns are the input
// bit pair (delay High=0/Extreme=1, checksum NoError=0/Error=1); Low/Normal
// with NoError is the absent input.
NodeState byzantine_table(NodeState s, DelayClass d, ChecksumResult c) {
    static const std::map<std::tuple<NodeState, DelayClass, ChecksumResult>, NodeState> table = {
        {{S0, DelayClass::Low, ChecksumResult::NoError}, S0},
        {{S0, DelayClass::Normal, ChecksumResult::NoError}, S0},
        {{S0, DelayClass::High, ChecksumResult::NoError}, S1},
        {{S0, DelayClass::Extreme, ChecksumResult::NoError}, S2},
        {{S0, DelayClass::Low, ChecksumResult::Error}, S2},
        {{S0, DelayClass::Normal, ChecksumResult::Error}, S2},
        {{S0, DelayClass::High, ChecksumResult::Error}, S2},
        {{S0, DelayClass::Extreme, ChecksumResult::Error}, S2},
        {{S1, DelayClass::Low, ChecksumResult::NoError}, S0},
        {{S1, DelayClass::Normal, ChecksumResult::NoError}, S0},
        {{S1, DelayClass::High, ChecksumResult::NoError}, S1},
        {{S1, DelayClass::Extreme, ChecksumResult::NoError}, S2},
        {{S1, DelayClass::Low, ChecksumResult::Error}, S2},
        {{S1, DelayClass::Normal, ChecksumResult::Error}, S2},
        {{S1, DelayClass::High, ChecksumResult::Error}, S2},
        {{S1, DelayClass::Extreme, ChecksumResult::Error}, S2},
    };
    if (s == S2) return S2;
    return table.at({s, d, c});
}

NodeState status_table(NodeState s, CheckpointStatus st) {
    if (s == S2) return S2;
    switch (st) {
        case CheckpointStatus::Null: return S0;       // 00
        case CheckpointStatus::Confirmed: return S0;  // 01
        case CheckpointStatus::Previous: return S1;   // 10
        case CheckpointStatus::Complete: return S2;   // 11
    }
    return S2;
}

SimConfig cfg_with(IntervalGrowth g = IntervalGrowth::Triangular) {
    SimConfig cfg;
    cfg.base_interval = 10;
    cfg.interval_growth = g;
    return cfg;
}

}  // namespace

TEST(ClassifyDelay, Examples) {
    EXPECT_EQ(classify_delay(0, 100), DelayClass::Low);
    EXPECT_EQ(classify_delay(150, 100), DelayClass::High);
    EXPECT_EQ(classify_delay(250, 100), DelayClass::Extreme);
}

TEST(ClassifyDelay, BoundariesAreInclusive) {
    EXPECT_EQ(classify_delay(25, 100), DelayClass::Low);
    EXPECT_EQ(classify_delay(25.0001, 100), DelayClass::Normal);
    EXPECT_EQ(classify_delay(100, 100), DelayClass::Normal);
    EXPECT_EQ(classify_delay(200, 100), DelayClass::High);
}

TEST(ClassifyDelay, Rejections) {
    EXPECT_THROW(classify_delay(1, 0), Error);
    EXPECT_THROW(classify_delay(1, 100, {0.5, 0.5, 2.0}), Error);
}

TEST(ChecksumOracle, CleanNeverFails) {
    Rng rng(1, Stream::Oracle);
    for (int i = 0; i < 1000000; ++i) ASSERT_EQ(checksum_oracle(false, 0.88, rng), ChecksumResult::NoError);
}

TEST(ChecksumOracle, CertainDetection) {
    Rng rng(2);
    for (int i = 0; i < 1000; ++i) EXPECT_EQ(checksum_oracle(true, 1.0, rng), ChecksumResult::Error);
}

TEST(ChecksumOracle, DetectionRate) {
    Rng rng(42, Stream::Oracle);
    int errors = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) errors += checksum_oracle(true, 0.88, rng) == ChecksumResult::Error;
    EXPECT_NEAR(static_cast<double>(errors) / n, 0.88, 0.01);
}

TEST(ByzantineFsm, Examples) {
    EXPECT_EQ(byzantine_fsm_step(S0, DelayClass::High, ChecksumResult::NoError), S1);
    EXPECT_EQ(byzantine_fsm_step(S1, DelayClass::Low, ChecksumResult::NoError), S0);
    EXPECT_EQ(byzantine_fsm_step(S0, DelayClass::Normal, ChecksumResult::Error), S2);
    for (auto d : kDelays) {
        for (auto c : kChecksums) EXPECT_EQ(byzantine_fsm_step(S2, d, c), S2);
    }
}

TEST(ByzantineFsm, ExhaustiveTableEquivalence) {
    for (auto s : kStates) {
        for (auto d : kDelays) {
            for (auto c : kChecksums) EXPECT_EQ(byzantine_fsm_step(s, d, c), byzantine_table(s, d, c));
        }
    }
}

TEST(CheckpointStatusFsm, Examples) {
    EXPECT_EQ(checkpoint_status_fsm_step(S0, CheckpointStatus::Null), S0);
    EXPECT_EQ(checkpoint_status_fsm_step(S1, CheckpointStatus::Confirmed), S0);
    EXPECT_EQ(checkpoint_status_fsm_step(S0, CheckpointStatus::Complete), S2);
}

TEST(CheckpointStatusFsm, ExhaustiveTableEquivalence) {
    for (auto s : kStates) {
        for (auto st : {CheckpointStatus::Null, CheckpointStatus::Confirmed, CheckpointStatus::Previous,
                        CheckpointStatus::Complete}) {
            EXPECT_EQ(checkpoint_status_fsm_step(s, st), status_table(s, st));
        }
    }
}

TEST(PerformanceFsm, Examples) {
    EXPECT_EQ(performance_fsm_step(S0, PerformanceClass::Performing), S0);
    EXPECT_EQ(performance_fsm_step(S0, PerformanceClass::NotPerforming), S2);
    EXPECT_EQ(performance_fsm_step(S0, PerformanceClass::Wary), S2);
    EXPECT_EQ(performance_fsm_step(S2, PerformanceClass::Performing), S2);
}

TEST(PerformanceFsm, ByzantineRowIsNullified) {
    try {
        performance_fsm_step(S1, PerformanceClass::Performing);
        FAIL();
    } catch (const Error& e) {
        EXPECT_STREQ(e.what(), "state nullified under performance FSM");
    }
}

TEST(FailStop, AbsorbsRandomSequences) {
    Rng rng(7);
    for (int seq = 0; seq < 1000; ++seq) {
        NodeState s = S2;
        for (int step = 0; step < 20; ++step) {
            switch (rng.uniform_int(0, 2)) {
                case 0:
                    s = byzantine_fsm_step(s, kDelays[rng.uniform_int(0, 3)], kChecksums[rng.uniform_int(0, 1)]);
                    break;
                case 1:
                    s = checkpoint_status_fsm_step(s, static_cast<CheckpointStatus>(rng.uniform_int(0, 3)));
                    break;
                default:
                    s = performance_fsm_step(s, static_cast<PerformanceClass>(rng.uniform_int(0, 2)));
            }
            ASSERT_EQ(s, S2);
        }
    }
}

TEST(NextInterval, HealthyGapGrowsByBase) {
    VirtualNode vn;
    vn.gap = 10;
    const auto d = next_interval(vn, S0, cfg_with());
    EXPECT_EQ(d.next_gap, 20);
    EXPECT_EQ(d.suspicion, 0);
    EXPECT_EQ(d.action, FsmAction::None);
}

TEST(NextInterval, GeometricDoubles) {
    VirtualNode vn;
    vn.gap = 30;
    EXPECT_EQ(next_interval(vn, S0, cfg_with(IntervalGrowth::Geometric)).next_gap, 60);
}

TEST(NextInterval, SuspicionResetsGapAndCounts) {
    VirtualNode vn;
    vn.gap = 30;
    vn.suspicion = 1;
    const auto d = next_interval(vn, S1, cfg_with());
    EXPECT_EQ(d.next_gap, 10);
    EXPECT_EQ(d.suspicion, 2);
    EXPECT_EQ(d.action, FsmAction::Escalate);
}

TEST(NextInterval, ThirdSuspicionReplaces) {
    VirtualNode vn;
    vn.gap = 10;
    vn.suspicion = 2;
    const auto d = next_interval(vn, S1, cfg_with());
    EXPECT_EQ(d.suspicion, 3);
    EXPECT_EQ(d.action, FsmAction::ReplaceNode);
}

TEST(NextInterval, FailStopReplaces) {
    VirtualNode vn;
    vn.gap = 50;
    const auto d = next_interval(vn, S2, cfg_with());
    EXPECT_EQ(d.action, FsmAction::ReplaceNode);
    EXPECT_EQ(d.next_gap, 10);
}

TEST(NextInterval, GapStaysAMultipleOfBase) {
    Rng rng(3);
    for (auto growth : {IntervalGrowth::Triangular, IntervalGrowth::Geometric}) {
        const SimConfig cfg = cfg_with(growth);
        VirtualNode vn;
        vn.gap = cfg.base_interval;
        for (int i = 0; i < 40; ++i) {
            const NodeState post = rng.bernoulli(0.7) ? S0 : S1;
            const auto d = next_interval(vn, post, cfg);
            ASSERT_GT(d.next_gap, 0);
            ASSERT_EQ(d.next_gap % cfg.base_interval, 0);
            if (post == S1) {
                ASSERT_EQ(d.suspicion, vn.suspicion + 1);
            } else {
                ASSERT_EQ(d.suspicion, 0);
            }
            ASSERT_EQ(d.action == FsmAction::ReplaceNode, d.suspicion >= cfg.suspicion_threshold);
            vn.gap = d.next_gap;
            vn.suspicion = d.action == FsmAction::ReplaceNode ? 0 : d.suspicion;
        }
    }
}

TEST(HealthySchedule, MonitorTimes) {
    EXPECT_EQ(healthy_monitor_times(10, IntervalGrowth::Triangular, 150), (std::vector<Tick>{10, 30, 60, 100, 150}));
}

TEST(HealthySchedule, TriangularNumbers) {
    const auto times = healthy_monitor_times(10, IntervalGrowth::Triangular, 10 * 20 * 21 / 2);
    ASSERT_EQ(times.size(), 20u);
    for (Tick k = 1; k <= 20; ++k) EXPECT_EQ(times[static_cast<std::size_t>(k - 1)], 10 * k * (k + 1) / 2);
}

TEST(Observe, MissedDetectionForcesHighDelay) {
    SimConfig cfg;
    cfg.p_detect = 0.5;
    Rng rng(11);
    int misses = 0;
    for (int i = 0; i < 2000; ++i) {
        const auto obs = observe(1, 0, {3.0, true, false, 100.0}, cfg, rng);
        if (obs.checksum == ChecksumResult::NoError) {
            ++misses;
            ASSERT_GE(obs.delay_class, DelayClass::High);
            ASSERT_TRUE(obs.fallback_applied);
        }
    }
    EXPECT_GT(misses, 0);
}

TEST(Observe, CrashReportsError) {
    SimConfig cfg;
    Rng rng(1);
    EXPECT_EQ(observe(1, 0, {0.0, false, true, 100.0}, cfg, rng).checksum, ChecksumResult::Error);
}

TEST(FsmTrace, Conformant) {
    const auto v = check_fsm_trace(parse_fsm_trace("S0 high noerror -> S1\n"));
    EXPECT_TRUE(v.conformant);
    EXPECT_EQ(v.steps, 1);
    EXPECT_EQ(v.message, "conformant");
}

TEST(FsmTrace, Divergence) {
    const auto v = check_fsm_trace(parse_fsm_trace("S0 high noerror -> S2\n"));
    EXPECT_FALSE(v.conformant);
    EXPECT_EQ(v.divergence_line, 1);
    EXPECT_EQ(v.message.rfind("divergence at line 1", 0), 0u);
}

TEST(FsmTrace, EmptyIsConformantWithWarning) {
    const auto v = check_fsm_trace(parse_fsm_trace(""));
    EXPECT_TRUE(v.conformant);
    EXPECT_NE(v.message.find("0 steps"), std::string::npos);
}

TEST(FsmTrace, MixedMachinesAndComments) {
    const auto steps = parse_fsm_trace("# comment\nS1 confirmed -> S0\n\nS0 wary -> S2\nS1 low noerror -> S0\n");
    ASSERT_EQ(steps.size(), 3u);
    EXPECT_EQ(steps[0].machine, FsmTraceStep::Machine::CheckpointStatus);
    EXPECT_EQ(steps[1].machine, FsmTraceStep::Machine::Performance);
    EXPECT_EQ(steps[2].line, 5);
    EXPECT_TRUE(check_fsm_trace(steps).conformant);
}

TEST(FsmTrace, NullifiedRowDiverges) {
    const auto v = check_fsm_trace(parse_fsm_trace("S1 performing -> S1\n"));
    EXPECT_FALSE(v.conformant);
    EXPECT_NE(v.message.find("nullified"), std::string::npos);
}

TEST(FsmTrace, MalformedLineNamesLine) {
    try {
        parse_fsm_trace("S0 high noerror -> S1\nS0 purple -> S1\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(std::string(e.what()).rfind("line 2", 0), 0u);
    }
    EXPECT_THROW(parse_fsm_trace("S0 high noerror S1\n"), Error);
}

TEST(FsmTrace, FormatRoundTrips) {
    for (auto s : {S0, S1}) {
        for (auto d : kDelays) {
            for (auto c : kChecksums) {
                FsmTraceStep step;
                step.from = s;
                step.delay = d;
                step.checksum = c;
                step.expected = byzantine_table(s, d, c);
                const auto parsed = parse_fsm_trace(format_fsm_step(step));
                ASSERT_EQ(parsed.size(), 1u);
                EXPECT_EQ(parsed[0].expected, step.expected);
                EXPECT_TRUE(check_fsm_trace(parsed).conformant);
            }
        }
    }
}
