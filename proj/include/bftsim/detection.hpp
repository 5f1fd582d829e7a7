#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bftsim/config.hpp"
#include "bftsim/model.hpp"
#include "bftsim/rng.hpp"
#include "bftsim/types.hpp"

namespace bftsim {

/// Class boundaries as fractions of the SLA bound D.
struct DelayThresholds {
    double low = 0.25;
    double normal = 1.0;
    double high = 2.0;

    static DelayThresholds from(const SimConfig& cfg) {
        return {cfg.delay_threshold_low, cfg.delay_threshold_normal, cfg.delay_threshold_high};
    }
};

/// delay <= low*D is Low, <= normal*D Normal, <= high*D High, otherwise Extreme.
DelayClass classify_delay(double delay, double sla_bound, const DelayThresholds& thresholds = {});

/// Stand-in for the hash challenge. A clean VN always answers correctly; a
/// contaminated one is caught with probability p_detect. Draws from `rng`
/// only for contaminated VNs.
ChecksumResult checksum_oracle(bool contaminated, double p_detect, Rng& rng);

/// Delay/checksum machine. Inputs are present when the delay is High or
/// Extreme or the checksum fails; the absent input (Low/Normal, NoError)
/// returns S0 and S1 to S0. FailStop is absorbing.
NodeState byzantine_fsm_step(NodeState state, DelayClass delay, ChecksumResult checksum);

/// Checkpointing-status machine: Null/Confirmed -> S0, Previous -> S1, Complete -> S2.
NodeState checkpoint_status_fsm_step(NodeState state, CheckpointStatus status);

/// Performance machine. Only defined from S0 (Performing -> S0, otherwise S2);
/// throws Error for S1, whose row is nullified. FailStop is absorbing.
NodeState performance_fsm_step(NodeState state, PerformanceClass performance);

enum class FsmAction { None, ReplaceNode, Escalate };

std::string_view to_string(FsmAction a);

struct FsmDecision {
    NodeState next_state = NodeState::FailSafe;
    Tick next_gap = 0;
    int suspicion = 0;
    FsmAction action = FsmAction::None;

    bool operator==(const FsmDecision&) const = default;
};

/// Interval update after an observation moved `vn` to `post_state`.
///  - S0: the gap grows (by one base interval, or doubles under the geometric
///    policy) and the suspicion counter clears.
///  - S1: the gap drops to the base interval and the counter increments;
///    reaching the suspicion threshold asks for a replacement.
///  - S2: replacement, with the replacement monitored at the base interval.
FsmDecision next_interval(const VirtualNode& vn, NodeState post_state, const SimConfig& cfg);

/// Monitor times of a VN that stays in S0 from time 0, up to and including horizon.
std::vector<Tick> healthy_monitor_times(Tick base_interval, IntervalGrowth growth, Tick horizon);

struct MonitorObservation {
    VnId vn = 0;
    Tick time = 0;
    double delay = 0.0;  // measured delay variation
    DelayClass delay_class = DelayClass::Low;
    ChecksumResult checksum = ChecksumResult::NoError;
    bool fallback_applied = false;  // a missed detection surfaced as high delay
};

struct ObservationInput {
    double raw_delay = 0.0;
    bool contaminated = false;
    bool crashed = false;  // a crashed VN never answers: reported as Error
    double sla_bound = 100.0;
};

/// One monitor round's measurements: checksum challenge first, then the
/// delay class, with a missed detection forcing the delay above the Normal
/// band when cfg.high_delay_fallback is set.
MonitorObservation observe(VnId vn, Tick time, const ObservationInput& input, const SimConfig& cfg,
                           Rng& oracle_rng);

// fsm-trace: one step per line, `state inputs... -> next_state`.
//   S0 high noerror -> S1        delay/checksum machine
//   S1 confirmed -> S0           checkpointing-status machine
//   S0 wary -> S2                performance machine
// Blank lines and `#` comments are ignored.

struct FsmTraceStep {
    enum class Machine { Byzantine, CheckpointStatus, Performance };
    Machine machine = Machine::Byzantine;
    NodeState from = NodeState::FailSafe;
    DelayClass delay = DelayClass::Low;
    ChecksumResult checksum = ChecksumResult::NoError;
    CheckpointStatus status = CheckpointStatus::Null;
    PerformanceClass performance = PerformanceClass::Performing;
    NodeState expected = NodeState::FailSafe;
    int line = 0;
};

/// Throws Error("line N: ...") on a malformed line.
std::vector<FsmTraceStep> parse_fsm_trace(std::string_view text);

std::string format_fsm_step(const FsmTraceStep& step);

struct FsmTraceVerdict {
    bool conformant = true;
    int steps = 0;
    int divergence_line = 0;  // 0 when conformant
    std::string message;
};

FsmTraceVerdict check_fsm_trace(const std::vector<FsmTraceStep>& steps);

}  // namespace bftsim
