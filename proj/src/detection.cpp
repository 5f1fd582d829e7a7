#include "bftsim/detection.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace bftsim {

DelayClass classify_delay(double delay, double sla_bound, const DelayThresholds& t) {
    if (!(sla_bound > 0.0)) throw Error("classify_delay: SLA bound must be positive");
    if (!(t.low < t.normal && t.normal < t.high)) {
        throw Error("classify_delay: thresholds must be strictly increasing");
    }
    if (delay <= t.low * sla_bound) return DelayClass::Low;
    if (delay <= t.normal * sla_bound) return DelayClass::Normal;
    if (delay <= t.high * sla_bound) return DelayClass::High;
    return DelayClass::Extreme;
}

ChecksumResult checksum_oracle(bool contaminated, double p_detect, Rng& rng) {
    if (!contaminated) return ChecksumResult::NoError;
    return rng.bernoulli(p_detect) ? ChecksumResult::Error : ChecksumResult::NoError;
}

NodeState byzantine_fsm_step(NodeState state, DelayClass delay, ChecksumResult checksum) {
    if (state == NodeState::FailStop) return NodeState::FailStop;
    if (checksum == ChecksumResult::Error) return NodeState::FailStop;
    if (delay == DelayClass::Extreme) return NodeState::FailStop;
    if (delay == DelayClass::High) return NodeState::Byzantine;
    return NodeState::FailSafe;
}

NodeState checkpoint_status_fsm_step(NodeState state, CheckpointStatus status) {
    if (state == NodeState::FailStop) return NodeState::FailStop;
    switch (status) {
        case CheckpointStatus::Null:
        case CheckpointStatus::Confirmed: return NodeState::FailSafe;
        case CheckpointStatus::Previous: return NodeState::Byzantine;
        case CheckpointStatus::Complete: return NodeState::FailStop;
    }
    return NodeState::FailStop;
}

NodeState performance_fsm_step(NodeState state, PerformanceClass performance) {
    if (state == NodeState::FailStop) return NodeState::FailStop;
    if (state == NodeState::Byzantine) throw Error("state nullified under performance FSM");
    return performance == PerformanceClass::Performing ? NodeState::FailSafe : NodeState::FailStop;
}

std::string_view to_string(FsmAction a) {
    switch (a) {
        case FsmAction::None: return "none";
        case FsmAction::ReplaceNode: return "replace";
        case FsmAction::Escalate: return "escalate";
    }
    return "?";
}

FsmDecision next_interval(const VirtualNode& vn, NodeState post_state, const SimConfig& cfg) {
    const Tick base = cfg.base_interval;
    FsmDecision d;
    d.next_state = post_state;
    switch (post_state) {
        case NodeState::FailSafe:
            d.next_gap = cfg.interval_growth == IntervalGrowth::Triangular ? vn.gap + base : 2 * vn.gap;
            d.suspicion = 0;
            d.action = FsmAction::None;
            break;
        case NodeState::Byzantine:
            d.next_gap = base;
            d.suspicion = vn.suspicion + 1;
            d.action = d.suspicion >= cfg.suspicion_threshold ? FsmAction::ReplaceNode
                                                               : FsmAction::Escalate;
            break;
        case NodeState::FailStop:
            d.next_gap = base;
            d.suspicion = 0;
            d.action = FsmAction::ReplaceNode;
            break;
    }
    return d;
}

std::vector<Tick> healthy_monitor_times(Tick base_interval, IntervalGrowth growth, Tick horizon) {
    SimConfig cfg;
    cfg.base_interval = base_interval;
    cfg.interval_growth = growth;
    VirtualNode vn;
    vn.gap = base_interval;
    std::vector<Tick> times;
    Tick t = base_interval;
    while (t <= horizon) {
        times.push_back(t);
        vn.gap = next_interval(vn, NodeState::FailSafe, cfg).next_gap;
        t += vn.gap;
    }
    return times;
}

MonitorObservation observe(VnId vn, Tick time, const ObservationInput& input, const SimConfig& cfg,
                           Rng& oracle_rng) {
    MonitorObservation obs;
    obs.vn = vn;
    obs.time = time;
    obs.delay = std::max(0.0, input.raw_delay);
    if (input.crashed) {
        obs.checksum = ChecksumResult::Error;
    } else {
        obs.checksum = checksum_oracle(input.contaminated, cfg.p_detect, oracle_rng);
        if (input.contaminated && obs.checksum == ChecksumResult::NoError && cfg.high_delay_fallback) {
            const double floor = std::nextafter(cfg.delay_threshold_normal * input.sla_bound,
                                                std::numeric_limits<double>::infinity());
            if (obs.delay < floor) obs.delay = floor;
            obs.fallback_applied = true;
        }
    }
    obs.delay_class = classify_delay(obs.delay, input.sla_bound, DelayThresholds::from(cfg));
    return obs;
}

namespace {

std::vector<std::string_view> tokens(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        std::size_t j = i;
        while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

NodeState apply_step(const FsmTraceStep& step) {
    switch (step.machine) {
        case FsmTraceStep::Machine::Byzantine:
            return byzantine_fsm_step(step.from, step.delay, step.checksum);
        case FsmTraceStep::Machine::CheckpointStatus:
            return checkpoint_status_fsm_step(step.from, step.status);
        case FsmTraceStep::Machine::Performance:
            return performance_fsm_step(step.from, step.performance);
    }
    return step.from;
}

}  // namespace

std::vector<FsmTraceStep> parse_fsm_trace(std::string_view text) {
    std::vector<FsmTraceStep> steps;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        auto parts = tokens(line);
        if (parts.empty()) continue;

        auto fail = [&](std::string_view why) {
            throw Error(fmt::format("line {}: {}", line_no, why));
        };
        std::size_t arrow = parts.size();
        for (std::size_t i = 0; i < parts.size(); ++i) {
            if (parts[i] == "->") arrow = i;
        }
        if (arrow == parts.size() || arrow + 2 != parts.size()) fail("expected '<state> <inputs> -> <state>'");
        if (arrow != 2 && arrow != 3) fail("expected one or two inputs");

        FsmTraceStep step;
        step.line = line_no;
        try {
            step.from = parse_node_state(parts[0]);
            step.expected = parse_node_state(parts[arrow + 1]);
            if (arrow == 3) {
                step.machine = FsmTraceStep::Machine::Byzantine;
                step.delay = parse_delay_class(parts[1]);
                step.checksum = parse_checksum(parts[2]);
            } else {
                try {
                    step.status = parse_checkpoint_status(parts[1]);
                    step.machine = FsmTraceStep::Machine::CheckpointStatus;
                } catch (const Error&) {
                    step.performance = parse_performance(parts[1]);
                    step.machine = FsmTraceStep::Machine::Performance;
                }
            }
        } catch (const Error& e) {
            fail(e.what());
        }
        steps.push_back(step);
    }
    return steps;
}

std::string format_fsm_step(const FsmTraceStep& step) {
    switch (step.machine) {
        case FsmTraceStep::Machine::Byzantine:
            return fmt::format("{} {} {} -> {}", to_string(step.from), to_string(step.delay),
                               to_string(step.checksum), to_string(step.expected));
        case FsmTraceStep::Machine::CheckpointStatus:
            return fmt::format("{} {} -> {}", to_string(step.from), to_string(step.status),
                               to_string(step.expected));
        case FsmTraceStep::Machine::Performance:
            return fmt::format("{} {} -> {}", to_string(step.from), to_string(step.performance),
                               to_string(step.expected));
    }
    return {};
}

FsmTraceVerdict check_fsm_trace(const std::vector<FsmTraceStep>& steps) {
    FsmTraceVerdict verdict;
    for (const auto& step : steps) {
        ++verdict.steps;
        std::string actual;
        bool ok = false;
        try {
            const NodeState next = apply_step(step);
            ok = next == step.expected;
            actual = std::string(to_string(next));
        } catch (const Error& e) {
            actual = e.what();
        }
        if (!ok) {
            verdict.conformant = false;
            verdict.divergence_line = step.line;
            verdict.message = fmt::format("divergence at line {}: '{}' but machine gives {}", step.line,
                                          format_fsm_step(step), actual);
            return verdict;
        }
    }
    verdict.message = verdict.steps == 0 ? "conformant (warning: 0 steps)" : "conformant";
    return verdict;
}

}  // namespace bftsim
