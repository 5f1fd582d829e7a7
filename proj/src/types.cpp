#include "bftsim/types.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <utility>

#include <fmt/format.h>

namespace bftsim {

namespace {

// Lowercase and drop separators so "Fail-Safe", "fail_safe" and "failsafe" compare equal.
std::string normalize(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char ch : text) {
        auto c = static_cast<unsigned char>(ch);
        if (std::isalnum(c)) out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

template <typename E, std::size_t N>
E lookup(std::string_view text, const std::array<std::pair<std::string_view, E>, N>& table,
         std::string_view what) {
    const std::string key = normalize(text);
    for (const auto& [name, value] : table) {
        if (key == name) return value;
    }
    throw Error(fmt::format("unknown {} '{}'", what, text));
}

}  // namespace

std::string_view to_string(NodeState s) {
    switch (s) {
        case NodeState::FailSafe: return "S0";
        case NodeState::Byzantine: return "S1";
        case NodeState::FailStop: return "S2";
    }
    return "?";
}

std::string_view to_string(DelayClass d) {
    switch (d) {
        case DelayClass::Low: return "low";
        case DelayClass::Normal: return "normal";
        case DelayClass::High: return "high";
        case DelayClass::Extreme: return "extreme";
    }
    return "?";
}

std::string_view to_string(ChecksumResult c) {
    return c == ChecksumResult::NoError ? "noerror" : "error";
}

std::string_view to_string(CheckpointStatus s) {
    switch (s) {
        case CheckpointStatus::Null: return "null";
        case CheckpointStatus::Confirmed: return "confirmed";
        case CheckpointStatus::Previous: return "previous";
        case CheckpointStatus::Complete: return "complete";
    }
    return "?";
}

std::string_view to_string(PerformanceClass p) {
    switch (p) {
        case PerformanceClass::NotPerforming: return "notperforming";
        case PerformanceClass::Performing: return "performing";
        case PerformanceClass::Wary: return "wary";
    }
    return "?";
}

std::string_view to_string(FailureKind k) {
    return k == FailureKind::Erroneous ? "W" : "Y";
}

std::string_view to_string(SchedulerPolicy p) {
    switch (p) {
        case SchedulerPolicy::Wsss: return "wsss";
        case SchedulerPolicy::Mesf: return "mesf";
        case SchedulerPolicy::Random: return "random";
    }
    return "?";
}

std::string_view to_string(CheckpointPolicy p) {
    switch (p) {
        case CheckpointPolicy::Tcc: return "tcc";
        case CheckpointPolicy::Synchronous: return "sync";
        case CheckpointPolicy::Independent: return "independent";
    }
    return "?";
}

std::string_view to_string(IntervalGrowth g) {
    return g == IntervalGrowth::Triangular ? "triangular" : "geometric";
}

NodeState parse_node_state(std::string_view text) {
    static constexpr std::array<std::pair<std::string_view, NodeState>, 6> table{{
        {"s0", NodeState::FailSafe},
        {"failsafe", NodeState::FailSafe},
        {"s1", NodeState::Byzantine},
        {"byzantine", NodeState::Byzantine},
        {"s2", NodeState::FailStop},
        {"failstop", NodeState::FailStop},
    }};
    return lookup(text, table, "node state");
}

DelayClass parse_delay_class(std::string_view text) {
    static constexpr std::array<std::pair<std::string_view, DelayClass>, 5> table{{
        {"low", DelayClass::Low},
        {"normal", DelayClass::Normal},
        {"medium", DelayClass::Normal},
        {"high", DelayClass::High},
        {"extreme", DelayClass::Extreme},
    }};
    return lookup(text, table, "delay class");
}

ChecksumResult parse_checksum(std::string_view text) {
    static constexpr std::array<std::pair<std::string_view, ChecksumResult>, 2> table{{
        {"noerror", ChecksumResult::NoError},
        {"error", ChecksumResult::Error},
    }};
    return lookup(text, table, "checksum result");
}

CheckpointStatus parse_checkpoint_status(std::string_view text) {
    static constexpr std::array<std::pair<std::string_view, CheckpointStatus>, 4> table{{
        {"null", CheckpointStatus::Null},
        {"confirmed", CheckpointStatus::Confirmed},
        {"previous", CheckpointStatus::Previous},
        {"complete", CheckpointStatus::Complete},
    }};
    return lookup(text, table, "checkpoint status");
}

PerformanceClass parse_performance(std::string_view text) {
    static constexpr std::array<std::pair<std::string_view, PerformanceClass>, 3> table{{
        {"notperforming", PerformanceClass::NotPerforming},
        {"performing", PerformanceClass::Performing},
        {"wary", PerformanceClass::Wary},
    }};
    return lookup(text, table, "performance class");
}

FailureKind parse_failure_kind(std::string_view text) {
    static constexpr std::array<std::pair<std::string_view, FailureKind>, 4> table{{
        {"w", FailureKind::Erroneous},
        {"erroneous", FailureKind::Erroneous},
        {"y", FailureKind::DelaySensitive},
        {"delaysensitive", FailureKind::DelaySensitive},
    }};
    return lookup(text, table, "failure kind");
}

SchedulerPolicy parse_scheduler(std::string_view text) {
    static constexpr std::array<std::pair<std::string_view, SchedulerPolicy>, 3> table{{
        {"wsss", SchedulerPolicy::Wsss},
        {"mesf", SchedulerPolicy::Mesf},
        {"random", SchedulerPolicy::Random},
    }};
    return lookup(text, table, "scheduler policy");
}

CheckpointPolicy parse_checkpoint_policy(std::string_view text) {
    static constexpr std::array<std::pair<std::string_view, CheckpointPolicy>, 4> table{{
        {"tcc", CheckpointPolicy::Tcc},
        {"sync", CheckpointPolicy::Synchronous},
        {"synchronous", CheckpointPolicy::Synchronous},
        {"independent", CheckpointPolicy::Independent},
    }};
    return lookup(text, table, "checkpoint policy");
}

IntervalGrowth parse_interval_growth(std::string_view text) {
    static constexpr std::array<std::pair<std::string_view, IntervalGrowth>, 2> table{{
        {"triangular", IntervalGrowth::Triangular},
        {"geometric", IntervalGrowth::Geometric},
    }};
    return lookup(text, table, "interval growth policy");
}

std::string server_label(ServerId id) { return fmt::format("s{}", id); }
std::string vn_label(VnId id) { return fmt::format("v{}", id); }
std::string task_label(TaskId id) { return fmt::format("t{}", id); }
std::string job_label(JobId id) { return fmt::format("j{}", id); }

std::int32_t parse_label(std::string_view text, char prefix) {
    std::string_view digits = text;
    if (!digits.empty() && std::tolower(static_cast<unsigned char>(digits.front())) == prefix) {
        digits.remove_prefix(1);
    }
    std::int32_t value = 0;
    const auto* end = digits.data() + digits.size();
    auto [ptr, ec] = std::from_chars(digits.data(), end, value);
    if (digits.empty() || ec != std::errc{} || ptr != end || value < 0) {
        throw Error(fmt::format("malformed id '{}' (expected {}<n>)", text, prefix));
    }
    return value;
}

}  // namespace bftsim
