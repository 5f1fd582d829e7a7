#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bftsim {

/// Simulation time. Every interval, cost and timestamp is a whole number of ticks.
using Tick = std::int64_t;

using ServerId = std::int32_t;
using VnId = std::int32_t;
using TaskId = std::int32_t;
using JobId = std::int32_t;
using CheckpointId = std::int32_t;

/// Base class for every error the library reports.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad configuration or scenario input. The CLI maps it to exit code 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

// S0, S1, S2.
enum class NodeState { FailSafe, Byzantine, FailStop };

enum class DelayClass { Low, Normal, High, Extreme };

enum class ChecksumResult { NoError, Error };

enum class CheckpointStatus { Null, Confirmed, Previous, Complete };

enum class PerformanceClass { NotPerforming, Performing, Wary };

/// W: erroneous workload. Y: workload that missed its SLA delay bound.
enum class FailureKind { Erroneous, DelaySensitive };

enum class SchedulerPolicy { Wsss, Mesf, Random };

enum class CheckpointPolicy { Tcc, Synchronous, Independent };

enum class IntervalGrowth { Triangular, Geometric };

std::string_view to_string(NodeState s);
std::string_view to_string(DelayClass d);
std::string_view to_string(ChecksumResult c);
std::string_view to_string(CheckpointStatus s);
std::string_view to_string(PerformanceClass p);
std::string_view to_string(FailureKind k);
std::string_view to_string(SchedulerPolicy p);
std::string_view to_string(CheckpointPolicy p);
std::string_view to_string(IntervalGrowth g);

// Parsers are case-insensitive and accept the canonical spelling produced by
// to_string plus a few common aliases ("s1", "fail-safe", "noerror", ...).
NodeState parse_node_state(std::string_view text);
DelayClass parse_delay_class(std::string_view text);
ChecksumResult parse_checksum(std::string_view text);
CheckpointStatus parse_checkpoint_status(std::string_view text);
PerformanceClass parse_performance(std::string_view text);
FailureKind parse_failure_kind(std::string_view text);
SchedulerPolicy parse_scheduler(std::string_view text);
CheckpointPolicy parse_checkpoint_policy(std::string_view text);
IntervalGrowth parse_interval_growth(std::string_view text);

inline bool operator<(DelayClass a, DelayClass b) {
    return static_cast<int>(a) < static_cast<int>(b);
}
inline bool operator<=(DelayClass a, DelayClass b) { return !(b < a); }
inline bool operator>(DelayClass a, DelayClass b) { return b < a; }
inline bool operator>=(DelayClass a, DelayClass b) { return !(a < b); }

// Ids are printed with a one-letter prefix in logs and ledgers: s3, v12, t40, j2.
std::string server_label(ServerId id);
std::string vn_label(VnId id);
std::string task_label(TaskId id);
std::string job_label(JobId id);

/// Parses a prefixed id ("s3") or a bare integer ("3"). Throws Error on junk.
std::int32_t parse_label(std::string_view text, char prefix);

}  // namespace bftsim
