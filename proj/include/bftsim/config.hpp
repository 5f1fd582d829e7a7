#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bftsim/types.hpp"

namespace bftsim {

enum class FaultKind { Byzantine, Crash, DelaySpike };

std::string_view to_string(FaultKind k);
FaultKind parse_fault_kind(std::string_view text);

/// Who a fault lands on. `Random` is resolved at injection time to a
/// uniformly chosen running VN; `Task` targets whichever VN runs that task.
struct FaultTarget {
    enum class Kind { Random, Vn, Task };
    Kind kind = Kind::Random;
    std::int32_t id = -1;

    bool operator==(const FaultTarget&) const = default;
};

struct FaultSpec {
    FaultKind kind = FaultKind::Byzantine;
    FaultTarget target;
    Tick time = 0;
    /// DelaySpike only: inflation as a fraction of the SLA bound.
    double magnitude = 1.5;
    /// DelaySpike only: ticks the spike lasts; 0 keeps it until the VN is replaced.
    Tick duration = 0;

    bool operator==(const FaultSpec&) const = default;
};

/// `fault = <kind> <target> <time> [magnitude] [duration]`, e.g. `byzantine random 40`.
FaultSpec parse_fault_spec(std::string_view text);
std::string format_fault_spec(const FaultSpec& spec);

struct SimConfig {
    // Monitoring and interval optimization.
    Tick base_interval = 10;
    Tick initial_ft_interval = 10;
    IntervalGrowth interval_growth = IntervalGrowth::Triangular;
    int suspicion_threshold = 3;
    int migration_threshold = 5;
    Tick monitor_cost = 0;

    // Delay classification, as fractions of the SLA bound.
    double sla_bound = 100.0;
    double delay_threshold_low = 0.25;
    double delay_threshold_normal = 1.0;
    double delay_threshold_high = 2.0;

    // Detection and propagation.
    double p_detect = 0.88;
    double p_prop = 0.05;
    bool high_delay_fallback = true;

    // Checkpoint cost model.
    Tick checkpoint_write_cost = 1;
    double checkpoint_size = 1.0;
    Tick restart_cost = 5;
    double independent_mean_gap = 20.0;

    // Policies.
    SchedulerPolicy scheduler = SchedulerPolicy::Wsss;
    CheckpointPolicy checkpoint_policy = CheckpointPolicy::Tcc;

    // Modeled algorithm execution costs (seconds, reported only).
    double mesf_eval_cost = 0.03;
    double wsss_lookup_cost = 0.001;
    double host_scan_cost = 0.0005;

    // Cluster.
    int server_count = 20;
    int server_capacity = 8;
    int vn_count = 100;
    double latency_mean_min = 2.0;
    double latency_mean_max = 20.0;
    double latency_sigma_min = 1.0;
    double latency_sigma_max = 10.0;

    // Workload.
    int task_count = 200;
    int job_count = 20;
    Tick demand_min = 50;
    Tick demand_max = 150;
    Tick job_interarrival = 0;
    std::string trace_path;
    Tick trace_period = 300;

    // Fault plan.
    int random_byzantine = 0;
    int random_crash = 0;
    int random_delay_spike = 0;
    double spike_magnitude = 1.5;
    Tick fault_window_start = 0;
    Tick fault_window_end = 0;  // 0 means the horizon
    std::vector<FaultSpec> faults;

    std::uint64_t seed = 42;
    Tick horizon = 2000;

    bool operator==(const SimConfig&) const = default;
};

/// Ordered key/value pairs as read from a scenario file. Keys may repeat
/// (`fault`); for every other key the last occurrence wins.
using RawConfig = std::vector<std::pair<std::string, std::string>>;

/// Parses `key = value` lines; `#` starts a comment. Throws ConfigError with
/// the line number on a line that has no `=`.
RawConfig parse_config_text(std::string_view text);

/// Reads and parses a scenario file. Throws ConfigError naming the path if it
/// cannot be read.
RawConfig load_config_file(const std::string& path);

/// Fills defaults, applies the raw values and checks every invariant.
/// Rejections are ConfigErrors whose message starts with the offending key.
SimConfig validate_config(const RawConfig& raw);

/// Re-checks an already-built config.
SimConfig validate_config(const SimConfig& cfg);

/// Canonical key/value form of a config; validate_config(to_raw(c)) == c.
RawConfig to_raw(const SimConfig& cfg);

/// Identifies the workload/cluster/fault family of a config: a hash of its
/// canonical form with the scheduler and checkpoint policy tags removed.
std::string scenario_id(const SimConfig& cfg);

}  // namespace bftsim
