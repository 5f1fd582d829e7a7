#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "bftsim/rng.hpp"
#include "bftsim/types.hpp"

namespace bftsim {

/// One unit of VN execution. The model does not distinguish a task from a
/// workload.
struct Task {
    TaskId id = 0;
    JobId job = 0;
    Tick demand = 1;          // nominal service demand, ticks of VN work
    double sla_bound = 100.0; // delay bound D
    bool contaminated = false;
    bool completed = false;
};

struct Job {
    JobId id = 0;
    std::vector<TaskId> tasks;  // ascending task ids
    int restarts = 0;           // previous-checkpoint restarts since the last migration
    Tick release_time = 0;
};

struct Application {
    std::vector<Task> tasks;  // indexed by TaskId
    std::vector<Job> jobs;    // indexed by JobId
};

/// Partitions tasks 0..task_count-1 into job_count contiguous blocks whose
/// sizes differ by at most one; the larger blocks come first.
std::vector<Job> split_application(int task_count, int job_count);

struct DemandDistribution {
    Tick min = 100;
    Tick max = 100;  // min == max gives a constant demand
};

struct UtilizationSample {
    Tick time = 0;
    int percent = 0;

    bool operator==(const UtilizationSample&) const = default;
};

using UtilizationTrace = std::vector<UtilizationSample>;

/// One integer percentage (0..100) per line, sample k stamped at k * period.
/// Throws ConfigError naming the line on malformed input, and on an empty trace.
UtilizationTrace parse_utilization_trace(std::string_view text, Tick period);
UtilizationTrace load_utilization_trace(const std::string& path, Tick period);

/// Utilization in effect at time t (the latest sample at or before t).
int utilization_at(const UtilizationTrace& trace, Tick t);

struct WorkloadSpec {
    int task_count = 1;
    int job_count = 1;
    DemandDistribution demand;
    double sla_bound = 100.0;
    Tick job_interarrival = 0;
    /// When non-empty, each task's drawn demand is scaled by the utilization
    /// (percent / 100) in effect at its job's release time, floored at one tick.
    UtilizationTrace trace;
};

/// Draws task demands from `rng` and splits the tasks into jobs.
Application generate_workload(const WorkloadSpec& spec, Rng& rng);

}  // namespace bftsim
