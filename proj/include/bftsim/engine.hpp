#pragma once

#include <cstdint>
#include <queue>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bftsim/checkpoint.hpp"
#include "bftsim/config.hpp"
#include "bftsim/metrics.hpp"
#include "bftsim/model.hpp"
#include "bftsim/rng.hpp"
#include "bftsim/types.hpp"
#include "bftsim/workload.hpp"

namespace bftsim {

enum class EventKind {
    JobRelease,
    MonitorRound,
    TaskComplete,
    FaultInjection,
    ContaminationExchange,
    CheckpointRound,        // synchronous baseline: every running VN at once
    IndependentCheckpoint,  // independent baseline: one VN
    MigrationComplete,
    HorizonEnd,
};

std::string_view to_string(EventKind k);

struct SimEvent {
    Tick time = 0;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::HorizonEnd;
    std::int32_t target = -1;   // VN, job or fault index, by kind
    std::uint64_t version = 0;  // lets the engine drop events made stale by a reschedule
};

/// Min-queue on (time, seq). Sequence numbers are handed out in insertion order.
class EventQueue {
public:
    /// Returns the new event's sequence number. Throws Error("causality
    /// violation ...") for a time earlier than the clock.
    std::uint64_t push(Tick time, EventKind kind, std::int32_t target = -1, std::uint64_t version = 0);

    /// Pops the earliest event and moves the clock to it. An empty queue
    /// yields a HorizonEnd event at the current clock.
    SimEvent advance();

    const SimEvent* peek() const { return heap_.empty() ? nullptr : &heap_.top(); }
    bool empty() const { return heap_.empty(); }
    std::size_t size() const { return heap_.size(); }
    Tick clock() const { return clock_; }
    std::uint64_t next_seq() const { return next_seq_; }

private:
    struct Later {
        bool operator()(const SimEvent& a, const SimEvent& b) const {
            return a.time != b.time ? a.time > b.time : a.seq > b.seq;
        }
    };

    std::priority_queue<SimEvent, std::vector<SimEvent>, Later> heap_;
    Tick clock_ = 0;
    std::uint64_t next_seq_ = 1;
};

/// One exchange among the VNs of a job. If none of them is contaminated
/// nothing happens; otherwise every clean VN is contaminated with
/// probability p_prop, one draw per clean VN in the given order.
/// Returns the ids of the newly contaminated VNs.
std::vector<VnId> propagate_contamination(std::span<VirtualNode* const> job_vns, double p_prop, Rng& rng);

/// Servers with capacities and latency profiles drawn from the seed's Servers stream.
std::vector<Server> build_servers(const SimConfig& cfg);

/// The scenario's workload from the seed's Workload stream, scaled by the
/// utilization trace when one is configured.
Application build_workload(const SimConfig& cfg);

struct RunOptions {
    bool event_log = true;
};

/// Lifetime of one VN; end >= start.
struct VnSpan {
    VnId id = 0;
    TaskId task = 0;
    ServerId host = 0;
    Tick start = 0;
    Tick end = 0;
};

struct ScenarioResult {
    MetricsReport report;
    CheckpointLedger checkpoints;
    std::vector<std::string> event_log;  // without the header line
    std::vector<Server> servers;         // final WSSS counters
    std::vector<VnSpan> vns;

    std::string event_log_text() const;
};

/// Runs one scenario until the horizon or until every job completes.
/// Throws ConfigError for an invalid config (CapacityError when the VNs do
/// not fit on the servers).
ScenarioResult run_scenario(const SimConfig& cfg, const RunOptions& options = {});
ScenarioResult run_scenario(const SimConfig& cfg, const Application& workload, const RunOptions& options = {});
ScenarioResult run_scenario(const SimConfig& cfg, const Application& workload, SchedulerPolicy scheduler,
                            CheckpointPolicy checkpoint, const RunOptions& options = {});

}  // namespace bftsim
