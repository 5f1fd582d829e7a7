#pragma once

#include <optional>
#include <vector>

#include "bftsim/types.hpp"

namespace bftsim {

/// One virtual node. A VN runs a single task for its whole lifetime; a
/// replacement is a new VN with a new id.
struct VirtualNode {
    VnId id = 0;
    ServerId host = 0;
    NodeState state = NodeState::FailSafe;
    Tick gap = 0;            // current monitoring gap, a positive multiple of the base interval
    Tick next_monitor = 0;
    int suspicion = 0;       // consecutive S1 observations, 0..threshold
    Tick ft_interval = 0;    // fault-tolerance state interval used by TCC
    bool contaminated = false;
    std::optional<CheckpointId> last_confirmed;
    std::optional<TaskId> task;
};

/// Physical host with VN slots and its WSSS failure tallies.
struct Server {
    ServerId id = 0;
    int capacity = 1;
    std::uint64_t failures = 0;  // W + Y; never decreases within a scenario
    std::uint64_t w_count = 0;
    std::uint64_t y_count = 0;
    double latency_mean = 0.0;   // per-observation extra delay, ticks
    double latency_sigma = 0.0;
    std::vector<VnId> active_vns;

    int free_slots() const { return capacity - static_cast<int>(active_vns.size()); }
};

}  // namespace bftsim
