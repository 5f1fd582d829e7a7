#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "bftsim/model.hpp"
#include "bftsim/rng.hpp"
#include "bftsim/types.hpp"

namespace bftsim {

/// Thrown when servers cannot host the requested VNs; carries the shortfall.
class CapacityError : public ConfigError {
public:
    CapacityError(const std::string& what, int shortfall) : ConfigError(what), shortfall_(shortfall) {}
    int shortfall() const { return shortfall_; }

private:
    int shortfall_;
};

/// Bumps the server's failure count by one for either kind and keeps the
/// per-kind tallies. Returns the new count. Throws Error for an unknown id.
std::uint64_t record_failure(std::vector<Server>& servers, ServerId id, FailureKind kind);

struct RankEntry {
    ServerId id = 0;
    std::uint64_t failures = 0;
    std::uint64_t w_count = 0;
    std::uint64_t y_count = 0;

    bool operator==(const RankEntry&) const = default;
};

/// Servers in ascending failure count, ties broken by ascending id.
struct ServerRanking {
    std::vector<RankEntry> entries;
    Tick generated_at = 0;
};

ServerRanking rank_servers(std::span<const Server> servers, Tick now = 0);
ServerRanking rank_servers(std::vector<RankEntry> entries, Tick now = 0);

/// `server_id,fault_count,w_count,y_count,rank`, rank starting at 1.
std::string ranking_csv(const ServerRanking& ranking);

struct ServerSelection {
    std::vector<ServerId> servers;
    bool shortfall = false;  // fewer than n servers had a free slot
};

/// First n servers in ranking order with at least one free slot. Servers
/// missing from `free_slots` count as full. Throws Error for n == 0.
ServerSelection select_servers(const ServerRanking& ranking, int n,
                               const std::map<ServerId, int>& free_slots);

/// Task -> server placement produced by a baseline scheduler.
struct Assignment {
    std::map<TaskId, ServerId> placement;
    int servers_used = 0;
    /// Modeled pre-evaluation cost (MESF only): eval cost times candidate servers.
    double evaluation_cost = 0.0;
};

/// Server ids ordered by efficiency: ascending mean latency, then id.
std::vector<ServerId> mesf_order(std::span<const Server> servers);

/// Most Efficient Server First: fills the most efficient server's free slots
/// before touching the next one. Throws CapacityError on a shortfall.
Assignment mesf_assign(std::span<const TaskId> tasks, std::span<const Server> servers,
                       double eval_cost_per_server = 0.0);

/// Each task goes to a server drawn uniformly among those with a free slot.
/// Throws CapacityError on a shortfall.
Assignment random_assign(std::span<const TaskId> tasks, std::span<const Server> servers, Rng& rng);

}  // namespace bftsim
