#include "bftsim/wsss.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>

namespace bftsim {

namespace {

int total_free(std::span<const Server> servers) {
    int free = 0;
    for (const auto& s : servers) free += std::max(0, s.free_slots());
    return free;
}

[[noreturn]] void throw_shortfall(std::size_t tasks, int free) {
    const int shortfall = static_cast<int>(tasks) - free;
    throw CapacityError(fmt::format("capacity shortfall: {} tasks but only {} free VN slots ({} short)",
                                    tasks, free, shortfall),
                        shortfall);
}

int count_distinct(const std::map<TaskId, ServerId>& placement) {
    std::set<ServerId> used;
    for (const auto& [task, server] : placement) used.insert(server);
    return static_cast<int>(used.size());
}

}  // namespace

std::uint64_t record_failure(std::vector<Server>& servers, ServerId id, FailureKind kind) {
    auto it = std::find_if(servers.begin(), servers.end(), [id](const Server& s) { return s.id == id; });
    if (it == servers.end()) throw Error(fmt::format("record_failure: unknown server {}", server_label(id)));
    ++it->failures;
    if (kind == FailureKind::Erroneous) {
        ++it->w_count;
    } else {
        ++it->y_count;
    }
    return it->failures;
}

ServerRanking rank_servers(std::vector<RankEntry> entries, Tick now) {
    std::stable_sort(entries.begin(), entries.end(), [](const RankEntry& a, const RankEntry& b) {
        if (a.failures != b.failures) return a.failures < b.failures;
        return a.id < b.id;
    });
    return {std::move(entries), now};
}

ServerRanking rank_servers(std::span<const Server> servers, Tick now) {
    std::vector<RankEntry> entries;
    entries.reserve(servers.size());
    for (const auto& s : servers) entries.push_back({s.id, s.failures, s.w_count, s.y_count});
    return rank_servers(std::move(entries), now);
}

std::string ranking_csv(const ServerRanking& ranking) {
    std::string out = "server_id,fault_count,w_count,y_count,rank\n";
    int rank = 1;
    for (const auto& e : ranking.entries) {
        out += fmt::format("{},{},{},{},{}\n", server_label(e.id), e.failures, e.w_count, e.y_count, rank++);
    }
    return out;
}

ServerSelection select_servers(const ServerRanking& ranking, int n,
                               const std::map<ServerId, int>& free_slots) {
    if (n <= 0) throw Error("select_servers: n must be at least 1");
    ServerSelection sel;
    for (const auto& e : ranking.entries) {
        if (static_cast<int>(sel.servers.size()) == n) break;
        auto it = free_slots.find(e.id);
        if (it != free_slots.end() && it->second > 0) sel.servers.push_back(e.id);
    }
    sel.shortfall = static_cast<int>(sel.servers.size()) < n;
    return sel;
}

std::vector<ServerId> mesf_order(std::span<const Server> servers) {
    std::vector<const Server*> sorted;
    for (const auto& s : servers) sorted.push_back(&s);
    std::stable_sort(sorted.begin(), sorted.end(), [](const Server* a, const Server* b) {
        if (a->latency_mean != b->latency_mean) return a->latency_mean < b->latency_mean;
        return a->id < b->id;
    });
    std::vector<ServerId> ids;
    for (const auto* s : sorted) ids.push_back(s->id);
    return ids;
}

Assignment mesf_assign(std::span<const TaskId> tasks, std::span<const Server> servers,
                       double eval_cost_per_server) {
    if (tasks.empty() || servers.empty()) throw Error("mesf_assign: tasks and servers must be non-empty");
    const int free = total_free(servers);
    if (static_cast<int>(tasks.size()) > free) throw_shortfall(tasks.size(), free);

    std::map<ServerId, int> remaining;
    for (const auto& s : servers) remaining[s.id] = std::max(0, s.free_slots());
    Assignment out;
    out.evaluation_cost = eval_cost_per_server * static_cast<double>(servers.size());
    const auto order = mesf_order(servers);
    std::size_t cursor = 0;
    for (TaskId task : tasks) {
        while (remaining[order[cursor]] == 0) ++cursor;
        out.placement[task] = order[cursor];
        --remaining[order[cursor]];
    }
    out.servers_used = count_distinct(out.placement);
    return out;
}

Assignment random_assign(std::span<const TaskId> tasks, std::span<const Server> servers, Rng& rng) {
    if (tasks.empty() || servers.empty()) throw Error("random_assign: tasks and servers must be non-empty");
    const int free = total_free(servers);
    if (static_cast<int>(tasks.size()) > free) throw_shortfall(tasks.size(), free);

    std::vector<std::pair<ServerId, int>> remaining;
    for (const auto& s : servers) {
        if (s.free_slots() > 0) remaining.emplace_back(s.id, s.free_slots());
    }
    Assignment out;
    for (TaskId task : tasks) {
        const auto pick = static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<std::int64_t>(remaining.size()) - 1));
        out.placement[task] = remaining[pick].first;
        if (--remaining[pick].second == 0) remaining.erase(remaining.begin() + static_cast<long>(pick));
    }
    out.servers_used = count_distinct(out.placement);
    return out;
}

}  // namespace bftsim
