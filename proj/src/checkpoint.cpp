#include "bftsim/checkpoint.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace bftsim {

Tick Activity::advance(Tick t) {
    Tick work = 0;
    while (accounted_ < t) {
        if (!stalls_.empty() && stalls_.front().begin <= accounted_) {
            Segment& seg = stalls_.front();
            const Tick until = std::min(t, seg.end);
            const Tick span = until - accounted_;
            switch (seg.kind) {
                case StallKind::Pause: totals_.paused += span; break;
                case StallKind::Restart: totals_.restarting += span; break;
                case StallKind::Dead: totals_.dead += span; break;
            }
            accounted_ = until;
            if (accounted_ >= seg.end) stalls_.pop_front();
        } else {
            const Tick until = stalls_.empty() ? t : std::min(t, stalls_.front().begin);
            work += until - accounted_;
            accounted_ = until;
        }
    }
    totals_.worked += work;
    return work;
}

void Activity::stall(Tick now, Tick duration, StallKind kind) {
    if (now != accounted_) throw Error("Activity::stall: ledger not advanced to the stall time");
    if (dead()) return;
    if (kind == StallKind::Dead) {
        const Tick begin = stalls_.empty() ? now : std::max(now, stalls_.back().end);
        stalls_.push_back({begin, kForever, kind});
        return;
    }
    if (duration <= 0) return;
    const Tick begin = stalls_.empty() ? now : std::max(now, stalls_.back().end);
    stalls_.push_back({begin, begin + duration, kind});
}

bool Activity::dead() const { return !stalls_.empty() && stalls_.back().kind == StallKind::Dead; }

Tick Activity::resume_time() const {
    if (dead()) return kForever;
    if (stalls_.empty()) return accounted_;
    // Stalls are contiguous only when queued back to back; find the first gap.
    Tick t = accounted_;
    for (const auto& seg : stalls_) {
        if (seg.begin > t) break;
        t = std::max(t, seg.end);
    }
    return t;
}

Tick Activity::time_for_work(Tick work) const {
    Tick t = accounted_;
    Tick remaining = std::max<Tick>(0, work);
    if (remaining == 0) return t;
    for (const auto& seg : stalls_) {
        if (seg.begin > t) {
            if (seg.begin - t >= remaining) return t + remaining;
            remaining -= seg.begin - t;
        }
        if (seg.kind == StallKind::Dead) return kForever;
        t = std::max(t, seg.end);
    }
    return t + remaining;
}

void Activity::stop(Tick t) {
    advance(t);
    stalls_.clear();
}

std::string CheckpointScope::label() const {
    return kind == Kind::Vn ? vn_label(id) : job_label(id);
}

const Checkpoint& CheckpointLedger::record(Checkpoint c) {
    c.id = static_cast<CheckpointId>(entries_.size());
    by_task_[c.task].push_back(c.id);
    entries_.push_back(c);
    return entries_.back();
}

const Checkpoint& CheckpointLedger::get(CheckpointId id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= entries_.size()) {
        throw Error(fmt::format("unknown checkpoint {}", id));
    }
    return entries_[static_cast<std::size_t>(id)];
}

std::optional<CheckpointId> CheckpointLedger::latest(TaskId task, Tick not_after,
                                                     bool confirmed_only) const {
    auto it = by_task_.find(task);
    if (it == by_task_.end()) return std::nullopt;
    for (auto id = it->second.rbegin(); id != it->second.rend(); ++id) {
        const Checkpoint& c = entries_[static_cast<std::size_t>(*id)];
        if (c.superseded || c.time > not_after) continue;
        if (confirmed_only && c.status != CheckpointStatus::Confirmed) continue;
        return c.id;
    }
    return std::nullopt;
}

void CheckpointLedger::supersede_after(TaskId task, Tick time) {
    auto it = by_task_.find(task);
    if (it == by_task_.end()) return;
    for (CheckpointId id : it->second) {
        Checkpoint& c = entries_[static_cast<std::size_t>(id)];
        if (c.time > time) c.superseded = true;
    }
}

std::string CheckpointLedger::csv() const {
    std::string out = "ckpt_id,scope,time,status,size,cost\n";
    for (const auto& c : entries_) {
        out += fmt::format("{},{},{},{},{},{}\n", c.id, c.scope.label(), c.time, to_string(c.status),
                           c.size, c.cost);
    }
    return out;
}

const Checkpoint& take_checkpoint(CheckpointLedger& ledger, const VirtualNode& vn, Activity& activity,
                                  Tick task_progress, Tick time, CheckpointStatus status,
                                  Tick write_cost, double size, std::optional<CheckpointScope> scope) {
    if (vn.state == NodeState::FailStop) {
        throw Error(fmt::format("cannot checkpoint {}: node is fail-stop", vn_label(vn.id)));
    }
    if (!vn.task) throw Error(fmt::format("cannot checkpoint {}: no task assigned", vn_label(vn.id)));
    Checkpoint c;
    c.scope = scope.value_or(CheckpointScope{CheckpointScope::Kind::Vn, vn.id});
    c.task = *vn.task;
    c.time = time;
    c.status = status;
    c.size = size;
    c.cost = write_cost;
    c.progress = task_progress;
    c.contaminated = vn.contaminated;
    activity.stall(time, write_cost, StallKind::Pause);
    return ledger.record(c);
}

RollbackResult rollback(Tick current_progress, const Checkpoint* target, Tick now) {
    RollbackResult r;
    if (target == nullptr) {
        r.lost = current_progress;
        return r;
    }
    if (target->time > now) {
        throw Error(fmt::format("rollback target checkpoint {} at t={} is newer than t={}", target->id,
                                target->time, now));
    }
    r.restored_progress = std::min(target->progress, current_progress);
    r.lost = current_progress - r.restored_progress;
    r.contaminated = target->contaminated;
    r.target_time = target->time;
    return r;
}

std::string_view to_string(TccKind k) {
    switch (k) {
        case TccKind::ConfirmedCheckpoint: return "confirmed_checkpoint";
        case TccKind::PreviousRestart: return "previous_restart";
        case TccKind::JobMigration: return "job_migration";
    }
    return "?";
}

TccAction tcc_round(const VirtualNode& vn, Tick gap, const Job& job, int migration_threshold) {
    TccAction a;
    a.vn = vn.id;
    a.job = job.id;
    a.new_ft_interval = vn.ft_interval;
    a.restarts_after = job.restarts;
    if (vn.state == NodeState::FailSafe && vn.ft_interval < gap) {
        a.kind = TccKind::ConfirmedCheckpoint;
        a.new_ft_interval = gap;
        return a;
    }
    a.restarts_after = job.restarts + 1;
    if (a.restarts_after > migration_threshold) {
        a.kind = TccKind::JobMigration;
        a.restarts_after = 0;
    } else {
        a.kind = TccKind::PreviousRestart;
    }
    return a;
}

std::vector<Tick> synchronous_checkpoint_times(Tick interval, Tick horizon) {
    if (interval <= 0) throw Error("synchronous checkpoint interval must be positive");
    std::vector<Tick> times;
    for (Tick t = interval; t <= horizon; t += interval) times.push_back(t);
    return times;
}

std::int64_t synchronous_checkpoint_count(int vn_count, Tick interval, Tick horizon) {
    if (interval <= 0) throw Error("synchronous checkpoint interval must be positive");
    return static_cast<std::int64_t>(vn_count) * (horizon / interval);
}

Tick independent_gap(Rng& rng, double mean_gap) {
    const double draw = rng.exponential(mean_gap);
    return std::max<Tick>(1, static_cast<Tick>(std::llround(std::min(draw, 1e15))));
}

std::vector<Tick> independent_checkpoint_times(Rng& rng, double mean_gap, Tick start, Tick horizon) {
    std::vector<Tick> times;
    for (Tick t = start + independent_gap(rng, mean_gap); t <= horizon; t += independent_gap(rng, mean_gap)) {
        times.push_back(t);
    }
    return times;
}

}  // namespace bftsim
