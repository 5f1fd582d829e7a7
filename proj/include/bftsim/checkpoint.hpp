#pragma once

#include <deque>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "bftsim/config.hpp"
#include "bftsim/model.hpp"
#include "bftsim/rng.hpp"
#include "bftsim/types.hpp"
#include "bftsim/workload.hpp"

namespace bftsim {

inline constexpr Tick kForever = std::numeric_limits<Tick>::max() / 4;

enum class StallKind { Pause, Restart, Dead };

/// How a VN's active time was spent. `worked` includes work later lost to a
/// rollback; the engine separates that out.
struct ActivityTotals {
    Tick worked = 0;
    Tick paused = 0;
    Tick restarting = 0;
    Tick dead = 0;

    Tick total() const { return worked + paused + restarting + dead; }
};

/// Integer-tick ledger of one VN's active time. Stalls (checkpoint writes,
/// restarts, a crash) queue back to back; every other tick is work.
class Activity {
public:
    explicit Activity(Tick start = 0) : start_(start), accounted_(start) {}

    /// Categorizes [accounted(), t) and returns the work ticks in it.
    Tick advance(Tick t);

    /// Queues a stall starting at max(now, end of the last queued stall).
    /// Requires accounted() == now. A Dead stall lasts until the VN stops.
    void stall(Tick now, Tick duration, StallKind kind);

    /// First tick at which the VN makes progress again; kForever if dead.
    Tick resume_time() const;

    /// Time at which `work` more ticks of work will have accumulated, given
    /// the stalls queued now; kForever if a Dead stall comes first.
    Tick time_for_work(Tick work) const;

    /// Finalizes the ledger at t and drops whatever stalls remain.
    void stop(Tick t);

    Tick start() const { return start_; }
    Tick accounted() const { return accounted_; }
    bool dead() const;
    const ActivityTotals& totals() const { return totals_; }

private:
    struct Segment {
        Tick begin;
        Tick end;
        StallKind kind;
    };

    Tick start_;
    Tick accounted_;
    std::deque<Segment> stalls_;
    ActivityTotals totals_;
};

struct CheckpointScope {
    enum class Kind { Vn, Job };
    Kind kind = Kind::Vn;
    std::int32_t id = 0;

    std::string label() const;
};

struct Checkpoint {
    CheckpointId id = 0;
    CheckpointScope scope;
    TaskId task = 0;
    Tick time = 0;
    CheckpointStatus status = CheckpointStatus::Confirmed;
    double size = 0.0;
    Tick cost = 0;
    Tick progress = 0;          // task progress captured in the image
    bool contaminated = false;  // ground truth at capture time
    bool superseded = false;    // belongs to a timeline abandoned by a later rollback
};

/// Every checkpoint taken in a scenario, with a per-task index.
class CheckpointLedger {
public:
    const Checkpoint& record(Checkpoint c);
    const Checkpoint& get(CheckpointId id) const;
    std::span<const Checkpoint> all() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

    /// Latest live checkpoint of `task` with time <= not_after and status in
    /// {Confirmed} (or any status when confirmed_only is false).
    std::optional<CheckpointId> latest(TaskId task, Tick not_after = kForever,
                                       bool confirmed_only = true) const;

    /// Marks the task's checkpoints newer than `time` as superseded.
    void supersede_after(TaskId task, Tick time);

    /// `ckpt_id,scope,time,status,size,cost`.
    std::string csv() const;

private:
    std::vector<Checkpoint> entries_;
    std::unordered_map<TaskId, std::vector<CheckpointId>> by_task_;
};

/// Records a checkpoint of the VN's task and pauses the VN for write_cost.
/// The VN's activity must already be advanced to `time`. Throws Error for a
/// FailStop VN or a VN without a task.
const Checkpoint& take_checkpoint(CheckpointLedger& ledger, const VirtualNode& vn, Activity& activity,
                                  Tick task_progress, Tick time, CheckpointStatus status,
                                  Tick write_cost, double size,
                                  std::optional<CheckpointScope> scope = std::nullopt);

struct RollbackResult {
    Tick restored_progress = 0;
    Tick lost = 0;
    bool contaminated = false;  // contamination carried by the restored image
    Tick target_time = 0;
};

/// Restores a task to `target` (or to its initial image when null). Throws
/// Error when the target is newer than `now`.
RollbackResult rollback(Tick current_progress, const Checkpoint* target, Tick now);

enum class TccKind { ConfirmedCheckpoint, PreviousRestart, JobMigration };

std::string_view to_string(TccKind k);

struct TccAction {
    TccKind kind = TccKind::ConfirmedCheckpoint;
    VnId vn = 0;
    JobId job = 0;
    Tick new_ft_interval = 0;
    int restarts_after = 0;  // the job's restart counter after this round
};

/// Tactical coordinated checkpointing decision for one VN round. `vn.state`
/// is the post-observation state, `gap` the interval next_interval returned.
///  - S0 and ft_interval < gap: confirm a checkpoint and widen ft_interval to gap.
///  - otherwise: restart from the previous confirmed checkpoint and bump the
///    job's restart counter; past `migration_threshold` the whole job migrates
///    and the counter resets.
TccAction tcc_round(const VirtualNode& vn, Tick gap, const Job& job, int migration_threshold);

/// Times at which the synchronous baseline checkpoints every running VN.
std::vector<Tick> synchronous_checkpoint_times(Tick interval, Tick horizon);
std::int64_t synchronous_checkpoint_count(int vn_count, Tick interval, Tick horizon);

/// Gap until an independent checkpoint: exponential with the given mean,
/// rounded, never below one tick.
Tick independent_gap(Rng& rng, double mean_gap);
std::vector<Tick> independent_checkpoint_times(Rng& rng, double mean_gap, Tick start, Tick horizon);

}  // namespace bftsim
