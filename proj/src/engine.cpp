#include "bftsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <optional>

#include <fmt/format.h>

#include "bftsim/detection.hpp"
#include "bftsim/event_log.hpp"
#include "bftsim/wsss.hpp"

namespace bftsim {

std::string_view to_string(EventKind k) {
    switch (k) {
        case EventKind::JobRelease: return "JobRelease";
        case EventKind::MonitorRound: return "MonitorRound";
        case EventKind::TaskComplete: return "TaskComplete";
        case EventKind::FaultInjection: return "FaultInjection";
        case EventKind::ContaminationExchange: return "ContaminationExchange";
        case EventKind::CheckpointRound: return "CheckpointRound";
        case EventKind::IndependentCheckpoint: return "IndependentCheckpoint";
        case EventKind::MigrationComplete: return "MigrationComplete";
        case EventKind::HorizonEnd: return "HorizonEnd";
    }
    return "?";
}

std::uint64_t EventQueue::push(Tick time, EventKind kind, std::int32_t target, std::uint64_t version) {
    if (time < clock_) {
        throw Error(fmt::format("causality violation: {} at t={} is earlier than the clock t={}", to_string(kind),
                                time, clock_));
    }
    const std::uint64_t seq = next_seq_++;
    heap_.push(SimEvent{time, seq, kind, target, version});
    return seq;
}

SimEvent EventQueue::advance() {
    if (heap_.empty()) return SimEvent{clock_, next_seq_, EventKind::HorizonEnd, -1, 0};
    SimEvent e = heap_.top();
    heap_.pop();
    clock_ = e.time;
    return e;
}

std::vector<VnId> propagate_contamination(std::span<VirtualNode* const> job_vns, double p_prop, Rng& rng) {
    std::vector<VnId> infected;
    const bool any = std::any_of(job_vns.begin(), job_vns.end(), [](const VirtualNode* v) { return v->contaminated; });
    if (!any) return infected;
    for (VirtualNode* v : job_vns) {
        if (v->contaminated) continue;
        if (rng.bernoulli(p_prop)) infected.push_back(v->id);
    }
    // Flags are set after the sweep so that one exchange only spreads from
    // VNs that were contaminated when it began.
    for (VirtualNode* v : job_vns) {
        if (std::find(infected.begin(), infected.end(), v->id) != infected.end()) v->contaminated = true;
    }
    return infected;
}

std::vector<Server> build_servers(const SimConfig& cfg) {
    Rng rng(cfg.seed, Stream::Servers);
    std::vector<Server> servers;
    for (int i = 0; i < cfg.server_count; ++i) {
        Server s;
        s.id = i;
        s.capacity = cfg.server_capacity;
        s.latency_mean = rng.uniform(cfg.latency_mean_min, cfg.latency_mean_max);
        s.latency_sigma = rng.uniform(cfg.latency_sigma_min, cfg.latency_sigma_max);
        servers.push_back(s);
    }
    return servers;
}

Application build_workload(const SimConfig& cfg) {
    WorkloadSpec spec;
    spec.task_count = cfg.task_count;
    spec.job_count = cfg.job_count;
    spec.demand = {cfg.demand_min, cfg.demand_max};
    spec.sla_bound = cfg.sla_bound;
    spec.job_interarrival = cfg.job_interarrival;
    if (!cfg.trace_path.empty()) spec.trace = load_utilization_trace(cfg.trace_path, cfg.trace_period);
    Rng rng(cfg.seed, Stream::Workload);
    return generate_workload(spec, rng);
}

std::string ScenarioResult::event_log_text() const {
    std::string out(kEventLogHeader);
    out += '\n';
    for (const auto& line : event_log) {
        out += line;
        out += '\n';
    }
    return out;
}

namespace {

enum class Reason { Initial, Restart, Migration };

std::string_view to_string(Reason r) {
    switch (r) {
        case Reason::Initial: return "initial";
        case Reason::Restart: return "restart";
        case Reason::Migration: return "migration";
    }
    return "?";
}

struct VnRun {
    VirtualNode node;
    Activity activity;
    bool alive = true;
    bool crashed = false;
    double spike = 0.0;  // fraction of D added to every measured delay
    Tick spike_until = 0;
    Tick contaminated_at = 0;
    bool detected = false;
    Tick last_clean = 0;
    std::uint64_t completion_version = 0;
    std::uint64_t monitor_version = 0;
    Tick end = 0;
};

struct TaskRun {
    Tick progress = 0;
    Tick ready = 0;
    Tick first_start = -1;
    std::optional<VnId> vn;
    bool queued = false;
    bool carries_contamination = false;  // the image the next VN starts from
    Reason next_reason = Reason::Initial;
};

struct JobRun {
    int remaining = 0;
    bool exchange_pending = false;
};

struct PendingFault {
    FaultSpec spec;
    double pick = 0.0;  // resolves a random target
};

struct RoundOutcome {
    MonitorObservation obs;
    NodeState post = NodeState::FailSafe;
    FsmDecision decision;
};

class Simulation {
public:
    Simulation(const SimConfig& cfg, Application app, const RunOptions& options)
        : cfg_(cfg),
          app_(std::move(app)),
          options_(options),
          latency_rng_(cfg.seed, Stream::Latency),
          oracle_rng_(cfg.seed, Stream::Oracle),
          prop_rng_(cfg.seed, Stream::Propagation),
          independent_rng_(cfg.seed, Stream::Independent),
          placement_rng_(cfg.seed, Stream::Placement) {
        servers_ = build_servers(cfg_);
        tasks_.resize(app_.tasks.size());
        jobs_.resize(app_.jobs.size());
        for (const auto& j : app_.jobs) jobs_[static_cast<std::size_t>(j.id)].remaining = static_cast<int>(j.tasks.size());
        over_sla_.assign(servers_.size(), 0);
        plan_faults();
    }

    ScenarioResult run();

private:
    // --- setup -----------------------------------------------------------
    void plan_faults() {
        Rng rng(cfg_.seed, Stream::Faults);
        for (const auto& f : cfg_.faults) faults_.push_back({f, rng.uniform01()});
        const Tick start = cfg_.fault_window_start;
        const Tick end = cfg_.fault_window_end == 0 ? cfg_.horizon : cfg_.fault_window_end;
        auto add_random = [&](int count, FaultKind kind) {
            for (int i = 0; i < count; ++i) {
                FaultSpec f;
                f.kind = kind;
                f.time = rng.uniform_int(start, end - 1);
                f.magnitude = cfg_.spike_magnitude;
                faults_.push_back({f, rng.uniform01()});
            }
        };
        add_random(cfg_.random_byzantine, FaultKind::Byzantine);
        add_random(cfg_.random_crash, FaultKind::Crash);
        add_random(cfg_.random_delay_spike, FaultKind::DelaySpike);
    }

    // --- logging ---------------------------------------------------------
    template <typename... Args>
    void log(std::string_view kind, const std::string& target, fmt::format_string<Args...> f, Args&&... args) {
        if (!options_.event_log) return;
        log_.push_back(format_log_record(
            {now_, seq_, std::string(kind), target, fmt::format(f, std::forward<Args>(args)...)}));
    }

    // --- bookkeeping -----------------------------------------------------
    VnRun& vn(VnId id) { return vns_[static_cast<std::size_t>(id)]; }
    TaskRun& task(TaskId id) { return tasks_[static_cast<std::size_t>(id)]; }
    const Task& task_def(TaskId id) const { return app_.tasks[static_cast<std::size_t>(id)]; }
    Job& job(JobId id) { return app_.jobs[static_cast<std::size_t>(id)]; }
    Server& server(ServerId id) { return servers_[static_cast<std::size_t>(id)]; }

    bool running(const VnRun& r, Tick t) const { return r.alive && r.activity.start() <= t; }

    void sync(VnRun& r, Tick t) {
        if (t <= r.activity.accounted()) return;
        const Tick work = r.activity.advance(t);
        task(*r.node.task).progress += work;
    }

    void schedule_completion(VnRun& r) {
        ++r.completion_version;
        if (r.activity.dead()) return;
        const TaskId t = *r.node.task;
        const Tick when = r.activity.time_for_work(task_def(t).demand - task(t).progress);
        if (when >= kForever) return;
        queue_.push(when, EventKind::TaskComplete, r.node.id, r.completion_version);
    }

    void schedule_monitor(VnRun& r) {
        ++r.monitor_version;
        queue_.push(r.node.next_monitor, EventKind::MonitorRound, r.node.id, r.monitor_version);
    }

    void failure(ServerId host, FailureKind kind) {
        record_failure(servers_, host, kind);
        log("Failure", server_label(host), "{}", to_string(kind));
    }

    void ensure_exchange(JobId j, Tick t) {
        auto& jr = jobs_[static_cast<std::size_t>(j)];
        if (jr.exchange_pending) return;
        jr.exchange_pending = true;
        queue_.push(t + cfg_.base_interval, EventKind::ContaminationExchange, j);
    }

    void contaminate(VnRun& r, Tick t) {
        r.node.contaminated = true;
        r.contaminated_at = t;
        r.detected = false;
        ++report_.contaminated_vns;
        ensure_exchange(task_def(*r.node.task).job, t);
    }

    // --- placement -------------------------------------------------------
    std::optional<ServerId> choose_server(int& examined) {
        switch (cfg_.scheduler) {
            case SchedulerPolicy::Wsss: {
                const auto ranking = rank_servers(servers_, now_);
                std::map<ServerId, int> free;
                for (const auto& s : servers_) free[s.id] = s.free_slots();
                const auto sel = select_servers(ranking, 1, free);
                if (sel.servers.empty()) {
                    examined += static_cast<int>(servers_.size());
                    return std::nullopt;
                }
                for (const auto& e : ranking.entries) {
                    ++examined;
                    if (e.id == sel.servers.front()) break;
                }
                return sel.servers.front();
            }
            case SchedulerPolicy::Mesf: {
                if (mesf_order_.empty()) mesf_order_ = mesf_order(servers_);
                for (ServerId id : mesf_order_) {
                    ++examined;
                    if (server(id).free_slots() > 0) return id;
                }
                return std::nullopt;
            }
            case SchedulerPolicy::Random: {
                std::vector<ServerId> open;
                for (const auto& s : servers_) {
                    if (s.free_slots() > 0) open.push_back(s.id);
                }
                examined += static_cast<int>(servers_.size());
                if (open.empty()) return std::nullopt;
                return open[static_cast<std::size_t>(
                    placement_rng_.uniform_int(0, static_cast<std::int64_t>(open.size()) - 1))];
            }
        }
        return std::nullopt;
    }

    void try_dispatch(Tick t) {
        if (dispatch_queue_.empty() || live_ >= cfg_.vn_count) return;
        const double wave_eval = cfg_.scheduler == SchedulerPolicy::Mesf
                                     ? cfg_.mesf_eval_cost * static_cast<double>(servers_.size())
                                     : 0.0;
        // MESF pre-evaluates every server before each placement wave; the
        // evaluation holds the wave back by its modeled cost.
        const Tick delay = static_cast<Tick>(std::llround(wave_eval));
        int placed = 0;
        int examined = 0;
        int replaced_examined = 0;
        bool any_replacement = false;
        while (!dispatch_queue_.empty() && live_ < cfg_.vn_count) {
            int ex = 0;
            const auto host = choose_server(ex);
            examined += ex;
            if (!host) break;
            const TaskId tid = dispatch_queue_.front();
            dispatch_queue_.pop_front();
            if (task(tid).next_reason != Reason::Initial) {
                any_replacement = true;
                replaced_examined += ex;
            }
            start_vn(tid, *host, t + delay);
            ++placed;
        }
        if (placed == 0) return;
        const double vm_sel = cfg_.scheduler == SchedulerPolicy::Mesf
                                  ? wave_eval
                                  : cfg_.scheduler == SchedulerPolicy::Wsss ? cfg_.wsss_lookup_cost * placed : 0.0;
        const double host_sel = cfg_.host_scan_cost * examined;
        record(report_, "exec_vm_selection", vm_sel);
        record(report_, "exec_host_selection", host_sel);
        if (any_replacement) record(report_, "exec_reallocation", cfg_.host_scan_cost * replaced_examined);
        record(report_, "exec_total", vm_sel + host_sel);
    }

    void start_vn(TaskId tid, ServerId host, Tick start) {
        TaskRun& tr = task(tid);
        const VnId id = static_cast<VnId>(vns_.size());
        vns_.emplace_back();
        VnRun& r = vns_.back();
        r.node.id = id;
        r.node.host = host;
        r.node.gap = cfg_.base_interval;
        r.node.next_monitor = start + cfg_.base_interval;
        r.node.ft_interval = cfg_.initial_ft_interval;
        r.node.task = tid;
        r.activity = Activity(start);
        r.last_clean = start;
        if (tr.next_reason != Reason::Initial) {
            r.activity.stall(start, cfg_.restart_cost, StallKind::Restart);
            ++report_.replacements;
        }
        server(host).active_vns.push_back(id);
        ++live_;
        tr.vn = id;
        tr.queued = false;
        if (tr.first_start < 0) tr.first_start = start;
        record(report_, "time_before_migration", static_cast<double>(start - tr.ready));
        log("Dispatch", vn_label(id), "task={} host={} start={} reason={}", task_label(tid), server_label(host), start,
            to_string(tr.next_reason));
        if (tr.carries_contamination) {
            r.node.contaminated = true;
            r.contaminated_at = start;
            ensure_exchange(task_def(tid).job, start);
        }
        schedule_monitor(r);
        schedule_completion(r);
        if (cfg_.checkpoint_policy == CheckpointPolicy::Independent) {
            queue_.push(start + independent_gap(independent_rng_, cfg_.independent_mean_gap),
                        EventKind::IndependentCheckpoint, id);
        }
    }

    void stop_vn(VnRun& r, Tick t) {
        sync(r, t);
        r.activity.stop(std::max(t, r.activity.start()));
        r.end = std::max(t, r.activity.start());
        r.alive = false;
        ++r.completion_version;
        ++r.monitor_version;
        auto& active = server(r.node.host).active_vns;
        active.erase(std::remove(active.begin(), active.end(), r.node.id), active.end());
        --live_;
        task(*r.node.task).vn.reset();
    }

    // --- checkpoints and recovery ----------------------------------------
    void checkpoint(VnRun& r, Tick t, CheckpointStatus status) {
        sync(r, t);
        const TaskId tid = *r.node.task;
        const auto& c = take_checkpoint(ledger_, r.node, r.activity, task(tid).progress, t, status,
                                        cfg_.checkpoint_write_cost, cfg_.checkpoint_size);
        ++report_.checkpoint_count;
        if (status == CheckpointStatus::Confirmed) r.node.last_confirmed = c.id;
        log("Checkpoint", vn_label(r.node.id), "ckpt={} task={} status={} progress={}", c.id, task_label(tid),
            to_string(status), c.progress);
        schedule_completion(r);
    }

    const Checkpoint* restore_target(TaskId tid, const VnRun& r, Tick t) const {
        std::optional<CheckpointId> id;
        switch (cfg_.checkpoint_policy) {
            case CheckpointPolicy::Tcc:
                id = ledger_.latest(tid, t, true);
                break;
            case CheckpointPolicy::Synchronous:
                id = ledger_.latest(tid, r.last_clean, false);
                break;
            case CheckpointPolicy::Independent:
                id = ledger_.latest(tid, t, false);
                if (id && ledger_.get(*id).contaminated) id.reset();
                break;
        }
        return id ? &ledger_.get(*id) : nullptr;
    }

    /// Rolls the task back to `target` and queues it for a new VN.
    void roll_back(TaskId tid, const Checkpoint* target, Tick t, Reason reason) {
        TaskRun& tr = task(tid);
        const RollbackResult rr = rollback(tr.progress, target, t);
        tr.progress = rr.restored_progress;
        rollback_lost_ += rr.lost;
        ++report_.rollback_count;
        ledger_.supersede_after(tid, target ? target->time : -1);
        tr.carries_contamination = rr.contaminated;
        tr.next_reason = reason;
        tr.ready = t;
        log("Rollback", task_label(tid), "to={} lost={} reason={}",
            target ? fmt::format("ckpt{}", target->id) : std::string("start"), rr.lost, to_string(reason));
    }

    void restart_task(VnRun& r, Tick t) {
        const TaskId tid = *r.node.task;
        sync(r, t);
        const Checkpoint* target = restore_target(tid, r, t);
        stop_vn(r, t);
        roll_back(tid, target, t, Reason::Restart);
        task(tid).queued = true;
        dispatch_queue_.push_front(tid);
        try_dispatch(t);
    }

    void migrate_job(JobId jid, Tick t) {
        ++report_.job_migrations;
        log("JobMigration", job_label(jid), "restarts={}", cfg_.migration_threshold + 1);
        // Tasks that never started have nothing to restore and keep their queue slot.
        std::vector<TaskId> pending;
        for (TaskId tid : job(jid).tasks) {
            const TaskRun& tr = task(tid);
            if (app_.tasks[static_cast<std::size_t>(tid)].completed) continue;
            if (!tr.vn && tr.first_start < 0) continue;
            pending.push_back(tid);
        }
        // Job-consistent cut: the oldest of the tasks' latest confirmed checkpoints.
        Tick cut = kForever;
        for (TaskId tid : pending) {
            const auto id = ledger_.latest(tid, t, true);
            cut = std::min(cut, id ? ledger_.get(*id).time : Tick{0});
        }
        for (TaskId tid : pending) {
            TaskRun& tr = task(tid);
            if (tr.vn) stop_vn(vn(*tr.vn), t);
            const auto id = ledger_.latest(tid, cut, true);
            const Checkpoint* target = id ? &ledger_.get(*id) : nullptr;
            roll_back(tid, target, t, Reason::Migration);
            Checkpoint c;
            c.scope = {CheckpointScope::Kind::Job, jid};
            c.task = tid;
            c.time = t;
            c.status = CheckpointStatus::Complete;
            c.size = cfg_.checkpoint_size;
            c.progress = tr.progress;
            c.contaminated = tr.carries_contamination;
            ledger_.record(c);
        }
        // Requeue at the front, keeping task order.
        for (auto it = pending.rbegin(); it != pending.rend(); ++it) {
            if (task(*it).queued) {
                dispatch_queue_.erase(std::remove(dispatch_queue_.begin(), dispatch_queue_.end(), *it),
                                      dispatch_queue_.end());
            }
            task(*it).queued = true;
            dispatch_queue_.push_front(*it);
        }
        queue_.push(t + cfg_.restart_cost, EventKind::MigrationComplete, jid);
        try_dispatch(t);
    }

    // --- monitoring ------------------------------------------------------
    RoundOutcome observe_round(VnRun& r, Tick t) {
        const Server& host = server(r.node.host);
        const double sla = task_def(*r.node.task).sla_bound;
        double raw = std::max(0.0, latency_rng_.normal(host.latency_mean, host.latency_sigma));
        if (r.spike > 0.0 && t < r.spike_until) raw += r.spike * sla;

        RoundOutcome out;
        out.obs = observe(r.node.id, t, {raw, r.node.contaminated, r.crashed, sla}, cfg_, oracle_rng_);
        out.post = byzantine_fsm_step(r.node.state, out.obs.delay_class, out.obs.checksum);
        if (out.obs.checksum == ChecksumResult::Error) {
            failure(r.node.host, FailureKind::Erroneous);
        } else if (out.obs.delay_class >= DelayClass::High) {
            failure(r.node.host, FailureKind::DelaySensitive);
        }
        if (r.node.contaminated && !r.detected &&
            (out.obs.checksum == ChecksumResult::Error || out.post != NodeState::FailSafe)) {
            r.detected = true;
            record(report_, "detection_latency", static_cast<double>(t - r.contaminated_at));
            log("Detection", vn_label(r.node.id), "contaminated_at={}", r.contaminated_at);
        }
        if (out.post == NodeState::FailSafe) r.last_clean = t;

        out.decision = next_interval(r.node, out.post, cfg_);
        log(kind_label_, vn_label(r.node.id), "delay={:.4f} class={} checksum={} {}->{} gap={} action={}{}",
            out.obs.delay, to_string(out.obs.delay_class), to_string(out.obs.checksum), to_string(r.node.state),
            to_string(out.post), out.decision.next_gap, to_string(out.decision.action),
            out.obs.fallback_applied ? " fallback" : "");
        r.node.state = out.post;
        r.node.gap = out.decision.next_gap;
        r.node.suspicion = out.decision.suspicion;
        r.node.next_monitor = t + out.decision.next_gap;
        return out;
    }

    /// TCC decision for a VN whose round did not end in a confirmation.
    void tcc_recover(VnRun& r, const TccAction& a, Tick t) {
        Job& j = job(task_def(*r.node.task).job);
        j.restarts = a.restarts_after;
        ++report_.restarts;
        if (a.kind == TccKind::JobMigration) {
            migrate_job(j.id, t);
        } else {
            restart_task(r, t);
        }
    }

    void on_monitor(const SimEvent& e) {
        VnRun& r = vn(e.target);
        if (!r.alive || e.version != r.monitor_version) return;
        const Tick t = e.time;
        sync(r, t);
        ++report_.monitor_rounds;
        kind_label_ = "MonitorRound";
        const RoundOutcome out = observe_round(r, t);

        if (cfg_.checkpoint_policy == CheckpointPolicy::Tcc) {
            const TccAction a = tcc_round(r.node, r.node.gap, job(task_def(*r.node.task).job), cfg_.migration_threshold);
            if (a.kind == TccKind::ConfirmedCheckpoint) {
                checkpoint(r, t, CheckpointStatus::Confirmed);
                r.node.ft_interval = a.new_ft_interval;
            } else {
                log("Tcc", vn_label(r.node.id), "{}", to_string(a.kind));
                tcc_recover(r, a, t);
                return;
            }
        } else if (out.decision.action == FsmAction::ReplaceNode) {
            log("Replace", vn_label(r.node.id), "state={}", to_string(out.post));
            restart_task(r, t);
            return;
        }
        if (cfg_.monitor_cost > 0) {
            r.activity.stall(t, cfg_.monitor_cost, StallKind::Pause);
            schedule_completion(r);
        }
        schedule_monitor(r);
    }

    void on_complete(const SimEvent& e) {
        VnRun& r = vn(e.target);
        if (!r.alive || e.version != r.completion_version) return;
        const Tick t = e.time;
        sync(r, t);
        kind_label_ = "TaskComplete";
        const RoundOutcome out = observe_round(r, t);
        if (cfg_.checkpoint_policy == CheckpointPolicy::Tcc) {
            if (out.post != NodeState::FailSafe) {
                const TccAction a = tcc_round(r.node, r.node.gap, job(task_def(*r.node.task).job), cfg_.migration_threshold);
                log("Tcc", vn_label(r.node.id), "{}", to_string(a.kind));
                tcc_recover(r, a, t);
                return;
            }
        } else if (out.decision.action == FsmAction::ReplaceNode) {
            log("Replace", vn_label(r.node.id), "state={}", to_string(out.post));
            restart_task(r, t);
            return;
        }
        finish_task(r, t, out.obs.delay);
    }

    void finish_task(VnRun& r, Tick t, double final_delay) {
        const TaskId tid = *r.node.task;
        Task& def = app_.tasks[static_cast<std::size_t>(tid)];
        TaskRun& tr = task(tid);
        def.completed = true;
        def.contaminated = r.node.contaminated;
        ++completed_tasks_;
        if (def.contaminated) ++report_.corrupted_completions;
        const double delay = static_cast<double>(t - tr.first_start - def.demand) + final_delay;
        const double excess = std::max(0.0, delay - def.sla_bound);
        if (excess > 0.0) {
            ++report_.sla_violations;
            failure(r.node.host, FailureKind::DelaySensitive);
            over_sla_[static_cast<std::size_t>(r.node.host)] += excess;
        }
        sla_ratio_sum_ += std::min(1.0, excess / def.sla_bound);
        log("Complete", task_label(tid), "vn={} delay={:.4f} corrupted={}", vn_label(r.node.id), delay,
            def.contaminated ? 1 : 0);
        stop_vn(r, t);
        auto& jr = jobs_[static_cast<std::size_t>(def.job)];
        if (--jr.remaining == 0) {
            ++report_.jobs_completed;
            log("JobDone", job_label(def.job), "corrupted={}", job_corrupted(def.job) ? 1 : 0);
        }
        try_dispatch(t);
    }

    bool job_corrupted(JobId jid) const {
        for (TaskId tid : app_.jobs[static_cast<std::size_t>(jid)].tasks) {
            if (app_.tasks[static_cast<std::size_t>(tid)].contaminated) return true;
        }
        return false;
    }

    // --- faults ----------------------------------------------------------
    void on_fault(const SimEvent& e) {
        const PendingFault& pf = faults_[static_cast<std::size_t>(e.target)];
        const Tick t = e.time;
        VnRun* target = nullptr;
        switch (pf.spec.target.kind) {
            case FaultTarget::Kind::Random: {
                std::vector<VnRun*> candidates;
                for (auto& r : vns_) {
                    if (running(r, t)) candidates.push_back(&r);
                }
                if (!candidates.empty()) {
                    const auto i = static_cast<std::size_t>(pf.pick * static_cast<double>(candidates.size()));
                    target = candidates[std::min(i, candidates.size() - 1)];
                }
                break;
            }
            case FaultTarget::Kind::Vn:
                if (pf.spec.target.id >= 0 && static_cast<std::size_t>(pf.spec.target.id) < vns_.size() &&
                    running(vn(pf.spec.target.id), t)) {
                    target = &vn(pf.spec.target.id);
                }
                break;
            case FaultTarget::Kind::Task:
                if (pf.spec.target.id >= 0 && static_cast<std::size_t>(pf.spec.target.id) < tasks_.size()) {
                    const auto& tr = task(pf.spec.target.id);
                    if (tr.vn && running(vn(*tr.vn), t)) target = &vn(*tr.vn);
                }
                break;
        }
        const std::string_view kind = to_string(pf.spec.kind);
        if (target == nullptr) {
            log("FaultInjection", "-", "{} noop=no running target", kind);
            return;
        }
        VnRun& r = *target;
        if (r.node.state == NodeState::FailStop || r.crashed) {
            log("FaultInjection", vn_label(r.node.id), "{} noop=fail-stop", kind);
            return;
        }
        ++report_.faults_injected;
        log("FaultInjection", vn_label(r.node.id), "{}", kind);
        switch (pf.spec.kind) {
            case FaultKind::Byzantine:
                if (!r.node.contaminated) contaminate(r, t);
                break;
            case FaultKind::Crash:
                sync(r, t);
                r.crashed = true;
                r.node.state = NodeState::FailStop;
                r.activity.stall(t, 0, StallKind::Dead);
                ++r.completion_version;
                break;
            case FaultKind::DelaySpike:
                r.spike = pf.spec.magnitude;
                r.spike_until = pf.spec.duration == 0 ? kForever : t + pf.spec.duration;
                break;
        }
    }

    void on_exchange(const SimEvent& e) {
        const JobId jid = e.target;
        const Tick t = e.time;
        std::vector<VirtualNode*> members;
        for (TaskId tid : job(jid).tasks) {
            const auto& tr = task(tid);
            if (!tr.vn) continue;
            VnRun& r = vn(*tr.vn);
            if (running(r, t) && !r.crashed) members.push_back(&r.node);
        }
        const bool any = std::any_of(members.begin(), members.end(), [](const VirtualNode* v) { return v->contaminated; });
        auto& jr = jobs_[static_cast<std::size_t>(jid)];
        if (!any) {
            jr.exchange_pending = false;
            return;
        }
        const auto infected = propagate_contamination(members, cfg_.p_prop, prop_rng_);
        std::string names;
        for (VnId id : infected) {
            VnRun& r = vn(id);
            r.contaminated_at = t;
            r.detected = false;
            ++report_.contaminated_vns;
            names += names.empty() ? vn_label(id) : " " + vn_label(id);
        }
        log("ContaminationExchange", job_label(jid), "infected={}", names.empty() ? "-" : names);
        queue_.push(t + cfg_.base_interval, EventKind::ContaminationExchange, jid);
    }

    void on_sync_round(const SimEvent& e) {
        const Tick t = e.time;
        log("CheckpointRound", "-", "running={}", live_);
        for (auto& r : vns_) {
            if (!running(r, t) || r.crashed || r.node.state == NodeState::FailStop) continue;
            checkpoint(r, t, CheckpointStatus::Null);
        }
        if (t + cfg_.initial_ft_interval <= cfg_.horizon) {
            queue_.push(t + cfg_.initial_ft_interval, EventKind::CheckpointRound);
        }
    }

    void on_independent(const SimEvent& e) {
        VnRun& r = vn(e.target);
        if (!r.alive) return;
        const Tick t = e.time;
        if (!r.crashed && r.node.state != NodeState::FailStop) checkpoint(r, t, CheckpointStatus::Null);
        queue_.push(t + independent_gap(independent_rng_, cfg_.independent_mean_gap), EventKind::IndependentCheckpoint,
                    r.node.id);
    }

    void on_release(const SimEvent& e) {
        const Job& j = job(e.target);
        log("JobRelease", job_label(j.id), "tasks={}", j.tasks.size());
        for (TaskId tid : j.tasks) {
            task(tid).ready = e.time;
            task(tid).queued = true;
            dispatch_queue_.push_back(tid);
        }
        try_dispatch(e.time);
    }

    void finalize(Tick end);

    SimConfig cfg_;
    Application app_;
    RunOptions options_;
    Rng latency_rng_;
    Rng oracle_rng_;
    Rng prop_rng_;
    Rng independent_rng_;
    Rng placement_rng_;

    std::vector<Server> servers_;
    std::vector<ServerId> mesf_order_;
    std::vector<VnRun> vns_;
    std::vector<TaskRun> tasks_;
    std::vector<JobRun> jobs_;
    std::vector<PendingFault> faults_;
    std::deque<TaskId> dispatch_queue_;
    EventQueue queue_;
    CheckpointLedger ledger_;
    MetricsReport report_;
    std::vector<std::string> log_;

    Tick now_ = 0;
    std::uint64_t seq_ = 0;
    std::string_view kind_label_ = "MonitorRound";
    int live_ = 0;
    Tick rollback_lost_ = 0;
    std::int64_t completed_tasks_ = 0;
    std::vector<double> over_sla_;
    double sla_ratio_sum_ = 0.0;
};

ScenarioResult Simulation::run() {
    for (const auto& s : servers_) {
        log("ServerUp", server_label(s.id), "capacity={} mean={:.4f} sigma={:.4f}", s.capacity, s.latency_mean,
            s.latency_sigma);
    }
    for (const auto& j : app_.jobs) queue_.push(j.release_time, EventKind::JobRelease, j.id);
    for (std::size_t i = 0; i < faults_.size(); ++i) {
        queue_.push(faults_[i].spec.time, EventKind::FaultInjection, static_cast<std::int32_t>(i));
    }
    if (cfg_.checkpoint_policy == CheckpointPolicy::Synchronous && cfg_.initial_ft_interval <= cfg_.horizon) {
        queue_.push(cfg_.initial_ft_interval, EventKind::CheckpointRound);
    }

    const auto total_tasks = static_cast<std::int64_t>(app_.tasks.size());
    while (!queue_.empty() && queue_.peek()->time <= cfg_.horizon && completed_tasks_ < total_tasks) {
        const SimEvent e = queue_.advance();
        now_ = e.time;
        seq_ = e.seq;
        switch (e.kind) {
            case EventKind::JobRelease: on_release(e); break;
            case EventKind::MonitorRound: on_monitor(e); break;
            case EventKind::TaskComplete: on_complete(e); break;
            case EventKind::FaultInjection: on_fault(e); break;
            case EventKind::ContaminationExchange: on_exchange(e); break;
            case EventKind::CheckpointRound: on_sync_round(e); break;
            case EventKind::IndependentCheckpoint: on_independent(e); break;
            case EventKind::MigrationComplete: log("MigrationComplete", job_label(e.target), "-"); break;
            case EventKind::HorizonEnd: break;
        }
    }
    const Tick end = completed_tasks_ == total_tasks ? queue_.clock() : cfg_.horizon;
    now_ = end;
    seq_ = queue_.next_seq();
    log("HorizonEnd", "-", "end={} completed={}", end, completed_tasks_);
    finalize(end);

    ScenarioResult result;
    result.report = std::move(report_);
    result.checkpoints = std::move(ledger_);
    result.event_log = std::move(log_);
    result.servers = servers_;
    for (const auto& r : vns_) {
        result.vns.push_back({r.node.id, *r.node.task, r.node.host, r.activity.start(), r.end});
    }
    return result;
}

void Simulation::finalize(Tick end) {
    for (auto& r : vns_) {
        if (!r.alive) continue;
        sync(r, end);
        r.activity.stop(std::max(end, r.activity.start()));
        r.end = std::max(end, r.activity.start());
    }

    std::vector<Tick> host_active(servers_.size(), 0);
    Tick worked = 0;
    Tick dead = 0;
    for (const auto& r : vns_) {
        const auto& tot = r.activity.totals();
        worked += tot.worked;
        dead += tot.dead;
        report_.pause_time += tot.paused;
        report_.restart_time += tot.restarting;
        report_.active_vn_time += r.end - r.activity.start();
        host_active[static_cast<std::size_t>(r.node.host)] += r.end - r.activity.start();
    }
    report_.lost_work = rollback_lost_ + dead;
    report_.useful_work = worked - rollback_lost_;
    report_.end_time = end;

    report_.scenario_id = scenario_id(cfg_);
    report_.seed = cfg_.seed;
    report_.scheduler = std::string(to_string(cfg_.scheduler));
    report_.checkpoint_policy = std::string(to_string(cfg_.checkpoint_policy));
    report_.host_count = cfg_.server_count;
    report_.vn_count = cfg_.vn_count;
    report_.completed_migrations = completed_tasks_;
    report_.failed_workloads =
        static_cast<std::int64_t>(app_.tasks.size()) - completed_tasks_ + report_.corrupted_completions;

    const double total = static_cast<double>(report_.useful_work + report_.lost_work);
    report_.sla_degradation_migration = total > 0 ? 100.0 * static_cast<double>(report_.lost_work) / total : 0.0;
    double frac_sum = 0.0;
    int hosts = 0;
    for (std::size_t s = 0; s < servers_.size(); ++s) {
        if (host_active[s] == 0) continue;
        frac_sum += std::min(1.0, over_sla_[s] / static_cast<double>(host_active[s]));
        ++hosts;
    }
    report_.sla_time_per_active_host = hosts > 0 ? 100.0 * frac_sum / hosts : 0.0;
    report_.overall_sla_violation = report_.sla_degradation_migration * report_.sla_time_per_active_host / 100.0;
    report_.average_sla_violation =
        completed_tasks_ > 0 ? 100.0 * sla_ratio_sum_ / static_cast<double>(completed_tasks_) : 0.0;
}

}  // namespace

ScenarioResult run_scenario(const SimConfig& cfg, const RunOptions& options) {
    const SimConfig valid = validate_config(cfg);
    return Simulation(valid, build_workload(valid), options).run();
}

ScenarioResult run_scenario(const SimConfig& cfg, const Application& workload, const RunOptions& options) {
    const SimConfig valid = validate_config(cfg);
    if (workload.tasks.empty() || workload.jobs.empty()) throw ConfigError("workload must have tasks and jobs");
    return Simulation(valid, workload, options).run();
}

ScenarioResult run_scenario(const SimConfig& cfg, const Application& workload, SchedulerPolicy scheduler,
                            CheckpointPolicy checkpoint, const RunOptions& options) {
    SimConfig c = cfg;
    c.scheduler = scheduler;
    c.checkpoint_policy = checkpoint;
    return run_scenario(c, workload, options);
}

}  // namespace bftsim
