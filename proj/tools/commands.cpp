#include "commands.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "bftsim/config.hpp"
#include "bftsim/detection.hpp"
#include "bftsim/engine.hpp"
#include "bftsim/event_log.hpp"
#include "bftsim/metrics.hpp"
#include "bftsim/wsss.hpp"

namespace bftsim::cli {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Combo {
    SchedulerPolicy scheduler;
    CheckpointPolicy checkpoint;
};

std::string read_file(const std::string& path, const char* what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(fmt::format("cannot read {} '{}'", what, path));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& data) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(fmt::format("cannot write '{}'", path));
    f << data;
    f.close();
    if (!f) throw Error(fmt::format("write to '{}' failed", path));
}

void write_or_print(const std::string& path, const std::string& data, std::ostream& out) {
    if (path.empty()) {
        out << data;
    } else {
        write_file(path, data);
    }
}

ReportFormat format_arg(const std::string& text) {
    try {
        return parse_report_format(text);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
}

template <typename Fn>
auto policy_arg(Fn parse, const std::string& text) {
    try {
        return parse(text);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
}

SimConfig load(const ScenarioArgs& args) {
    SimConfig cfg = validate_config(load_config_file(args.config));
    if (args.seed) cfg.seed = *args.seed;
    return cfg;
}

std::vector<Combo> combos_of(const CompareArgs& args) {
    std::vector<Combo> out;
    for (const auto& c : args.combos) {
        const auto plus = c.find('+');
        if (plus == std::string::npos) throw UsageError(fmt::format("combination '{}' is not <scheduler>+<checkpoint>", c));
        out.push_back({policy_arg(parse_scheduler, c.substr(0, plus)),
                       policy_arg(parse_checkpoint_policy, c.substr(plus + 1))});
    }
    if (args.combos.empty()) {
        for (const auto& s : args.schedulers) {
            for (const auto& k : args.checkpoints) {
                out.push_back({policy_arg(parse_scheduler, s), policy_arg(parse_checkpoint_policy, k)});
            }
        }
    }
    if (out.size() < 2) throw UsageError("compare: need >= 2 policy combinations");
    return out;
}

template <typename Fn>
int guarded(std::ostream& err, Fn body) {
    try {
        return body();
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kRuntime;
    }
}

}  // namespace

int cmd_run(const RunArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const ReportFormat format = format_arg(args.format);
        SimConfig cfg = load(args);
        if (args.scheduler) cfg.scheduler = policy_arg(parse_scheduler, *args.scheduler);
        if (args.checkpoint) cfg.checkpoint_policy = policy_arg(parse_checkpoint_policy, *args.checkpoint);
        RunOptions options;
        options.event_log = !args.event_log.empty();
        const ScenarioResult result = run_scenario(cfg, options);
        write_or_print(args.out, emit(result.report, format), out);
        if (!args.event_log.empty()) write_file(args.event_log, result.event_log_text());
        if (!args.ledger.empty()) write_file(args.ledger, result.checkpoints.csv());
        if (!args.out.empty()) {
            out << fmt::format("{}+{} seed {}: {} of {} workloads completed, {} failed, report written to {}\n",
                               result.report.scheduler, result.report.checkpoint_policy, cfg.seed,
                               result.report.completed_migrations, cfg.task_count, result.report.failed_workloads,
                               args.out);
        }
        return kOk;
    });
}

int cmd_compare(const CompareArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const ReportFormat format = format_arg(args.format);
        const auto combos = combos_of(args);
        const SimConfig base = load(args);
        const Application workload = build_workload(base);
        RunOptions options;
        options.event_log = false;
        std::vector<MetricsReport> reports;
        for (const auto& c : combos) {
            reports.push_back(run_scenario(base, workload, c.scheduler, c.checkpoint, options).report);
        }

        std::string body;
        std::string text;
        nlohmann::ordered_json tables = nlohmann::ordered_json::array();
        for (std::size_t i = 1; i < reports.size(); ++i) {
            const ComparisonTable table = summarize(reports[0], reports[i]);
            text += fmt::format("{} vs {}\n{}\n", table.label_a, table.label_b, table.to_text());
            if (format == ReportFormat::Csv) {
                if (i > 1) body += "\n";
                body += table.to_csv();
            } else {
                nlohmann::ordered_json j;
                j["baseline"] = table.label_a;
                j["candidate"] = table.label_b;
                j["rows"] = nlohmann::ordered_json::array();
                for (const auto& row : table.rows) {
                    nlohmann::ordered_json r;
                    r["metric"] = row.metric;
                    r["a"] = row.a ? nlohmann::ordered_json(*row.a) : nlohmann::ordered_json(nullptr);
                    r["b"] = row.b ? nlohmann::ordered_json(*row.b) : nlohmann::ordered_json(nullptr);
                    r["delta"] = row.a ? nlohmann::ordered_json(row.delta) : nlohmann::ordered_json(nullptr);
                    r["favors"] = std::string(to_string(row.favors));
                    j["rows"].push_back(r);
                }
                tables.push_back(j);
            }
        }
        if (format == ReportFormat::Json) body = tables.dump(2) + "\n";
        write_or_print(args.out, body, out);
        if (!args.out.empty()) out << text;
        return kOk;
    });
}

int cmd_fsm_trace(const std::string& path, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const std::string text = read_file(path, "fsm trace");
        std::vector<FsmTraceStep> steps;
        try {
            steps = parse_fsm_trace(text);
        } catch (const Error& e) {
            throw ConfigError(fmt::format("{}: {}", path, e.what()));
        }
        const FsmTraceVerdict verdict = check_fsm_trace(steps);
        if (verdict.steps == 0) err << "warning: 0 steps\n";
        out << verdict.message << "\n";
        return verdict.conformant ? kOk : kRuntime;
    });
}

int cmd_rank(const std::string& event_log, const std::string& out_path, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const std::string text = read_file(event_log, "event log");
        std::vector<LogRecord> records;
        try {
            records = parse_event_log(text);
        } catch (const Error& e) {
            throw ConfigError(fmt::format("{}: {}", event_log, e.what()));
        }
        const RebuiltRanking rebuilt = rank_from_event_log(records);
        if (!rebuilt.had_failures) err << "warning: no failure events in the log; ranking is empty\n";
        write_or_print(out_path, ranking_csv(rebuilt.ranking), out);
        return kOk;
    });
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Byzantine-fault scheduling and checkpointing simulator"};
    app.require_subcommand(1, 1);

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Run one scenario and write its report");
    run_cmd->add_option("--config", run.config, "Scenario file")->required();
    run_cmd->add_option("--seed", run.seed, "Seed override");
    run_cmd->add_option("--out", run.out, "Report path (default: stdout)");
    run_cmd->add_option("--format", run.format, "csv or json")->capture_default_str();
    run_cmd->add_option("--scheduler", run.scheduler, "wsss, mesf or random");
    run_cmd->add_option("--checkpoint", run.checkpoint, "tcc, sync or independent");
    run_cmd->add_option("--event-log", run.event_log, "Write the event log here");
    run_cmd->add_option("--ledger", run.ledger, "Write the checkpoint ledger CSV here");

    CompareArgs cmp;
    cmp.format = "csv";
    auto* cmp_cmd = app.add_subcommand("compare", "Run policy combinations on one workload and compare them");
    cmp_cmd->add_option("--config", cmp.config, "Scenario file")->required();
    cmp_cmd->add_option("--seed", cmp.seed, "Seed override");
    cmp_cmd->add_option("--out", cmp.out, "Comparison path (default: stdout)");
    cmp_cmd->add_option("--format", cmp.format, "csv or json")->capture_default_str();
    cmp_cmd->add_option("--combo", cmp.combos, "scheduler+checkpoint, repeatable; the first is the baseline");
    cmp_cmd->add_option("--scheduler", cmp.schedulers, "Schedulers to cross with --checkpoint")->delimiter(',');
    cmp_cmd->add_option("--checkpoint", cmp.checkpoints, "Checkpoint policies to cross with --scheduler")->delimiter(',');

    std::string trace_path;
    auto* trace_cmd = app.add_subcommand("fsm-trace", "Replay an FSM trace and report the first divergence");
    trace_cmd->add_option("trace", trace_path, "Trace file")->required();

    std::string log_path;
    std::string rank_out;
    auto* rank_cmd = app.add_subcommand("rank", "Rebuild the WSSS server ranking from an event log");
    rank_cmd->add_option("--event-log", log_path, "Event log from a previous run")->required();
    rank_cmd->add_option("--out", rank_out, "Ranking CSV path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    if (*run_cmd) return cmd_run(run, out, err);
    if (*cmp_cmd) return cmd_compare(cmp, out, err);
    if (*trace_cmd) return cmd_fsm_trace(trace_path, out, err);
    return cmd_rank(log_path, rank_out, out, err);
}

}  // namespace bftsim::cli
