#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace bftsim::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kConfig = 2;
inline constexpr int kRuntime = 3;

struct ScenarioArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;  // empty: stdout
    std::string format = "json";
};

struct RunArgs : ScenarioArgs {
    std::optional<std::string> scheduler;
    std::optional<std::string> checkpoint;
    std::string event_log;
    std::string ledger;
};

struct CompareArgs : ScenarioArgs {
    std::vector<std::string> combos;       // "wsss+tcc"
    std::vector<std::string> schedulers;   // crossed with checkpoints when combos is empty
    std::vector<std::string> checkpoints;
};

int cmd_run(const RunArgs& args, std::ostream& out, std::ostream& err);
int cmd_compare(const CompareArgs& args, std::ostream& out, std::ostream& err);
int cmd_fsm_trace(const std::string& path, std::ostream& out, std::ostream& err);
int cmd_rank(const std::string& event_log, const std::string& out_path, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to one command.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bftsim::cli
