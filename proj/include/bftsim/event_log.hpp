#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "bftsim/types.hpp"
#include "bftsim/wsss.hpp"

namespace bftsim {

inline constexpr std::string_view kEventLogHeader = "time,seq,kind,target,detail";

/// One line of the event log. `detail` never contains a comma.
struct LogRecord {
    Tick time = 0;
    std::uint64_t seq = 0;
    std::string kind;
    std::string target;
    std::string detail;

    bool operator==(const LogRecord&) const = default;
};

std::string format_log_record(const LogRecord& r);

/// Parses a log with or without its header line. Blank lines are skipped.
/// Throws Error("line N: ...") on a corrupt line.
std::vector<LogRecord> parse_event_log(std::string_view text);

struct RebuiltRanking {
    ServerRanking ranking;
    bool had_failures = false;
};

/// WSSS counters recounted from `Failure` lines (target `s<id>`, detail W or
/// Y). Servers announced by `ServerUp` lines are ranked even with zero
/// failures. When the log holds no failure at all the ranking is empty.
RebuiltRanking rank_from_event_log(const std::vector<LogRecord>& records);

}  // namespace bftsim
