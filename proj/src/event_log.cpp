#include "bftsim/event_log.hpp"

#include <charconv>
#include <map>

#include <fmt/format.h>

namespace bftsim {

std::string format_log_record(const LogRecord& r) {
    return fmt::format("{},{},{},{},{}", r.time, r.seq, r.kind, r.target, r.detail);
}

namespace {

template <typename T>
bool parse_int(std::string_view s, T& out) {
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

std::vector<LogRecord> parse_event_log(std::string_view text) {
    std::vector<LogRecord> out;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line == kEventLogHeader) continue;

        std::string_view fields[5];
        std::size_t start = 0;
        for (int i = 0; i < 4; ++i) {
            const auto comma = line.find(',', start);
            if (comma == std::string_view::npos) {
                throw Error(fmt::format("line {}: expected 5 comma-separated fields", line_no));
            }
            fields[i] = line.substr(start, comma - start);
            start = comma + 1;
        }
        fields[4] = line.substr(start);

        LogRecord r;
        if (!parse_int(fields[0], r.time)) throw Error(fmt::format("line {}: bad time '{}'", line_no, fields[0]));
        if (!parse_int(fields[1], r.seq)) throw Error(fmt::format("line {}: bad sequence '{}'", line_no, fields[1]));
        if (fields[2].empty()) throw Error(fmt::format("line {}: empty event kind", line_no));
        r.kind = std::string(fields[2]);
        r.target = std::string(fields[3]);
        r.detail = std::string(fields[4]);
        out.push_back(std::move(r));
    }
    return out;
}

RebuiltRanking rank_from_event_log(const std::vector<LogRecord>& records) {
    std::map<ServerId, RankEntry> counters;
    RebuiltRanking out;
    for (const auto& r : records) {
        if (r.kind == "ServerUp") {
            const ServerId id = parse_label(r.target, 's');
            counters.try_emplace(id, RankEntry{id, 0, 0, 0});
        } else if (r.kind == "Failure") {
            const ServerId id = parse_label(r.target, 's');
            auto& e = counters.try_emplace(id, RankEntry{id, 0, 0, 0}).first->second;
            const FailureKind kind = parse_failure_kind(r.detail);
            ++e.failures;
            ++(kind == FailureKind::Erroneous ? e.w_count : e.y_count);
            out.had_failures = true;
        }
    }
    if (!out.had_failures) return out;
    std::vector<RankEntry> entries;
    for (const auto& [id, e] : counters) entries.push_back(e);
    out.ranking = rank_servers(std::move(entries));
    return out;
}

}  // namespace bftsim
