#include "bftsim/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "bftsim/wsss.hpp"

namespace bftsim {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        std::size_t j = i;
        while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

template <typename T>
T parse_integer(std::string_view key, std::string_view value) {
    T out{};
    const auto* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (value.empty() || ec != std::errc{} || ptr != end) {
        throw ConfigError(fmt::format("{}: expected an integer, got '{}'", key, value));
    }
    return out;
}

double parse_double(std::string_view key, std::string_view value) {
    std::string copy(value);
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(copy, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (copy.empty() || used != copy.size()) {
        throw ConfigError(fmt::format("{}: expected a number, got '{}'", key, value));
    }
    return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
    std::string v(value);
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(fmt::format("{}: expected a boolean, got '{}'", key, value));
}

template <typename E, typename Parser>
E parse_enum(std::string_view key, std::string_view value, Parser parser) {
    try {
        return parser(value);
    } catch (const Error& e) {
        throw ConfigError(fmt::format("{}: {}", key, e.what()));
    }
}

std::string format_double(double v) { return fmt::format("{}", v); }

using Setter = std::function<void(SimConfig&, std::string_view key, std::string_view value)>;
using Getter = std::function<std::string(const SimConfig&)>;

struct Field {
    Setter set;
    Getter get;
};

template <typename T>
Field int_field(T SimConfig::*member) {
    return {[member](SimConfig& c, std::string_view k, std::string_view v) {
                c.*member = parse_integer<T>(k, v);
            },
            [member](const SimConfig& c) { return fmt::format("{}", c.*member); }};
}

Field double_field(double SimConfig::*member) {
    return {[member](SimConfig& c, std::string_view k, std::string_view v) {
                c.*member = parse_double(k, v);
            },
            [member](const SimConfig& c) { return format_double(c.*member); }};
}

// Keys in canonical order. `fault` is handled separately because it repeats.
const std::vector<std::pair<std::string_view, Field>>& fields() {
    static const std::vector<std::pair<std::string_view, Field>> table = {
        {"base_interval", int_field(&SimConfig::base_interval)},
        {"initial_ft_interval", int_field(&SimConfig::initial_ft_interval)},
        {"interval_growth",
         {[](SimConfig& c, std::string_view k, std::string_view v) {
              c.interval_growth = parse_enum<IntervalGrowth>(k, v, parse_interval_growth);
          },
          [](const SimConfig& c) { return std::string(to_string(c.interval_growth)); }}},
        {"suspicion_threshold", int_field(&SimConfig::suspicion_threshold)},
        {"migration_threshold", int_field(&SimConfig::migration_threshold)},
        {"monitor_cost", int_field(&SimConfig::monitor_cost)},
        {"sla_bound", double_field(&SimConfig::sla_bound)},
        {"delay_threshold_low", double_field(&SimConfig::delay_threshold_low)},
        {"delay_threshold_normal", double_field(&SimConfig::delay_threshold_normal)},
        {"delay_threshold_high", double_field(&SimConfig::delay_threshold_high)},
        {"p_detect", double_field(&SimConfig::p_detect)},
        {"p_prop", double_field(&SimConfig::p_prop)},
        {"high_delay_fallback",
         {[](SimConfig& c, std::string_view k, std::string_view v) {
              c.high_delay_fallback = parse_bool(k, v);
          },
          [](const SimConfig& c) { return std::string(c.high_delay_fallback ? "true" : "false"); }}},
        {"checkpoint_write_cost", int_field(&SimConfig::checkpoint_write_cost)},
        {"checkpoint_size", double_field(&SimConfig::checkpoint_size)},
        {"restart_cost", int_field(&SimConfig::restart_cost)},
        {"independent_mean_gap", double_field(&SimConfig::independent_mean_gap)},
        {"scheduler",
         {[](SimConfig& c, std::string_view k, std::string_view v) {
              c.scheduler = parse_enum<SchedulerPolicy>(k, v, parse_scheduler);
          },
          [](const SimConfig& c) { return std::string(to_string(c.scheduler)); }}},
        {"checkpoint_policy",
         {[](SimConfig& c, std::string_view k, std::string_view v) {
              c.checkpoint_policy = parse_enum<CheckpointPolicy>(k, v, parse_checkpoint_policy);
          },
          [](const SimConfig& c) { return std::string(to_string(c.checkpoint_policy)); }}},
        {"mesf_eval_cost", double_field(&SimConfig::mesf_eval_cost)},
        {"wsss_lookup_cost", double_field(&SimConfig::wsss_lookup_cost)},
        {"host_scan_cost", double_field(&SimConfig::host_scan_cost)},
        {"server_count", int_field(&SimConfig::server_count)},
        {"server_capacity", int_field(&SimConfig::server_capacity)},
        {"vn_count", int_field(&SimConfig::vn_count)},
        {"latency_mean_min", double_field(&SimConfig::latency_mean_min)},
        {"latency_mean_max", double_field(&SimConfig::latency_mean_max)},
        {"latency_sigma_min", double_field(&SimConfig::latency_sigma_min)},
        {"latency_sigma_max", double_field(&SimConfig::latency_sigma_max)},
        {"task_count", int_field(&SimConfig::task_count)},
        {"job_count", int_field(&SimConfig::job_count)},
        {"demand_min", int_field(&SimConfig::demand_min)},
        {"demand_max", int_field(&SimConfig::demand_max)},
        {"job_interarrival", int_field(&SimConfig::job_interarrival)},
        {"trace_path",
         {[](SimConfig& c, std::string_view, std::string_view v) { c.trace_path = std::string(v); },
          [](const SimConfig& c) { return c.trace_path; }}},
        {"trace_period", int_field(&SimConfig::trace_period)},
        {"random_byzantine", int_field(&SimConfig::random_byzantine)},
        {"random_crash", int_field(&SimConfig::random_crash)},
        {"random_delay_spike", int_field(&SimConfig::random_delay_spike)},
        {"spike_magnitude", double_field(&SimConfig::spike_magnitude)},
        {"fault_window_start", int_field(&SimConfig::fault_window_start)},
        {"fault_window_end", int_field(&SimConfig::fault_window_end)},
        {"seed", int_field(&SimConfig::seed)},
        {"horizon", int_field(&SimConfig::horizon)},
    };
    return table;
}

const Field* find_field(std::string_view key) {
    for (const auto& [name, field] : fields()) {
        if (name == key) return &field;
    }
    return nullptr;
}

void require(bool ok, std::string_view key, std::string_view message) {
    if (!ok) throw ConfigError(fmt::format("{} {}", key, message));
}

void check_probability(double p, std::string_view key) {
    require(p >= 0.0 && p <= 1.0, key, "out of range [0, 1]");
}

}  // namespace

std::string_view to_string(FaultKind k) {
    switch (k) {
        case FaultKind::Byzantine: return "byzantine";
        case FaultKind::Crash: return "crash";
        case FaultKind::DelaySpike: return "delay_spike";
    }
    return "?";
}

FaultKind parse_fault_kind(std::string_view text) {
    std::string v;
    for (char ch : text) {
        auto c = static_cast<unsigned char>(ch);
        if (std::isalnum(c)) v.push_back(static_cast<char>(std::tolower(c)));
    }
    if (v == "byzantine") return FaultKind::Byzantine;
    if (v == "crash") return FaultKind::Crash;
    if (v == "delayspike" || v == "spike") return FaultKind::DelaySpike;
    throw ConfigError(fmt::format("fault: unknown fault kind '{}'", text));
}

FaultSpec parse_fault_spec(std::string_view text) {
    const auto parts = split_ws(text);
    if (parts.size() < 3 || parts.size() > 5) {
        throw ConfigError(
            fmt::format("fault: expected '<kind> <target> <time> [magnitude] [duration]', got '{}'",
                        text));
    }
    FaultSpec spec;
    spec.kind = parse_fault_kind(parts[0]);
    const std::string_view target = parts[1];
    try {
        if (target == "random") {
            spec.target = {FaultTarget::Kind::Random, -1};
        } else if (!target.empty() && (target.front() == 'v' || target.front() == 'V')) {
            spec.target = {FaultTarget::Kind::Vn, parse_label(target, 'v')};
        } else if (!target.empty() && (target.front() == 't' || target.front() == 'T')) {
            spec.target = {FaultTarget::Kind::Task, parse_label(target, 't')};
        } else {
            throw Error("bad target");
        }
    } catch (const Error&) {
        throw ConfigError(
            fmt::format("fault: target must be 'random', v<id> or t<id>, got '{}'", target));
    }
    spec.time = parse_integer<Tick>("fault", parts[2]);
    if (parts.size() > 3) spec.magnitude = parse_double("fault", parts[3]);
    if (parts.size() > 4) spec.duration = parse_integer<Tick>("fault", parts[4]);
    return spec;
}

std::string format_fault_spec(const FaultSpec& spec) {
    std::string target;
    switch (spec.target.kind) {
        case FaultTarget::Kind::Random: target = "random"; break;
        case FaultTarget::Kind::Vn: target = vn_label(spec.target.id); break;
        case FaultTarget::Kind::Task: target = task_label(spec.target.id); break;
    }
    return fmt::format("{} {} {} {} {}", to_string(spec.kind), target, spec.time,
                       format_double(spec.magnitude), spec.duration);
}

RawConfig parse_config_text(std::string_view text) {
    RawConfig raw;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) {
            if (nl == text.size()) break;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(fmt::format("line {}: expected 'key = value', got '{}'", line_no, line));
        }
        raw.emplace_back(std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))));
        if (nl == text.size()) break;
    }
    return raw;
}

RawConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot read config file '{}'", path));
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

SimConfig validate_config(const RawConfig& raw) {
    SimConfig cfg;
    bool faults_reset = false;
    for (const auto& [key, value] : raw) {
        if (key == "fault") {
            if (!faults_reset) {
                cfg.faults.clear();
                faults_reset = true;
            }
            cfg.faults.push_back(parse_fault_spec(value));
            continue;
        }
        const Field* field = find_field(key);
        if (field == nullptr) throw ConfigError(fmt::format("{}: unknown configuration key", key));
        field->set(cfg, key, value);
    }
    return validate_config(cfg);
}

SimConfig validate_config(const SimConfig& in) {
    SimConfig cfg = in;
    require(cfg.base_interval > 0, "base_interval", "must be positive");
    require(cfg.initial_ft_interval > 0, "initial_ft_interval", "must be positive");
    require(cfg.suspicion_threshold >= 1, "suspicion_threshold", "must be at least 1");
    require(cfg.migration_threshold >= 1, "migration_threshold", "must be at least 1");
    require(cfg.monitor_cost >= 0, "monitor_cost", "must not be negative");
    require(cfg.sla_bound > 0.0, "sla_bound", "must be positive");
    require(cfg.delay_threshold_low > 0.0, "delay_threshold_low", "must be positive");
    require(cfg.delay_threshold_normal > cfg.delay_threshold_low, "delay_threshold_normal",
            "must be greater than delay_threshold_low");
    require(cfg.delay_threshold_high > cfg.delay_threshold_normal, "delay_threshold_high",
            "must be greater than delay_threshold_normal");
    check_probability(cfg.p_detect, "p_detect");
    check_probability(cfg.p_prop, "p_prop");
    require(cfg.checkpoint_write_cost >= 0, "checkpoint_write_cost", "must not be negative");
    require(cfg.checkpoint_size >= 0.0, "checkpoint_size", "must not be negative");
    require(cfg.restart_cost >= 0, "restart_cost", "must not be negative");
    require(cfg.independent_mean_gap > 0.0, "independent_mean_gap", "must be positive");
    require(cfg.mesf_eval_cost >= 0.0, "mesf_eval_cost", "must not be negative");
    require(cfg.wsss_lookup_cost >= 0.0, "wsss_lookup_cost", "must not be negative");
    require(cfg.host_scan_cost >= 0.0, "host_scan_cost", "must not be negative");
    require(cfg.server_count >= 1, "server_count", "must be at least 1");
    require(cfg.server_capacity >= 1, "server_capacity", "must be at least 1");
    require(cfg.vn_count >= 1, "vn_count", "must be at least 1");
    const long long slots = static_cast<long long>(cfg.server_count) * cfg.server_capacity;
    if (slots < cfg.vn_count) {
        throw CapacityError(fmt::format("vn_count {} exceeds total server capacity {} (capacity shortfall {})",
                                        cfg.vn_count, slots, cfg.vn_count - slots),
                            static_cast<int>(cfg.vn_count - slots));
    }
    require(cfg.latency_mean_min >= 0.0, "latency_mean_min", "must not be negative");
    require(cfg.latency_mean_max >= cfg.latency_mean_min, "latency_mean_max",
            "must not be below latency_mean_min");
    require(cfg.latency_sigma_min >= 0.0, "latency_sigma_min", "must not be negative");
    require(cfg.latency_sigma_max >= cfg.latency_sigma_min, "latency_sigma_max",
            "must not be below latency_sigma_min");
    require(cfg.task_count >= 1, "task_count", "must be at least 1");
    require(cfg.job_count >= 1, "job_count", "must be at least 1");
    require(cfg.job_count <= cfg.task_count, "job_count", "must not exceed task_count");
    require(cfg.demand_min >= 1, "demand_min", "must be positive");
    require(cfg.demand_max >= cfg.demand_min, "demand_max", "must not be below demand_min");
    require(cfg.job_interarrival >= 0, "job_interarrival", "must not be negative");
    require(cfg.trace_period > 0, "trace_period", "must be positive");
    require(cfg.random_byzantine >= 0, "random_byzantine", "must not be negative");
    require(cfg.random_crash >= 0, "random_crash", "must not be negative");
    require(cfg.random_delay_spike >= 0, "random_delay_spike", "must not be negative");
    require(cfg.spike_magnitude >= 0.0, "spike_magnitude", "must not be negative");
    require(cfg.horizon > 0, "horizon", "must be positive");
    require(cfg.fault_window_start >= 0, "fault_window_start", "must not be negative");
    require(cfg.fault_window_end >= 0 && cfg.fault_window_end <= cfg.horizon, "fault_window_end",
            "must lie in [0, horizon]");
    const Tick window_end = cfg.fault_window_end == 0 ? cfg.horizon : cfg.fault_window_end;
    require(cfg.fault_window_start < window_end, "fault_window_start",
            "must be before the end of the fault window");
    for (const auto& f : cfg.faults) {
        require(f.time >= 0 && f.time < cfg.horizon, "fault", "injection time must lie in [0, horizon)");
        require(f.magnitude >= 0.0, "fault", "magnitude must not be negative");
        require(f.duration >= 0, "fault", "duration must not be negative");
    }
    return cfg;
}

RawConfig to_raw(const SimConfig& cfg) {
    RawConfig raw;
    for (const auto& [name, field] : fields()) raw.emplace_back(std::string(name), field.get(cfg));
    for (const auto& f : cfg.faults) raw.emplace_back("fault", format_fault_spec(f));
    return raw;
}

std::string scenario_id(const SimConfig& cfg) {
    // FNV-1a over the canonical form, policy tags excluded.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::string_view s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
    };
    for (const auto& [key, value] : to_raw(cfg)) {
        if (key == "scheduler" || key == "checkpoint_policy") continue;
        mix(key);
        mix("=");
        mix(value);
        mix("\n");
    }
    return fmt::format("{:016x}", h);
}

}  // namespace bftsim
