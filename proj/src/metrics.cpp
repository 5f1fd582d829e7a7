#include "bftsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <variant>

#include <fmt/format.h>

#include "json.hpp"

namespace bftsim {

using ordered_json = nlohmann::ordered_json;

void RunningStats::add(double x) {
    if (count_ == 0) {
        min_ = max_ = x;
    } else {
        min_ = std::min(min_, x);
        max_ = std::max(max_, x);
    }
    ++count_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (x - mean_);
}

void RunningStats::merge(const RunningStats& other) {
    if (other.count_ == 0) return;
    if (count_ == 0) {
        *this = other;
        return;
    }
    const double n_a = static_cast<double>(count_);
    const double n_b = static_cast<double>(other.count_);
    const double n = n_a + n_b;
    const double delta = other.mean_ - mean_;
    mean_ += delta * n_b / n;
    m2_ += other.m2_ + delta * delta * n_a * n_b / n;
    count_ += other.count_;
    min_ = std::min(min_, other.min_);
    max_ = std::max(max_, other.max_);
}

double RunningStats::variance() const {
    return count_ < 2 ? 0.0 : std::max(0.0, m2_ / static_cast<double>(count_ - 1));
}

double RunningStats::stddev() const { return std::sqrt(variance()); }

RunningStats RunningStats::from_summary(std::int64_t count, double mean, double stddev, double min,
                                        double max) {
    RunningStats s;
    s.count_ = count;
    s.mean_ = mean;
    s.m2_ = count < 2 ? 0.0 : stddev * stddev * static_cast<double>(count - 1);
    s.min_ = min;
    s.max_ = max;
    return s;
}

Range occurable_range(double mean, double sigma) {
    if (sigma < 0.0) throw Error("occurable_range: sigma must not be negative");
    return {mean - sigma, mean + sigma};
}

std::vector<std::pair<std::string, RunningStats>> MetricsReport::default_samples() {
    std::vector<std::pair<std::string, RunningStats>> out;
    for (auto id : kSampleMetricIds) out.emplace_back(std::string(id), RunningStats{});
    return out;
}

const RunningStats& MetricsReport::sample(std::string_view id) const {
    for (const auto& [name, stats] : samples) {
        if (name == id) return stats;
    }
    throw Error(fmt::format("unknown metric id '{}'", id));
}

RunningStats& MetricsReport::sample(std::string_view id) {
    return const_cast<RunningStats&>(std::as_const(*this).sample(id));
}

void record(MetricsReport& report, std::string_view metric_id, double sample) {
    RunningStats& stats = report.sample(metric_id);
    if (!(sample >= 0.0)) {
        throw Error(fmt::format("metric '{}': sample {} must be a non-negative duration", metric_id, sample));
    }
    stats.add(sample);
}

namespace {

using IntField = std::int64_t MetricsReport::*;
using DoubleField = double MetricsReport::*;
using AnyField = std::variant<IntField, DoubleField>;

const std::vector<std::pair<std::string_view, AnyField>>& scalar_table() {
    static const std::vector<std::pair<std::string_view, AnyField>> table = {
        {"host_count", &MetricsReport::host_count},
        {"vn_count", &MetricsReport::vn_count},
        {"completed_migrations", &MetricsReport::completed_migrations},
        {"failed_workloads", &MetricsReport::failed_workloads},
        {"sla_degradation_migration", &MetricsReport::sla_degradation_migration},
        {"sla_time_per_active_host", &MetricsReport::sla_time_per_active_host},
        {"overall_sla_violation", &MetricsReport::overall_sla_violation},
        {"average_sla_violation", &MetricsReport::average_sla_violation},
        {"checkpoint_count", &MetricsReport::checkpoint_count},
        {"rollback_count", &MetricsReport::rollback_count},
        {"lost_work", &MetricsReport::lost_work},
        {"job_migrations", &MetricsReport::job_migrations},
        {"restarts", &MetricsReport::restarts},
        {"replacements", &MetricsReport::replacements},
        {"faults_injected", &MetricsReport::faults_injected},
        {"contaminated_vns", &MetricsReport::contaminated_vns},
        {"corrupted_completions", &MetricsReport::corrupted_completions},
        {"jobs_completed", &MetricsReport::jobs_completed},
        {"sla_violations", &MetricsReport::sla_violations},
        {"monitor_rounds", &MetricsReport::monitor_rounds},
        {"useful_work", &MetricsReport::useful_work},
        {"pause_time", &MetricsReport::pause_time},
        {"restart_time", &MetricsReport::restart_time},
        {"active_vn_time", &MetricsReport::active_vn_time},
        {"end_time", &MetricsReport::end_time},
    };
    return table;
}

std::string number(double v) { return fmt::format("{}", v); }

std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

double to_double(std::string_view s) {
    std::string copy(s);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(copy, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (copy.empty() || used != copy.size()) throw Error(fmt::format("malformed number '{}'", s));
    return v;
}

void set_scalar(MetricsReport& r, const AnyField& field, double value) {
    if (std::holds_alternative<IntField>(field)) {
        r.*std::get<IntField>(field) = static_cast<std::int64_t>(std::llround(value));
    } else {
        r.*std::get<DoubleField>(field) = value;
    }
}

double get_scalar(const MetricsReport& r, const AnyField& field) {
    if (std::holds_alternative<IntField>(field)) return static_cast<double>(r.*std::get<IntField>(field));
    return r.*std::get<DoubleField>(field);
}

constexpr std::string_view kStatKeys[] = {"count", "mean", "stddev", "low", "high", "min", "max"};

std::vector<double> stat_values(const RunningStats& s) {
    const Range range = occurable_range(s.mean(), s.stddev());
    return {static_cast<double>(s.count()), s.mean(), s.stddev(), range.low, range.high, s.min(), s.max()};
}

}  // namespace

std::vector<std::pair<std::string, double>> scalar_fields(const MetricsReport& report) {
    std::vector<std::pair<std::string, double>> out;
    for (const auto& [name, field] : scalar_table()) out.emplace_back(std::string(name), get_scalar(report, field));
    return out;
}

ReportFormat parse_report_format(std::string_view text) {
    if (text == "csv") return ReportFormat::Csv;
    if (text == "json") return ReportFormat::Json;
    throw Error(fmt::format("unknown report format '{}' (expected csv or json)", text));
}

std::string emit(const MetricsReport& report, std::string_view format) {
    return emit(report, parse_report_format(format));
}

std::string emit(const MetricsReport& report, ReportFormat format) {
    if (format == ReportFormat::Json) {
        ordered_json j;
        j["scenario_id"] = report.scenario_id;
        j["seed"] = report.seed;
        j["scheduler"] = report.scheduler;
        j["checkpoint_policy"] = report.checkpoint_policy;
        for (const auto& [name, field] : scalar_table()) {
            if (std::holds_alternative<IntField>(field)) {
                j[std::string(name)] = report.*std::get<IntField>(field);
            } else {
                j[std::string(name)] = report.*std::get<DoubleField>(field);
            }
        }
        for (const auto& [name, stats] : report.samples) {
            ordered_json obj;
            const auto values = stat_values(stats);
            obj["count"] = stats.count();
            for (std::size_t i = 1; i < std::size(kStatKeys); ++i) obj[std::string(kStatKeys[i])] = values[i];
            j[name] = obj;
        }
        return j.dump(2) + "\n";
    }

    std::vector<std::string> header{"scenario_id", "seed", "scheduler", "checkpoint_policy"};
    std::vector<std::string> values{report.scenario_id, fmt::format("{}", report.seed), report.scheduler,
                                    report.checkpoint_policy};
    for (const auto& [name, field] : scalar_table()) {
        header.emplace_back(name);
        values.push_back(std::holds_alternative<IntField>(field)
                             ? fmt::format("{}", report.*std::get<IntField>(field))
                             : number(report.*std::get<DoubleField>(field)));
    }
    for (const auto& [name, stats] : report.samples) {
        const auto stat = stat_values(stats);
        for (std::size_t i = 0; i < std::size(kStatKeys); ++i) {
            header.push_back(fmt::format("{}.{}", name, kStatKeys[i]));
            values.push_back(i == 0 ? fmt::format("{}", stats.count()) : number(stat[i]));
        }
    }
    return fmt::format("{}\n{}\n", fmt::join(header, ","), fmt::join(values, ","));
}

MetricsReport parse_report(std::string_view text, ReportFormat format) {
    MetricsReport r;
    if (format == ReportFormat::Json) {
        ordered_json j;
        try {
            j = ordered_json::parse(text);
            r.scenario_id = j.at("scenario_id").get<std::string>();
            r.seed = j.at("seed").get<std::uint64_t>();
            r.scheduler = j.at("scheduler").get<std::string>();
            r.checkpoint_policy = j.at("checkpoint_policy").get<std::string>();
            for (const auto& [name, field] : scalar_table()) {
                set_scalar(r, field, j.at(std::string(name)).get<double>());
            }
            for (auto& [name, stats] : r.samples) {
                const auto& obj = j.at(name);
                stats = RunningStats::from_summary(obj.at("count").get<std::int64_t>(), obj.at("mean").get<double>(),
                                                   obj.at("stddev").get<double>(), obj.at("min").get<double>(),
                                                   obj.at("max").get<double>());
            }
        } catch (const nlohmann::json::exception& e) {
            throw Error(fmt::format("malformed JSON report: {}", e.what()));
        }
        return r;
    }

    const auto nl = text.find('\n');
    if (nl == std::string_view::npos) throw Error("malformed CSV report: missing value row");
    std::string_view value_line = text.substr(nl + 1);
    while (!value_line.empty() && (value_line.back() == '\n' || value_line.back() == '\r')) value_line.remove_suffix(1);
    const auto header = split_csv_line(text.substr(0, nl));
    const auto values = split_csv_line(value_line);
    if (header.size() != values.size()) throw Error("malformed CSV report: header/value column mismatch");
    auto find = [&](std::string_view key) -> std::string_view {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == key) return values[i];
        }
        throw Error(fmt::format("malformed CSV report: missing column '{}'", key));
    };
    r.scenario_id = std::string(find("scenario_id"));
    r.seed = static_cast<std::uint64_t>(std::stoull(std::string(find("seed"))));
    r.scheduler = std::string(find("scheduler"));
    r.checkpoint_policy = std::string(find("checkpoint_policy"));
    for (const auto& [name, field] : scalar_table()) set_scalar(r, field, to_double(find(name)));
    for (auto& [name, stats] : r.samples) {
        auto col = [&](std::string_view stat) { return to_double(find(fmt::format("{}.{}", name, stat))); };
        stats = RunningStats::from_summary(static_cast<std::int64_t>(col("count")), col("mean"), col("stddev"),
                                           col("min"), col("max"));
    }
    return r;
}

bool reports_equal(const MetricsReport& a, const MetricsReport& b) {
    if (a.scenario_id != b.scenario_id || a.seed != b.seed || a.scheduler != b.scheduler ||
        a.checkpoint_policy != b.checkpoint_policy) {
        return false;
    }
    for (const auto& [name, field] : scalar_table()) {
        if (get_scalar(a, field) != get_scalar(b, field)) return false;
    }
    if (a.samples.size() != b.samples.size()) return false;
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        const auto& [na, sa] = a.samples[i];
        const auto& [nb, sb] = b.samples[i];
        if (na != nb || sa.count() != sb.count() || sa.mean() != sb.mean() || sa.min() != sb.min() ||
            sa.max() != sb.max()) {
            return false;
        }
        const double scale = std::max({1.0, std::abs(sa.stddev()), std::abs(sb.stddev())});
        if (std::abs(sa.stddev() - sb.stddev()) > 1e-12 * scale) return false;
    }
    return true;
}

std::string_view to_string(Favors f) {
    switch (f) {
        case Favors::A: return "favors_a";
        case Favors::B: return "favors_b";
        case Favors::Tie: return "tie";
        case Favors::Neutral: return "neutral";
        case Favors::NotModeled: return "not_modeled";
    }
    return "?";
}

namespace {

enum class Better { Higher, Lower, Neither };

struct RowSpec {
    std::string_view label;
    Better better;
    double (*extract)(const MetricsReport&);
};

const std::vector<RowSpec>& row_specs() {
    static const std::vector<RowSpec> specs = {
        {"Number of hosts", Better::Neither, [](const MetricsReport& r) { return double(r.host_count); }},
        {"Number of VMs", Better::Neither, [](const MetricsReport& r) { return double(r.vn_count); }},
        {"Number of VM migrations", Better::Higher,
         [](const MetricsReport& r) { return double(r.completed_migrations); }},
        {"SLA performance degradation due to migration", Better::Lower,
         [](const MetricsReport& r) { return r.sla_degradation_migration; }},
        {"SLA time per active host", Better::Lower, [](const MetricsReport& r) { return r.sla_time_per_active_host; }},
        {"Overall SLA violation", Better::Lower, [](const MetricsReport& r) { return r.overall_sla_violation; }},
        {"Average SLA violation", Better::Lower, [](const MetricsReport& r) { return r.average_sla_violation; }},
        {"Time before a VM migration", Better::Lower,
         [](const MetricsReport& r) { return r.sample("time_before_migration").mean(); }},
        {"Execution time - VM selection", Better::Lower,
         [](const MetricsReport& r) { return r.sample("exec_vm_selection").mean(); }},
        {"Execution time - host selection", Better::Lower,
         [](const MetricsReport& r) { return r.sample("exec_host_selection").mean(); }},
        {"Execution time - VM reallocation", Better::Lower,
         [](const MetricsReport& r) { return r.sample("exec_reallocation").mean(); }},
        {"Execution time - total", Better::Lower, [](const MetricsReport& r) { return r.sample("exec_total").mean(); }},
    };
    return specs;
}

constexpr std::string_view kEnergyRow = "Energy consumption (kWh)";

}  // namespace

std::vector<std::string> comparison_row_labels() {
    std::vector<std::string> out;
    for (const auto& spec : row_specs()) out.emplace_back(spec.label);
    return out;
}

ComparisonTable summarize(const MetricsReport& a, const MetricsReport& b) {
    if (a.scenario_id != b.scenario_id) {
        throw Error(fmt::format("cannot compare reports from different scenarios ({} vs {})", a.scenario_id,
                                b.scenario_id));
    }
    ComparisonTable table;
    table.label_a = fmt::format("{}+{}", a.scheduler, a.checkpoint_policy);
    table.label_b = fmt::format("{}+{}", b.scheduler, b.checkpoint_policy);
    const auto& specs = row_specs();
    for (std::size_t i = 0; i < specs.size(); ++i) {
        if (i == 2) table.rows.push_back({std::string(kEnergyRow), std::nullopt, std::nullopt, 0.0, Favors::NotModeled});
        const auto& spec = specs[i];
        ComparisonRow row;
        row.metric = std::string(spec.label);
        row.a = spec.extract(a);
        row.b = spec.extract(b);
        row.delta = *row.b - *row.a;
        if (spec.better == Better::Neither) {
            row.favors = Favors::Neutral;
        } else if (row.delta == 0.0) {
            row.favors = Favors::Tie;
        } else if ((row.delta > 0.0) == (spec.better == Better::Higher)) {
            row.favors = Favors::B;
        } else {
            row.favors = Favors::A;
        }
        table.rows.push_back(row);
    }
    return table;
}

std::string ComparisonTable::to_csv() const {
    std::string out = fmt::format("metric,{},{},delta,favors\n", label_a, label_b);
    for (const auto& row : rows) {
        if (!row.a) {
            out += fmt::format("{},,,,{}\n", row.metric, to_string(row.favors));
            continue;
        }
        out += fmt::format("{},{},{},{},{}\n", row.metric, number(*row.a), number(*row.b), number(row.delta),
                           to_string(row.favors));
    }
    return out;
}

std::string ComparisonTable::to_text() const {
    std::string out = fmt::format("{:<46} {:>14} {:>14} {:>14}  {}\n", "metric", label_a, label_b, "delta", "favors");
    for (const auto& row : rows) {
        if (!row.a) {
            out += fmt::format("{:<46} {:>14} {:>14} {:>14}  {}\n", row.metric, "-", "-", "-", to_string(row.favors));
            continue;
        }
        out += fmt::format("{:<46} {:>14.6g} {:>14.6g} {:>+14.6g}  {}\n", row.metric, *row.a, *row.b, row.delta,
                           to_string(row.favors));
    }
    return out;
}

}  // namespace bftsim
