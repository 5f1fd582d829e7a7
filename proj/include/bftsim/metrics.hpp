#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bftsim/types.hpp"

namespace bftsim {

/// Single-pass count/mean/variance (Welford) with min and max.
class RunningStats {
public:
    void add(double x);

    /// Chan et al. pairwise combination; associative up to rounding.
    void merge(const RunningStats& other);

    std::int64_t count() const { return count_; }
    double mean() const { return mean_; }
    /// Sample variance (n - 1 denominator); 0 for fewer than two samples.
    double variance() const;
    double stddev() const;
    double min() const { return min_; }
    double max() const { return max_; }

    /// Rebuilds stats from a serialized summary.
    static RunningStats from_summary(std::int64_t count, double mean, double stddev, double min,
                                     double max);

private:
    std::int64_t count_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
    double min_ = 0.0;
    double max_ = 0.0;
};

struct Range {
    double low = 0.0;
    double high = 0.0;
};

/// Mean plus or minus one standard deviation. Throws Error for sigma < 0.
Range occurable_range(double mean, double sigma);

/// Ids of the sampled metrics, in report order.
inline constexpr std::string_view kSampleMetricIds[] = {
    "time_before_migration", "exec_vm_selection", "exec_host_selection",
    "exec_reallocation",     "exec_total",        "detection_latency",
};

struct MetricsReport {
    std::string scenario_id;
    std::uint64_t seed = 0;
    std::string scheduler;
    std::string checkpoint_policy;

    std::int64_t host_count = 0;
    std::int64_t vn_count = 0;
    std::int64_t completed_migrations = 0;  // workloads that ran to completion
    std::int64_t failed_workloads = 0;      // unfinished at the horizon, or finished corrupted
    double sla_degradation_migration = 0.0; // %
    double sla_time_per_active_host = 0.0;  // %
    double overall_sla_violation = 0.0;     // %
    double average_sla_violation = 0.0;     // %

    std::int64_t checkpoint_count = 0;
    std::int64_t rollback_count = 0;
    std::int64_t lost_work = 0;
    std::int64_t job_migrations = 0;
    std::int64_t restarts = 0;
    std::int64_t replacements = 0;
    std::int64_t faults_injected = 0;
    std::int64_t contaminated_vns = 0;
    std::int64_t corrupted_completions = 0;
    std::int64_t jobs_completed = 0;
    std::int64_t sla_violations = 0;
    std::int64_t monitor_rounds = 0;
    std::int64_t useful_work = 0;
    std::int64_t pause_time = 0;
    std::int64_t restart_time = 0;
    std::int64_t active_vn_time = 0;
    std::int64_t end_time = 0;

    std::vector<std::pair<std::string, RunningStats>> samples = default_samples();

    static std::vector<std::pair<std::string, RunningStats>> default_samples();

    const RunningStats& sample(std::string_view id) const;
    RunningStats& sample(std::string_view id);
};

/// Appends a sample to a known metric. Throws Error for an unknown id or a
/// negative (duration) sample.
void record(MetricsReport& report, std::string_view metric_id, double sample);

/// Scalar fields by name, in emit order.
std::vector<std::pair<std::string, double>> scalar_fields(const MetricsReport& report);

enum class ReportFormat { Csv, Json };

ReportFormat parse_report_format(std::string_view text);

/// Deterministic serialization: fixed field order, shortest round-trip
/// number formatting. CSV is a header row of metric ids over one value row.
std::string emit(const MetricsReport& report, ReportFormat format);
std::string emit(const MetricsReport& report, std::string_view format);

MetricsReport parse_report(std::string_view text, ReportFormat format);

/// Field-by-field equality; standard deviations compare to 1e-12 relative
/// since they are rebuilt from a rounded summary after parsing.
bool reports_equal(const MetricsReport& a, const MetricsReport& b);

enum class Favors { A, B, Tie, Neutral, NotModeled };

std::string_view to_string(Favors f);

struct ComparisonRow {
    std::string metric;  // row label
    std::optional<double> a;
    std::optional<double> b;
    double delta = 0.0;  // b - a
    Favors favors = Favors::Tie;
};

struct ComparisonTable {
    std::string label_a;
    std::string label_b;
    std::vector<ComparisonRow> rows;

    std::string to_csv() const;
    std::string to_text() const;
};

/// Side-by-side rows for every in-scope comparison metric. The energy row is
/// present but marked not modeled. Throws Error if the reports come from
/// different scenario families.
ComparisonTable summarize(const MetricsReport& a, const MetricsReport& b);

/// Labels of the modeled comparison rows, in order.
std::vector<std::string> comparison_row_labels();

}  // namespace bftsim
