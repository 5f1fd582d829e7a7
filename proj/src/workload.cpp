#include "bftsim/workload.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace bftsim {

std::vector<Job> split_application(int task_count, int job_count) {
    if (task_count < 1) throw ConfigError("split_application: task count must be at least 1");
    if (job_count < 1) throw ConfigError("split_application: job count must be at least 1");
    if (job_count > task_count) {
        throw ConfigError(fmt::format("split_application: {} jobs cannot be filled from {} tasks",
                                      job_count, task_count));
    }
    std::vector<Job> jobs(static_cast<std::size_t>(job_count));
    const int base = task_count / job_count;
    const int extra = task_count % job_count;
    TaskId next = 0;
    for (int j = 0; j < job_count; ++j) {
        Job& job = jobs[static_cast<std::size_t>(j)];
        job.id = j;
        const int size = base + (j < extra ? 1 : 0);
        for (int k = 0; k < size; ++k) job.tasks.push_back(next++);
    }
    return jobs;
}

UtilizationTrace parse_utilization_trace(std::string_view text, Tick period) {
    if (period <= 0) throw ConfigError("trace_period must be positive");
    UtilizationTrace out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.remove_suffix(1);
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.front()))) line.remove_prefix(1);
        if (line.empty()) continue;
        int value = 0;
        const auto* end = line.data() + line.size();
        auto [ptr, ec] = std::from_chars(line.data(), end, value);
        if (ec != std::errc{} || ptr != end) {
            throw ConfigError(fmt::format("trace line {}: expected an integer, got '{}'", line_no, line));
        }
        if (value < 0 || value > 100) {
            throw ConfigError(fmt::format("trace line {}: value {} out of range 0-100", line_no, value));
        }
        out.push_back({static_cast<Tick>(out.size()) * period, value});
    }
    if (out.empty()) throw ConfigError("utilization trace is empty");
    return out;
}

UtilizationTrace load_utilization_trace(const std::string& path, Tick period) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot read utilization trace '{}'", path));
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_utilization_trace(buf.str(), period);
}

int utilization_at(const UtilizationTrace& trace, Tick t) {
    if (trace.empty()) return 100;
    auto it = std::upper_bound(trace.begin(), trace.end(), t,
                               [](Tick time, const UtilizationSample& s) { return time < s.time; });
    if (it == trace.begin()) return trace.front().percent;
    return std::prev(it)->percent;
}

Application generate_workload(const WorkloadSpec& spec, Rng& rng) {
    if (spec.demand.min < 1 || spec.demand.max < spec.demand.min) {
        throw ConfigError("demand range must satisfy 1 <= min <= max");
    }
    Application app;
    app.jobs = split_application(spec.task_count, spec.job_count);
    app.tasks.resize(static_cast<std::size_t>(spec.task_count));
    for (auto& job : app.jobs) {
        job.release_time = static_cast<Tick>(job.id) * spec.job_interarrival;
        const int util = utilization_at(spec.trace, job.release_time);
        for (TaskId id : job.tasks) {
            Task& task = app.tasks[static_cast<std::size_t>(id)];
            task.id = id;
            task.job = job.id;
            task.sla_bound = spec.sla_bound;
            Tick demand = spec.demand.min == spec.demand.max
                              ? spec.demand.min
                              : rng.uniform_int(spec.demand.min, spec.demand.max);
            if (!spec.trace.empty()) {
                demand = std::max<Tick>(1, static_cast<Tick>(std::llround(
                                               static_cast<double>(demand) * util / 100.0)));
            }
            task.demand = demand;
        }
    }
    return app;
}

}  // namespace bftsim
