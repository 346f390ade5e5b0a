#include "anysched/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace anysched {

double quantile(std::vector<double> values, double p) {
    if (values.empty()) throw std::invalid_argument("quantile of empty set");
    std::sort(values.begin(), values.end());
    const double rank = p * static_cast<double>(values.size() - 1);
    const auto lower = static_cast<std::size_t>(rank);
    const auto upper = std::min(lower + 1, values.size() - 1);
    const double frac = rank - static_cast<double>(lower);
    return values[lower] + frac * (values[upper] - values[lower]);
}

RunMetrics summarize(std::span<const TaskRecord> records) {
    if (records.empty()) throw std::invalid_argument("no records to summarize");
    RunMetrics m;
    m.taskCount = records.size();
    std::vector<double> qualities, latenesses;
    qualities.reserve(records.size());
    latenesses.reserve(records.size());
    for (const TaskRecord& r : records) {
        qualities.push_back(r.achievedQuality);
        latenesses.push_back(r.normalizedLateness);
        m.avgSolutionQuality += r.achievedQuality;
        m.avgNormalizedLateness += r.normalizedLateness;
    }
    m.avgSolutionQuality /= static_cast<double>(records.size());
    m.avgNormalizedLateness /= static_cast<double>(records.size());
    m.maxNormalizedLateness = *std::max_element(latenesses.begin(), latenesses.end());
    for (std::size_t i = 0; i < kQuantileGrid.size(); ++i) {
        m.qualityQuantiles[i] = quantile(qualities, kQuantileGrid[i]);
        m.latenessQuantiles[i] = quantile(latenesses, kQuantileGrid[i]);
    }
    return m;
}

RunMetrics summarize(const SimResult& result) {
    RunMetrics m = summarize(std::span<const TaskRecord>(result.records));
    m.pendingCountSeries = result.pendingSeries;
    m.runtimeSamples = result.runtimes;
    return m;
}

ApeTable estimation_report(const RegressionModel& model,
                           std::span<const TrainingObservation> testSet) {
    ApeTable table;
    std::array<std::vector<double>, PiecewiseLinearPtf::kEndpoints> errors;
    for (const TrainingObservation& obs : testSet) {
        auto predicted = model.predict(obs.features);
        // Same monotonic correction the estimator applies, without rounding.
        for (int e = 1; e < PiecewiseLinearPtf::kEndpoints; ++e) {
            predicted[e] = std::max(predicted[e], predicted[e - 1]);
        }
        for (int e = 0; e < PiecewiseLinearPtf::kEndpoints; ++e) {
            errors[e].push_back(std::abs(predicted[e] - obs.params[e]) / obs.params[e] * 100.0);
        }
    }
    for (int e = 0; e < PiecewiseLinearPtf::kEndpoints; ++e) {
        for (std::size_t i = 0; i < kQuantileGrid.size(); ++i) {
            table.rows[e][i] = errors[e].empty() ? 0.0 : quantile(errors[e], kQuantileGrid[i]);
        }
    }
    return table;
}

namespace {

void set_format(std::ostream& out) {
    out.precision(9);
}

}  // namespace

void write_metrics(std::ostream& out, const RunMetrics& m) {
    set_format(out);
    out << "tasks " << m.taskCount << "\n";
    out << "avg_solution_quality " << m.avgSolutionQuality << "\n";
    out << "avg_normalized_lateness " << m.avgNormalizedLateness << "\n";
    out << "max_normalized_lateness " << m.maxNormalizedLateness << "\n";
    out << "quantile_grid";
    for (double p : kQuantileGrid) out << ' ' << p;
    out << "\nquality_quantiles";
    for (double v : m.qualityQuantiles) out << ' ' << v;
    out << "\nlateness_quantiles";
    for (double v : m.latenessQuantiles) out << ' ' << v;
    out << "\n";
}

void write_ape_table(std::ostream& out, const ApeTable& table) {
    set_format(out);
    out << "quality";
    for (double p : kQuantileGrid) out << ",q" << p;
    out << "\n";
    for (int e = 0; e < PiecewiseLinearPtf::kEndpoints; ++e) {
        out << 0.1 * (e + 1);
        for (double v : table.rows[e]) out << ',' << v;
        out << "\n";
    }
}

void write_records(std::ostream& out, std::span<const TaskRecord> records) {
    set_format(out);
    out << "taskId,arrival,start,completion,resourceId,requestedResponse,"
           "achievedQuality,normalizedLateness,finalRequestedQuality\n";
    for (const TaskRecord& r : records) {
        out << r.taskId << ',' << r.arrival << ',' << r.start << ',' << r.completion << ','
            << r.resourceId << ',' << r.requestedResponse << ',' << r.achievedQuality << ','
            << r.normalizedLateness << ',' << r.finalRequestedQuality << "\n";
    }
}

std::vector<TaskRecord> read_records(std::istream& in) {
    std::vector<TaskRecord> records;
    std::string line;
    if (!std::getline(in, line)) return records;  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        TaskRecord r;
        if (!(row >> r.taskId >> r.arrival >> r.start >> r.completion >> r.resourceId >>
              r.requestedResponse >> r.achievedQuality >> r.normalizedLateness >>
              r.finalRequestedQuality)) {
            throw std::runtime_error("bad record row: " + line);
        }
        records.push_back(r);
    }
    return records;
}

void write_events(std::ostream& out, std::span<const SimEvent> events) {
    set_format(out);
    out << "time,kind,task,resource,quality\n";
    for (const SimEvent& e : events) {
        out << e.time << ',' << to_string(e.kind) << ',' << e.task << ',' << e.resource << ','
            << e.quality << "\n";
    }
}

void write_runtimes(std::ostream& out, std::span<const RuntimeSample> samples) {
    set_format(out);
    out << "time,pendingCount,policyMicros,controlMicros\n";
    for (const RuntimeSample& s : samples) {
        out << s.time << ',' << s.pendingCount << ',' << s.policyMicros << ','
            << s.controlMicros << "\n";
    }
}

void write_pending_series(std::ostream& out, std::span<const TaskRecord> records) {
    struct Edge {
        Millis time;
        int delta;
    };
    std::vector<Edge> edges;
    edges.reserve(records.size() * 2);
    for (const TaskRecord& r : records) {
        edges.push_back({r.arrival, +1});
        edges.push_back({r.completion, -1});
    }
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
        if (a.time != b.time) return a.time < b.time;
        return a.delta < b.delta;  // completions before arrivals at the same instant
    });
    out << "time,pending\n";
    int pending = 0;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        pending += edges[i].delta;
        if (i + 1 == edges.size() || edges[i + 1].time != edges[i].time) {
            out << edges[i].time << ',' << pending << "\n";
        }
    }
}

void write_lateness_series(std::ostream& out, std::span<const TaskRecord> records) {
    set_format(out);
    std::vector<TaskRecord> sorted(records.begin(), records.end());
    std::sort(sorted.begin(), sorted.end(),
              [](const TaskRecord& a, const TaskRecord& b) { return a.completion < b.completion; });
    out << "completion,normalizedLateness\n";
    for (const TaskRecord& r : sorted) out << r.completion << ',' << r.normalizedLateness << "\n";
}

void write_quality_series(std::ostream& out, std::span<const TaskRecord> records) {
    set_format(out);
    std::vector<TaskRecord> sorted(records.begin(), records.end());
    std::sort(sorted.begin(), sorted.end(),
              [](const TaskRecord& a, const TaskRecord& b) { return a.completion < b.completion; });
    out << "completion,achievedQuality\n";
    for (const TaskRecord& r : sorted) out << r.completion << ',' << r.achievedQuality << "\n";
}

}  // namespace anysched
