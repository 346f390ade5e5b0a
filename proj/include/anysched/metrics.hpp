#pragma once

#include <array>
#include <iosfwd>

#include "anysched/regression.hpp"
#include "anysched/sim.hpp"

namespace anysched {

inline constexpr std::array<double, 6> kQuantileGrid{0.05, 0.25, 0.5, 0.75, 0.95, 1.0};

struct RunMetrics {
    std::size_t taskCount = 0;
    double avgSolutionQuality = 0.0;
    double avgNormalizedLateness = 0.0;
    double maxNormalizedLateness = 0.0;
    std::array<double, 6> qualityQuantiles{};
    std::array<double, 6> latenessQuantiles{};
    // Run-level series; empty when summarizing a bare records set.
    std::vector<std::pair<Millis, int>> pendingCountSeries;
    std::vector<RuntimeSample> runtimeSamples;
};

// Order-statistic quantile with linear interpolation between the two closest
// ranks. p in [0, 1]; the input need not be sorted.
double quantile(std::vector<double> values, double p);

// Means, maximum and the quantile grid over the realized records.
// Throws std::invalid_argument on an empty record set.
RunMetrics summarize(std::span<const TaskRecord> records);

// Record statistics plus the run's pending-count and runtime series.
RunMetrics summarize(const SimResult& result);

// Absolute percentage error of the model on the held-out observations,
// quantiled per quality endpoint.
struct ApeTable {
    std::array<std::array<double, 6>, PiecewiseLinearPtf::kEndpoints> rows{};
};
ApeTable estimation_report(const RegressionModel& model,
                           std::span<const TrainingObservation> testSet);

void write_metrics(std::ostream& out, const RunMetrics& metrics);
void write_ape_table(std::ostream& out, const ApeTable& table);

// Records / events files: comma separated with fixed headers.
void write_records(std::ostream& out, std::span<const TaskRecord> records);
std::vector<TaskRecord> read_records(std::istream& in);
void write_events(std::ostream& out, std::span<const SimEvent> events);
void write_runtimes(std::ostream& out, std::span<const RuntimeSample> samples);

// Plot-ready series derived from the records: pending-task count over time,
// plus lateness and quality against completion time.
void write_pending_series(std::ostream& out, std::span<const TaskRecord> records);
void write_lateness_series(std::ostream& out, std::span<const TaskRecord> records);
void write_quality_series(std::ostream& out, std::span<const TaskRecord> records);

}  // namespace anysched
