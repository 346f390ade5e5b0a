#pragma once

#include <utility>

#include "anysched/control.hpp"
#include "anysched/workload.hpp"

namespace anysched {

/// How the scheduling side learns processing time functions. In measured
/// mode the ground truth is exposed verbatim; full and linear modes go
/// through the regression model (ten endpoints vs. a single one).
enum class EstimationMode { measured, full, linear };

const char* to_string(EstimationMode mode);
EstimationMode estimation_mode_from_string(const std::string& s);

enum class EventKind { taskArrival, taskCompletion, qualityUpdateApplied };

const char* to_string(EventKind kind);

struct SimEvent {
    Millis time = 0;
    EventKind kind = EventKind::taskArrival;
    TaskId task = -1;
    ResourceId resource = -1;
    double quality = -1.0;
};

struct TaskRecord {
    TaskId taskId = -1;
    Millis arrival = 0;
    Millis start = 0;
    Millis completion = 0;
    ResourceId resourceId = -1;
    Millis requestedResponse = 1;
    double achievedQuality = 0.0;
    double normalizedLateness = 0.0;
    double finalRequestedQuality = 1.0;
};

struct RuntimeSample {
    Millis time = 0;
    int pendingCount = 0;
    double policyMicros = 0.0;
    double controlMicros = 0.0;
};

struct SimOptions {
    ControlMode control = ControlMode::bisection;
    int maxIters = 30;
    double epsilon = 1e-6;
    double minQualityOverride = -1.0;  // < 0: use the scenario's minimum quality
    EstimationMode estimation = EstimationMode::measured;
    RegressionParams regression;
    EstimatorOptions estimator;
    bool onlineRetrain = false;   // otherwise full/linear pretrain offline
    int retrainEvery = 25;        // completed observations per retraining
    int offlineTrainCount = 300;
    double trainingNoise = 0.08;
    std::uint64_t runSeed = 0;    // 0: derived from the scenario seed
};

struct SimResult {
    std::vector<TaskRecord> records;  // one per task, by task id
    std::vector<SimEvent> events;
    std::vector<std::pair<Millis, int>> pendingSeries;
    std::vector<RuntimeSample> runtimes;
    // Ground-truth reads served to the scheduling side; must stay 0 outside
    // measured mode.
    long schedulerTruthReads = 0;
};

// Runs the scenario to quiescence: every task arrives, is estimated,
// scheduled, quality-controlled, dispatched and completed. Completions
// follow the commanded processing times; the achieved quality is whatever
// the ground-truth function yields for the work actually done.
SimResult run(const Scenario& scenario, const SimOptions& options);

}  // namespace anysched
