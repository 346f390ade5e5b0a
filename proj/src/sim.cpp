#include "anysched/sim.hpp"

#include <algorithm>
#include <chrono>
#include <queue>
#include <stdexcept>
#include <string>

namespace anysched {

const char* to_string(EstimationMode mode) {
    switch (mode) {
        case EstimationMode::measured: return "measured";
        case EstimationMode::full: return "full";
        case EstimationMode::linear: return "linear";
    }
    return "?";
}

EstimationMode estimation_mode_from_string(const std::string& s) {
    if (s == "measured") return EstimationMode::measured;
    if (s == "full") return EstimationMode::full;
    if (s == "linear") return EstimationMode::linear;
    throw std::invalid_argument("unknown estimation mode: " + s);
}

const char* to_string(EventKind kind) {
    switch (kind) {
        case EventKind::taskArrival: return "task-arrival";
        case EventKind::taskCompletion: return "task-completion";
        case EventKind::qualityUpdateApplied: return "quality-update-applied";
    }
    return "?";
}

namespace {

// The estimation facade. Everything the scheduling side knows about
// processing times flows through here; ground truth is only handed out in
// measured mode, and every such read is counted.
class PtfOracle {
public:
    PtfOracle(EstimationMode mode, RegressionParams regression, EstimatorOptions options)
        : mode_(mode), regression_(regression), options_(options) {}

    void train_offline(std::vector<TrainingObservation> observations) {
        observations_ = std::move(observations);
        model_ = train(observations_, regression_);
    }

    PiecewiseLinearPtf estimate_for(const Instance& instance) {
        switch (mode_) {
            case EstimationMode::measured:
                ++truthReads_;
                return instance.truePtf;
            case EstimationMode::full:
                return estimate(model_, instance.features, instance.wct, options_);
            case EstimationMode::linear:
                return linear_estimate(model_, instance.features, instance.wct, options_);
        }
        throw std::logic_error("bad estimation mode");
    }

    void add_observation(TrainingObservation observation, int retrainEvery) {
        observations_.push_back(std::move(observation));
        if (retrainEvery > 0 && observations_.size() % static_cast<std::size_t>(retrainEvery) == 0) {
            model_ = train(observations_, regression_);
        }
    }

    long truth_reads() const { return truthReads_; }

private:
    EstimationMode mode_;
    RegressionParams regression_;
    EstimatorOptions options_;
    RegressionModel model_;
    std::vector<TrainingObservation> observations_;
    long truthReads_ = 0;
};

struct QueuedEvent {
    Millis time = 0;
    std::uint64_t sequence = 0;
    bool isCompletion = false;
    TaskId task = -1;
    std::uint64_t version = 0;  // matches RunningSlot::version for freshness
};

struct EventAfter {
    bool operator()(const QueuedEvent& a, const QueuedEvent& b) const {
        if (a.time != b.time) return a.time > b.time;
        return a.sequence > b.sequence;
    }
};

struct RunningSlot {
    TaskId task = -1;
    Millis start = 0;
    Millis target = 0;
    double lastApplied = 1.0;
    std::uint64_t version = 0;

    bool active() const { return task >= 0; }
};

double micros_between(std::chrono::steady_clock::time_point a,
                      std::chrono::steady_clock::time_point b) {
    return std::chrono::duration<double, std::micro>(b - a).count();
}

}  // namespace

SimResult run(const Scenario& scenario, const SimOptions& options) {
    const std::size_t numTasks = scenario.tasks.size();
    const std::size_t numResources = scenario.resources.size();
    const std::uint64_t baseSeed =
        options.runSeed != 0 ? options.runSeed : scenario.config.seed;

    SimResult result;
    std::vector<PiecewiseLinearPtf> estimates(numTasks);

    SchedulerState state;
    state.resize(numTasks, numResources);
    const SchedulerContext ctx{scenario.tasks, scenario.instances, scenario.resources, &estimates};

    ControlConfig controlConfig;
    controlConfig.mode = options.control;
    controlConfig.maxIters = options.maxIters;
    controlConfig.epsilon = options.epsilon;
    controlConfig.minQuality = options.minQualityOverride > 0.0 ? options.minQualityOverride
                                                                : scenario.config.minQuality;
    const auto controller = make_controller(controlConfig);
    const bool staticMode = controlConfig.mode == ControlMode::max ||
                            controlConfig.mode == ControlMode::min ||
                            controlConfig.mode == ControlMode::random;

    Rng policyRng = Rng::stream(baseSeed, "policy-tiebreak");
    Rng controlRng = Rng::stream(baseSeed, "control-random");
    Rng observationRng = Rng::stream(baseSeed, "observations");

    PtfOracle oracle(options.estimation, options.regression, options.estimator);
    if (options.estimation != EstimationMode::measured && !options.onlineRetrain) {
        oracle.train_offline(generate_training_observations(
            options.offlineTrainCount, Rng::stream_seed(scenario.config.seed, "training"),
            options.trainingNoise));
    }

    std::priority_queue<QueuedEvent, std::vector<QueuedEvent>, EventAfter> queue;
    std::uint64_t sequence = 0;
    for (const Task& task : scenario.tasks) {
        queue.push({task.arrival, sequence++, false, task.id, 0});
    }

    std::vector<RunningSlot> running(numResources);
    std::vector<ResourceId> resourceOfRunning(numTasks, -1);
    std::vector<TaskRecord> records(numTasks);
    std::size_t completedCount = 0;

    auto reschedule = [&](Millis t) {
        const int pendingCount = static_cast<int>(state.pending.size());
        const auto t0 = std::chrono::steady_clock::now();
        const Schedule sch = edd_mct(t, state, ctx, policyRng);
        const auto t1 = std::chrono::steady_clock::now();
        controller->apply(t, state, sch, ctx);
        const auto t2 = std::chrono::steady_clock::now();
        result.runtimes.push_back(
            {t, pendingCount, micros_between(t0, t1), micros_between(t1, t2)});
    };

    // Commanded completion under the current trace; the anytime algorithm is
    // stopped at the worst-case processing time no matter what was requested.
    auto target_completion = [&](TaskId i, ResourceId j, Millis start) {
        const double speed = scenario.resources[j].speed;
        const Millis byRequest =
            completion_time(estimates[i], speed, start, state.solution.qualityOf[i]);
        const Millis byWorstCase =
            start + duration_for_work(scenario.instances[scenario.tasks[i].instanceId].wct, speed);
        return std::min(byRequest, byWorstCase);
    };

    auto sync_resources = [&](Millis t) {
        for (ResourceId j = 0; j < static_cast<ResourceId>(numResources); ++j) {
            RunningSlot& slot = running[j];
            if (slot.active()) {
                const TaskId i = slot.task;
                const double requested = state.solution.qualityOf[i].at(t);
                if (requested != slot.lastApplied) {
                    slot.lastApplied = requested;
                    result.events.push_back({t, EventKind::qualityUpdateApplied, i, j, requested});
                    const Millis target = target_completion(i, j, slot.start);
                    if (target != slot.target) {
                        slot.target = target;
                        ++slot.version;
                        queue.push({target, sequence++, true, i, slot.version});
                    }
                }
                continue;
            }
            const auto& list = state.schedule.perResource[j];
            if (list.empty()) continue;
            const TaskId first = list[0];
            if (!state.currentlyBeingProcessed[first] || resourceOfRunning[first] >= 0) continue;
            const Millis start = *state.solution.startOf[first];
            if (start != t) {
                throw std::logic_error("dispatch of task " + std::to_string(first) +
                                       " at t=" + std::to_string(t) + " with start " +
                                       std::to_string(start));
            }
            slot.task = first;
            slot.start = start;
            slot.lastApplied = state.solution.qualityOf[first].at(t);
            slot.version = 0;
            slot.target = target_completion(first, j, start);
            resourceOfRunning[first] = j;
            queue.push({slot.target, sequence++, true, first, slot.version});
        }
        result.pendingSeries.emplace_back(t, static_cast<int>(state.pending.size()));
    };

    auto diagnostic_tail = [&result]() {
        std::string tail = "; last events:";
        const std::size_t shown = std::min<std::size_t>(result.events.size(), 5);
        for (std::size_t k = result.events.size() - shown; k < result.events.size(); ++k) {
            const SimEvent& e = result.events[k];
            tail += " [" + std::to_string(e.time) + " " + to_string(e.kind) + " task " +
                    std::to_string(e.task) + "]";
        }
        return tail;
    };

    auto process_event = [&](const QueuedEvent& event) {
        const Millis t = event.time;
        if (event.isCompletion) {
            const ResourceId j = resourceOfRunning[event.task];
            if (j < 0) return;  // task already finished under an older target
            RunningSlot& slot = running[j];
            if (slot.task != event.task || slot.version != event.version ||
                slot.target != event.time) {
                return;  // stale target
            }

            const Task& task = scenario.tasks[event.task];
            const Instance& instance = scenario.instances[task.instanceId];
            const double speed = scenario.resources[j].speed;
            const double work = static_cast<double>(t - slot.start) * speed;

            TaskRecord record;
            record.taskId = task.id;
            record.arrival = task.arrival;
            record.start = slot.start;
            record.completion = t;
            record.resourceId = j;
            record.requestedResponse = task.requestedResponse;
            record.achievedQuality = instance.truePtf.invert(work);
            record.normalizedLateness = static_cast<double>(t - task.due()) /
                                        static_cast<double>(task.requestedResponse);
            record.finalRequestedQuality = state.solution.qualityOf[task.id].at(t);
            records[task.id] = record;
            ++completedCount;

            result.events.push_back(
                {t, EventKind::taskCompletion, task.id, j, record.achievedQuality});

            slot = RunningSlot{};
            resourceOfRunning[task.id] = -1;

            completion_update(state, task.id);
            if (options.onlineRetrain && options.estimation != EstimationMode::measured) {
                // The finished run reveals the instance's measured curve.
                const ObjectiveCurve curve =
                    synth_objective_curve(instance, speed, observationRng, 0.0);
                auto observation =
                    observation_from_curve(curve, speed, instance.wct, instance.features);
                if (observation) {
                    oracle.add_observation(std::move(*observation), options.retrainEvery);
                }
            }
            reschedule(t);
        } else {
            const Task& task = scenario.tasks[event.task];
            const Instance& instance = scenario.instances[task.instanceId];
            estimates[task.id] = oracle.estimate_for(instance);

            double initialQuality = 1.0;
            if (staticMode) {
                initialQuality = static_control_quality(controlConfig.mode, controlConfig,
                                                        controlRng);
            }
            state.solution.qualityOf[task.id].set_from(task.arrival, initialQuality);

            result.events.push_back({t, EventKind::taskArrival, task.id, -1, initialQuality});

            arrival_update(state, task.id);
            reschedule(t);
        }

        sync_resources(t);
    };

    try {
        while (!queue.empty()) {
            const QueuedEvent event = queue.top();
            queue.pop();
            process_event(event);
        }
    } catch (const std::logic_error& e) {
        throw std::logic_error(e.what() + diagnostic_tail());
    }

    if (completedCount != numTasks) {
        throw std::logic_error("simulation ended with unfinished tasks" + diagnostic_tail());
    }
    result.records = std::move(records);
    result.schedulerTruthReads = oracle.truth_reads();
    return result;
}

}  // namespace anysched
