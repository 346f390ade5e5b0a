#pragma once

#include <memory>
#include <string>
#include <vector>

#include "anysched/scheduler.hpp"

namespace anysched {

enum class ControlMode { max, min, random, naive, bisection, individual };

const char* to_string(ControlMode mode);
ControlMode control_mode_from_string(const std::string& s);

struct ControlConfig {
    double minQuality = 0.2;
    int maxIters = 30;
    double epsilon = 1e-6;  // "near zero" band on the normalized-lateness scale
    ControlMode mode = ControlMode::bisection;
};

struct TaskWeight {
    TaskId taskId = -1;
    double weight = 0.0;
};

// Fixes every scheduled task's requested quality to q at time t, recomputes
// the chained start times from the estimated completion times (the first
// task on each resource keeps its start; its completion is clamped to >= t),
// and returns the average normalized lateness of the scheduled tasks.
// Returns 0 when the schedule is empty.
double schedule_recomputation(Millis t, const Schedule& schedule, double q,
                              SchedulerState& state, const SchedulerContext& ctx);

// Same chained recomputation, but each task keeps its own currently
// requested quality. Used by the naive control.
double recompute_at_current_qualities(Millis t, const Schedule& schedule, SchedulerState& state,
                                      const SchedulerContext& ctx);

// Root search for one global quality on [minQuality, 1]. If full quality is
// not late, everything stays at 1; if even the minimum quality is late,
// everything drops to the minimum; otherwise bisects for maxIters iterations
// and leaves the qualities at the final midpoint.
void bisection_control(Millis t, SchedulerState& state, const Schedule& schedule,
                       const SchedulerContext& ctx, const ControlConfig& config);

// Per-task weights of the linearized average normalized lateness on one
// resource, plus its quality-independent constant part.
struct WeightedLateness {
    std::vector<TaskWeight> weights;  // in schedule order
    double constant = 0.0;
};
WeightedLateness task_weights(const Schedule& schedule, ResourceId resource,
                              const SchedulerState& state, const SchedulerContext& ctx,
                              Millis phantomTime = 0);

// Greedy per-task compression on one resource: tasks are compressed in
// descending weight order until the weighted lateness is near zero. The
// running first task is never compressed below the quality its progress
// already guarantees, and is skipped entirely while phantom time is active.
void individual_control(Millis t, SchedulerState& state, const Schedule& schedule,
                        ResourceId resource, const SchedulerContext& ctx,
                        const ControlConfig& config);

// Baseline: repeatedly drops the longest-running task to its lowest
// reachable quality until the schedule is no longer late or every running
// task has been compressed.
void naive_control(Millis t, SchedulerState& state, const Schedule& schedule,
                   const SchedulerContext& ctx, const ControlConfig& config);

// Fixed per-task quality for the static baselines; random draws once from
// U(minQuality, 1).
double static_control_quality(ControlMode mode, const ControlConfig& config, Rng& rng);

// Controller for the event loop. Static modes are a no-op here (their
// quality is fixed when the task arrives).
std::unique_ptr<QualityController> make_controller(const ControlConfig& config);

}  // namespace anysched
