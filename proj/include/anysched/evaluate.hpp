#pragma once

#include <span>
#include <vector>

#include "anysched/types.hpp"

namespace anysched {

// Shortest whole-ms duration in which a resource of the given speed performs
// at least `work` units of work.
Millis duration_for_work(Millis work, double speed);

// Completion time of a task started at `start` under a time-varying requested
// quality: the smallest integer t >= start at which the work done so far,
// (t - start) * speed, covers the processing time the trace requests at t.
// Solved segment by segment, never per millisecond.
Millis completion_time(const PiecewiseLinearPtf& ptf, double speed, Millis start,
                       const QualityTrace& trace);

Millis lateness(const PiecewiseLinearPtf& ptf, double speed, Millis start,
                const QualityTrace& trace, Millis due);

// Quality actually reached by the work done at the completion time, obtained
// by inverting the processing time function; in [0, 1].
double solution_quality(const PiecewiseLinearPtf& ptf, double speed, Millis start,
                        const QualityTrace& trace);

// start + ceil(estimate(q) / speed), the fixed-quality completion estimate.
Millis estimated_completion_time(const PiecewiseLinearPtf& estimate, double speed,
                                 Millis start, double q);

struct Violation {
    int constraint = 0;  // 4..7, matching the feasibility conditions
    TaskId task = -1;
    TaskId other = -1;
};

struct Feasibility {
    bool feasible = true;
    std::vector<Violation> violations;
};

// Checks that every task is assigned and started, no task starts before its
// arrival, and tasks sharing a resource do not overlap. Violations are
// reported, not thrown.
Feasibility check_feasible(const SolutionState& solution, std::span<const Task> tasks,
                           std::span<const Instance> instances,
                           std::span<const Resource> resources);

// Means over all tasks; both are 0 for an empty task set.
double avg_solution_quality(const SolutionState& solution, std::span<const Task> tasks,
                            std::span<const Instance> instances,
                            std::span<const Resource> resources);
double avg_normalized_lateness(const SolutionState& solution, std::span<const Task> tasks,
                               std::span<const Instance> instances,
                               std::span<const Resource> resources);

}  // namespace anysched
