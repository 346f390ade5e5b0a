#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "anysched/evaluate.hpp"
#include "anysched/rng.hpp"
#include "anysched/types.hpp"

namespace anysched {

class ProtocolError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Immutable per-run context shared by the policy and the quality control:
/// problem data plus the estimated processing time function of each task.
struct SchedulerContext {
    std::span<const Task> tasks;
    std::span<const Instance> instances;
    std::span<const Resource> resources;
    const std::vector<PiecewiseLinearPtf>* estimates = nullptr;

    const PiecewiseLinearPtf& estimate_of(TaskId i) const { return (*estimates)[i]; }
    const Task& task(TaskId i) const { return tasks[i]; }
    double speed(ResourceId j) const { return resources[j].speed; }
    std::size_t num_resources() const { return resources.size(); }
};

struct SchedulerState {
    std::vector<TaskId> pending;  // kept sorted by id
    std::vector<char> currentlyBeingProcessed;
    SolutionState solution;
    Schedule schedule;

    void resize(std::size_t numTasks, std::size_t numResources) {
        currentlyBeingProcessed.assign(numTasks, 0);
        solution.resize(numTasks);
        schedule.clear_to(numResources);
    }
    bool is_pending(TaskId i) const;
};

/// Sets requested qualities (and downstream start times) for a fixed schedule.
class QualityController {
public:
    virtual ~QualityController() = default;
    virtual void apply(Millis t, SchedulerState& state, const Schedule& schedule,
                       const SchedulerContext& ctx) = 0;
};

// Earliest Due Date selection + Minimal Completion Time assignment.
//
// Currently processed tasks stay pinned first on their resources with the
// resource blocked until their full-quality completion estimate. The
// remaining pending tasks are sorted by (due date, full-quality estimate,
// arrival, salted hash) and greedily placed on the resource that completes
// them earliest; ties go to the lowest resource index. A task placed first
// on an idle resource is marked as being processed. The resulting schedule
// is stored in the state and returned.
Schedule edd_mct(Millis t, SchedulerState& state, const SchedulerContext& ctx, Rng& rng);

// Pending-set updates for the two events the system reacts to. Duplicate
// arrivals and completions of tasks that are not being processed raise
// ProtocolError.
void arrival_update(SchedulerState& state, TaskId task);
void completion_update(SchedulerState& state, TaskId task);

// Event handlers: update the pending set, re-run the policy, then invoke the
// active quality control.
void on_task_arrival(TaskId task, Millis t, SchedulerState& state, const SchedulerContext& ctx,
                     Rng& rng, QualityController& control);
void on_solution_received(TaskId task, Millis t, SchedulerState& state,
                          const SchedulerContext& ctx, Rng& rng, QualityController& control);

}  // namespace anysched
