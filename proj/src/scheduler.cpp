#include "anysched/scheduler.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace anysched {

bool SchedulerState::is_pending(TaskId i) const {
    return std::binary_search(pending.begin(), pending.end(), i);
}

Schedule edd_mct(Millis t, SchedulerState& state, const SchedulerContext& ctx, Rng& rng) {
    const std::size_t m = ctx.num_resources();
    std::vector<Millis> earliestStart(m, 0);
    Schedule sch;
    sch.clear_to(m);

    // Pin the tasks that are already running; they cannot move.
    for (TaskId i : state.pending) {
        if (!state.currentlyBeingProcessed[i]) continue;
        const ResourceId j = *state.solution.resourceOf[i];
        earliestStart[j] = estimated_completion_time(ctx.estimate_of(i), ctx.speed(j),
                                                     *state.solution.startOf[i], 1.0);
        sch.perResource[j].push_back(i);
    }
    for (Millis& e : earliestStart) e = std::max(e, t);

    struct Key {
        Millis due;
        Millis estimate;
        Millis arrival;
        std::uint64_t salt;
        TaskId id;
    };
    const std::uint64_t salt = rng.next_u64();
    std::vector<Key> queue;
    queue.reserve(state.pending.size());
    for (TaskId i : state.pending) {
        if (state.currentlyBeingProcessed[i]) continue;
        queue.push_back({ctx.task(i).due(), ctx.estimate_of(i).max_value(),
                         ctx.task(i).arrival, Rng::mix(salt ^ static_cast<std::uint64_t>(i)), i});
    }
    std::sort(queue.begin(), queue.end(), [](const Key& a, const Key& b) {
        if (a.due != b.due) return a.due < b.due;
        if (a.estimate != b.estimate) return a.estimate < b.estimate;
        if (a.arrival != b.arrival) return a.arrival < b.arrival;
        return a.salt < b.salt;
    });

    for (const Key& key : queue) {
        const TaskId i = key.id;
        ResourceId best = 0;
        Millis bestCompletion = std::numeric_limits<Millis>::max();
        for (ResourceId j = 0; j < static_cast<ResourceId>(m); ++j) {
            const Millis completion =
                estimated_completion_time(ctx.estimate_of(i), ctx.speed(j), earliestStart[j], 1.0);
            if (completion < bestCompletion) {
                bestCompletion = completion;
                best = j;
            }
        }
        state.solution.resourceOf[i] = best;
        state.solution.startOf[i] = earliestStart[best];
        earliestStart[best] = bestCompletion;
        if (sch.perResource[best].empty()) {
            // The resource is idle, so it starts processing immediately.
            state.currentlyBeingProcessed[i] = 1;
        }
        sch.perResource[best].push_back(i);
    }

    state.schedule = sch;
    return sch;
}

void arrival_update(SchedulerState& state, TaskId task) {
    auto pos = std::lower_bound(state.pending.begin(), state.pending.end(), task);
    if (pos != state.pending.end() && *pos == task) {
        throw ProtocolError("duplicate arrival of task " + std::to_string(task));
    }
    state.currentlyBeingProcessed[task] = 0;
    state.pending.insert(pos, task);
}

void completion_update(SchedulerState& state, TaskId task) {
    auto pos = std::lower_bound(state.pending.begin(), state.pending.end(), task);
    if (pos == state.pending.end() || *pos != task || !state.currentlyBeingProcessed[task]) {
        throw ProtocolError("completion of unknown or idle task " + std::to_string(task));
    }
    state.currentlyBeingProcessed[task] = 0;
    state.pending.erase(pos);
}

void on_task_arrival(TaskId task, Millis t, SchedulerState& state, const SchedulerContext& ctx,
                     Rng& rng, QualityController& control) {
    arrival_update(state, task);
    const Schedule sch = edd_mct(t, state, ctx, rng);
    control.apply(t, state, sch, ctx);
}

void on_solution_received(TaskId task, Millis t, SchedulerState& state,
                          const SchedulerContext& ctx, Rng& rng, QualityController& control) {
    completion_update(state, task);
    const Schedule sch = edd_mct(t, state, ctx, rng);
    control.apply(t, state, sch, ctx);
}

}  // namespace anysched
