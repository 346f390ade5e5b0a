#include "anysched/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace anysched {

Millis duration_for_work(Millis work, double speed) {
    if (work <= 0) return 0;
    auto n = static_cast<Millis>(std::ceil(static_cast<double>(work) / speed));
    while (n > 0 && static_cast<double>(n - 1) * speed >= static_cast<double>(work)) --n;
    while (static_cast<double>(n) * speed < static_cast<double>(work)) ++n;
    return n;
}

Millis completion_time(const PiecewiseLinearPtf& ptf, double speed, Millis start,
                       const QualityTrace& trace) {
    const auto pts = trace.points();
    if (pts.empty()) return start + duration_for_work(ptf.eval(1.0), speed);

    // Segment active at `start`; earlier points are history.
    std::size_t k = 0;
    while (k + 1 < pts.size() && pts[k + 1].from <= start) ++k;

    for (;; ++k) {
        const bool lastSegment = (k + 1 == pts.size());
        const Millis segStart = std::max(start, pts[k].from);
        const Millis segEnd = lastSegment ? std::numeric_limits<Millis>::max() : pts[k + 1].from;
        Millis candidate = start + duration_for_work(ptf.eval(pts[k].quality), speed);
        if (candidate < segStart) candidate = segStart;
        if (lastSegment || candidate < segEnd) return candidate;
    }
}

Millis lateness(const PiecewiseLinearPtf& ptf, double speed, Millis start,
                const QualityTrace& trace, Millis due) {
    return completion_time(ptf, speed, start, trace) - due;
}

double solution_quality(const PiecewiseLinearPtf& ptf, double speed, Millis start,
                        const QualityTrace& trace) {
    const Millis completion = completion_time(ptf, speed, start, trace);
    const double work = static_cast<double>(completion - start) * speed;
    return ptf.invert(work);
}

Millis estimated_completion_time(const PiecewiseLinearPtf& estimate, double speed,
                                 Millis start, double q) {
    return start + duration_for_work(estimate.eval(q), speed);
}

Feasibility check_feasible(const SolutionState& solution, std::span<const Task> tasks,
                           std::span<const Instance> instances,
                           std::span<const Resource> resources) {
    Feasibility report;
    auto flag = [&report](int constraint, TaskId task, TaskId other = -1) {
        report.feasible = false;
        report.violations.push_back({constraint, task, other});
    };

    struct Busy {
        Millis start;
        Millis completion;
        TaskId task;
    };
    std::vector<std::vector<Busy>> byResource(resources.size());

    for (const Task& task : tasks) {
        const TaskId i = task.id;
        if (!solution.resourceOf[i].has_value()) {
            flag(4, i);
            continue;
        }
        if (!solution.startOf[i].has_value()) {
            flag(5, i);
            continue;
        }
        const Millis start = *solution.startOf[i];
        if (start < task.arrival) flag(6, i);
        const ResourceId j = *solution.resourceOf[i];
        const Millis completion = completion_time(instances[task.instanceId].truePtf,
                                                  resources[j].speed, start,
                                                  solution.qualityOf[i]);
        byResource[j].push_back({start, completion, i});
    }

    for (auto& busy : byResource) {
        std::sort(busy.begin(), busy.end(),
                  [](const Busy& a, const Busy& b) { return a.start < b.start; });
        for (std::size_t k = 1; k < busy.size(); ++k) {
            if (busy[k].start < busy[k - 1].completion) {
                flag(7, busy[k - 1].task, busy[k].task);
            }
        }
    }
    return report;
}

double avg_solution_quality(const SolutionState& solution, std::span<const Task> tasks,
                            std::span<const Instance> instances,
                            std::span<const Resource> resources) {
    if (tasks.empty()) return 0.0;
    double sum = 0.0;
    for (const Task& task : tasks) {
        const ResourceId j = *solution.resourceOf[task.id];
        sum += solution_quality(instances[task.instanceId].truePtf, resources[j].speed,
                                *solution.startOf[task.id], solution.qualityOf[task.id]);
    }
    return sum / static_cast<double>(tasks.size());
}

double avg_normalized_lateness(const SolutionState& solution, std::span<const Task> tasks,
                               std::span<const Instance> instances,
                               std::span<const Resource> resources) {
    if (tasks.empty()) return 0.0;
    double sum = 0.0;
    for (const Task& task : tasks) {
        const ResourceId j = *solution.resourceOf[task.id];
        const Millis late = lateness(instances[task.instanceId].truePtf, resources[j].speed,
                                     *solution.startOf[task.id], solution.qualityOf[task.id],
                                     task.due());
        sum += static_cast<double>(late) / static_cast<double>(task.requestedResponse);
    }
    return sum / static_cast<double>(tasks.size());
}

}  // namespace anysched
