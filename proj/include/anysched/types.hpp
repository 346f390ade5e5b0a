#pragma once

#include <optional>
#include <span>
#include <vector>

#include "anysched/ptf.hpp"

namespace anysched {

using TaskId = int;
using ResourceId = int;

/// One instance of the optimization problem the resources solve.
/// truePtf is simulation ground truth; the scheduling side only ever sees
/// it through the estimation facade.
struct Instance {
    int id = 0;
    std::vector<double> features;
    PiecewiseLinearPtf truePtf;
    Millis wct = 1;  // normalized worst-case processing time
};

struct Task {
    TaskId id = 0;
    Millis arrival = 0;
    Millis requestedResponse = 1;
    int instanceId = 0;

    Millis due() const { return arrival + requestedResponse; }
};

struct Resource {
    ResourceId id = 0;
    double speed = 1.0;
};

struct TracePoint {
    Millis from = 0;
    double quality = 1.0;
};

/// Piecewise-constant, right-continuous requested-quality function of time.
class QualityTrace {
public:
    QualityTrace() = default;
    QualityTrace(Millis from, double quality) { points_.push_back({from, quality}); }

    // Quality at time t. Before the first point (or on an empty trace) the
    // maximum quality 1 is assumed.
    double at(Millis t) const {
        double q = 1.0;
        for (const TracePoint& p : points_) {
            if (p.from > t) break;
            q = p.quality;
        }
        return q;
    }

    // Sets the requested quality from time t on, replacing any points at >= t.
    void set_from(Millis t, double quality) {
        while (!points_.empty() && points_.back().from >= t) points_.pop_back();
        if (points_.empty() || points_.back().quality != quality) {
            points_.push_back({t, quality});
        }
    }

    double last() const { return points_.empty() ? 1.0 : points_.back().quality; }
    bool empty() const { return points_.empty(); }
    std::span<const TracePoint> points() const { return points_; }

private:
    std::vector<TracePoint> points_;
};

/// Assignment, start time and quality function per task; unassigned parts
/// are left unset.
struct SolutionState {
    std::vector<std::optional<ResourceId>> resourceOf;
    std::vector<std::optional<Millis>> startOf;
    std::vector<QualityTrace> qualityOf;

    void resize(std::size_t n) {
        resourceOf.resize(n);
        startOf.resize(n);
        qualityOf.resize(n);
    }
    std::size_t size() const { return resourceOf.size(); }
};

/// Ordered task lists per resource; a task appears at most once overall.
struct Schedule {
    std::vector<std::vector<TaskId>> perResource;

    void clear_to(std::size_t numResources) {
        perResource.assign(numResources, {});
    }
};

}  // namespace anysched
