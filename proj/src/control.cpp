#include "anysched/control.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace anysched {

const char* to_string(ControlMode mode) {
    switch (mode) {
        case ControlMode::max: return "max";
        case ControlMode::min: return "min";
        case ControlMode::random: return "random";
        case ControlMode::naive: return "naive";
        case ControlMode::bisection: return "bisection";
        case ControlMode::individual: return "individual";
    }
    return "?";
}

ControlMode control_mode_from_string(const std::string& s) {
    if (s == "max") return ControlMode::max;
    if (s == "min") return ControlMode::min;
    if (s == "random") return ControlMode::random;
    if (s == "naive") return ControlMode::naive;
    if (s == "bisection") return ControlMode::bisection;
    if (s == "individual") return ControlMode::individual;
    throw std::invalid_argument("unknown control mode: " + s);
}

namespace {

double chained_lateness(Millis t, const Schedule& schedule, SchedulerState& state,
                        const SchedulerContext& ctx, double fixedQ, bool useFixed) {
    double sum = 0.0;
    std::size_t count = 0;
    for (ResourceId j = 0; j < static_cast<ResourceId>(ctx.num_resources()); ++j) {
        const auto& list = schedule.perResource[j];
        Millis earliest = 0;
        for (std::size_t k = 0; k < list.size(); ++k) {
            const TaskId i = list[k];
            double q;
            if (useFixed) {
                state.solution.qualityOf[i].set_from(t, fixedQ);
                q = fixedQ;
            } else {
                q = state.solution.qualityOf[i].at(t);
            }
            if (k != 0) state.solution.startOf[i] = earliest;
            earliest = estimated_completion_time(ctx.estimate_of(i), ctx.speed(j),
                                                 *state.solution.startOf[i], q);
            if (k == 0) earliest = std::max(earliest, t);
            sum += static_cast<double>(earliest - ctx.task(i).due()) /
                   static_cast<double>(ctx.task(i).requestedResponse);
        }
        count += list.size();
    }
    return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

}  // namespace

double schedule_recomputation(Millis t, const Schedule& schedule, double q,
                              SchedulerState& state, const SchedulerContext& ctx) {
    return chained_lateness(t, schedule, state, ctx, q, true);
}

double recompute_at_current_qualities(Millis t, const Schedule& schedule, SchedulerState& state,
                                      const SchedulerContext& ctx) {
    return chained_lateness(t, schedule, state, ctx, 0.0, false);
}

void bisection_control(Millis t, SchedulerState& state, const Schedule& schedule,
                       const SchedulerContext& ctx, const ControlConfig& config) {
    double lateness = schedule_recomputation(t, schedule, 1.0, state, ctx);
    if (lateness <= 0.0) return;
    lateness = schedule_recomputation(t, schedule, config.minQuality, state, ctx);
    if (lateness >= 0.0) return;

    double lb = config.minQuality;
    double ub = 1.0;
    double q = 1.0;
    lateness = 1.0;
    for (int iter = 0; iter < config.maxIters; ++iter) {
        if (lateness > 0.0) {
            ub = q;
        } else {
            lb = q;
        }
        q = (lb + ub) / 2.0;
        lateness = schedule_recomputation(t, schedule, q, state, ctx);
    }
}

namespace {

// Weights of the linearized per-resource lateness, written by schedule
// position; returns the quality-independent constant part.
double fill_weights(const Schedule& schedule, ResourceId resource, const SchedulerState& state,
                    const SchedulerContext& ctx, Millis phantomTime,
                    std::vector<double>& weights) {
    const auto& list = schedule.perResource[resource];
    const auto n = static_cast<double>(list.size());
    const Millis firstStart = *state.solution.startOf[list[0]];
    const double speed = ctx.speed(resource);
    weights.assign(list.size(), 0.0);
    double constant = 0.0;
    double suffixInvResponse = 0.0;
    for (std::size_t k = list.size(); k-- > 0;) {
        const TaskId i = list[k];
        suffixInvResponse += 1.0 / static_cast<double>(ctx.task(i).requestedResponse);
        weights[k] = static_cast<double>(ctx.estimate_of(i).max_value()) / (speed * n) *
                     suffixInvResponse;
        constant += static_cast<double>(firstStart + phantomTime - ctx.task(i).due()) /
                    (n * static_cast<double>(ctx.task(i).requestedResponse));
    }
    return constant;
}

}  // namespace

WeightedLateness task_weights(const Schedule& schedule, ResourceId resource,
                              const SchedulerState& state, const SchedulerContext& ctx,
                              Millis phantomTime) {
    WeightedLateness out;
    const auto& list = schedule.perResource[resource];
    if (list.empty()) return out;
    std::vector<double> weights;
    out.constant = fill_weights(schedule, resource, state, ctx, phantomTime, weights);
    out.weights.reserve(list.size());
    for (std::size_t k = 0; k < list.size(); ++k) {
        out.weights.push_back({list[k], weights[k]});
    }
    return out;
}

void individual_control(Millis t, SchedulerState& state, const Schedule& schedule,
                        ResourceId resource, const SchedulerContext& ctx,
                        const ControlConfig& config) {
    const auto& list = schedule.perResource[resource];
    if (list.empty()) return;

    const TaskId first = list[0];
    const double speed = ctx.speed(resource);
    const Millis firstEstCompletion = estimated_completion_time(
        ctx.estimate_of(first), speed, *state.solution.startOf[first], 1.0);
    const bool usePhantom = t >= firstEstCompletion;
    const Millis phantomTime = usePhantom ? t - firstEstCompletion : 0;

    // Scratch buffers persist across calls; the control runs on every event.
    thread_local std::vector<double> weights;
    thread_local std::vector<double> quality;
    thread_local std::vector<std::uint32_t> order;

    const double constant = fill_weights(schedule, resource, state, ctx, phantomTime, weights);

    quality.assign(list.size(), 1.0);
    for (TaskId i : list) state.solution.qualityOf[i].set_from(t, 1.0);

    double weightedSum = 0.0;
    for (double w : weights) weightedSum += w;

    order.resize(list.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = static_cast<std::uint32_t>(k);
    std::sort(order.begin(), order.end(), [](std::uint32_t a, std::uint32_t b) {
        if (weights[a] != weights[b]) return weights[a] > weights[b];
        return a < b;
    });

    for (const std::uint32_t pos : order) {
        if (weightedSum + constant <= config.epsilon) break;
        const TaskId i = list[pos];
        if (i == first && usePhantom) continue;  // blocked by phantom time

        double lowerBound = config.minQuality;
        if (i == first) {
            // Progress already made must not be lost.
            const double progress = static_cast<double>(t - *state.solution.startOf[i]) * speed /
                                    static_cast<double>(ctx.estimate_of(i).max_value());
            lowerBound = std::min(1.0, std::max(lowerBound, progress));
        }
        const double w = weights[pos];
        const double rest = weightedSum - quality[pos] * w;
        const double root = (-constant - rest) / w;
        const double newQ = std::max(lowerBound, root);
        weightedSum += (newQ - quality[pos]) * w;
        quality[pos] = newQ;
        state.solution.qualityOf[i].set_from(t, newQ);
    }

    // Start times for the qualities just chosen.
    Millis earliest = 0;
    for (std::size_t k = 0; k < list.size(); ++k) {
        const TaskId i = list[k];
        if (k != 0) state.solution.startOf[i] = earliest;
        earliest = estimated_completion_time(ctx.estimate_of(i), speed,
                                             *state.solution.startOf[i], quality[k]);
        if (k == 0) earliest = std::max(earliest, t);
    }
}

void naive_control(Millis t, SchedulerState& state, const Schedule& schedule,
                   const SchedulerContext& ctx, const ControlConfig& config) {
    double lateness = recompute_at_current_qualities(t, schedule, state, ctx);

    struct Running {
        Millis elapsed;
        TaskId task;
        ResourceId resource;
    };
    std::vector<Running> running;
    for (ResourceId j = 0; j < static_cast<ResourceId>(ctx.num_resources()); ++j) {
        const auto& list = schedule.perResource[j];
        if (list.empty() || !state.currentlyBeingProcessed[list[0]]) continue;
        running.push_back({t - *state.solution.startOf[list[0]], list[0], j});
    }
    std::sort(running.begin(), running.end(), [](const Running& a, const Running& b) {
        if (a.elapsed != b.elapsed) return a.elapsed > b.elapsed;
        return a.task < b.task;
    });

    for (const Running& r : running) {
        if (lateness <= 0.0) break;
        const double progress = static_cast<double>(r.elapsed) * ctx.speed(r.resource) /
                                static_cast<double>(ctx.estimate_of(r.task).max_value());
        const double bound = std::min(1.0, std::max(config.minQuality, progress));
        state.solution.qualityOf[r.task].set_from(t, bound);
        lateness = recompute_at_current_qualities(t, schedule, state, ctx);
    }
}

double static_control_quality(ControlMode mode, const ControlConfig& config, Rng& rng) {
    switch (mode) {
        case ControlMode::max: return 1.0;
        case ControlMode::min: return config.minQuality;
        case ControlMode::random: return rng.uniform(config.minQuality, 1.0);
        default: throw std::invalid_argument("not a static control mode");
    }
}

namespace {

class StaticController final : public QualityController {
public:
    void apply(Millis, SchedulerState&, const Schedule&, const SchedulerContext&) override {}
};

class BisectionController final : public QualityController {
public:
    explicit BisectionController(ControlConfig config) : config_(config) {}
    void apply(Millis t, SchedulerState& state, const Schedule& schedule,
               const SchedulerContext& ctx) override {
        bisection_control(t, state, schedule, ctx, config_);
    }

private:
    ControlConfig config_;
};

class IndividualController final : public QualityController {
public:
    explicit IndividualController(ControlConfig config) : config_(config) {}
    void apply(Millis t, SchedulerState& state, const Schedule& schedule,
               const SchedulerContext& ctx) override {
        for (ResourceId j = 0; j < static_cast<ResourceId>(ctx.num_resources()); ++j) {
            individual_control(t, state, schedule, j, ctx, config_);
        }
    }

private:
    ControlConfig config_;
};

class NaiveController final : public QualityController {
public:
    explicit NaiveController(ControlConfig config) : config_(config) {}
    void apply(Millis t, SchedulerState& state, const Schedule& schedule,
               const SchedulerContext& ctx) override {
        naive_control(t, state, schedule, ctx, config_);
    }

private:
    ControlConfig config_;
};

}  // namespace

std::unique_ptr<QualityController> make_controller(const ControlConfig& config) {
    switch (config.mode) {
        case ControlMode::bisection: return std::make_unique<BisectionController>(config);
        case ControlMode::individual: return std::make_unique<IndividualController>(config);
        case ControlMode::naive: return std::make_unique<NaiveController>(config);
        default: return std::make_unique<StaticController>();
    }
}

}  // namespace anysched
