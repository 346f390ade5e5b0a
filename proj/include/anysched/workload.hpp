#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>

#include "anysched/estimator.hpp"
#include "anysched/rng.hpp"
#include "anysched/types.hpp"

namespace anysched {

/// Workload generation parameters. The defaults reproduce the reference
/// overload setup: 20 resources with speeds U(1,3), three task groups split
/// by maximum processing time at 2 s and 20 s, six clients per group with
/// exponential inter-arrival times of mean 100 ms, and 600/510/420 tasks
/// per group.
struct WorkloadConfig {
    int numResources = 20;
    double speedMin = 1.0;
    double speedMax = 3.0;
    double minQuality = 0.2;
    std::array<Millis, 2> groupThresholds{2000, 20000};  // ms, upper edges of groups 1 and 2
    int clientsPerGroup = 6;
    double meanInterArrivalMs = 100.0;
    std::array<int, 3> taskCounts{600, 510, 420};
    std::uint64_t seed = 1;

    void validate() const;  // throws std::invalid_argument listing problems
};

struct Scenario {
    WorkloadConfig config;
    int featureDim = 4;
    std::vector<Resource> resources;
    std::vector<Instance> instances;
    std::vector<Task> tasks;  // ordered by arrival time
};

// Synthetic stand-ins for rostering instances. Features are (employees,
// days, required shifts, roster size); the ground-truth processing time
// function gets its scale and curvature from the features plus bounded
// multiplicative noise.
Instance synth_instance(int id, Rng& rng);

// Group index 0..2 by maximum ground-truth processing time.
int group_of(const Instance& instance, const WorkloadConfig& config);

// Instances sampled until every group holds exactly its task count.
std::vector<Instance> generate_instances(const WorkloadConfig& config, Rng& rng);

// Requested response time: instances are binned by whole seconds of their
// maximum processing time; bin k draws uniformly from [1.5k, 3k] seconds.
Millis sample_requested_response(Millis maxPtf, Rng& rng);

std::vector<Resource> generate_resources(const WorkloadConfig& config, Rng& rng);

// Per-client exponential arrival streams over the group instance pools,
// merged into one time-ordered task list.
std::vector<Task> generate_arrivals(const WorkloadConfig& config,
                                    const std::vector<Instance>& instances, Rng& arrivalRng,
                                    Rng& responseRng);

Scenario generate_scenario(const WorkloadConfig& config);

// A recorded objective curve for an instance processed at the given speed:
// wall-clock times, values spanning the full quality range, plus the flat
// tail up to the worst-case processing time. `noise` scales the bounded
// multiplicative time jitter (0 = exact measurement).
ObjectiveCurve synth_objective_curve(const Instance& instance, double resourceSpeed, Rng& rng,
                                     double noise);

// Observations for offline model training, drawn from the same family.
std::vector<TrainingObservation> generate_training_observations(int count, std::uint64_t seed,
                                                                double noise = 0.08);

void save_scenario(std::ostream& out, const Scenario& scenario);
Scenario load_scenario(std::istream& in);

}  // namespace anysched
