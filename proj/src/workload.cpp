#include "anysched/workload.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace anysched {

void WorkloadConfig::validate() const {
    std::string problems;
    auto complain = [&problems](const std::string& p) {
        problems += (problems.empty() ? "" : "; ") + p;
    };
    if (numResources <= 0) complain("num_resources must be positive");
    if (!(speedMin > 0.0) || speedMax < speedMin) complain("speed range must be 0 < min <= max");
    if (!(minQuality > 0.0 && minQuality <= 1.0)) complain("min_quality must be in (0, 1]");
    if (groupThresholds[0] <= 0 || groupThresholds[1] <= groupThresholds[0]) {
        complain("group thresholds must be strictly increasing and positive");
    }
    if (clientsPerGroup <= 0) complain("clients_per_group must be positive");
    if (!(meanInterArrivalMs > 0.0)) complain("mean_interarrival_ms must be positive");
    for (int count : taskCounts) {
        if (count <= 0) complain("task counts must be positive");
    }
    if (!problems.empty()) throw std::invalid_argument(problems);
}

namespace {

constexpr double kScale = 10.0;  // overall processing-time scale of the family

struct ShapeParams {
    double alpha;  // linear mix-in; keeps every segment slope near the rest
    double beta;   // curvature exponent
};

// Continuous normalized processing time at quality q for a unit-scale shape.
double shape_value(const ShapeParams& s, double q) {
    return s.alpha * q + (1.0 - s.alpha) * std::pow(q, s.beta);
}

}  // namespace

Instance synth_instance(int id, Rng& rng) {
    const auto employees = static_cast<double>(rng.uniform_int(5, 30));
    const double daysChoices[3] = {7.0, 14.0, 31.0};
    const double days = daysChoices[rng.uniform_int(0, 2)];
    const double weeklyWorkload = rng.uniform_int(0, 1) == 0 ? 20.0 : 40.0;
    const double coverage = rng.uniform(0.7, 1.3);

    const double requiredShifts =
        std::round(employees * (weeklyWorkload / 8.0) * (days / 7.0) * coverage);
    const double rosterSize = employees * days;

    const double scaleNoise = std::exp(rng.uniform(-0.12, 0.12));
    const double maxNpt = kScale * std::pow(employees, 1.2) * std::pow(days, 1.4) *
                          std::sqrt(weeklyWorkload / 20.0) * std::pow(coverage, 0.7) * scaleNoise;

    const double aFactor = 0.5 * (employees - 5.0) / 25.0 + 0.5 * rng.uniform();
    const double bFactor = 0.4 * (days - 7.0) / 24.0 + 0.3 * (weeklyWorkload - 20.0) / 20.0 +
                           0.3 * rng.uniform();
    const ShapeParams shape{0.18 + 0.12 * aFactor, 1.8 + 0.9 * bFactor};

    std::array<double, PiecewiseLinearPtf::kEndpoints> raw{};
    for (int k = 0; k < PiecewiseLinearPtf::kEndpoints; ++k) {
        raw[k] = maxNpt * shape_value(shape, 0.1 * (k + 1));
    }

    Instance instance;
    instance.id = id;
    instance.truePtf = PiecewiseLinearPtf::from_real(raw);
    instance.features = {employees, days, requiredShifts, rosterSize};
    instance.wct = static_cast<Millis>(
        std::ceil(static_cast<double>(instance.truePtf.max_value()) * rng.uniform(1.05, 1.25)));
    return instance;
}

int group_of(const Instance& instance, const WorkloadConfig& config) {
    const Millis maxPtf = instance.truePtf.max_value();
    if (maxPtf <= config.groupThresholds[0]) return 0;
    if (maxPtf <= config.groupThresholds[1]) return 1;
    return 2;
}

std::vector<Instance> generate_instances(const WorkloadConfig& config, Rng& rng) {
    std::vector<Instance> instances;
    const int total = config.taskCounts[0] + config.taskCounts[1] + config.taskCounts[2];
    instances.reserve(static_cast<std::size_t>(total));
    std::array<int, 3> filled{0, 0, 0};
    while (static_cast<int>(instances.size()) < total) {
        Instance candidate = synth_instance(static_cast<int>(instances.size()), rng);
        const int g = group_of(candidate, config);
        if (filled[g] >= config.taskCounts[g]) continue;  // group full, resample
        ++filled[g];
        candidate.id = static_cast<int>(instances.size());
        instances.push_back(std::move(candidate));
    }
    return instances;
}

Millis sample_requested_response(Millis maxPtf, Rng& rng) {
    const auto bin = static_cast<double>((maxPtf + 999) / 1000);  // 1-second bins
    const double seconds = rng.uniform(1.5 * bin, 3.0 * bin);
    return std::llround(seconds * 1000.0);
}

std::vector<Resource> generate_resources(const WorkloadConfig& config, Rng& rng) {
    std::vector<Resource> resources(static_cast<std::size_t>(config.numResources));
    for (int j = 0; j < config.numResources; ++j) {
        resources[static_cast<std::size_t>(j)] = {j, rng.uniform(config.speedMin, config.speedMax)};
    }
    return resources;
}

std::vector<Task> generate_arrivals(const WorkloadConfig& config,
                                    const std::vector<Instance>& instances, Rng& arrivalRng,
                                    Rng& responseRng) {
    std::vector<Millis> responseOf(instances.size());
    for (std::size_t i = 0; i < instances.size(); ++i) {
        responseOf[i] = sample_requested_response(instances[i].truePtf.max_value(), responseRng);
    }

    std::array<std::vector<int>, 3> pools;
    for (const Instance& instance : instances) {
        pools[static_cast<std::size_t>(group_of(instance, config))].push_back(instance.id);
    }

    struct Pending {
        Millis arrival;
        std::size_t sequence;
        int instanceId;
    };
    std::vector<Pending> stream;
    stream.reserve(instances.size());
    std::size_t sequence = 0;
    for (auto& pool : pools) {
        arrivalRng.shuffle(pool);
        // Deal the pool round-robin over this group's clients.
        for (int c = 0; c < config.clientsPerGroup; ++c) {
            double clock = 0.0;
            for (std::size_t k = static_cast<std::size_t>(c); k < pool.size();
                 k += static_cast<std::size_t>(config.clientsPerGroup)) {
                clock += arrivalRng.exponential(config.meanInterArrivalMs);
                stream.push_back({std::llround(clock), sequence++, pool[k]});
            }
        }
    }
    std::sort(stream.begin(), stream.end(), [](const Pending& a, const Pending& b) {
        if (a.arrival != b.arrival) return a.arrival < b.arrival;
        return a.sequence < b.sequence;
    });

    std::vector<Task> tasks(stream.size());
    for (std::size_t i = 0; i < stream.size(); ++i) {
        tasks[i] = {static_cast<TaskId>(i), stream[i].arrival,
                    responseOf[static_cast<std::size_t>(stream[i].instanceId)],
                    stream[i].instanceId};
    }
    return tasks;
}

Scenario generate_scenario(const WorkloadConfig& config) {
    config.validate();
    Scenario scenario;
    scenario.config = config;

    Rng instanceRng = Rng::stream(config.seed, "instances");
    Rng speedRng = Rng::stream(config.seed, "speeds");
    Rng arrivalRng = Rng::stream(config.seed, "arrivals");
    Rng responseRng = Rng::stream(config.seed, "response-times");

    scenario.instances = generate_instances(config, instanceRng);
    scenario.resources = generate_resources(config, speedRng);
    scenario.tasks = generate_arrivals(config, scenario.instances, arrivalRng, responseRng);
    return scenario;
}

ObjectiveCurve synth_objective_curve(const Instance& instance, double resourceSpeed, Rng& rng,
                                     double noise) {
    const auto& psi = instance.truePtf.values();
    const double globalFactor = noise > 0.0 ? std::exp(rng.uniform(-noise, noise)) : 1.0;

    ObjectiveCurve curve;
    curve.points.push_back({0.0, 0.0});  // trivial first solution
    double lastTime = 0.0;
    for (int k = 0; k < PiecewiseLinearPtf::kEndpoints; ++k) {
        const double jitter =
            noise > 0.0 ? std::exp(rng.uniform(-noise / 3.0, noise / 3.0)) : 1.0;
        double time = static_cast<double>(psi[k]) * globalFactor * jitter / resourceSpeed;
        if (time <= lastTime) time = lastTime + 1e-3;
        curve.points.push_back({time, 0.1 * (k + 1)});
        lastTime = time;
    }
    // Flat tail up to the worst-case stopping time; tail cutting removes it.
    const double wallWct = static_cast<double>(instance.wct) / resourceSpeed;
    for (int j = 1; j <= 3; ++j) {
        double time = lastTime + (wallWct - lastTime) * j / 3.0;
        if (time <= lastTime) time = lastTime + 1e-3;
        curve.points.push_back({time, 1.0 + 1e-3 * j});
        lastTime = time;
    }
    return curve;
}

std::vector<TrainingObservation> generate_training_observations(int count, std::uint64_t seed,
                                                                double noise) {
    Rng rng(seed);
    std::vector<TrainingObservation> observations;
    observations.reserve(static_cast<std::size_t>(count));
    while (static_cast<int>(observations.size()) < count) {
        const Instance instance = synth_instance(static_cast<int>(observations.size()), rng);
        const double speed = rng.uniform(1.0, 3.0);
        const ObjectiveCurve curve = synth_objective_curve(instance, speed, rng, noise);
        auto obs = observation_from_curve(curve, speed, instance.wct, instance.features);
        if (obs) observations.push_back(std::move(*obs));
    }
    return observations;
}

namespace {

void expect_token(std::istream& in, const std::string& expected) {
    std::string token;
    in >> token;
    if (token != expected) {
        throw std::runtime_error("scenario parse error: expected '" + expected + "', got '" +
                                 token + "'");
    }
}

}  // namespace

void save_scenario(std::ostream& out, const Scenario& scenario) {
    out.precision(17);
    const WorkloadConfig& c = scenario.config;
    out << "anysched-scenario 1\n";
    out << "num_resources " << c.numResources << "\n";
    out << "speed_min " << c.speedMin << "\n";
    out << "speed_max " << c.speedMax << "\n";
    out << "min_quality " << c.minQuality << "\n";
    out << "group_threshold1 " << c.groupThresholds[0] << "\n";
    out << "group_threshold2 " << c.groupThresholds[1] << "\n";
    out << "clients_per_group " << c.clientsPerGroup << "\n";
    out << "mean_interarrival_ms " << c.meanInterArrivalMs << "\n";
    out << "tasks_group1 " << c.taskCounts[0] << "\n";
    out << "tasks_group2 " << c.taskCounts[1] << "\n";
    out << "tasks_group3 " << c.taskCounts[2] << "\n";
    out << "seed " << c.seed << "\n";
    out << "feature_dim " << scenario.featureDim << "\n";
    out << "resources " << scenario.resources.size() << "\n";
    for (const Resource& r : scenario.resources) out << r.id << ' ' << r.speed << "\n";
    out << "instances " << scenario.instances.size() << "\n";
    for (const Instance& instance : scenario.instances) {
        out << instance.id;
        for (double f : instance.features) out << ' ' << f;
        out << ' ' << instance.wct;
        for (Millis v : instance.truePtf.values()) out << ' ' << v;
        out << "\n";
    }
    out << "tasks " << scenario.tasks.size() << "\n";
    for (const Task& task : scenario.tasks) {
        out << task.id << ' ' << task.arrival << ' ' << task.requestedResponse << ' '
            << task.instanceId << "\n";
    }
}

Scenario load_scenario(std::istream& in) {
    Scenario scenario;
    WorkloadConfig& c = scenario.config;
    expect_token(in, "anysched-scenario");
    int version = 0;
    in >> version;
    if (version != 1) throw std::runtime_error("unsupported scenario version");

    expect_token(in, "num_resources");
    in >> c.numResources;
    expect_token(in, "speed_min");
    in >> c.speedMin;
    expect_token(in, "speed_max");
    in >> c.speedMax;
    expect_token(in, "min_quality");
    in >> c.minQuality;
    expect_token(in, "group_threshold1");
    in >> c.groupThresholds[0];
    expect_token(in, "group_threshold2");
    in >> c.groupThresholds[1];
    expect_token(in, "clients_per_group");
    in >> c.clientsPerGroup;
    expect_token(in, "mean_interarrival_ms");
    in >> c.meanInterArrivalMs;
    expect_token(in, "tasks_group1");
    in >> c.taskCounts[0];
    expect_token(in, "tasks_group2");
    in >> c.taskCounts[1];
    expect_token(in, "tasks_group3");
    in >> c.taskCounts[2];
    expect_token(in, "seed");
    in >> c.seed;
    expect_token(in, "feature_dim");
    in >> scenario.featureDim;

    expect_token(in, "resources");
    std::size_t count = 0;
    in >> count;
    scenario.resources.resize(count);
    for (Resource& r : scenario.resources) in >> r.id >> r.speed;

    expect_token(in, "instances");
    in >> count;
    scenario.instances.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Instance instance;
        in >> instance.id;
        instance.features.resize(static_cast<std::size_t>(scenario.featureDim));
        for (double& f : instance.features) in >> f;
        in >> instance.wct;
        PiecewiseLinearPtf::Values values{};
        for (Millis& v : values) in >> v;
        instance.truePtf = PiecewiseLinearPtf(values);
        if (instance.truePtf.max_value() > instance.wct) {
            throw std::runtime_error("instance " + std::to_string(instance.id) +
                                     ": ptf exceeds worst-case processing time");
        }
        scenario.instances.push_back(std::move(instance));
    }

    expect_token(in, "tasks");
    in >> count;
    scenario.tasks.resize(count);
    for (Task& task : scenario.tasks) {
        in >> task.id >> task.arrival >> task.requestedResponse >> task.instanceId;
        if (task.requestedResponse < 1) throw std::runtime_error("task with non-positive response");
    }
    if (!in) throw std::runtime_error("truncated scenario file");
    return scenario;
}

}  // namespace anysched
