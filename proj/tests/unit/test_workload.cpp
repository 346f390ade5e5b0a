#include <doctest.h>

#include <set>
#include <sstream>

#include "anysched/config.hpp"
#include "anysched/workload.hpp"

using namespace anysched;

namespace {

WorkloadConfig small_config(std::uint64_t seed = 7) {
    WorkloadConfig config;
    config.numResources = 4;
    config.clientsPerGroup = 2;
    config.taskCounts = {30, 20, 10};
    config.seed = seed;
    return config;
}

}  // namespace

TEST_CASE("config validation lists the problems") {
    WorkloadConfig config = small_config();
    config.numResources = 0;
    config.taskCounts[1] = -5;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config = small_config();
    config.groupThresholds = {5000, 5000};
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
}

TEST_CASE("instances draw their features from the documented ranges") {
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
        const Instance instance = synth_instance(i, rng);
        REQUIRE(instance.features.size() == 4);
        const double employees = instance.features[0];
        const double days = instance.features[1];
        CHECK(employees >= 5);
        CHECK(employees <= 30);
        CHECK((days == 7 || days == 14 || days == 31));
        CHECK(instance.features[3] == employees * days);
        CHECK(instance.truePtf.max_value() <= instance.wct);
    }
}

TEST_CASE("generated instances fill every group exactly") {
    const WorkloadConfig config = small_config();
    Rng rng(11);
    const auto instances = generate_instances(config, rng);
    REQUIRE(static_cast<int>(instances.size()) == 60);
    std::array<int, 3> counts{0, 0, 0};
    for (const Instance& instance : instances) {
        ++counts[static_cast<std::size_t>(group_of(instance, config))];
    }
    CHECK(counts[0] == 30);
    CHECK(counts[1] == 20);
    CHECK(counts[2] == 10);
}

TEST_CASE("group membership follows the attached ground-truth function") {
    const WorkloadConfig config = small_config();
    Rng rng(11);
    for (const Instance& instance : generate_instances(config, rng)) {
        const Millis maxPtf = instance.truePtf.max_value();
        const int g = group_of(instance, config);
        if (g == 0) CHECK(maxPtf <= 2000);
        if (g == 1) {
            CHECK(maxPtf > 2000);
            CHECK(maxPtf <= 20000);
        }
        if (g == 2) CHECK(maxPtf > 20000);
    }
}

TEST_CASE("requested response times land in the one-second bins") {
    Rng rng(13);
    for (int i = 0; i < 200; ++i) {
        const Millis r1 = sample_requested_response(500, rng);
        CHECK(r1 >= 1500);
        CHECK(r1 <= 3000);
        const Millis r3 = sample_requested_response(2500, rng);
        CHECK(r3 >= 4500);
        CHECK(r3 <= 9000);
    }
}

TEST_CASE("resources take speeds from the configured range") {
    const WorkloadConfig config = small_config();
    Rng rng(17);
    const auto resources = generate_resources(config, rng);
    REQUIRE(resources.size() == 4);
    for (const Resource& r : resources) {
        CHECK(r.speed >= 1.0);
        CHECK(r.speed <= 3.0);
    }
}

TEST_CASE("exponential inter-arrival draws have the configured mean") {
    Rng rng(19);
    double sum = 0.0;
    const int draws = 500;
    for (int i = 0; i < draws; ++i) sum += rng.exponential(100.0);
    CHECK(sum / draws == doctest::Approx(100.0).epsilon(0.10));
}

TEST_CASE("the arrival stream is sorted and uses every instance once") {
    const Scenario scenario = generate_scenario(small_config());
    REQUIRE(scenario.tasks.size() == 60);
    Millis last = 0;
    std::set<int> used;
    for (const Task& task : scenario.tasks) {
        CHECK(task.arrival >= last);
        last = task.arrival;
        CHECK(used.insert(task.instanceId).second);
        CHECK(task.requestedResponse >= 1);
    }
}

TEST_CASE("the reference overload configuration generates 1430 tasks") {
    WorkloadConfig config;
    config.taskCounts = {600, 510, 320};
    config.seed = 5;
    const Scenario scenario = generate_scenario(config);
    CHECK(scenario.tasks.size() == 1430);
    CHECK(scenario.resources.size() == 20);
}

TEST_CASE("identical config and seed give byte-identical serializations") {
    std::stringstream a, b;
    save_scenario(a, generate_scenario(small_config(99)));
    save_scenario(b, generate_scenario(small_config(99)));
    CHECK(a.str() == b.str());

    std::stringstream c;
    save_scenario(c, generate_scenario(small_config(100)));
    CHECK(a.str() != c.str());
}

TEST_CASE("scenario files round-trip") {
    const Scenario scenario = generate_scenario(small_config(23));
    std::stringstream file;
    save_scenario(file, scenario);
    const Scenario loaded = load_scenario(file);

    REQUIRE(loaded.tasks.size() == scenario.tasks.size());
    REQUIRE(loaded.instances.size() == scenario.instances.size());
    CHECK(loaded.config.seed == scenario.config.seed);
    for (std::size_t i = 0; i < scenario.instances.size(); ++i) {
        CHECK(loaded.instances[i].truePtf == scenario.instances[i].truePtf);
        CHECK(loaded.instances[i].features == scenario.instances[i].features);
        CHECK(loaded.instances[i].wct == scenario.instances[i].wct);
    }
    for (std::size_t i = 0; i < scenario.tasks.size(); ++i) {
        CHECK(loaded.tasks[i].arrival == scenario.tasks[i].arrival);
        CHECK(loaded.tasks[i].requestedResponse == scenario.tasks[i].requestedResponse);
        CHECK(loaded.tasks[i].instanceId == scenario.tasks[i].instanceId);
    }

    // Serialization of the loaded scenario is identical to the original.
    std::stringstream again;
    save_scenario(again, loaded);
    std::stringstream original;
    save_scenario(original, scenario);
    CHECK(again.str() == original.str());
}

TEST_CASE("corrupted scenario files are rejected") {
    std::stringstream bad("anysched-scenario 1\nnum_resources oops\n");
    CHECK_THROWS(load_scenario(bad));
    std::stringstream wrongMagic("other-format 1\n");
    CHECK_THROWS(load_scenario(wrongMagic));
}

TEST_CASE("synthetic observations survive the pipeline and match the family") {
    const auto observations = generate_training_observations(50, 12345, 0.08);
    REQUIRE(observations.size() == 50);
    for (const auto& obs : observations) {
        REQUIRE(obs.features.size() == 4);
        double prev = 0.0;
        for (double p : obs.params) {
            CHECK(p > prev);
            prev = p;
        }
    }
}

TEST_CASE("run config files parse every key") {
    std::stringstream file(R"(# example
num_resources = 8
speed_min = 1.5
speed_max = 2.5
min_quality = 0.3
group_threshold1_ms = 1000
group_threshold2_ms = 10000
clients_per_group = 4   # trailing comment
mean_interarrival_ms = 250
tasks_group1 = 10
tasks_group2 = 20
tasks_group3 = 30
seed = 99
control = individual
estimation = linear
max_iters = 12
epsilon = 1e-5
online_retrain = 1
retrain_every = 10
)");
    const RunConfig config = parse_run_config(file);
    CHECK(config.workload.numResources == 8);
    CHECK(config.workload.speedMin == 1.5);
    CHECK(config.workload.minQuality == 0.3);
    CHECK(config.workload.groupThresholds[1] == 10000);
    CHECK(config.workload.clientsPerGroup == 4);
    CHECK(config.workload.meanInterArrivalMs == 250);
    CHECK(config.workload.taskCounts == std::array<int, 3>{10, 20, 30});
    CHECK(config.workload.seed == 99);
    CHECK(config.control == ControlMode::individual);
    CHECK(config.estimation == EstimationMode::linear);
    CHECK(config.maxIters == 12);
    CHECK(config.epsilon == 1e-5);
    CHECK(config.onlineRetrain);
    CHECK(config.retrainEvery == 10);
}

TEST_CASE("run config files reject unknown keys and bad values") {
    std::stringstream unknown("no_such_key = 5\n");
    CHECK_THROWS_AS(parse_run_config(unknown), std::invalid_argument);
    std::stringstream bad("num_resources = many\n");
    CHECK_THROWS_AS(parse_run_config(bad), std::invalid_argument);
    std::stringstream noEquals("num_resources 5\n");
    CHECK_THROWS_AS(parse_run_config(noEquals), std::invalid_argument);
}

TEST_CASE("noise-free observed curves recover the ground truth closely") {
    Rng rng(31);
    for (int trial = 0; trial < 30; ++trial) {
        const Instance instance = synth_instance(trial, rng);
        const double speed = rng.uniform(1.0, 3.0);
        const ObjectiveCurve curve = synth_objective_curve(instance, speed, rng, 0.0);
        const auto obs = observation_from_curve(curve, speed, instance.wct, instance.features);
        REQUIRE(obs.has_value());
        for (int k = 0; k < 10; ++k) {
            const auto truth = static_cast<double>(instance.truePtf.values()[k]);
            CHECK(std::abs(obs->params[k] - truth) <= truth * 0.02 + 2.0);
        }
    }
}
