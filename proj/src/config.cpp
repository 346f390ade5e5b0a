#include "anysched/config.hpp"

#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace anysched {

namespace {

std::string strip(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

}  // namespace

RunConfig parse_run_config(std::istream& in) {
    RunConfig config;
    std::string line;
    int lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = strip(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(lineNo) +
                                        ": expected key = value");
        }
        const std::string key = strip(line.substr(0, eq));
        const std::string value = strip(line.substr(eq + 1));
        std::istringstream v(value);
        auto parse = [&](auto& target) {
            if (!(v >> target)) {
                throw std::invalid_argument("config line " + std::to_string(lineNo) +
                                            ": bad value for " + key);
            }
        };

        WorkloadConfig& w = config.workload;
        if (key == "num_resources") parse(w.numResources);
        else if (key == "speed_min") parse(w.speedMin);
        else if (key == "speed_max") parse(w.speedMax);
        else if (key == "min_quality") parse(w.minQuality);
        else if (key == "group_threshold1_ms") parse(w.groupThresholds[0]);
        else if (key == "group_threshold2_ms") parse(w.groupThresholds[1]);
        else if (key == "clients_per_group") parse(w.clientsPerGroup);
        else if (key == "mean_interarrival_ms") parse(w.meanInterArrivalMs);
        else if (key == "tasks_group1") parse(w.taskCounts[0]);
        else if (key == "tasks_group2") parse(w.taskCounts[1]);
        else if (key == "tasks_group3") parse(w.taskCounts[2]);
        else if (key == "seed") parse(w.seed);
        else if (key == "control") config.control = control_mode_from_string(value);
        else if (key == "estimation") config.estimation = estimation_mode_from_string(value);
        else if (key == "max_iters") parse(config.maxIters);
        else if (key == "epsilon") parse(config.epsilon);
        else if (key == "online_retrain") parse(config.onlineRetrain);
        else if (key == "retrain_every") parse(config.retrainEvery);
        else {
            throw std::invalid_argument("config line " + std::to_string(lineNo) +
                                        ": unknown key " + key);
        }
    }
    return config;
}

}  // namespace anysched
