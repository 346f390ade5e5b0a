#pragma once

#include <iosfwd>

#include "anysched/sim.hpp"
#include "anysched/workload.hpp"

namespace anysched {

/// Flat key/value run configuration: workload generation plus control and
/// estimation settings. See configs/ for a documented example.
struct RunConfig {
    WorkloadConfig workload;
    ControlMode control = ControlMode::bisection;
    EstimationMode estimation = EstimationMode::measured;
    int maxIters = 30;
    double epsilon = 1e-6;
    bool onlineRetrain = false;
    int retrainEvery = 25;
};

// Parses `key = value` lines; '#' starts a comment. Unknown keys and
// malformed values raise std::invalid_argument naming the offending line.
RunConfig parse_run_config(std::istream& in);

}  // namespace anysched
