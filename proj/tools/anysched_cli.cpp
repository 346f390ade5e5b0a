#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "anysched/config.hpp"
#include "anysched/metrics.hpp"
#include "anysched/sim.hpp"
#include "anysched/workload.hpp"

namespace fs = std::filesystem;
using namespace anysched;

namespace {

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    return out;
}

int cmd_gen_workload(const std::string& configPath, const std::string& outPath,
                     std::uint64_t seedOverride, int resourcesOverride) {
    auto in = open_input(configPath);
    RunConfig config = parse_run_config(in);
    if (seedOverride != 0) config.workload.seed = seedOverride;
    if (resourcesOverride > 0) config.workload.numResources = resourcesOverride;

    const Scenario scenario = generate_scenario(config.workload);
    auto out = open_output(outPath);
    save_scenario(out, scenario);
    std::cout << "wrote " << outPath << ": " << scenario.tasks.size() << " tasks, "
              << scenario.resources.size() << " resources\n";
    return 0;
}

int cmd_simulate(const std::string& scenarioPath, const SimOptions& options,
                 const std::string& outDir, const std::string& runtimeOut) {
    auto in = open_input(scenarioPath);
    const Scenario scenario = load_scenario(in);

    const SimResult result = run(scenario, options);

    const RunMetrics metrics = summarize(result);
    fs::create_directories(outDir);
    {
        auto out = open_output((fs::path(outDir) / "records.csv").string());
        write_records(out, result.records);
    }
    {
        auto out = open_output((fs::path(outDir) / "events.csv").string());
        write_events(out, result.events);
    }
    {
        auto out = open_output((fs::path(outDir) / "metrics.txt").string());
        write_metrics(out, metrics);
    }
    if (!runtimeOut.empty()) {
        auto out = open_output(runtimeOut);
        write_runtimes(out, result.runtimes);
    }
    std::cout << "control=" << to_string(options.control)
              << " estimation=" << to_string(options.estimation)
              << " avg_quality=" << metrics.avgSolutionQuality
              << " avg_normalized_lateness=" << metrics.avgNormalizedLateness
              << " max_normalized_lateness=" << metrics.maxNormalizedLateness << "\n";
    return 0;
}

int cmd_gen_observations(int count, std::uint64_t seed, double noise,
                         const std::string& outPath) {
    const auto observations = generate_training_observations(count, seed, noise);
    auto out = open_output(outPath);
    save_observations(out, observations);
    std::cout << "wrote " << observations.size() << " observations to " << outPath << "\n";
    return 0;
}

int cmd_estimate_eval(const std::string& trainPath, const std::string& testPath,
                      const RegressionParams& params, const std::string& outPath) {
    auto trainIn = open_input(trainPath);
    auto testIn = open_input(testPath);
    const auto trainSet = load_observations(trainIn);
    const auto testSet = load_observations(testIn);
    if (trainSet.empty() || testSet.empty()) {
        throw std::runtime_error("empty train or test observation file");
    }

    const RegressionModel model = train(trainSet, params);
    if (!model.trained()) throw std::runtime_error("too few observations to train");
    const ApeTable table = estimation_report(model, testSet);

    auto out = open_output(outPath);
    write_ape_table(out, table);
    std::cout << "wrote " << outPath << " (" << to_string(params.method) << ", "
              << trainSet.size() << " train / " << testSet.size() << " test)\n";
    return 0;
}

int cmd_report(const std::string& recordsPath, const std::string& outDir) {
    auto in = open_input(recordsPath);
    const auto records = read_records(in);
    if (records.empty()) throw std::runtime_error("records file is empty");

    fs::create_directories(outDir);
    {
        auto out = open_output((fs::path(outDir) / "metrics.txt").string());
        write_metrics(out, summarize(records));
    }
    {
        auto out = open_output((fs::path(outDir) / "pending.csv").string());
        write_pending_series(out, records);
    }
    {
        auto out = open_output((fs::path(outDir) / "lateness.csv").string());
        write_lateness_series(out, records);
    }
    {
        auto out = open_output((fs::path(outDir) / "quality.csv").string());
        write_quality_series(out, records);
    }
    std::cout << "wrote metrics and series to " << outDir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Online scheduling of anytime tasks on heterogeneous resources"};
    app.require_subcommand(1);

    // gen-workload
    std::string configPath, scenarioOut = "scenario.txt";
    std::uint64_t seedOverride = 0;
    int resourcesOverride = 0;
    auto* gen = app.add_subcommand("gen-workload", "Generate a scenario file from a config");
    gen->add_option("--config", configPath, "Run config file")->required();
    gen->add_option("--out", scenarioOut, "Scenario output path");
    gen->add_option("--seed", seedOverride, "Override the config seed");
    gen->add_option("--resources", resourcesOverride, "Override the resource count");

    // simulate
    std::string scenarioPath, outDir = "out", runtimeOut;
    std::string controlName = "bisection", estimationName = "measured", regressorName = "knn";
    SimOptions simOptions;
    auto* sim = app.add_subcommand("simulate", "Run a scenario to completion");
    sim->add_option("scenario", scenarioPath, "Scenario file")->required();
    sim->add_option("--control", controlName, "max|min|random|naive|bisection|individual");
    sim->add_option("--estimation", estimationName, "measured|full|linear");
    sim->add_option("--seed", simOptions.runSeed, "Run seed (default: scenario seed)");
    sim->add_option("--min-quality", simOptions.minQualityOverride,
                    "Override the scenario minimum quality");
    sim->add_option("--max-iters", simOptions.maxIters, "Bisection iteration budget");
    sim->add_option("--regressor", regressorName, "knn|tree");
    sim->add_option("--knn-k", simOptions.regression.k, "Neighbor count");
    sim->add_flag("--online-retrain", simOptions.onlineRetrain,
                  "Learn online from completed tasks instead of pretraining");
    sim->add_option("--retrain-every", simOptions.retrainEvery,
                    "Completions between online retrainings");
    sim->add_option("--out", outDir, "Output directory");
    sim->add_option("--runtime-out", runtimeOut, "Also write per-invocation runtimes CSV");

    // gen-observations
    int obsCount = 500;
    std::uint64_t obsSeed = 1;
    double obsNoise = 0.08;
    std::string obsOut = "observations.txt";
    auto* genObs = app.add_subcommand("gen-observations",
                                      "Sample training observations from the synthetic family");
    genObs->add_option("--count", obsCount, "Number of observations");
    genObs->add_option("--seed", obsSeed, "Sampling seed");
    genObs->add_option("--noise", obsNoise, "Multiplicative measurement noise");
    genObs->add_option("--out", obsOut, "Observation table output path");

    // estimate-eval
    std::string trainPath, testPath, tableOut = "ape.csv", methodName = "knn";
    RegressionParams evalParams;
    auto* eval = app.add_subcommand("estimate-eval", "Train on one observation file, report APE on another");
    eval->add_option("--train", trainPath, "Training observations")->required();
    eval->add_option("--test", testPath, "Held-out observations")->required();
    eval->add_option("--method", methodName, "knn|tree");
    eval->add_option("--knn-k", evalParams.k, "Neighbor count");
    eval->add_option("--out", tableOut, "APE table output path");

    // report
    std::string recordsPath, reportDir = "report";
    auto* rep = app.add_subcommand("report", "Metrics and plot series from a records file");
    rep->add_option("records", recordsPath, "records.csv from simulate")->required();
    rep->add_option("--out", reportDir, "Output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_gen_workload(configPath, scenarioOut, seedOverride,
                                                   resourcesOverride);
        if (sim->parsed()) {
            simOptions.control = control_mode_from_string(controlName);
            simOptions.estimation = estimation_mode_from_string(estimationName);
            simOptions.regression.method = regression_method_from_string(regressorName);
            return cmd_simulate(scenarioPath, simOptions, outDir, runtimeOut);
        }
        if (genObs->parsed()) return cmd_gen_observations(obsCount, obsSeed, obsNoise, obsOut);
        if (eval->parsed()) {
            evalParams.method = regression_method_from_string(methodName);
            return cmd_estimate_eval(trainPath, testPath, evalParams, tableOut);
        }
        if (rep->parsed()) return cmd_report(recordsPath, reportDir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
