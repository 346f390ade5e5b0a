#include <doctest.h>

#include <cmath>
#include <sstream>

#include "anysched/estimator.hpp"
#include "anysched/rng.hpp"

using namespace anysched;

namespace {

ObjectiveCurve make_curve(std::initializer_list<CurvePoint> points) {
    ObjectiveCurve curve;
    curve.points = points;
    return curve;
}

}  // namespace

TEST_CASE("ingestion rescales times by the resource speed and trims to the wct") {
    const auto curve = make_curve({{10, 1}, {20, 2}, {30, 3}});
    const auto normalized = ingest_curve(curve, 2.0, 50);
    REQUIRE(normalized.has_value());
    REQUIRE(normalized->points.size() == 2);
    CHECK(normalized->points[0].time == 20.0);
    CHECK(normalized->points[1].time == 40.0);
}

TEST_CASE("ingestion at unit speed is the identity on times") {
    const auto curve = make_curve({{10, 1}, {20, 2}});
    const auto normalized = ingest_curve(curve, 1.0, 100);
    REQUIRE(normalized.has_value());
    CHECK(normalized->points[0].time == 10.0);
    CHECK(normalized->points[1].time == 20.0);
}

TEST_CASE("ingestion discards observations entirely beyond the wct") {
    const auto curve = make_curve({{60, 1}, {70, 2}});
    CHECK_FALSE(ingest_curve(curve, 1.0, 50).has_value());
}

TEST_CASE("tail cutting keeps the prefix through the last steep segment") {
    const auto curve = make_curve({{0, 0}, {1, 10}, {2, 11}, {3, 11.1}});
    // Slopes 10, 1, 0.1; threshold 0.5 cuts only the final segment.
    const auto trimmed = trim_tail(curve);
    REQUIRE(trimmed.points.size() == 3);
    CHECK(trimmed.points.back().value == 11.0);
}

TEST_CASE("a strictly linear curve is never trimmed") {
    const auto curve = make_curve({{0, 0}, {10, 1}, {20, 2}, {30, 3}});
    CHECK(trim_tail(curve).points.size() == 4);
}

TEST_CASE("curves with at most two points are never trimmed") {
    CHECK(trim_tail(make_curve({{5, 1}})).points.size() == 1);
    CHECK(trim_tail(make_curve({{0, 0}, {100, 0.001}})).points.size() == 2);
}

TEST_CASE("trimming returns a prefix containing the steepest segment") {
    Rng rng(61);
    for (int trial = 0; trial < 200; ++trial) {
        ObjectiveCurve curve;
        double t = 0.0, v = 0.0;
        const int points = static_cast<int>(rng.uniform_int(2, 20));
        for (int i = 0; i < points; ++i) {
            t += rng.uniform(0.1, 50.0);
            v += rng.uniform(0.01, 10.0);
            curve.points.push_back({t, v});
        }
        const auto trimmed = trim_tail(curve);
        REQUIRE(!trimmed.points.empty());
        REQUIRE(trimmed.points.size() <= curve.points.size());
        for (std::size_t i = 0; i < trimmed.points.size(); ++i) {
            CHECK(trimmed.points[i].time == curve.points[i].time);
        }
        // The steepest segment's endpoint always survives.
        double maxSlope = 0.0;
        std::size_t steepEnd = 0;
        for (std::size_t i = 0; i + 1 < curve.points.size(); ++i) {
            const double slope = (curve.points[i + 1].value - curve.points[i].value) /
                                 (curve.points[i + 1].time - curve.points[i].time);
            if (slope > maxSlope) {
                maxSlope = slope;
                steepEnd = i + 1;
            }
        }
        CHECK(trimmed.points.size() >= steepEnd + 1);
    }
}

TEST_CASE("approximation samples a linear curve at the fixed endpoints") {
    const auto params = approximate(make_curve({{0, 0}, {100, 1}}));
    REQUIRE(params.has_value());
    for (int k = 0; k < 10; ++k) {
        CHECK((*params)[k] == doctest::Approx(10.0 * (k + 1)));
    }
}

TEST_CASE("approximation interpolates a two-segment curve") {
    const auto params = approximate(make_curve({{0, 0}, {50, 0.9}, {100, 1}}));
    REQUIRE(params.has_value());
    for (int k = 0; k < 8; ++k) {
        CHECK((*params)[k] == doctest::Approx(50.0 * 0.1 * (k + 1) / 0.9));
    }
    CHECK((*params)[8] == doctest::Approx(50.0));
    CHECK((*params)[9] == doctest::Approx(100.0));
}

TEST_CASE("approximation rejects flat curves") {
    CHECK_FALSE(approximate(make_curve({{0, 5}, {10, 5}})).has_value());
    CHECK_FALSE(approximate(make_curve({{0, 5}})).has_value());
}

TEST_CASE("approximation of an exact endpoint curve recovers the parameters") {
    Rng rng(67);
    for (int trial = 0; trial < 200; ++trial) {
        PiecewiseLinearPtf::Values values{};
        Millis v = 0;
        for (auto& x : values) {
            v += rng.uniform_int(1, 300);
            x = v;
        }
        ObjectiveCurve curve;
        curve.points.push_back({0.0, 0.0});
        for (int k = 0; k < 10; ++k) {
            curve.points.push_back({static_cast<double>(values[k]), 0.1 * (k + 1)});
        }
        const auto params = approximate(curve);
        REQUIRE(params.has_value());
        for (int k = 0; k < 10; ++k) {
            CHECK(std::abs((*params)[k] - static_cast<double>(values[k])) < 1.0);
        }
    }
}

TEST_CASE("z-score normalization") {
    std::vector<TrainingObservation> rows(3);
    rows[0].features = {1.0, 7.0};
    rows[1].features = {2.0, 7.0};
    rows[2].features = {3.0, 7.0};
    const ZScore z = fit_zscore(rows);
    CHECK(z.mean[0] == doctest::Approx(2.0));
    CHECK(z.stddev[0] == doctest::Approx(1.0));  // sample deviation

    CHECK(apply_zscore(z, std::vector<double>{1.0, 7.0})[0] == doctest::Approx(-1.0));
    CHECK(apply_zscore(z, std::vector<double>{3.0, 7.0})[0] == doctest::Approx(1.0));
    // Constant feature passes through unscaled.
    CHECK(apply_zscore(z, std::vector<double>{2.0, 7.0})[1] == 7.0);
    // The training mean maps to zero.
    CHECK(apply_zscore(z, z.mean)[0] == doctest::Approx(0.0));

    CHECK_THROWS_AS(apply_zscore(z, std::vector<double>{1.0}), std::invalid_argument);
}

namespace {

TrainingObservation scaled_observation(double scale, std::vector<double> features) {
    TrainingObservation obs;
    obs.features = std::move(features);
    for (int k = 0; k < 10; ++k) obs.params[k] = scale * 10.0 * (k + 1);
    return obs;
}

}  // namespace

TEST_CASE("knn with k identical observations predicts their mean") {
    RegressionParams params;
    params.k = 3;
    std::vector<TrainingObservation> rows;
    for (double scale : {1.0, 2.0, 3.0}) rows.push_back(scaled_observation(scale, {5.0, 1.0}));
    const RegressionModel model = train(rows, params);
    REQUIRE(model.trained());
    const auto prediction = model.predict(std::vector<double>{5.0, 1.0});
    CHECK(prediction[9] == doctest::Approx(200.0));  // mean of 100, 200, 300
}

TEST_CASE("one-nearest-neighbor memorizes a stored observation") {
    RegressionParams params;
    params.k = 1;
    std::vector<TrainingObservation> rows{scaled_observation(1.0, {1.0, 0.0}),
                                          scaled_observation(5.0, {9.0, 0.0})};
    const RegressionModel model = train(rows, params);
    const auto prediction = model.predict(std::vector<double>{8.5, 0.0});
    for (int k = 0; k < 10; ++k) CHECK(prediction[k] == doctest::Approx(rows[1].params[k]));
}

TEST_CASE("a single observation suffices for one-nearest-neighbor") {
    RegressionParams params;
    params.k = 1;
    std::vector<TrainingObservation> rows{scaled_observation(2.0, {4.0})};
    const RegressionModel model = train(rows, params);
    REQUIRE(model.trained());
    const auto prediction = model.predict(std::vector<double>{100.0});
    for (int k = 0; k < 10; ++k) CHECK(prediction[k] == rows[0].params[k]);
}

TEST_CASE("training defers on too few observations") {
    RegressionParams params;
    params.k = 7;
    std::vector<TrainingObservation> rows{scaled_observation(1.0, {1.0})};
    CHECK_FALSE(train(rows, params).trained());
    CHECK_FALSE(train({}, params).trained());
}

TEST_CASE("a small regression tree stays a single leaf predicting the mean") {
    RegressionParams params;
    params.method = RegressionMethod::tree;
    std::vector<TrainingObservation> rows;
    for (double scale : {1.0, 2.0, 3.0}) {
        rows.push_back(scaled_observation(scale, {scale, 0.0}));
    }
    const RegressionModel model = train(rows, params);  // 3 < minBranch = 10
    REQUIRE(model.trained());
    CHECK(model.predict(std::vector<double>{1.0, 0.0})[9] == doctest::Approx(200.0));
    CHECK(model.predict(std::vector<double>{3.0, 0.0})[9] == doctest::Approx(200.0));
}

TEST_CASE("a regression tree separates two feature clusters") {
    RegressionParams params;
    params.method = RegressionMethod::tree;
    std::vector<TrainingObservation> rows;
    for (int i = 0; i < 10; ++i) rows.push_back(scaled_observation(1.0, {1.0 + 0.01 * i, 0.0}));
    for (int i = 0; i < 10; ++i) rows.push_back(scaled_observation(9.0, {9.0 + 0.01 * i, 0.0}));
    const RegressionModel model = train(rows, params);
    CHECK(model.predict(std::vector<double>{1.05, 0.0})[9] == doctest::Approx(100.0));
    CHECK(model.predict(std::vector<double>{9.05, 0.0})[9] == doctest::Approx(900.0));
}

TEST_CASE("estimation falls back to the linear worst-case function when untrained") {
    const RegressionModel untrained;
    const auto ptf = estimate(untrained, std::vector<double>{1.0}, 100);
    CHECK(ptf == PiecewiseLinearPtf::linear(100));
    CHECK(linear_estimate(untrained, std::vector<double>{1.0}, 100) ==
          PiecewiseLinearPtf::linear(100));
}

TEST_CASE("estimated functions always satisfy the function invariants") {
    Rng rng(71);
    RegressionParams params;
    params.k = 2;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<TrainingObservation> rows;
        for (int r = 0; r < 4; ++r) {
            TrainingObservation obs;
            obs.features = {rng.uniform(0.0, 10.0)};
            for (auto& p : obs.params) p = rng.uniform(0.0, 500.0);  // unordered on purpose
            rows.push_back(obs);
        }
        const RegressionModel model = train(rows, params);
        const auto ptf = estimate(model, std::vector<double>{rng.uniform(0.0, 10.0)}, 1000);
        Millis prev = 0;
        for (Millis v : ptf.values()) {
            CHECK(v > prev);
            prev = v;
        }
    }
}

TEST_CASE("knn estimation of a scale family keeps the median error below ten percent") {
    Rng rng(73);
    RegressionParams params;
    params.k = 7;
    std::vector<TrainingObservation> trainSet;
    for (int i = 0; i < 80; ++i) {
        const double scale = rng.uniform(1.0, 10.0);
        const double jitter = std::exp(rng.uniform(-0.05, 0.05));
        trainSet.push_back(scaled_observation(scale * jitter, {scale}));
    }
    const RegressionModel model = train(trainSet, params);

    std::vector<double> errors;
    for (int i = 0; i < 40; ++i) {
        const double scale = rng.uniform(1.5, 9.5);
        const auto truth = PiecewiseLinearPtf::from_real(scaled_observation(scale, {scale}).params);
        const auto estimated = estimate(model, std::vector<double>{scale}, 2000);
        errors.push_back(ape(truth, estimated, 1.0));
    }
    std::sort(errors.begin(), errors.end());
    CHECK(errors[errors.size() / 2] < 10.0);
}

TEST_CASE("linear estimation builds the straight line up to the predicted maximum") {
    RegressionParams params;
    params.k = 1;
    std::vector<TrainingObservation> rows{scaled_observation(1.0, {0.0})};  // max param 100
    const RegressionModel model = train(rows, params);
    REQUIRE(model.trained());
    CHECK(linear_estimate(model, std::vector<double>{0.0}, 5000) ==
          PiecewiseLinearPtf::linear(100));
}

TEST_CASE("linear estimation equals full estimation on a linear family") {
    Rng rng(79);
    RegressionParams params;
    params.k = 3;
    std::vector<TrainingObservation> trainSet;
    for (int i = 0; i < 30; ++i) {
        const double scale = rng.uniform(1.0, 10.0);
        trainSet.push_back(scaled_observation(scale, {scale}));
    }
    const RegressionModel model = train(trainSet, params);
    for (double scale : {2.0, 5.0, 8.0}) {
        const auto full = estimate(model, std::vector<double>{scale}, 2000);
        const auto linear = linear_estimate(model, std::vector<double>{scale}, 2000);
        for (int k = 0; k < 10; ++k) {
            CHECK(std::abs(full.values()[k] - linear.values()[k]) <= 1);
        }
    }
}

TEST_CASE("absolute percentage error") {
    const auto truth = PiecewiseLinearPtf::linear(100);
    CHECK(ape(truth, PiecewiseLinearPtf::linear(120), 1.0) == doctest::Approx(20.0));
    CHECK(ape(truth, truth, 0.5) == 0.0);
    const auto truth50 = PiecewiseLinearPtf::linear(50);
    CHECK(ape(truth50, PiecewiseLinearPtf::linear(40), 1.0) == doctest::Approx(20.0));
}

TEST_CASE("observation and curve files round-trip") {
    std::vector<TrainingObservation> rows{scaled_observation(1.5, {3.0, 4.0}),
                                          scaled_observation(2.5, {5.0, 6.0})};
    std::stringstream file;
    save_observations(file, rows);
    const auto loaded = load_observations(file);
    REQUIRE(loaded.size() == 2);
    CHECK(loaded[0].features == rows[0].features);
    CHECK(loaded[1].params == rows[1].params);

    const auto curve = make_curve({{1.5, 0.25}, {2.5, 0.75}});
    std::stringstream curveFile;
    save_curve(curveFile, curve);
    const auto loadedCurve = load_curve(curveFile);
    REQUIRE(loadedCurve.points.size() == 2);
    CHECK(loadedCurve.points[1].value == 0.75);
}

TEST_CASE("full pipeline produces an observation from a raw recorded curve") {
    ObjectiveCurve curve;
    curve.points.push_back({0.0, 0.0});
    for (int k = 1; k <= 10; ++k) {
        curve.points.push_back({static_cast<double>(10 * k) / 2.0, 0.1 * k});  // speed 2 wall clock
    }
    curve.points.push_back({60.0, 1.0005});  // negligible tail improvement
    const auto obs = observation_from_curve(curve, 2.0, 150, {1.0, 2.0});
    REQUIRE(obs.has_value());
    for (int k = 0; k < 10; ++k) {
        CHECK(obs->params[k] == doctest::Approx(10.0 * (k + 1)).epsilon(0.01));
    }
}
