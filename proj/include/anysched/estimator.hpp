#pragma once

#include <iosfwd>
#include <optional>

#include "anysched/regression.hpp"
#include "anysched/types.hpp"

namespace anysched {

struct CurvePoint {
    double time = 0.0;   // ms (normalized after ingestion)
    double value = 0.0;  // raw objective value, increasing
};

/// Recorded progress of the best-known objective value over processing time.
/// Times and values are strictly increasing.
struct ObjectiveCurve {
    std::vector<CurvePoint> points;
};

// Rescales the recorded wall-clock times to normalized processing time by
// the resource speed and drops points beyond the worst-case processing time.
// Returns nothing when no points survive; the observation is then discarded.
std::optional<ObjectiveCurve> ingest_curve(const ObjectiveCurve& curve, double resourceSpeed,
                                           Millis wct);

// Tail cutting: keeps the prefix through the endpoint of the last segment
// whose slope exceeds 5% of the steepest slope. Curves with fewer than two
// points are returned unchanged.
ObjectiveCurve trim_tail(const ObjectiveCurve& curve);

// Min-max normalizes the objective values to [0, 1] and samples the curve at
// the fixed quality endpoints 0.1, 0.2, ..., 1.0 with linear interpolation,
// nudging ties apart by 1 ms. Returns nothing for degenerate flat curves.
std::optional<std::array<double, PiecewiseLinearPtf::kEndpoints>> approximate(
    const ObjectiveCurve& curve);

// Full pipeline from a raw recorded curve to a training observation.
std::optional<TrainingObservation> observation_from_curve(const ObjectiveCurve& curve,
                                                          double resourceSpeed, Millis wct,
                                                          std::vector<double> features);

struct EstimatorOptions {
    Millis minProcessingMs = 1;  // floor for estimated processing times
};

// Estimated processing time function for unseen features: per-endpoint
// predictions combined with a running maximum, rounded to ms. Falls back to
// the linear worst-case function while the model is untrained.
PiecewiseLinearPtf estimate(const RegressionModel& model, std::span<const double> features,
                            Millis wct, const EstimatorOptions& options = {});

// Single-endpoint variant: only the full-quality processing time is
// estimated and the function is linear up to it.
PiecewiseLinearPtf linear_estimate(const RegressionModel& model, std::span<const double> features,
                                   Millis wct, const EstimatorOptions& options = {});

// Absolute percentage error between the two functions at quality q.
double ape(const PiecewiseLinearPtf& truth, const PiecewiseLinearPtf& estimated, double q);

// Observation store: one row per observation, feature values followed by the
// ten endpoint parameters, space separated. featureDim 0 infers the
// dimension from the first row.
void save_observations(std::ostream& out, std::span<const TrainingObservation> observations);
std::vector<TrainingObservation> load_observations(std::istream& in, std::size_t featureDim = 0);

// Curve import: rows of (time_ms, objective_value).
void save_curve(std::ostream& out, const ObjectiveCurve& curve);
ObjectiveCurve load_curve(std::istream& in);

}  // namespace anysched
