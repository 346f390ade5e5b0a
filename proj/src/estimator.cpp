#include "anysched/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace anysched {

std::optional<ObjectiveCurve> ingest_curve(const ObjectiveCurve& curve, double resourceSpeed,
                                           Millis wct) {
    ObjectiveCurve out;
    out.points.reserve(curve.points.size());
    for (const CurvePoint& p : curve.points) {
        const double normalizedTime = p.time * resourceSpeed;
        if (normalizedTime > static_cast<double>(wct)) continue;
        out.points.push_back({normalizedTime, p.value});
    }
    if (out.points.empty()) return std::nullopt;
    return out;
}

ObjectiveCurve trim_tail(const ObjectiveCurve& curve) {
    if (curve.points.size() < 2) return curve;
    const std::size_t numSlopes = curve.points.size() - 1;
    std::vector<double> slopes(numSlopes);
    double maxSlope = 0.0;
    for (std::size_t k = 0; k < numSlopes; ++k) {
        slopes[k] = (curve.points[k + 1].value - curve.points[k].value) /
                    (curve.points[k + 1].time - curve.points[k].time);
        maxSlope = std::max(maxSlope, slopes[k]);
    }
    const double threshold = 0.05 * maxSlope;
    std::size_t lastKept = 0;
    for (std::size_t k = 0; k < numSlopes; ++k) {
        if (slopes[k] > threshold) lastKept = k + 1;
    }
    ObjectiveCurve out;
    out.points.assign(curve.points.begin(),
                      curve.points.begin() + static_cast<std::ptrdiff_t>(lastKept + 1));
    return out;
}

std::optional<std::array<double, PiecewiseLinearPtf::kEndpoints>> approximate(
    const ObjectiveCurve& curve) {
    if (curve.points.size() < 2) return std::nullopt;
    const double vMin = curve.points.front().value;
    const double vMax = curve.points.back().value;
    if (!(vMax > vMin)) return std::nullopt;  // flat curve, nothing to learn

    std::array<double, PiecewiseLinearPtf::kEndpoints> params{};
    std::size_t k = 0;  // index of the first point with normalized value >= q
    for (int e = 0; e < PiecewiseLinearPtf::kEndpoints; ++e) {
        const double q = 0.1 * (e + 1);
        auto rho = [&](std::size_t idx) {
            return (curve.points[idx].value - vMin) / (vMax - vMin);
        };
        while (k < curve.points.size() && rho(k) < q) ++k;
        double time;
        if (k >= curve.points.size()) {
            time = curve.points.back().time;  // q slightly above 1 from rounding
        } else if (k == 0) {
            time = curve.points[0].time;
        } else {
            const double r0 = rho(k - 1);
            const double r1 = rho(k);
            const double frac = (q - r0) / (r1 - r0);
            time = curve.points[k - 1].time +
                   frac * (curve.points[k].time - curve.points[k - 1].time);
        }
        params[e] = time;
        if (e > 0 && params[e] <= params[e - 1]) params[e] = params[e - 1] + 1.0;
    }
    return params;
}

std::optional<TrainingObservation> observation_from_curve(const ObjectiveCurve& curve,
                                                          double resourceSpeed, Millis wct,
                                                          std::vector<double> features) {
    const auto normalized = ingest_curve(curve, resourceSpeed, wct);
    if (!normalized) return std::nullopt;
    const auto params = approximate(trim_tail(*normalized));
    if (!params) return std::nullopt;
    TrainingObservation obs;
    obs.features = std::move(features);
    obs.params = *params;
    return obs;
}

PiecewiseLinearPtf estimate(const RegressionModel& model, std::span<const double> features,
                            Millis wct, const EstimatorOptions& options) {
    if (!model.trained()) return PiecewiseLinearPtf::linear(wct);
    return PiecewiseLinearPtf::from_real(model.predict(features), options.minProcessingMs);
}

PiecewiseLinearPtf linear_estimate(const RegressionModel& model, std::span<const double> features,
                                   Millis wct, const EstimatorOptions& options) {
    if (!model.trained()) return PiecewiseLinearPtf::linear(wct);
    const double maxEstimate =
        model.predict_endpoint(features, PiecewiseLinearPtf::kEndpoints - 1);
    const Millis maxMs =
        std::max(options.minProcessingMs, static_cast<Millis>(std::llround(maxEstimate)));
    return PiecewiseLinearPtf::linear(std::max<Millis>(maxMs, 1));
}

double ape(const PiecewiseLinearPtf& truth, const PiecewiseLinearPtf& estimated, double q) {
    const auto trueValue = static_cast<double>(truth.eval(q));
    const auto estValue = static_cast<double>(estimated.eval(q));
    return std::abs(estValue - trueValue) / trueValue * 100.0;
}

void save_observations(std::ostream& out, std::span<const TrainingObservation> observations) {
    out.precision(17);
    for (const auto& obs : observations) {
        bool first = true;
        for (double f : obs.features) {
            if (!first) out << ' ';
            out << f;
            first = false;
        }
        for (double p : obs.params) out << ' ' << p;
        out << '\n';
    }
}

std::vector<TrainingObservation> load_observations(std::istream& in, std::size_t featureDim) {
    std::vector<TrainingObservation> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (featureDim == 0) {
            // Infer the feature dimension from the first row.
            std::istringstream counter(line);
            double ignored;
            std::size_t columns = 0;
            while (counter >> ignored) ++columns;
            if (columns <= PiecewiseLinearPtf::kEndpoints) {
                throw std::runtime_error("observation row too short: " + line);
            }
            featureDim = columns - PiecewiseLinearPtf::kEndpoints;
        }
        std::istringstream row(line);
        TrainingObservation obs;
        obs.features.resize(featureDim);
        for (double& f : obs.features) {
            if (!(row >> f)) throw std::runtime_error("bad observation row: " + line);
        }
        for (double& p : obs.params) {
            if (!(row >> p)) throw std::runtime_error("bad observation row: " + line);
        }
        out.push_back(std::move(obs));
    }
    return out;
}

void save_curve(std::ostream& out, const ObjectiveCurve& curve) {
    out.precision(17);
    for (const CurvePoint& p : curve.points) out << p.time << ' ' << p.value << '\n';
}

ObjectiveCurve load_curve(std::istream& in) {
    ObjectiveCurve curve;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream row(line);
        CurvePoint p;
        if (!(row >> p.time >> p.value)) throw std::runtime_error("bad curve row: " + line);
        curve.points.push_back(p);
    }
    return curve;
}

}  // namespace anysched
