#pragma once

#include <array>
#include <cstdint>

namespace anysched {

using Millis = std::int64_t;

/// Normalized processing time as a function of solution quality.
///
/// The function is piecewise linear with endpoints at qualities
/// 0.1, 0.2, ..., 1.0; the stored values are the processing times in
/// integer milliseconds at those endpoints. Below quality 0.1 the function
/// falls linearly to the origin. Values are strictly increasing and >= 1.
class PiecewiseLinearPtf {
public:
    static constexpr int kEndpoints = 10;
    using Values = std::array<Millis, kEndpoints>;

    // Minimal valid function: 1, 2, ..., 10 ms.
    PiecewiseLinearPtf();

    // Throws std::invalid_argument unless strictly increasing and >= 1.
    explicit PiecewiseLinearPtf(const Values& values);

    // Endpoints on the straight line from the origin to (1, maxValue).
    static PiecewiseLinearPtf linear(Millis maxValue);

    // Builds a valid function from raw real-valued endpoint predictions:
    // running maximum, rounding to ms, floor at floorMs, then +1 ms nudges
    // to restore strict increase.
    static PiecewiseLinearPtf from_real(const std::array<double, kEndpoints>& raw,
                                        Millis floorMs = 1);

    // Processing time for quality q, rounded up to whole ms (minimum 1).
    // Throws std::domain_error outside [0, 1].
    Millis eval(double q) const;

    // Largest quality whose continuous processing time does not exceed the
    // given amount of work; clamped to [0, 1].
    double invert(double work) const;

    Millis max_value() const { return values_.back(); }
    const Values& values() const { return values_; }

    bool operator==(const PiecewiseLinearPtf&) const = default;

private:
    Values values_;
};

}  // namespace anysched
