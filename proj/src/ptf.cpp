#include "anysched/ptf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace anysched {

PiecewiseLinearPtf::PiecewiseLinearPtf() {
    for (int k = 0; k < kEndpoints; ++k) values_[k] = k + 1;
}

PiecewiseLinearPtf::PiecewiseLinearPtf(const Values& values) : values_(values) {
    Millis prev = 0;
    for (Millis v : values_) {
        if (v <= prev) throw std::invalid_argument("ptf values must be strictly increasing and >= 1");
        prev = v;
    }
}

PiecewiseLinearPtf PiecewiseLinearPtf::linear(Millis maxValue) {
    std::array<double, kEndpoints> raw{};
    for (int k = 0; k < kEndpoints; ++k) {
        raw[k] = static_cast<double>(maxValue) * (k + 1) / 10.0;
    }
    return from_real(raw);
}

PiecewiseLinearPtf PiecewiseLinearPtf::from_real(const std::array<double, kEndpoints>& raw,
                                                 Millis floorMs) {
    Values v{};
    double runningMax = 0.0;
    for (int k = 0; k < kEndpoints; ++k) {
        runningMax = std::max(runningMax, raw[k]);
        Millis r = std::llround(runningMax);
        r = std::max<Millis>({r, floorMs, 1});
        if (k > 0 && r <= v[k - 1]) r = v[k - 1] + 1;
        v[k] = r;
    }
    return PiecewiseLinearPtf(v);
}

Millis PiecewiseLinearPtf::eval(double q) const {
    if (!(q >= 0.0 && q <= 1.0)) throw std::domain_error("quality outside [0, 1]");
    const double pos = q * 10.0;
    const int k = std::min(static_cast<int>(pos), kEndpoints - 1);
    const double lo = (k == 0) ? 0.0 : static_cast<double>(values_[k - 1]);
    const double hi = static_cast<double>(values_[k]);
    const double value = lo + (pos - k) * (hi - lo);
    // Tiny slack keeps exact endpoint evaluations from ceiling one ms up.
    const auto result = static_cast<Millis>(std::ceil(value - 1e-9));
    return std::max<Millis>(1, result);
}

double PiecewiseLinearPtf::invert(double work) const {
    if (work >= static_cast<double>(values_.back())) return 1.0;
    if (work <= 0.0) return 0.0;
    double prev = 0.0;
    for (int k = 0; k < kEndpoints; ++k) {
        const double hi = static_cast<double>(values_[k]);
        if (work <= hi) {
            const double frac = (hi > prev) ? (work - prev) / (hi - prev) : 1.0;
            return (k + frac) * 0.1;
        }
        prev = hi;
    }
    return 1.0;
}

}  // namespace anysched
