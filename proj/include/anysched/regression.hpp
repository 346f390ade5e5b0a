#pragma once

#include <array>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "anysched/ptf.hpp"

namespace anysched {

/// One processed observation: instance features plus the ten approximated
/// endpoint processing times (in ms, real-valued).
struct TrainingObservation {
    std::vector<double> features;
    std::array<double, PiecewiseLinearPtf::kEndpoints> params{};
};

/// Per-feature z-score normalization fitted on a training set. Features with
/// zero deviation pass through unscaled.
struct ZScore {
    std::vector<double> mean;
    std::vector<double> stddev;
};

ZScore fit_zscore(std::span<const TrainingObservation> observations);
std::vector<double> apply_zscore(const ZScore& z, std::span<const double> features);

enum class RegressionMethod { knn, tree };

const char* to_string(RegressionMethod method);
RegressionMethod regression_method_from_string(const std::string& s);

struct RegressionParams {
    RegressionMethod method = RegressionMethod::knn;
    int k = 7;          // knn neighbor count (Euclidean metric)
    int minBranch = 10; // minimum observations for a tree node to split
    int minLeaf = 1;    // minimum observations per leaf
};

/// One independent submodel per quality endpoint, sharing the feature
/// normalization. An untrained model signals the caller to fall back to the
/// worst-case linear function.
class RegressionModel {
public:
    RegressionModel() = default;

    bool trained() const { return trained_; }
    const RegressionParams& params() const { return params_; }

    // Raw per-endpoint predictions (no monotonic correction).
    std::array<double, PiecewiseLinearPtf::kEndpoints> predict(
        std::span<const double> features) const;
    double predict_endpoint(std::span<const double> features, int endpoint) const;

    struct TreeNode {
        int feature = -1;      // -1 marks a leaf
        double threshold = 0.0;
        double value = 0.0;    // leaf prediction
        int left = -1;
        int right = -1;
    };

private:
    friend RegressionModel train(std::span<const TrainingObservation>, const RegressionParams&);

    std::vector<double> knn_vote(std::span<const double> normalized) const;
    double tree_predict(int endpoint, std::span<const double> normalized) const;

    bool trained_ = false;
    RegressionParams params_;
    ZScore zscore_;
    // knn storage
    std::vector<std::vector<double>> trainFeatures_;  // normalized
    std::vector<std::array<double, PiecewiseLinearPtf::kEndpoints>> trainParams_;
    // one tree per endpoint
    std::array<std::vector<TreeNode>, PiecewiseLinearPtf::kEndpoints> trees_;
};

// Trains per-endpoint submodels. Returns an untrained model when the
// observation set is too small (fewer than k for knn, empty for trees).
RegressionModel train(std::span<const TrainingObservation> observations,
                      const RegressionParams& params);

}  // namespace anysched
