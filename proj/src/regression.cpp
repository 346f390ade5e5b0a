#include "anysched/regression.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace anysched {

ZScore fit_zscore(std::span<const TrainingObservation> observations) {
    if (observations.size() < 2) throw std::invalid_argument("z-score needs at least 2 rows");
    const std::size_t d = observations[0].features.size();
    ZScore z{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
    for (const auto& obs : observations) {
        if (obs.features.size() != d) throw std::invalid_argument("feature dimension mismatch");
        for (std::size_t f = 0; f < d; ++f) z.mean[f] += obs.features[f];
    }
    for (double& m : z.mean) m /= static_cast<double>(observations.size());
    for (const auto& obs : observations) {
        for (std::size_t f = 0; f < d; ++f) {
            const double delta = obs.features[f] - z.mean[f];
            z.stddev[f] += delta * delta;
        }
    }
    for (double& s : z.stddev) {
        s = std::sqrt(s / static_cast<double>(observations.size() - 1));
    }
    return z;
}

std::vector<double> apply_zscore(const ZScore& z, std::span<const double> features) {
    if (features.size() != z.mean.size()) throw std::invalid_argument("feature dimension mismatch");
    std::vector<double> out(features.size());
    for (std::size_t f = 0; f < features.size(); ++f) {
        out[f] = (z.stddev[f] > 0.0) ? (features[f] - z.mean[f]) / z.stddev[f] : features[f];
    }
    return out;
}

const char* to_string(RegressionMethod method) {
    return method == RegressionMethod::knn ? "knn" : "tree";
}

RegressionMethod regression_method_from_string(const std::string& s) {
    if (s == "knn") return RegressionMethod::knn;
    if (s == "tree") return RegressionMethod::tree;
    throw std::invalid_argument("unknown regression method: " + s);
}

namespace {

// CART-style axis-aligned splitting on squared error.
struct TreeBuilder {
    const std::vector<std::vector<double>>& features;
    const std::vector<double>& targets;
    int minBranch;
    int minLeaf;
    std::vector<RegressionModel::TreeNode>* nodes;

    int build(std::vector<int> rows) {
        const int id = static_cast<int>(nodes->size());
        nodes->push_back({});
        double mean = 0.0;
        for (int r : rows) mean += targets[r];
        mean /= static_cast<double>(rows.size());
        (*nodes)[id].value = mean;

        if (static_cast<int>(rows.size()) < minBranch) return id;

        const std::size_t d = features[rows[0]].size();
        double bestGain = 0.0;
        int bestFeature = -1;
        double bestThreshold = 0.0;

        double total = 0.0, totalSq = 0.0;
        for (int r : rows) {
            total += targets[r];
            totalSq += targets[r] * targets[r];
        }
        const double parentSse = totalSq - total * total / static_cast<double>(rows.size());

        for (std::size_t f = 0; f < d; ++f) {
            std::sort(rows.begin(), rows.end(), [&](int a, int b) {
                return features[a][f] < features[b][f];
            });
            double leftSum = 0.0, leftSq = 0.0;
            for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
                const double y = targets[rows[k]];
                leftSum += y;
                leftSq += y * y;
                const auto nl = static_cast<double>(k + 1);
                const auto nr = static_cast<double>(rows.size() - k - 1);
                if (nl < minLeaf || nr < minLeaf) continue;
                // No valid split between equal feature values.
                if (features[rows[k]][f] == features[rows[k + 1]][f]) continue;
                const double rightSum = total - leftSum;
                const double rightSq = totalSq - leftSq;
                const double sse = (leftSq - leftSum * leftSum / nl) +
                                   (rightSq - rightSum * rightSum / nr);
                const double gain = parentSse - sse;
                if (gain > bestGain) {
                    bestGain = gain;
                    bestFeature = static_cast<int>(f);
                    bestThreshold = 0.5 * (features[rows[k]][f] + features[rows[k + 1]][f]);
                }
            }
        }
        if (bestFeature < 0) return id;

        std::vector<int> left, right;
        for (int r : rows) {
            (features[r][static_cast<std::size_t>(bestFeature)] <= bestThreshold ? left : right)
                .push_back(r);
        }
        (*nodes)[id].feature = bestFeature;
        (*nodes)[id].threshold = bestThreshold;
        const int l = build(std::move(left));
        const int r = build(std::move(right));
        (*nodes)[id].left = l;
        (*nodes)[id].right = r;
        return id;
    }
};

}  // namespace

std::vector<double> RegressionModel::knn_vote(std::span<const double> normalized) const {
    std::vector<std::pair<double, std::size_t>> byDistance(trainFeatures_.size());
    for (std::size_t r = 0; r < trainFeatures_.size(); ++r) {
        double dist = 0.0;
        for (std::size_t f = 0; f < normalized.size(); ++f) {
            const double delta = trainFeatures_[r][f] - normalized[f];
            dist += delta * delta;
        }
        byDistance[r] = {dist, r};
    }
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(params_.k), byDistance.size());
    std::partial_sort(byDistance.begin(), byDistance.begin() + static_cast<std::ptrdiff_t>(k),
                      byDistance.end());
    std::vector<double> out(PiecewiseLinearPtf::kEndpoints, 0.0);
    for (std::size_t n = 0; n < k; ++n) {
        const auto& params = trainParams_[byDistance[n].second];
        for (int e = 0; e < PiecewiseLinearPtf::kEndpoints; ++e) out[e] += params[e];
    }
    for (double& v : out) v /= static_cast<double>(k);
    return out;
}

double RegressionModel::tree_predict(int endpoint, std::span<const double> normalized) const {
    const auto& nodes = trees_[endpoint];
    int id = 0;
    while (nodes[id].feature >= 0) {
        id = normalized[static_cast<std::size_t>(nodes[id].feature)] <= nodes[id].threshold
                 ? nodes[id].left
                 : nodes[id].right;
    }
    return nodes[id].value;
}

std::array<double, PiecewiseLinearPtf::kEndpoints> RegressionModel::predict(
    std::span<const double> features) const {
    if (!trained_) throw std::logic_error("predict on untrained model");
    const std::vector<double> normalized = apply_zscore(zscore_, features);
    std::array<double, PiecewiseLinearPtf::kEndpoints> out{};
    if (params_.method == RegressionMethod::knn) {
        const std::vector<double> vote = knn_vote(normalized);
        std::copy(vote.begin(), vote.end(), out.begin());
    } else {
        for (int e = 0; e < PiecewiseLinearPtf::kEndpoints; ++e) {
            out[e] = tree_predict(e, normalized);
        }
    }
    return out;
}

double RegressionModel::predict_endpoint(std::span<const double> features, int endpoint) const {
    return predict(features)[endpoint];
}

RegressionModel train(std::span<const TrainingObservation> observations,
                      const RegressionParams& params) {
    RegressionModel model;
    model.params_ = params;
    const std::size_t minimum =
        params.method == RegressionMethod::knn ? static_cast<std::size_t>(params.k) : 1;
    if (observations.size() < std::max<std::size_t>(minimum, 1)) {
        return model;  // training deferred; caller falls back
    }

    if (observations.size() >= 2) {
        model.zscore_ = fit_zscore(observations);
    } else {
        // A single observation cannot be normalized; pass features through.
        const std::size_t d = observations[0].features.size();
        model.zscore_ = ZScore{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
    }
    model.trainFeatures_.reserve(observations.size());
    model.trainParams_.reserve(observations.size());
    for (const auto& obs : observations) {
        model.trainFeatures_.push_back(apply_zscore(model.zscore_, obs.features));
        model.trainParams_.push_back(obs.params);
    }

    if (params.method == RegressionMethod::tree) {
        std::vector<int> rows(observations.size());
        std::iota(rows.begin(), rows.end(), 0);
        for (int e = 0; e < PiecewiseLinearPtf::kEndpoints; ++e) {
            std::vector<double> targets(observations.size());
            for (std::size_t r = 0; r < observations.size(); ++r) {
                targets[r] = observations[r].params[static_cast<std::size_t>(e)];
            }
            TreeBuilder builder{model.trainFeatures_, targets, params.minBranch, params.minLeaf,
                                &model.trees_[e]};
            builder.build(rows);
        }
    }
    model.trained_ = true;
    return model;
}

}  // namespace anysched
