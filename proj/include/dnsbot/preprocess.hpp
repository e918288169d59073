#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "dnsbot/dataset.hpp"

namespace dnsbot {

/// Per-column mean and population standard deviation.
struct NormalizationParams {
    std::vector<std::string> feature_names;
    std::vector<double> means;
    std::vector<double> stds;

    bool operator==(const NormalizationParams&) const = default;
};

/// Fits column means and population stds (divide by M). Throws on M = 0.
NormalizationParams zscore_fit(const Dataset& dataset);

/// Maps x to (x - mean) / std per column; zero-variance columns become 0.
/// Throws InvalidArgument when the feature names differ.
Dataset zscore_apply(const Dataset& dataset, const NormalizationParams& params);

/// Same transform applied in place to one row.
void zscore_apply_row(std::span<double> row, const NormalizationParams& params);

/// Restricts fitted params to the named features, in that order.
NormalizationParams select_params(const NormalizationParams& params,
                                  std::span<const std::string> names);

struct SmoteConfig {
    std::size_t k = 5;
    double target_ratio = 1.0;  ///< minority / majority after oversampling
    std::uint64_t seed = 0;
};

/// Provenance of one synthetic row: it was interpolated from `origin`
/// toward `neighbor` by `delta`. Indices refer to the input dataset.
struct SyntheticOrigin {
    std::size_t origin = 0;
    std::size_t neighbor = 0;
    double delta = 0.0;
};

struct SmoteResult {
    Dataset dataset;
    std::vector<SyntheticOrigin> origins;  ///< one per appended row
    int minority_label = kMalicious;
};

/// Number of minority rows needed so that minority / majority >= ratio.
std::size_t smote_target_count(std::size_t majority, double ratio);

/// SMOTE oversampling with full provenance of every synthetic row.
SmoteResult smote_detailed(const Dataset& dataset, const SmoteConfig& config);

/// SMOTE oversampling: original rows first, synthetic minority rows appended.
Dataset smote(const Dataset& dataset, const SmoteConfig& config);

}  // namespace dnsbot
