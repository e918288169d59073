#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dnsbot/config.hpp"
#include "dnsbot/dataset.hpp"
#include "dnsbot/eval.hpp"
#include "dnsbot/forest.hpp"
#include "dnsbot/preprocess.hpp"
#include "dnsbot/select.hpp"
#include "dnsbot/tune.hpp"

namespace dnsbot {

struct TrainTestSplit {
    std::vector<std::size_t> train;  ///< ascending row indices
    std::vector<std::size_t> test;
};

/// Seeded stratified split: round(test_fraction * n_c) rows of each class go to test.
TrainTestSplit stratified_split(std::span<const int> labels, double test_fraction, std::uint64_t seed);

/// Row keys seen by each data-dependent stage of a run.
struct PipelineAudit {
    std::set<RowKey> test;
    std::set<RowKey> normalization;
    std::set<RowKey> ranking;
    std::set<RowKey> smote;
    std::set<RowKey> fitness;

    /// Test keys that reached any fitting stage; empty for a clean run.
    std::set<RowKey> leaked() const;
};

/// Training data after normalization, selection and oversampling.
struct PreparedTrain {
    NormalizationParams normalization;  ///< restricted to the selected features
    std::optional<FeatureRanking> ranking;
    Dataset data;
};

/// Stages 1 and 2 on a raw training set. Baseline mode normalizes only.
PreparedTrain prepare_train(const Dataset& raw_train, const RunConfig& config, bool baseline,
                            PipelineAudit* audit = nullptr);

/// Trains the forest on prepared data and attaches its normalization.
ForestModel fit_model(const PreparedTrain& prepared, const HyperParams& params, std::uint64_t seed,
                      std::size_t workers);

/// GA configuration a run actually uses (seed and workers from the run).
GaConfig effective_ga(const RunConfig& config);

struct PipelineResult {
    ForestModel model;
    EvalReport report;
    std::optional<FeatureRanking> ranking;
    std::optional<TuneResult> tuning;
    TrainTestSplit split;
    std::size_t features_in = 0;
    std::size_t features_out = 0;
    PipelineAudit audit;

    /// Fractional reduction of the feature count, e.g. 0.6 for 25 -> 10.
    double feature_reduction() const;
};

struct PipelineOptions {
    bool baseline = false;
};

/// Split, prepare the train part, tune, train and evaluate on the untouched test part.
PipelineResult run_pipeline(const Dataset& labeled, const RunConfig& config, const PipelineOptions& options = {});

/// Writes model, report, ranking, history and split files into `dir`.
void write_artifacts(const PipelineResult& result, const Dataset& labeled, const RunConfig& config,
                     const std::string& dir);

}  // namespace dnsbot
