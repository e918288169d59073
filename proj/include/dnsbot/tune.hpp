#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dnsbot/dataset.hpp"
#include "dnsbot/forest.hpp"

namespace dnsbot {

/// Ordered candidate values for each tuned hyper-parameter.
struct ParamGrids {
    std::vector<std::size_t> n_trees{10, 25, 50, 100, 150, 200};
    std::vector<std::optional<std::size_t>> max_depth{4, 8, 12, 16, 24, std::nullopt};
    std::vector<std::size_t> min_samples_split{2, 5, 10, 20};
    std::vector<FeatureSubsample> feature_subsample{FeatureSubsample::sqrt, FeatureSubsample::log2,
                                                    FeatureSubsample::all};

    std::array<std::size_t, 4> sizes() const {
        return {n_trees.size(), max_depth.size(), min_samples_split.size(), feature_subsample.size()};
    }
    bool operator==(const ParamGrids&) const = default;
};

struct GaConfig {
    std::size_t population_size = 20;
    std::size_t generations = 10;
    double crossover_rate = 0.9;
    double mutation_rate = 0.1;  ///< per gene
    std::size_t tournament_size = 3;
    std::size_t elitism_count = 1;
    std::size_t cv_folds = 5;
    std::uint64_t seed = 0;
    ParamGrids grids;
    /// Fitness runs on a stratified subsample of at most this many rows
    /// (0 disables subsampling).
    std::size_t fitness_sample_rows = 1000;
    /// Parallel fitness evaluations per generation.
    std::size_t workers = 1;

    bool operator==(const GaConfig&) const = default;
};

/// Every violated constraint, one message each; empty when valid.
std::vector<std::string> validate(const GaConfig& config);

/// Grid indices for n_trees, max_depth, min_samples_split, feature_subsample.
struct Chromosome {
    std::array<std::size_t, 4> genes{};

    auto operator<=>(const Chromosome&) const = default;
};

bool within_bounds(const Chromosome& c, const ParamGrids& grids);
HyperParams decode(const Chromosome& c, const ParamGrids& grids);
/// Inverse of decode; nullopt if a value is not on its grid.
std::optional<Chromosome> encode(const HyperParams& p, const ParamGrids& grids);

struct GenerationStats {
    double best_fitness = 0.0;
    double mean_fitness = 0.0;
};

struct TuneResult {
    HyperParams best;
    Chromosome best_chromosome;
    double best_fitness = 0.0;
    std::vector<GenerationStats> history;  ///< one entry per generation
    /// Every population, for inspection; populations[g] was scored as generation g.
    std::vector<std::vector<Chromosome>> populations;
};

/// Fold of every row: within each class, rows in index order are dealt
/// round-robin to folds 0..k-1.
std::vector<std::size_t> stratified_folds(std::span<const int> labels, std::size_t k);

/// Stratified, seeded subsample capped at config.fitness_sample_rows rows;
/// the input is returned unchanged when it is already small enough.
Dataset fitness_sample(const Dataset& train, const GaConfig& config);

/// Mean held-out macro F-score over stratified cv_folds-fold CV. Fold f
/// trains its forest with seed config.seed ^ f.
double fitness(const Chromosome& chromosome, const Dataset& train, const GaConfig& config);

using FitnessFn = std::function<double(const Chromosome&)>;

/// The genetic search itself, over an arbitrary deterministic fitness.
TuneResult evolve_with(const FitnessFn& fitness_fn, const GaConfig& config);

/// Genetic search with cross-validated forest fitness on `train`.
TuneResult evolve(const Dataset& train, const GaConfig& config);

/// `generation,best_f,mean_f` CSV.
void write_history(const TuneResult& result, std::ostream& out);

}  // namespace dnsbot
